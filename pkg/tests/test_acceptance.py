"""Acceptance gate: the twelve primary criteria at their stated tolerances.

Each test prints one PASS/FAIL line (also collected into the terminal summary).
"""
import os
import subprocess
import sys

import pytest

from pncsim import validate
from pncsim.validate import Check

from conftest import ACCEPTANCE_LINES


def _gate(number, check):
    line = f"criterion {number:2d} {check.line()}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert check.passed, line


def test_01_linear_msue_is_noise_power():
    _gate(1, validate.check_linear_msue())


def test_02_synchronized_forms_match_general_estimators():
    _gate(2, validate.check_sync_equivalence())


def test_03_mmse_pncf_never_worse_than_map():
    _gate(3, validate.check_mmse_pncf_dominates_map())


def test_04_mmse_pnci_msue_bounded_by_two():
    _gate(4, validate.check_mmse_pnci_msue_bound())


def test_05_map_closed_form_matches_measurement():
    _gate(5, validate.check_map_closed_form())


def test_06_destination_gsnr_prediction():
    _gate(6, validate.check_destination_gsnr())


def test_07_uplink_crossover():
    _gate(7, validate.check_uplink_crossover())


def test_08_downlink_ordering():
    _gate(8, validate.check_downlink_crossover())


def test_09_gsnr_ber_rank_correlation():
    _gate(9, validate.check_gsnr_ber_rank())


def test_10_linear_pnci_phase_invariance():
    _gate(10, validate.check_linear_phase_invariance())


def test_11_mmse_local_optimality():
    _gate(11, validate.check_mmse_local_optimality())


def _cli_sweep(threads):
    env = dict(os.environ, PNCSIM_THREADS=str(threads))
    r = subprocess.run([sys.executable, "-m", "pncsim.cli", "sweep", "--preset", "fig3", "--seed", "7"],
                       capture_output=True, env=env, check=True)
    return r.stdout


def test_12_sweep_output_is_deterministic():
    a = _cli_sweep(1)
    b = _cli_sweep(4)
    _gate(12, Check("deterministic fig3 CSV (CLI, PNCSIM_THREADS 1 vs 4)", a == b,
                    f"{len(a)} bytes, identical={a == b}", "byte-identical"))
