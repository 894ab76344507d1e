import importlib
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pncsim import kernels, relay
from pncsim import _kernels_py
from pncsim.channel import ChannelState, snr_to_coeff, uplink
from pncsim.relay import SchemeId
from pncsim.signal import ALPHABET, RandomStream, draw_symbols, is_qpsk

coeff = st.complex_numbers(min_magnitude=0.2, max_magnitude=4, allow_nan=False, allow_infinity=False)
sample = st.complex_numbers(max_magnitude=12, allow_nan=False, allow_infinity=False)

# brute-force values over the 16 hypotheses, computed in 30-digit arithmetic
ORACLE_Y = 0.3 - 1.2j
ORACLE_H13 = 1.2 + 0.4j
ORACLE_H23 = -0.3 + 0.9j
ORACLE_PNCF = 0.00741559097532874 + 0.00608663992552679j
ORACLE_PNCI = 0.250464630316649 - 0.901728572015385j


def test_scheme_parse():
    assert SchemeId.parse("mmse-pnci") is SchemeId.MMSE_PNCI
    assert SchemeId.parse(SchemeId.MAP_PNCF) is SchemeId.MAP_PNCF
    assert SchemeId.MMSE_PNCF.is_pncf and SchemeId.MMSE_PNCF.is_mmse
    assert not SchemeId.LINEAR_PNCI.is_pncf and not SchemeId.LINEAR_PNCI.is_mmse
    with pytest.raises(ValueError):
        SchemeId.parse("af")


def test_map_examples():
    assert relay.map_pncf(0.5 + 0.5j, 1, 0.5) == -1 - 1j
    assert relay.map_pncf(0, 1, 1) == -1 - 1j
    assert relay.map_pncf(2 + 2j, 1, 1) == 1 + 1j
    assert relay.map_pncf(ORACLE_Y, ORACLE_H13, ORACLE_H23) == 1 - 1j


def test_mmse_pncf_examples():
    t = math.tanh(1.0)
    assert relay.mmse_pncf_posterior_mean(0, 1, 1) == pytest.approx(-0.76159416 * (1 + 1j), abs=1e-7)
    assert relay.mmse_pncf_posterior_mean(0, 1, 1) == pytest.approx(-t * (1 + 1j))
    assert relay.mmse_pncf_posterior_mean(0.5 + 0.5j, 1, 0.5) == pytest.approx(-0.36819365 * (1 + 1j), abs=1e-7)
    assert relay.mmse_pncf_posterior_mean(ORACLE_Y, ORACLE_H13, ORACLE_H23) == pytest.approx(ORACLE_PNCF, abs=1e-12)


def test_mmse_pnci_examples():
    assert relay.mmse_pnci_posterior_mean(2 + 2j, 1, 1) == pytest.approx(1.5730288 * (1 + 1j), abs=1e-7)
    assert relay.mmse_pnci_posterior_mean(0, 1, 1) == pytest.approx(0, abs=1e-12)
    assert relay.mmse_pnci_posterior_mean(0.5 + 0.5j, 1, 0.5) == pytest.approx(0.38474240 * (1 + 1j), abs=1e-7)
    assert relay.mmse_pnci_posterior_mean(ORACLE_Y, ORACLE_H13, ORACLE_H23) == pytest.approx(ORACLE_PNCI, abs=1e-12)


def test_pair_likelihood_is_gaussian_of_residual():
    v = relay.pair_likelihood(0.5 + 0.5j, 1, 0.5, 1, 1, 1, 1)
    assert v == pytest.approx(math.exp(-abs(0.5 + 0.5j - 1.5 - 1.5j) ** 2 / 2) / (2 * math.pi))


def test_sync_forms_examples():
    assert relay.mmse_pncf_sync(0, 1) == pytest.approx(-0.38079708 * (1 + 1j), abs=1e-7)
    assert relay.mmse_pnci_sync(2 + 2j, 1) == pytest.approx(1.5730288 * (1 + 1j), abs=1e-7)
    assert relay.map_pncf_sync(0.5 + 0.5j, 1) == -1 - 1j
    assert relay.map_pncf_sync(2 + 2j, 1) == 1 + 1j


@given(sample, st.floats(0.2, 4))
def test_sync_forms_match_general_estimators(y, h0):
    assert relay.map_pncf_sync(y, h0) == relay.map_pncf(y, h0, h0)
    assert relay.mmse_pncf_sync(y, h0) == pytest.approx(0.5 * relay.mmse_pncf_posterior_mean(y, h0, h0), abs=1e-12)
    assert relay.mmse_pnci_sync(y, h0) == pytest.approx(relay.mmse_pnci_posterior_mean(y, h0, h0) / h0, abs=1e-10)


def test_sync_forms_stable_for_large_samples():
    v = relay.mmse_pncf_sync(1e4 + 1e4j, 10.0)
    assert np.isfinite(v) and v == pytest.approx(0.5 + 0.5j)
    assert relay.map_pncf_sync(1e4 - 1e4j, 10.0) == 1 + 1j


def test_linear_gain():
    assert relay.linear_pnci_gain(1, 1) == pytest.approx(0.57735027)
    assert relay.linear_pnci_gain(1, 1, "paper_printed") == pytest.approx(math.sqrt(2 / 5))
    assert relay.linear_pnci(1 + 0j, 1, 1) == pytest.approx(0.57735027)
    with pytest.raises(KeyError):
        relay.linear_pnci_gain(1, 1, "other")


def test_linear_empirical_gain_matches_closed_form():
    rng = RandomStream(0, "lin")
    h = snr_to_coeff(5.0)
    cs = ChannelState(h, h, 1, 1)
    y = uplink(draw_symbols(rng, 10 ** 6), draw_symbols(rng, 10 ** 6), cs, rng)
    out = relay.relay_map(SchemeId.LINEAR_PNCI, y, cs)
    assert out.norm_gain == pytest.approx(relay.linear_pnci_gain(h, h), rel=0.01)


def test_normalize_packet():
    scaled, g = relay.normalize_packet(np.array([1 + 1j, -1 - 1j]))
    assert g == pytest.approx(1.0)
    scaled, g = relay.normalize_packet(np.array([3 + 0j, 0j]))
    assert np.mean(np.abs(scaled) ** 2) == pytest.approx(2.0)
    assert g == pytest.approx(math.sqrt(2 / 4.5))
    with pytest.raises(ValueError):
        relay.normalize_packet(np.zeros(4, complex))
    with pytest.raises(ValueError):
        relay.normalize_packet(np.array([], complex))


@settings(max_examples=50)
@given(sample, coeff, coeff, st.floats(-math.pi, math.pi))
def test_map_invariant_to_common_phase(y, h13, h23, theta):
    rot = np.exp(1j * theta)
    assert relay.map_pncf(y * rot, h13 * rot, h23 * rot) == relay.map_pncf(y, h13, h23)


@settings(max_examples=50)
@given(sample, coeff, coeff, st.floats(-math.pi, math.pi))
def test_posterior_means_covariance(y, h13, h23, theta):
    rot = np.exp(1j * theta)
    assert relay.mmse_pncf_posterior_mean(y * rot, h13 * rot, h23 * rot) == pytest.approx(
        relay.mmse_pncf_posterior_mean(y, h13, h23), abs=1e-9)
    assert relay.mmse_pnci_posterior_mean(y * rot, h13 * rot, h23 * rot) == pytest.approx(
        rot * relay.mmse_pnci_posterior_mean(y, h13, h23), abs=1e-9)


@settings(max_examples=50)
@given(sample, coeff, coeff)
def test_estimator_bounds(y, h13, h23):
    f = relay.mmse_pncf_posterior_mean(y, h13, h23)
    assert abs(f.real) <= 1 + 1e-12 and abs(f.imag) <= 1 + 1e-12
    i = relay.mmse_pnci_posterior_mean(y, h13, h23)
    # the mean lies in the convex hull of the 16 noiseless points
    assert abs(i) <= math.sqrt(2) * (abs(h13) + abs(h23)) + 1e-9
    assert is_qpsk(relay.map_pncf(y, h13, h23))


def test_map_tie_breaks_to_first_alphabet_entry():
    # with h23 = j h13 some XOR classes coincide exactly; ties follow alphabet order
    out = relay.map_pncf(np.zeros(1), 1.0, 1j)
    assert complex(out[0]) in [complex(a) for a in ALPHABET]


def test_relay_map_gains():
    rng = RandomStream(0, "gains")
    cs = ChannelState(snr_to_coeff(5.0), snr_to_coeff(5.0, 0.7), 1, 1)
    x1, x2 = draw_symbols(rng, 50_000), draw_symbols(rng, 50_000)
    y = uplink(x1, x2, cs, rng)
    m = relay.relay_map("map-pncf", y, cs)
    assert m.norm_gain == 1.0 and is_qpsk(m.symbols)
    for scheme in ("mmse-pncf", "mmse-pnci", "linear-pnci"):
        out = relay.relay_map(scheme, y, cs)
        assert np.mean(np.abs(out.symbols) ** 2) == pytest.approx(2.0)
        target = (x1.real * x2.real + 1j * x1.imag * x2.imag) if scheme == "mmse-pncf" else cs.h13 * x1 + cs.h23 * x2
        fitted = np.mean(np.conj(target) * out.symbols) / np.mean(np.abs(target) ** 2)
        assert abs(fitted) == pytest.approx(out.signal_gain, rel=0.02)
    with pytest.raises(ValueError):
        relay.relay_map("map-pncf", [], cs)


def test_compiled_and_fallback_kernels_agree():
    if kernels.BACKEND != "cython":
        pytest.skip("compiled kernels not built")
    rng = RandomStream(0, "kern")
    y = rng.normal(5000) * 3 + 1j * rng.normal(5000) * 3
    h13, h23 = 1.3 - 0.2j, 0.4 + 1.1j
    for name in ("map_pncf", "mmse_pncf", "mmse_pnci"):
        a = getattr(kernels, name)(y, h13, h23)
        b = getattr(_kernels_py, name)(y, h13, h23)
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_pure_python_switch(monkeypatch):
    monkeypatch.setenv("PNCSIM_PURE_PYTHON", "1")
    try:
        mod = importlib.reload(kernels)
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("PNCSIM_PURE_PYTHON")
        importlib.reload(kernels)
