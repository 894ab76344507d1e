import csv
import io
import subprocess
import sys

import pytest

from pncsim.cli import main
from pncsim.harness import CSV_FIELDS


def test_point_to_stdout(capsys):
    assert main(["point", "--scheme", "mmse-pncf", "--uplink-db", "5", "--downlink-db", "3",
                 "--packets", "2", "--symbols", "256"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 1 and rows[0]["scheme"] == "mmse-pncf"
    assert list(rows[0]) == CSV_FIELDS


def test_point_with_phases(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["point", "--scheme", "map-pncf", "--uplink-db", "2", "--downlink-db", "2",
                 "--phase13", "0", "--phase23", "0.5", "--packets", "1", "--symbols", "256",
                 "--out", str(out)]) == 0
    row = next(csv.DictReader(out.open(encoding="utf-8")))
    assert row["phase23_rad"] == "0.5" and row["eps0"] != ""


def test_sweep_row_count(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--preset", "fig2", "--sync", "--packets", "1", "--symbols", "256",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open(encoding="utf-8")))
    assert len(rows) == 44
    assert {r["phase13_rad"] for r in rows} == {"0"}


def test_config_file_overridden_by_flags(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("packets = 1\npacket_symbols = 256\nmaster_seed = 3\n", encoding="utf-8")
    assert main(["point", "--scheme", "linear-pnci", "--uplink-db", "0", "--downlink-db", "0",
                 "--config", str(cfg), "--seed", "4"]) == 0
    row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert row["seed"] == "4" and row["n_symbols"] == "256"


@pytest.mark.parametrize("argv", [
    ["point", "--scheme", "af", "--uplink-db", "0", "--downlink-db", "0"],
    ["point", "--scheme", "map-pncf", "--uplink-db", "0"],
    ["point", "--scheme", "map-pncf", "--uplink-db", "0", "--downlink-db", "0", "--phase13", "1"],
    ["point", "--scheme", "map-pncf", "--uplink-db", "0", "--downlink-db", "0", "--packets", "0"],
    ["sweep", "--preset", "fig9"],
    ["sweep", "--preset", "fig2", "--config", "/nonexistent/cfg"],
    [],
])
def test_invalid_configuration_exit_code(argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_console_script_runs():
    r = subprocess.run([sys.executable, "-m", "pncsim.cli", "point", "--scheme", "map-pncf",
                        "--uplink-db", "0", "--downlink-db", "0", "--packets", "1", "--symbols", "256"],
                       capture_output=True)
    assert r.returncode == 0
    assert r.stdout.startswith(b"scheme,") and b"\r\n" not in r.stdout
