import csv
import io
import json

import numpy as np
import pytest

from pairspin.cli import main, run_command
from pairspin.config import apply_overrides, parse_config, serialize
from pairspin.errors import ConfigError, UnsupportedPolarization
from pairspin.pulse import PulseKind
from pairspin.smatrix import Variant

MINIMAL = """
[pulse]
kind = SauterLike
E0 = 0.5

[grid]
px_min = -2
px_max = 2
py_min = -2
py_max = 2
"""

STRONG_PULSE = """
[pulse]
kind = SauterLike
E0 = 1.5
tau0 = 3
t0 = 3
sigma = 0

[grid]
px_min = -1
px_max = 1
py_min = -1
py_max = 1

[solver]
t_i = -20
t_f = 20

[run]
samples = 40001
"""

SMALL_SCAN = """
[pulse]
kind = SauterLike
E0 = 0.5
sigma = 0.8

[grid]
px_min = -1.2
px_max = 0.4
px_count = 3
py_min = -0.5
py_max = 0.5
py_count = 2
"""


def rows(text):
    body = "".join(line + "\n" for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_minimal_config_defaults_and_round_trip():
    config = parse_config(MINIMAL)
    assert config.pulse.kind is PulseKind.SAUTER_LIKE
    assert config.spec.rel_tol == 1e-10 and str(config.basis) == "z"
    assert config.grid.pz == 0.0 and config.eta == 1.8 and config.parallelism >= 1
    assert config.grid.shape == (32, 32) and config.variant is Variant.FEYNMAN
    assert parse_config(serialize(config)) == config


def test_round_trip_with_every_section():
    text = apply_overrides(MINIMAL, [
        "pulse.kind=Elliptic", "pulse.delta=0.3", "pulse.omega=0.5", "solver.t_i=-30",
        "solver.t_f=90", "run.basis=helicity", "run.variant=AntiFeynman", "phase.cond=-",
        "point.p=0.1,0.2,0.3", "grid.pz=0.25",
    ])
    config = parse_config(text)
    assert config.window == (-30.0, 90.0) and config.cond == -1
    assert parse_config(serialize(config)) == config


def test_sigma_range_error_names_key_and_bound():
    with pytest.raises(ConfigError) as info:
        parse_config(apply_overrides(MINIMAL, ["pulse.sigma=1.2"]))
    assert "sigma" in info.value.key and "(-1, 1)" in str(info.value)


def test_spinorial_rejects_elliptic_at_parse_time():
    text = apply_overrides(MINIMAL, ["pulse.kind=Elliptic", f"pulse.delta={np.pi / 4!r}",
                                     "run.method=spinorial"])
    with pytest.raises(UnsupportedPolarization):
        parse_config(text)


@pytest.mark.parametrize("text, key", [
    (MINIMAL.replace("E0 = 0.5", "E0 = 0.5\nwidth = 3"), "pulse.width"),
    (MINIMAL + "[plot]\ncolor = red\n", "plot"),
])
def test_unknown_names_are_reported(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key


def test_missing_required_key():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL.replace("E0 = 0.5", ""))
    assert info.value.key == "pulse.E0"


def test_pulse_command_extrema():
    config = parse_config(STRONG_PULSE)
    table = rows(run_command("pulse", config)[""])
    t = np.array([float(r["t"]) for r in table])
    eE = -np.array([float(r["E_x"]) for r in table])  # charge e = -1
    lo, hi = np.argmin(eE), np.argmax(eE)
    assert eE[hi] == pytest.approx(0.75, abs=1e-6) and eE[lo] == pytest.approx(-0.75, abs=1e-6)
    assert t[hi] == pytest.approx(-2.64, abs=0.01) and t[lo] == pytest.approx(2.64, abs=0.01)


def test_zero_field_scan_csv(tmp_path, capsys):
    path = write(tmp_path, apply_overrides(SMALL_SCAN, ["pulse.E0=0"]))
    assert main(["scan", path]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# pairspin")
    assert "# E0 = 0.0" in out and "# method = smatrix" in out
    table = rows(out)
    assert len(table) == 6 and all(float(r["f_total"]) == 0.0 for r in table)
    assert list(table[0])[:4] == ["px", "py", "pz", "f_total"]


def test_scan_output_is_byte_identical(tmp_path):
    outputs = []
    for k, par in enumerate((1, 1, 2)):
        out = tmp_path / f"scan{k}.csv"
        path = write(tmp_path, apply_overrides(SMALL_SCAN, [f"run.output={out}", f"run.parallelism={par}"]),
                     f"run{k}.ini")
        assert main(["scan", path]) == 0
        outputs.append(out.read_text().replace(str(out), "OUT"))
    assert outputs[0] == outputs[1] == outputs[2]
    values = rows(outputs[0])
    assert float(values[0]["f_total"]) > 0


def test_compare_and_point(tmp_path, capsys):
    path = write(tmp_path, SMALL_SCAN)
    assert main(["compare", path, "smatrix", "dhw"]) == 0
    report = rows(capsys.readouterr().out)[0]
    assert report["status"] == "PASS" and float(report["max_rel"]) <= 1e-6
    assert main(["compare", path, "dhw", "--reflection"]) == 0
    assert rows(capsys.readouterr().out)[0]["status"] == "PASS"
    assert main(["point", path, "--override", "point.p=-0.8,0,0"]) == 0
    record = rows(capsys.readouterr().out)[0]
    assert float(record["f_pp"]) == pytest.approx(0.0, abs=1e-12 * float(record["f_total"]))


def test_phase_writes_both_files(tmp_path):
    out = tmp_path / "map.csv"
    path = write(tmp_path, apply_overrides(SMALL_SCAN, [f"run.output={out}", "solver.eta=0"]))
    assert main(["phase", path]) == 0
    assert len(rows(out.read_text())) == 6
    singular = tmp_path / "map.singularities.csv"
    assert "cell_j,cell_i,px,py,winding,class" in singular.read_text()


@pytest.mark.parametrize("override, kind, code", [
    ("pulse.sigma=1.2", "ConfigError", 2),
    ("run.method=spinorial", "UnsupportedPolarization", 1),
])
def test_errors_are_single_json_lines(tmp_path, capsys, override, kind, code):
    text = apply_overrides(MINIMAL, ["pulse.kind=Elliptic", "pulse.delta=0.5", override])
    assert main(["scan", write(tmp_path, text)]) == code
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    assert json.loads(err[0])["error"] == kind


def test_missing_file(tmp_path, capsys):
    assert main(["pulse", str(tmp_path / "absent.ini")]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "FileNotFoundError"
