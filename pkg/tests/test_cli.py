"""End-to-end checks of the hcrb command line."""

import json

import numpy as np
import pytest

from conftest import SCENARIO_FILE

from hcrb import __version__
from hcrb.cli import entry
from hcrb.scenario_io import SCHEMA_VERSION, dumps_normalized, normalize

SCENARIO = str(SCENARIO_FILE)


def test_version_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        entry(["--version"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert out == f"hcrb {__version__} (scenario schema {SCHEMA_VERSION})\n"


def test_bounds_report_and_csv(tmp_path, capsys):
    out = tmp_path / "bounds.csv"
    assert entry(["bounds", "--scenario", SCENARIO, "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "contour unknown, exact" in stdout
    lines = out.read_text().splitlines()
    assert lines[0] == "sweep,quantity,method,value,units,n_trials,seed"
    quantities = [line.split(",")[1] for line in lines[1:]]
    assert quantities == ["c_range_unknown", "c_bearing_unknown",
                          "c_heading_unknown", "c_range_point",
                          "c_bearing_point"]
    values = [float(line.split(",")[3]) for line in lines[1:]]
    assert all(np.isfinite(values)) and all(v > 0 for v in values)


def test_bounds_known_asymptotic(capsys):
    assert entry(["bounds", "--scenario", SCENARIO,
                  "--known", "--asymptotic"]) == 0
    assert "contour known, asymptotic" in capsys.readouterr().out


def test_print_normalized_round_trips(capsys):
    assert entry(["bounds", "--scenario", SCENARIO,
                  "--print-normalized"]) == 0
    printed = capsys.readouterr().out
    expected = normalize(json.loads(SCENARIO_FILE.read_text()))
    assert printed == dumps_normalized(expected)


def test_schema_errors_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert entry(["bounds", "--scenario", str(bad)]) == 1
    assert "invalid JSON" in capsys.readouterr().err

    doc = json.loads(SCENARIO_FILE.read_text())
    doc["bogus"] = {}
    bad.write_text(json.dumps(doc))
    assert entry(["bounds", "--scenario", str(bad)]) == 1
    assert "unknown top-level" in capsys.readouterr().err


def test_singular_geometry_exits_two(tmp_path, capsys):
    doc = json.loads(SCENARIO_FILE.read_text())
    doc["target"] = {"x": 0.0, "y": 7.0, "heading": 90.0}
    path = tmp_path / "bow_on.json"
    path.write_text(json.dumps(doc))
    assert entry(["bounds", "--scenario", str(path)]) == 2
    err = capsys.readouterr().err
    assert "singular" in err
    assert "null space involves" in err


def test_sweep_row_count(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert entry(["sweep", "--scenario", SCENARIO, "--points", "3",
                  "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 3 * 14
    assert len({line.split(",")[0] for line in lines[1:]}) == 3


def test_simulate_deterministic_with_frame_dump(tmp_path, capsys):
    frames = tmp_path / "frames"
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    args = ["simulate", "--scenario", SCENARIO, "--trials", "2", "--seed", "3"]
    assert entry(args + ["--dump-frames", str(frames), "--out", str(first)]) == 0
    assert entry(args + ["--out", str(second)]) == 0
    assert first.read_text() == second.read_text()
    names = sorted(p.name for p in frames.iterdir())
    assert names == ["frame_0000.c64", "frame_0000.c64.json",
                     "frame_0001.c64", "frame_0001.c64.json"]
    sidecar = json.loads((frames / "frame_0000.c64.json").read_text())
    assert sidecar["dtype"] == "complex64-interleaved-le"

    rows = first.read_text().splitlines()[1:]
    assert len(rows) == 4
    assert {row.split(",")[1] for row in rows} == {"d_hat", "phi_hat"}
    assert all(row.split(",")[6] == "3" for row in rows)


def test_simulate_point_target(capsys):
    assert entry(["simulate", "--scenario", SCENARIO, "--trials", "1",
                  "--point", "--seed", "1"]) == 0
    assert "point target truth" in capsys.readouterr().out


def test_mc_subcommand(tmp_path, capsys):
    out = tmp_path / "mc.csv"
    assert entry(["mc", "--scenario", SCENARIO, "--trials", "2",
                  "--ranges", "10", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 14 + 8
    assert all(line.split(",")[0].startswith("mc:") for line in lines[1:])


def test_diversity_subcommand(tmp_path, capsys):
    out = tmp_path / "div.csv"
    assert entry(["diversity", "--scenario", SCENARIO, "--counts", "1,2",
                  "--out", str(out)]) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    assert [(r[0], r[1]) for r in rows] == [
        ("diversity:1", "peb_known"), ("diversity:1", "peb_unknown"),
        ("diversity:2", "peb_known"), ("diversity:2", "peb_unknown")]
    assert entry(["diversity", "--scenario", SCENARIO, "--counts", "0",
                  "--out", str(out)]) == 1
    assert "invalid radar counts" in capsys.readouterr().err
