import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from krcontrol.cli import EXIT_CONFIG, EXIT_NUMERIC, RunConfig, main

from oracles import TABLE_ONE

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write_config(path, **kw):
    path.write_text(json.dumps(kw))
    return str(path)


@pytest.fixture(scope="module")
def orbit_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("orbit")
    assert main(["orbit", "--config", str(CONFIGS / "table1.json"), "--out", str(out)]) == 0
    return out


def read_sweep(path):
    with open(path) as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def test_orbit_command(orbit_dir):
    raw = json.loads((orbit_dir / "orbit.json").read_text())
    assert np.max(np.abs(np.array(raw["points_full"]) - np.array(TABLE_ONE))) < 1e-6
    report = json.loads((orbit_dir / "orbit_report.json").read_text())
    assert report["verification"]["max_residual"] < 1e-10
    assert len(report["ties"]) == 2


def test_orbit_rerun_byte_identical(orbit_dir):
    before = {p.name: p.read_bytes() for p in orbit_dir.iterdir()}
    assert main(["orbit", "--config", str(CONFIGS / "table1.json"), "--out", str(orbit_dir)]) == 0
    assert {p.name: p.read_bytes() for p in orbit_dir.iterdir()} == before


def test_tau_zero_orbit_fails(tmp_path, capsys):
    code = main(["orbit", "--config", str(CONFIGS / "identity.json"), "--out", str(tmp_path)])
    assert code == EXIT_NUMERIC
    assert "no orbit" in capsys.readouterr().err


@pytest.mark.parametrize(
    "bad",
    [{"K": -1}, {"tau": 2.5}, {"scheme": "sol_c"}, {"N": 1}, {"Ns": [200, 100]}, {"unwind_method": "x"}, {"foo": 1}],
)
def test_bad_config(tmp_path, bad):
    cfg = write_config(tmp_path / "c.json", **bad)
    assert main(["propagate", "--config", cfg, "--out", str(tmp_path)]) == EXIT_CONFIG


def test_unreadable_config(tmp_path):
    (tmp_path / "c.json").write_text("{not json")
    assert main(["orbit", "--config", str(tmp_path / "c.json")]) == EXIT_CONFIG
    assert main(["orbit", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_bad_workers(tmp_path):
    assert main(["sweep", "--workers", "0", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_mismatched_orbit_file(tmp_path, orbit_dir):
    cfg = write_config(tmp_path / "c.json", tau=7)
    code = main(["propagate", "--config", cfg, "--orbit", str(orbit_dir / "orbit.json"), "--out", str(tmp_path)])
    assert code == EXIT_CONFIG


def test_defaults_documented():
    cfg = RunConfig.from_dict({})
    assert (cfg.S, cfg.unwind_period, cfg.unwind_method, cfg.seed) == (2, 1, "shear", 0)


@pytest.fixture(scope="module")
def propagated(tmp_path_factory, orbit_dir):
    runs = {}
    for scheme in ("sol_a", "unwind_m"):
        out = tmp_path_factory.mktemp(scheme)
        cfg = write_config(out / "c.json", scheme=scheme, N=200)
        assert main(["propagate", "--config", cfg, "--orbit", str(orbit_dir / "orbit.json"), "--out", str(out)]) == 0
        runs[scheme] = out
    return runs


def test_propagate_outputs(propagated):
    out = propagated["sol_a"]
    dumps = sorted((out / "states").glob("state_t*.csv"))
    assert len(dumps) == 7
    assert (out / "states" / "final.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert 0 < summary["delta"] < 1 and summary["steps"] == 6
    first = (out / "states" / "state_t0.csv").read_text().splitlines()
    assert first[0].startswith("# ") and json.loads(first[0][2:])["t"] == 0
    assert first[1] == "j,q_j,re,im,abs"
    assert (out / "contours.svg").read_text().startswith("<svg")


def test_unwind_beats_plain_a(propagated):
    delta = {s: json.loads((d / "summary.json").read_text())["delta"] for s, d in propagated.items()}
    assert delta["unwind_m"] < delta["sol_a"]


def test_centroids_track_orbit(propagated):
    summary = json.loads((propagated["unwind_m"] / "summary.json").read_text())
    c, o = np.array(summary["centroids"]), np.array(summary["orbit"])
    assert np.max(np.abs(c - o)) < 0.02


def test_identity_run(tmp_path):
    assert main(["propagate", "--config", str(CONFIGS / "identity.json"), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["delta"] == 0.0 and summary["steps"] == 0


def test_sweep_command(tmp_path, orbit_dir):
    cfg = write_config(tmp_path / "c.json", schemes=["sol_a", "unwind_m"], Ns=[50, 100, 200, 400, 800, 1400])
    code = main(["sweep", "--config", cfg, "--orbit", str(orbit_dir / "orbit.json"), "--out", str(tmp_path), "--workers", "2"])
    assert code == 0
    rows = read_sweep(tmp_path / "sweep.csv")
    assert len(rows) == 12 and all(r["status"] == "ok" for r in rows)
    for scheme in ("sol_a", "unwind_m"):
        d = [float(r["delta"]) for r in rows if r["scheme"] == scheme]
        assert all(b < a for a, b in zip(d, d[1:]))
    a = {r["N"]: float(r["delta"]) for r in rows if r["scheme"] == "sol_a"}
    m = {r["N"]: float(r["delta"]) for r in rows if r["scheme"] == "unwind_m"}
    assert all(m[n] <= a[n] for n in a)


def test_sweep_single_dimension(tmp_path, orbit_dir):
    cfg = write_config(tmp_path / "c.json", schemes=["sol_a", "sol_a_improved"], N=200)
    assert main(["sweep", "--config", cfg, "--orbit", str(orbit_dir / "orbit.json"), "--out", str(tmp_path)]) == 0
    rows = {r["scheme"]: float(r["delta"]) for r in read_sweep(tmp_path / "sweep.csv")}
    assert set(rows) == {"sol_a", "sol_a_improved"}
    assert rows["sol_a_improved"] <= rows["sol_a"]


def test_wigner_command(tmp_path, orbit_dir):
    cfg = write_config(tmp_path / "c.json", N=50)
    code = main(["wigner", "--config", cfg, "--out", str(tmp_path), "--orbit", str(orbit_dir / "orbit.json")])
    assert code == 0
    assert len(list((tmp_path / "wigner").glob("density_t*.csv"))) == 7
    summary = json.loads((tmp_path / "wigner" / "summary.json").read_text())
    assert summary["contours"][0]["two_sigma"]["closed"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "krcontrol", "propagate", "--config", str(CONFIGS / "identity.json"), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "delta=0" in proc.stdout
