import json
import subprocess
import sys
from pathlib import Path

import pytest

from crowdsweep.cli import SweepSpec, fmt, run
from crowdsweep.errors import ScenarioError

FIX = Path(__file__).resolve().parents[1] / "src" / "crowdsweep" / "fixtures"


def cli(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("x, s", [
    (None, "empty"), (1.0, "1.000000"), (-0.0, "0.000000"), (-1e-9, "0.000000"),
    (2.5e-7, "0.000000"),   # binary value sits just below the midpoint
    (0.0000005, "0.000000"), (21.5329454, "21.532945"), (1e6, "1000000.000000"),
])
def test_fmt(x, s):
    assert fmt(x) == s


def test_sweep_spec():
    assert SweepSpec.parse("1:10:1").values() == [float(k) for k in range(1, 11)]
    assert SweepSpec.parse("0.1:0.3:0.1").values() == [0.1, 0.2, 0.3]
    for bad in ("1:2", "a:b:c", "2:1:1", "1:2:0", "1:inf:1"):
        with pytest.raises(ScenarioError):
            SweepSpec.parse(bad)


def test_solve_table(capsys):
    code, out, _ = cli(capsys, "solve", "--config", str(FIX / "ex51.json"), "--tau-sweep", "1:3:1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "tau,a1,a2,t_f12,J"
    assert lines[1] == "1.000000,1.195021,0.597510,2.510417,14.377593"
    assert len(lines) == 4


def test_single_table_empty_columns(capsys):
    code, out, _ = cli(capsys, "solve", "--config", str(FIX / "ex33.json"))
    assert out.splitlines()[1] == "1.000000,0.997403,empty,empty,2.992208"


def test_three_agent_scaled_energy(capsys, tmp_path):
    target = tmp_path / "t.csv"
    code, _, _ = cli(capsys, "sweep", "--config", str(FIX / "ex54.json"), "--tau-sweep", "10:10:1",
                     "--energy", "scaled", "--out", str(target))
    assert code == 0
    assert target.read_text().splitlines()[1] == \
        "10.000000,1.251751,0.400560,0.250350,2.906644,1.613513,285.583333"


def test_trajectory_output(capsys, tmp_path):
    target = tmp_path / "traj.csv"
    code, _, _ = cli(capsys, "solve", "--config", str(FIX / "ex31.json"), "--trajectory",
                     str(target), "--dt", "0.5")
    rows = target.read_text().splitlines()
    assert code == 0 and rows[0] == "t,x1,y1" and len(rows) == 14
    assert rows[1] == "0.0,0.0,48.0"


def test_simulate_csv(capsys, tmp_path):
    target = tmp_path / "sim.csv"
    code, _, _ = cli(capsys, "simulate", "--config", str(FIX / "ex51.json"), "--controls",
                     "1.195021,0.597510", "--h", "0.01", "--out", str(target))
    rows = target.read_text().splitlines()
    assert code == 0 and rows[0].startswith("t,x1,y1,x2,y2,active_flags")
    assert len(rows) == 602


def test_verify_passes_on_corridor(capsys):
    code, out, _ = cli(capsys, "verify", "--config", str(FIX / "ex51.json"))
    assert code == 0 and out.strip().endswith("verdict: PASS")


@pytest.mark.parametrize("argv", [
    ["solve"],
    ["sweep", "--config", str(FIX / "ex51.json")],
    ["solve", "--config", "/nonexistent.json"],
    ["solve", "--config", str(FIX / "ex51.json"), "--tau-sweep", "3:1:1"],
    ["simulate", "--config", str(FIX / "ex51.json"), "--controls", "1.0"],
    ["simulate", "--config", str(FIX / "ex51.json"), "--controls", "1,x"],
    ["simulate", "--config", str(FIX / "ex51.json"), "--controls", "1,1", "--h", "5"],
    ["verify", "--config", str(FIX / "ex51.json"), "--h", "0"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(argv) == 2


def test_bad_document_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"kind": "corridor", "T": 6, "destination": [0, 0], "tau": 1,
                             "agents": [{"start": [0, 10], "radius": 3},
                                        {"start": [0, 12], "radius": 3}]}))
    code, _, err = cli(capsys, "solve", "--config", str(p))
    assert code == 2 and "overlap" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "crowdsweep", "solve", "--config",
                           str(FIX / "ex32.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "1.000000,2.771724,1.018491,5.275958,23.107381"
