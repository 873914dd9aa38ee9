import json
import math
import subprocess
import sys
from fractions import Fraction as F

import pytest

from kronlab import __version__
from kronlab.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, build_parser, main
from kronlab.gaussflow import from_binary
from kronlab.scenarios import SCENARIOS, ScenarioConfig, run_scenario
from kronlab.specmeasure import atomic
from kronlab.specmeasure.io import dump, load


@pytest.fixture
def files(tmp_path):
    dump(atomic([(1.0, 0.5), (math.sqrt(2), 0.5)]), str(tmp_path / "mix.json"))
    dump(atomic([(F(1), F(1, 2)), (F(3), F(1, 2))]), str(tmp_path / "rat.json"))
    (tmp_path / "points.json").write_text('[1, "sqrt(2)"]')
    (tmp_path / "phases.json").write_text("[0, 0.5]")
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_qindep_verdicts(capsys):
    code, out = run(capsys, "qindep", "1", "sqrt(2)", "1+sqrt(2)")
    assert code == EXIT_OK and json.loads(out.out)["status"] == "dependent"
    code, out = run(capsys, "qindep", "--tier", "symbolic", "1", "1*tau^1", "1*tau^2")
    assert json.loads(out.out)["status"] == "independent-exact"


def test_group_listing(capsys):
    code, out = run(capsys, "group", "2", "3", "--radius", "2", "--check")
    doc = json.loads(out.out)
    assert doc["size"] == 13 and doc["verdict"]["status"] == "dependent"


def test_measure_operations(capsys, files):
    code, out = run(capsys, "measure", "scale", "--measure", str(files / "rat.json"), "--s", "-1")
    assert code == EXIT_OK
    assert [a["pos"] for a in json.loads(out.out)["atoms"]] == ["-3/1", "-1/1"]
    code, out = run(capsys, "measure", "singular", "--measure", str(files / "rat.json"),
                    "--other", str(files / "mix.json"))
    assert json.loads(out.out)["status"] == "common-mass"
    code, out = run(capsys, "measure", "bochner", "--measure", str(files / "rat.json"),
                    "--t", "0")
    assert json.loads(out.out)["value"][0] == [1.0, 0.0]
    code, out = run(capsys, "measure", "distance", "--measure", str(files / "rat.json"),
                    "--other", str(files / "rat.json"), "--a", "0", "--b", "4")
    assert json.loads(out.out)["distance"] == 0


def test_kron_solve_witness_fields(capsys, files):
    code, out = run(capsys, "kron", "solve", "--points", str(files / "points.json"),
                    "--phases", str(files / "phases.json"), "--eps", "0.1")
    doc = json.loads(out.out)
    assert code == EXIT_OK
    assert {"t", "residuals", "method", "search_bound"} <= set(doc)
    assert doc["max_residual"] < 0.1


def test_kron_failure_exit_code(capsys, files):
    code, out = run(capsys, "kron", "solve", "--points", str(files / "points.json"),
                    "--phases", str(files / "phases.json"), "--eps", "1e-6", "--method", "grid",
                    "--budget", "100")
    assert code == EXIT_FAILED and json.loads(out.out)["status"] == "not-found(budget)"


def test_flow_binary_output(capsys, files):
    target = files / "paths.bin"
    code, _ = run(capsys, "flow", "simulate", "--measure", str(files / "mix.json"), "--paths", "4",
                  "--count", "8", "--format", "bin", "--seed", "5", "--out", str(target))
    head, values = from_binary(target.read_bytes())
    assert code == EXIT_OK and head["seed"] == 5 and values.shape == (4, 8)


def test_env_seed_default(monkeypatch):
    monkeypatch.setenv("KRONLAB_SEED", "41")
    assert build_parser().parse_args(["qindep", "1"]).seed == 41
    monkeypatch.delenv("KRONLAB_SEED")
    assert build_parser().parse_args(["qindep", "1"]).seed == 0


def test_convert_formats_and_strict(capsys, tmp_path):
    src = tmp_path / "atoms.csv"
    src.write_text("pos,w\n1,1/2\n1,1/4\n")
    code, out = run(capsys, "convert", str(src), "--to", "text")
    assert code == EXIT_OK and "atom\t1/1\t3/4" in out.out and "duplicate" in out.err
    code, out = run(capsys, "convert", str(src), "--strict")
    assert code == EXIT_USAGE and "line 3" in out.err


def test_convert_assign(capsys, tmp_path):
    src = tmp_path / "sym.txt"
    src.write_text("tier\tsymbolic\natom\t1*tau^1\t1\n")
    code, out = run(capsys, "convert", str(src), "--to", "json", "--assign", "tau=3.14159")
    doc = json.loads(out.out)
    assert doc["tier"] == "numeric" and float(doc["atoms"][0]["pos"]) == pytest.approx(3.14159)


def test_json_round_trip_via_text(capsys, files, tmp_path):
    text = tmp_path / "m.txt"
    back = tmp_path / "back.json"
    assert main(["convert", str(files / "rat.json"), "--to", "text", "--out", str(text)]) == 0
    assert main(["convert", str(text), "--to", "json", "--out", str(back)]) == 0
    assert back.read_text() == (files / "rat.json").read_text()


def test_parse_error_reports_location(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"tier": "symbolic",\n "atoms": [}')
    code, out = run(capsys, "measure", "symmetrize", "--measure", str(bad))
    assert code == EXIT_USAGE and "line 2" in out.err


def test_console_script_version():
    res = subprocess.run([sys.executable, "-m", "kronlab.cli", "--version"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and __version__ in res.stdout


# -- scenarios -------------------------------------------------------------------------


def test_unknown_scenario():
    with pytest.raises(ValueError):
        ScenarioConfig("nope")


@pytest.mark.parametrize("name", ["km10-demo", "mkj-singularity", "mkj-factor"])
def test_scenarios_deterministic(name):
    a = run_scenario(ScenarioConfig(name, {"seed": 3}))
    b = run_scenario(ScenarioConfig(name, {"seed": 3}))
    assert a.passed and a.to_dict() == b.to_dict()
    doc = a.to_dict()
    assert doc["tool_version"] == __version__ and len(doc["config_hash"]) == 64
    assert all("tolerance" in x and "operation" in x for x in doc["assertions"])


def test_jobs_keep_report_order():
    serial = run_scenario(ScenarioConfig("mkj-singularity", {"translations": 20}))
    threaded = run_scenario(ScenarioConfig("mkj-singularity", {"translations": 20}, jobs=4))
    assert serial.to_dict() == threaded.to_dict()


def test_numeric_tier_scenarios():
    assert run_scenario(ScenarioConfig("km10-demo", {"tier": "numeric", "radius": 2})).passed
    assert run_scenario(ScenarioConfig("mkj-singularity", {"tier": "numeric"})).passed


def test_scenario_writes_report(tmp_path, capsys):
    code = main(["scenario", "run", "mkj-factor", "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["passed"] and "total_seconds" not in json.dumps(report)
    assert "total_seconds" in (tmp_path / "timings.json").read_text()


def test_failing_scenario_exit_code(capsys):
    # an invalid construction parameter surfaces as a failed assertion, not a crash
    code = main(["scenario", "run", "km10-demo", "--param", "delta=0"])
    assert code == EXIT_FAILED


def test_registered_names():
    assert set(SCENARIOS) == {"km10-demo", "mkj-singularity", "mkj-factor", "rigidity-e2e",
                              "kronecker-verify"}


def test_loaded_measure_matches(files):
    assert load(str(files / "rat.json")) == atomic([(1, F(1, 2)), (3, F(1, 2))])
