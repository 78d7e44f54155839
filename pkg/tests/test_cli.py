import json

import pytest
from click.testing import CliRunner

from semiclassical_moments.cli import EXIT_FAILED, EXIT_USAGE, main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, list(args))


def test_bracket_text(runner):
    result = invoke(runner, "bracket", "d(q^2)", "d(q pi)")
    assert result.exit_code == 0
    assert result.stdout.strip() == "2*d(q^2)"


def test_bracket_truncated(runner):
    result = invoke(runner, "bracket", "d(q^2 pi)", "d(q pi^2)", "-s", "3")
    assert result.exit_code == 0
    assert result.stdout.strip() == "0"


def test_bracket_json(runner):
    result = invoke(runner, "bracket", "d(q1 q2)", "d(pi1 pi2)", "--json")
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["schema"] == "semiclassical-moments/1"
    assert report["N"] == 2
    assert {tuple(term["factors"]) for term in report["terms"]} == {("d(q1 pi1)",), ("d(q2 pi2)",)}


@pytest.mark.parametrize("text", ["d(qq)", "d(q^2"])
def test_bracket_parse_error(runner, text):
    result = invoke(runner, "bracket", text, "d(q pi)")
    assert result.exit_code == EXIT_USAGE
    assert "error:" in result.stderr


def test_classify(runner):
    result = invoke(runner, "classify", "2")
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["classification"] == "C_2"
    assert report["cartan_matrix"] == [[2, -1], [-2, 2]]


def test_chart_list(runner):
    result = invoke(runner, "chart", "list")
    assert result.exit_code == 0
    names = [entry["name"] for entry in json.loads(result.stdout)]
    assert names == ["n1s2", "n2s2", "n1s3", "n2s2-quadratic", "su2", "su11"]


def test_chart_eval_and_invert(runner):
    result = invoke(runner, "chart", "eval", "n1s2", "--coords", "s=2,ps=3,U=4")
    assert result.exit_code == 0
    targets = json.loads(result.stdout)["targets"]
    assert targets == pytest.approx({"d(q^2)": 4.0, "d(q pi)": 6.0, "d(pi^2)": 10.0})

    result = invoke(runner, "chart", "invert", "n1s2", "--moments", "d(q^2)=4,d(pi q)=6,d(pi^2)=10")
    assert result.exit_code == 0
    assert json.loads(result.stdout)["coordinates"] == pytest.approx({"s": 2.0, "ps": 3.0, "U": 4.0})


def test_chart_errors(runner):
    assert invoke(runner, "chart", "eval", "n9s9", "--coords", "s=1").exit_code == EXIT_USAGE
    assert invoke(runner, "chart", "eval", "n1s2", "--coords", "s=-1,ps=0,U=1").exit_code == EXIT_USAGE
    assert invoke(runner, "chart", "invert", "n2s2-quadratic", "--targets", "d(q1^2)=1").exit_code == EXIT_USAGE


def test_chart_verify(runner):
    result = invoke(runner, "chart", "verify", "n1s2", "--samples", "10", "--seed", "2")
    assert result.exit_code == 0
    summary = json.loads(result.stdout)
    assert summary["passed"] is True
    assert summary["samples"] == 10
    assert "reports" not in summary


def test_chart_verify_failure_exit_code(runner):
    result = invoke(runner, "chart", "verify", "n1s2", "--samples", "5", "--tol", "1e-300")
    assert result.exit_code in (0, EXIT_FAILED)
    assert json.loads(result.stdout)["passed"] is (result.exit_code == 0)


def test_chart_flow(runner):
    result = invoke(runner, "chart", "flow", "n1s2", "--coords", "s=1,ps=0,U=0.25", "--generator", "d(q^2)", "--steps", "4")
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "t,q,pi,d(q^2),d(q pi),d(pi^2),U2,U"
    assert len(lines) == 6
    last = dict(zip(lines[0].split(","), map(float, lines[-1].split(","))))
    assert last["d(q pi)"] == pytest.approx(-2.0, abs=1e-9)


def test_chart_flow_rejects_lie_algebra_chart(runner):
    result = invoke(runner, "chart", "flow", "su2", "--coords", "phi=0,Sz=0,S2=1", "--generator", "d(q^2)")
    assert result.exit_code == EXIT_USAGE


def write_config(tmp_path, **overrides):
    data = {
        "N": 1,
        "order": 2,
        "t_final": 1.0,
        "steps": 10,
        "hamiltonian": {"preset": "harmonic"},
        "initial": {"gaussian": {"widths": 1.0}},
    }
    data.update(overrides)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_evolve(runner, tmp_path):
    csv_path = tmp_path / "out.csv"
    result = invoke(runner, "evolve", str(write_config(tmp_path)), "--csv", str(csv_path))
    assert result.exit_code == 0
    summary = json.loads(result.stdout)
    assert summary["schema"] == "semiclassical-moments/1"
    assert summary["csv"] == str(csv_path)
    assert csv_path.read_text(encoding="utf-8").startswith("t,q,pi,")


def test_evolve_with_oracle(runner, tmp_path):
    config = write_config(tmp_path, oracle={"basis": 128})
    result = invoke(runner, "evolve", str(config), "--oracle")
    assert result.exit_code == 0
    assert json.loads(result.stdout)["oracle"]["worst"] <= 1e-6


def test_evolve_chart_check_failure(runner, tmp_path):
    initial = {"chart": "n1s2", "coordinates": {"s": 1.0, "ps": 0.1, "U": 0.3}}
    passing = invoke(runner, "evolve", str(write_config(tmp_path, initial=initial, chart_samples=2)))
    assert passing.exit_code == 0
    assert json.loads(passing.stdout)["chart"]["passed"] is True

    failing = invoke(runner, "evolve", str(write_config(tmp_path, initial=initial, tolerances={"rank": 0.9})))
    assert failing.exit_code == EXIT_FAILED
    assert json.loads(failing.stdout)["chart"]["passed"] is False


@pytest.mark.parametrize("overrides", [{"initial": {}}, {"steps": 0}, {"hamiltonian": {"preset": "cubic"}}])
def test_evolve_invalid_config(runner, tmp_path, overrides):
    result = invoke(runner, "evolve", str(write_config(tmp_path, **overrides)))
    assert result.exit_code == EXIT_USAGE


def test_evolve_rejects_non_json(runner, tmp_path):
    path = tmp_path / "run.json"
    path.write_text("not json", encoding="utf-8")
    assert invoke(runner, "evolve", str(path)).exit_code == EXIT_USAGE
