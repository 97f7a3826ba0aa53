import io
import json

import numpy as np
import pytest

from curvlab import cli, core, models


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, obj, name="t.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_verify_single_suite_passes():
    code, out, _ = run("verify", "--suite", "core", "--m", "4", "--cases", "5")
    assert code == 0
    assert "all suites passed" in out


def test_verify_json_output():
    code, out, _ = run("verify", "--suite", "models", "--cases", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["passed"] and data["suites"][0]["suite"] == "models"


def test_verify_absurd_tolerance_fails():
    code, _, _ = run("verify", "--suite", "algebra", "--cases", "3", "--tol", "-1")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ("verify", "--suite", "nosuch"),
    ("verify", "--cases", "0"),
    ("verify", "--m", "40"),
    ("analyze",),
    ("model",),
    ("model", "constant", "1", "1"),
    ("search", "--m", "9"),
    ("frobnicate",),
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_analyze_parse_error(tmp_path):
    assert run("analyze", "--input", write(tmp_path, "{not json"))[0] == 3
    assert run("analyze", "--input", str(tmp_path / "missing.json"))[0] == 3


def test_analyze_validation_error(tmp_path):
    T = core.random_curvature_tensor(4, 0)
    T[0, 1, 2, 3] += 1.0
    code, _, err = run("analyze", "--input", write(tmp_path, core.tensor_to_json(T)))
    assert code == 4
    assert "first Bianchi residual" in err


def test_analyze_model_round_trip(tmp_path):
    code, out, _ = run("model", "t2s", "4")
    assert code == 0
    code, out, _ = run("analyze", "--input", write(tmp_path, out), "--format", "json")
    assert code == 0
    a = json.loads(out)
    assert a["decomposition"]["norm2_W"] == pytest.approx(4 / 3)
    assert a["partial_traces"][0] == pytest.approx(0.0, abs=1e-14)
    assert all(b["satisfied"] for b in a["bounds"].values())


def test_analyze_constant_curvature_is_tight(tmp_path):
    path = write(tmp_path, core.tensor_to_json(models.constant_curvature(5, 1.0)))
    code, out, _ = run("analyze", "--input", path, "--format", "json")
    a = json.loads(out)
    np.testing.assert_allclose(a["spectrum"], 2.0)
    assert abs(a["bounds"]["tachibana"]["slack"]) < 1e-12


def test_analyze_text(tmp_path):
    path = write(tmp_path, core.tensor_to_json(core.random_curvature_tensor(3, 1)))
    code, out, _ = run("analyze", "--input", path)
    assert code == 0 and "tachibana" in out


def test_model_text_output():
    code, out, _ = run("model", "constant", "3", "2", "--format", "text")
    assert code == 0 and out.split(":")[1].split() == ["4", "4", "4"]


def test_search_deterministic():
    a = run("search", "--m", "3", "--iters", "200", "--seed", "5", "--format", "json")
    b = run("search", "--m", "3", "--iters", "200", "--seed", "5", "--format", "json")
    assert a[0] == 0 and a[1] == b[1]
    assert json.loads(a[1])["violations"] == 0
