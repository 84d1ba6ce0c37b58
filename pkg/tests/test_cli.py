import json

import numpy as np
import pytest

from indicial.cli import main, to_json
from indicial.pencil import PencilSpec, dump_pencil
from conftest import lin, nondiag, sq, strip_pair


@pytest.fixture
def pencil_file(tmp_path):
    def make(p, name="p.json"):
        path = tmp_path / name
        dump_pencil(p, path)
        return str(path)

    return make


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_classify_linear(capsys, pencil_file):
    code, out = run(capsys, "classify", pencil_file(lin()))
    rep = json.loads(out)
    assert code == 0
    assert rep["signature"] == 1 and rep["deficiency_indices"] == [1, 0]
    assert rep["sign_condition"] is False
    assert rep["roots"][0]["band"] == "critical"


def test_all_double_root(capsys, pencil_file):
    code, out = run(capsys, "all", pencil_file(sq()))
    rep = json.loads(out)
    assert code == 0
    assert rep["signature"] == 0 and rep["sf_total"] == 0 and rep["sign_condition"] is True
    F, K = rep["extensions"]["friedrichs"], rep["extensions"]["krein"]
    assert F["dim"] == K["dim"] == 1 and F["basis"] == K["basis"]
    assert len(F["basis"][0][0]["log_coeffs"]) == 1
    assert rep["all_passed"] is True


def test_all_reports_precondition_failure(capsys, pencil_file):
    code, out = run(capsys, "all", pencil_file(lin()))
    rep = json.loads(out)
    assert code == 4
    assert rep["extensions"]["friedrichs"]["error"] == "SignConditionViolated"
    assert rep["all_passed"] is True


@pytest.mark.parametrize("make", [sq, strip_pair, nondiag])
def test_output_is_deterministic(capsys, pencil_file, make):
    path = pencil_file(make())
    _, a = run(capsys, "all", path)
    _, b = run(capsys, "all", path)
    assert a == b


def test_verify_strip_pair(capsys, pencil_file):
    code, out = run(capsys, "verify", pencil_file(strip_pair()))
    rep = json.loads(out)
    assert code == 0 and rep["all_passed"]
    assert rep["quotient_dim"] == 2


def test_malformed_json_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"m": 2,')
    code, out = run(capsys, "roots", str(bad))
    assert code == 2 and json.loads(out)["error"]["type"] == "ValidationError"


def test_not_symmetric_exit_2(capsys, pencil_file):
    code, out = run(capsys, "roots", pencil_file(PencilSpec.scalar([0, 1], 2)))
    assert code == 2 and json.loads(out)["error"]["type"] == "NotSymmetric"


def test_missing_file_exit_2(capsys, tmp_path):
    code, _ = run(capsys, "roots", str(tmp_path / "nope.json"))
    assert code == 2


def test_text_format(capsys, pencil_file):
    code, out = run(capsys, "classify", pencil_file(lin()), "--text")
    assert code == 0
    assert "signature: 1" in out and "deficiency indices: (1, 0)" in out


def test_to_json_floats():
    s = to_json({"a": [1.0, 0.1, 1e-20, 3], "b": complex(1, -2), "c": True})
    d = json.loads(s)
    assert d == {"a": [1.0, 0.1, 1e-20, 3], "b": [1.0, -2.0], "c": True}
    assert float(to_json(0.1)) == 0.1 and "0.10000000000000001" in to_json(0.1)
    with pytest.raises(ValueError):
        to_json(float("nan"))
