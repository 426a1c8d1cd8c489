import json
import os
from pathlib import Path

import pytest

from eqcartan import cli
from eqcartan.schema import DocumentError, dumps, load_document

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

ALL_FIXTURES = sorted(FIXTURES.glob("*.json"))


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


# -- document loading ----------------------------------------------------------


@pytest.mark.parametrize("path", ALL_FIXTURES, ids=lambda p: p.stem)
def test_bundled_fixtures_load(path):
    doc = load_document(str(path))
    assert doc["schema_version"] == 1


def test_missing_file_is_malformed(tmp_path):
    with pytest.raises(DocumentError):
        load_document(str(tmp_path / "nope.json"))


def test_bad_json_is_malformed(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(DocumentError):
        load_document(str(p))


def test_unknown_field_rejected(tmp_path):
    p = tmp_path / "extra.json"
    p.write_text(json.dumps({
        "schema_version": 1,
        "scalar_setup": {"lattice_generator": "1", "coefficients": "Q"},
        "surprise": True,
    }))
    with pytest.raises(DocumentError):
        load_document(str(p))


def test_wrong_schema_version_rejected(tmp_path):
    p = tmp_path / "v2.json"
    p.write_text(json.dumps({
        "schema_version": 2,
        "scalar_setup": {"lattice_generator": "1", "coefficients": "Q"},
    }))
    with pytest.raises(DocumentError):
        load_document(str(p))


def test_dumps_is_sorted_with_trailing_newline():
    s = dumps({"b": 1, "a": 2})
    assert s.endswith("\n")
    assert s.index('"a"') < s.index('"b"')


# -- exit codes ----------------------------------------------------------------


def test_validate_passes_on_every_fixture(capsys):
    for path in ALL_FIXTURES:
        code, out = run_cli(capsys, "validate", str(path))
        assert code == 0, (path, out)
        json.loads(out)


def test_malformed_document_exits_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{}")
    code, out = run_cli(capsys, "validate", str(p))
    assert code == 2
    assert json.loads(out)["kind"] == "malformed input"


def test_verified_false_exits_1(capsys, tmp_path):
    # d does not square to zero: a three-step complex with two arrows
    p = tmp_path / "notsquare.json"
    p.write_text(json.dumps({
        "schema_version": 1,
        "scalar_setup": {"lattice_generator": "1", "coefficients": "Q"},
        "complex": {
            "grading": {"kind": "Z"},
            "generators": [{"name": "a", "index": 0},
                           {"name": "b", "index": 1},
                           {"name": "c", "index": 2}],
            "differential": {"degree": 1, "entries": [
                {"target": "b", "source": "a", "value": "1"},
                {"target": "c", "source": "b", "value": "1"},
            ]},
        },
    }))
    code, out = run_cli(capsys, "validate", str(p))
    assert code == 1
    assert not json.loads(out)["valid"]


def test_quantum_obstruction_exit_codes(capsys):
    code, out = run_cli(capsys, "quantum", "obstruction",
                        "--lambda", "2", "--d", "3", "--ring", "Z")
    assert code == 0
    assert json.loads(out)["verdict"] == "forbidden"
    code, out = run_cli(capsys, "quantum", "obstruction",
                        "--lambda", "1", "--d", "1", "--ring", "F2")
    assert code == 2
    assert json.loads(out)["verdict"] == "inapplicable"


def test_schema_flag(capsys):
    code, out = run_cli(capsys, "--schema")
    assert code == 0
    schema = json.loads(out)
    assert schema["properties"]["schema_version"]["const"] == 1
    assert schema["additionalProperties"] is False


# -- command output sanity -----------------------------------------------------


def test_cohomology_output(capsys):
    code, out = run_cli(capsys, "cohomology",
                        str(FIXTURES / "monotone_case.json"))
    assert code == 0
    rep = json.loads(out)
    assert all(v["betti"] == 0 for v in rep["degrees"].values())


def test_u_decompose_output(capsys):
    code, out = run_cli(capsys, "u-decompose",
                        str(FIXTURES / "dvr_case.json"))
    assert code == 0
    rep = json.loads(out)
    per = rep["decomposition"]["per_degree"]
    assert per["0"]["torsion_orders"] == [1]
    assert rep["les_consistency"]["balanced"]


def test_cartan_verify_output(capsys):
    code, out = run_cli(capsys, "cartan", "verify",
                        str(FIXTURES / "monotone_case.json"))
    assert code == 0
    assert json.loads(out)["all_hold"]


def test_cartan_connection_exact_case(capsys):
    code, out = run_cli(capsys, "cartan", "connection", "--which", "q",
                        str(FIXTURES / "exact_case.json"))
    assert code == 0
    rep = json.loads(out)
    assert rep["operator_form"] == "u*d/dq"
    assert rep["matrix_part_is_zero"]


def test_finite2_assemble_output(capsys):
    code, out = run_cli(capsys, "finite2", "assemble",
                        str(FIXTURES / "z2_case.json"))
    assert code == 0
    assert json.loads(out)["all_hold"]


def test_cone_output(capsys):
    code, out = run_cli(capsys, "cone", str(FIXTURES / "cone_case.json"))
    assert code == 0
    rep = json.loads(out)
    assert rep["quasi_isomorphisms"]["plus"]["quasi_isomorphism"]
    assert rep["quasi_isomorphisms"]["minus"]["quasi_isomorphism"]


# -- environment knobs ---------------------------------------------------------


def test_q_order_env_is_read(monkeypatch):
    from eqcartan.linalg import DEFAULT_Q_ORDER
    monkeypatch.setenv("EQCARTAN_Q_ORDER", "17")
    assert DEFAULT_Q_ORDER() == 17
    monkeypatch.delenv("EQCARTAN_Q_ORDER")
    assert DEFAULT_Q_ORDER() == 64


def test_u_order_env_is_read(monkeypatch):
    from eqcartan.cartan import DEFAULT_U_ORDER
    monkeypatch.setenv("EQCARTAN_U_ORDER", "7")
    assert DEFAULT_U_ORDER(3) == 7
    monkeypatch.delenv("EQCARTAN_U_ORDER")
    assert DEFAULT_U_ORDER(3) == 3
