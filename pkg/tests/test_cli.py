import json
from fractions import Fraction

import pytest

from dgformal import documents as docs
from dgformal.cli import main
from dgformal.complexes import example_corpus, heisenberg, torus7
from dgformal.dga import exterior_product_table
from dgformal.documents import DocumentError
from dgformal.linalg import ONE, cohomology
from dgformal.massey import triple_massey
from dgformal.dga import reduce_if_unital
import dgformal.complexes as cx


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def machine(capsys, *argv):
    code, out, err = run(capsys, "--format", "machine", *argv)
    return code, (json.loads(out) if out.strip() else None), err


def write(tmp_path, doc, name="doc.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


# validate

def test_validate_example(capsys):
    code, out, _ = run(capsys, "validate", "example:torus")
    assert code == 0 and "valid" in out


def test_format_after_command(capsys):
    code, out, _ = run(capsys, "validate", "example:torus", "--format", "machine")
    assert code == 0 and json.loads(out)["valid"] is True


def test_validate_typo_document_full_exterior(capsys, tmp_path):
    basis, prod = exterior_product_table("xyz")
    doc = {"format": "dga/1", "basis": {str(d): n for d, n in basis.items()},
           "differential": [["z", {"xz": 1}]],
           "product": [[a, b, v] for (a, b), v in prod.items()], "unital": True, "unit": "1"}
    code, rep, _ = machine(capsys, "validate", write(tmp_path, doc))
    assert code == 1 and not rep["valid"]
    assert all("z" in f["witness"] for f in rep["failures"])
    assert {f["identity"] for f in rep["failures"]} == {"Leibniz"}


def test_validate_typo_truncated_is_valid(capsys, tmp_path):
    basis, prod = exterior_product_table("xyz", 2)
    doc = {"format": "dga/1", "basis": {str(d): n for d, n in basis.items()},
           "differential": [["z", {"xz": 1}]],
           "product": [[a, b, v] for (a, b), v in prod.items()], "unital": True, "unit": "1"}
    code, rep, _ = machine(capsys, "validate", write(tmp_path, doc))
    assert code == 0 and rep["valid"]


# parse errors

def test_empty_document(capsys, tmp_path):
    code, _, err = run(capsys, "validate", write(tmp_path, ""))
    assert code == 2 and "line 1, column 1" in err


def test_float_scalar_rejected(capsys, tmp_path):
    doc = {"format": "dga/1", "basis": {"1": ["x"], "2": ["y"]}, "differential": [["x", {"y": 0.5}]]}
    code, _, err = run(capsys, "validate", write(tmp_path, doc))
    assert code == 2 and "not exact" in err


def test_bad_json_position():
    with pytest.raises(DocumentError) as exc:
        docs.load_json('{\n  "format": "dga/1",\n  "basis": [}')
    assert exc.value.line == 3


def test_missing_file(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/doc.json")
    assert code == 2 and "cannot read" in err


def test_unknown_example(capsys):
    code, _, _ = run(capsys, "validate", "example:nowhere")
    assert code == 2


# cohomology and transfer

def test_cohomology_machine(capsys):
    code, rep, _ = machine(capsys, "cohomology", "example:torus")
    assert code == 0
    assert rep["dims"] == {"0": 1, "1": 2, "2": 1} and rep["cup_length"] == 2
    assert all(rep["contraction"].values())


def test_transfer_heisenberg(capsys):
    code, rep, _ = machine(capsys, "transfer", "example:truncated Heisenberg", "--cap", "3")
    assert code == 0 and rep["verified"] and rep["reduced"]
    assert {"n": 3, "inputs": ["[x]", "[x]", "[y]"], "value": {"[xz]": "1"}} in rep["entries"]


def test_transfer_cap_too_small(capsys):
    code, _, err = run(capsys, "transfer", "example:circle", "--cap", "1")
    assert code == 2 and "--cap" in err


def test_transfer_wedge_no_higher(capsys):
    code, out, _ = run(capsys, "transfer", "example:S1vS1", "--cap", "5")
    assert code == 0 and "no nonzero m_n" in out


# massey

def test_massey_heisenberg(capsys):
    code, rep, _ = machine(capsys, "massey", "example:truncated Heisenberg", "x", "[x]", "y")
    assert code == 0
    assert rep["value"] == {"[xz]": "1"} and rep["indeterminacy"] == []
    assert rep["vanishes"] is False and rep["epsilon"] == -1


def test_massey_witness_reverifies(capsys):
    # re-derive the printed value from the library
    _, rep, _ = machine(capsys, "massey", "example:truncated Heisenberg", "x", "y", "y")
    R = reduce_if_unital(cx.truncated_heisenberg())
    c = cohomology(R.complex)
    H = c.H
    out = triple_massey(R, {H.index("[x]"): ONE}, {H.index("[y]"): ONE}, {H.index("[y]"): ONE}, c)
    assert {H.names[k]: str(v) for k, v in out.value.items()} == rep["value"]


def test_massey_zero_class(capsys):
    code, rep, _ = machine(capsys, "massey", "example:truncated Heisenberg", "0@1", "x", "y")
    assert code == 0 and rep["vanishes"] is True


def test_massey_json_class(capsys):
    code, rep, _ = machine(capsys, "massey", "example:truncated Heisenberg",
                           '{"[x]": "2"}', "x", "y")
    assert code == 0 and rep["value"] == {"[xz]": "2"}


def test_massey_obstructed(capsys):
    code, rep, _ = machine(capsys, "massey", "example:torus", "[h1.0]", "[h1.1]", "[h1.0]")
    assert code == 1 and rep["kind"] == "obstructed"
    assert rep["obstruction"]["position"] == [0, 2]


def test_massey_unknown_class(capsys):
    code, _, err = run(capsys, "massey", "example:torus", "[x]", "[x]", "[x]")
    assert code == 2 and "available" in err


def test_massey_four_fold_not_applicable(capsys):
    code, rep, _ = machine(capsys, "massey", "example:truncated Heisenberg", "x", "x", "x", "y")
    assert code == 1 and rep["kind"] == "not-applicable"


def test_massey_n_mismatch(capsys):
    code, _, _ = run(capsys, "massey", "example:truncated Heisenberg", "x", "x", "y", "--n", "4")
    assert code == 2


# formality

def test_formality_heisenberg(capsys):
    code, rep, _ = machine(capsys, "formality", "example:truncated Heisenberg")
    assert code == 1 and rep["verdict"] == "non-formal"
    assert rep["witness"]["tuple"] == ["[x]", "[x]", "[y]"]


def test_formality_sphere(capsys):
    code, rep, _ = machine(capsys, "formality", "example:S2")
    assert code == 0 and rep["verdict"] == "formal-up-to-cap" and rep["bound_is_absolute"]


def test_formality_pipeline_torus(capsys):
    code, rep, _ = machine(capsys, "formality", "example:torus", "--pipeline", "theorem1")
    assert code == 1 and rep["verdict"] == "not-applicable"


def test_formality_pipeline_trace(capsys):
    code, rep, _ = machine(capsys, "formality", "example:S1vS1vS2", "--pipeline", "theorem1",
                           "--cap", "5")
    assert code == 0 and [s["n"] for s in rep["trace"]] == [3, 4, 5]


# corpus

def test_corpus_list(capsys):
    code, rep, _ = machine(capsys, "corpus")
    assert code == 0 and len(rep["entries"]) == len(example_corpus())


def test_corpus_run_filter(capsys):
    code, out, _ = run(capsys, "corpus", "--run-all", "--filter", "circle")
    assert code == 0 and out.startswith("PASS")


def test_corpus_empty_filter(capsys):
    code, _, _ = run(capsys, "corpus", "--filter", " ")
    assert code == 2


def test_corpus_corrupted_expectation(capsys, monkeypatch):
    real = example_corpus

    def corrupted():
        out = real()
        for e in out:
            if e.name == "circle":
                e.expected["cup_length"] = 5
        return out
    monkeypatch.setattr("dgformal.cli.example_corpus", corrupted)
    code, out, _ = run(capsys, "corpus", "--run-all", "--filter", "circle")
    assert code == 1 and "FAIL" in out and "cup_length" in out


# documents

def test_export_complex_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "export", "torus")
    assert code == 0
    doc = json.loads(out)
    X = docs.complex_from_document(doc)
    assert X.simplices == torus7().simplices
    code, rep, _ = machine(capsys, "cohomology", write(tmp_path, out))
    assert rep["dims"] == {"0": 1, "1": 2, "2": 1}


def test_export_algebra_round_trip(capsys):
    code, out, _ = run(capsys, "export", "Heisenberg")
    A = docs.algebra_from_document(json.loads(out))
    B = heisenberg()
    assert A.space == B.space and A.d == B.d and A.product.entries == B.product.entries
    assert docs.algebra_to_document(A) == json.loads(out)


def test_stdin_input(capsys, monkeypatch):
    import io
    doc = docs.dumps(docs.complex_to_document(cx.circle()))
    monkeypatch.setattr("sys.stdin", io.StringIO(doc))
    code, rep, _ = machine(capsys, "cohomology", "-")
    assert code == 0 and rep["dims"] == {"0": 1, "1": 1}


def test_basepoint_option(capsys):
    code, rep, _ = machine(capsys, "--basepoint", "2", "formality", "example:circle")
    assert code == 0


def test_scalars_round_trip():
    for q in (Fraction(0), Fraction(3), Fraction(-7, 2)):
        assert docs.parse_scalar(docs.scalar_to_str(q), "$") == q
    for bad in (1.5, True, "1/0", "x"):
        with pytest.raises(DocumentError):
            docs.parse_scalar(bad, "$")
