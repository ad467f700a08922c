import json
from fractions import Fraction

import pytest

import relbn
from relbnlib import (ClassBGraph, count_covers, parse_bwg, parse_dimacs, parse_plate, parse_spec,
                      plate_to_spec)

from conftest import read_sample, sample_path


def run(capsys, *argv):
    code = relbn.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_format_decimal():
    assert relbn.format_decimal(Fraction(17, 125)) == "0.136000000000"
    assert relbn.format_decimal(Fraction(11, 30)) == "0.366666666667"
    assert relbn.format_decimal(0) == "0.00000000000"
    assert relbn.format_decimal(1) == "1.00000000000"
    assert relbn.format_decimal(Fraction(1, 3)) == "0.333333333333"


def test_infer_friends(capsys):
    code, out, _ = run(capsys, "infer", "--spec", sample_path("friends.rbn"), "--n", "2", "--query",
                       "friends(1,2)=1")
    assert code == 0
    assert out.splitlines() == ["17/125 (0.136000000000)", "engine: qf-pruned"]


def test_infer_threshold(capsys):
    code, out, _ = run(capsys, "infer", "--spec", sample_path("fig2.rbn"), "--n", "1", "--query",
                       "x=1; gamma=1/3")
    assert code == 0
    assert out.splitlines() == ["11/30 > 1/3 : true", "engine: qf-pruned"]
    code, out, err = run(capsys, "infer", "--spec", sample_path("fig2.rbn"), "--n", "1", "--query",
                         "x=1; gamma=2")
    assert code == 1
    assert out == "" and "gamma" in err


def test_infer_json_lines(capsys):
    code, out, _ = run(capsys, "infer", "--spec", sample_path("fig2.rbn"), "--n", "1", "--query",
                       "x=1", "--format", "json-lines", "--engine", "bruteforce")
    assert code == 0
    record = json.loads(out)
    assert record == {
        "engine": "bruteforce",
        "value_num": 11,
        "value_den": 30,
        "decision": None,
        "calls": 8,
        "elapsed_ms": None,
    }


def test_infer_timing(capsys):
    code, out, _ = run(capsys, "infer", "--spec", sample_path("fig2.rbn"), "--n", "1", "--query",
                       "x=1", "--format", "json-lines", "--timing")
    assert code == 0
    assert json.loads(out)["elapsed_ms"] >= 0


def test_infer_exit_codes(capsys, tmp_path):
    spec = tmp_path / "zero.rbn"
    spec.write_text("prob a() = 0.\ndef b() := a().\n")
    code, _, err = run(capsys, "infer", "--spec", str(spec), "--n", "1", "--query", "a=1 | b=1")
    assert code == 3
    assert "error:" in err

    code, _, _ = run(capsys, "infer", "--spec", sample_path("friends.rbn"), "--n", "10", "--query",
                     "friends(1,2)=1", "--node-cap", "100")
    assert code == 2

    broken = tmp_path / "broken.rbn"
    broken.write_text("def a() := b().\n")
    code, _, err = run(capsys, "infer", "--spec", str(broken), "--n", "1", "--query", "a=1")
    assert code == 1

    code, _, _ = run(capsys, "infer", "--spec", str(tmp_path / "missing.rbn"), "--n", "1",
                     "--query", "a=1")
    assert code == 1


def test_count_graphs(capsys):
    assert run(capsys, "count", "--graph", sample_path("path4.bwg"))[:2] == (0, "5\n")
    assert run(capsys, "count", "--graph", sample_path("k22black.bwg"))[:2] == (0, "7\n")


def test_count_class_b_calls(capsys):
    code, out, _ = run(capsys, "count", "--classB", "3", "3", "2", "2", "--calls")
    assert code == 0
    lines = out.splitlines()
    assert int(lines[0]) == count_covers(ClassBGraph(3, 3, 2, 2))
    assert lines[1] == "calls: 36 (bound 36)"
    code, out, _ = run(capsys, "count", "--classB", "1", "2", "2", "1", "--oracle")
    assert code == 0
    assert out.splitlines()[-1] == "oracle: ok"


def test_count_partition_function(capsys):
    code, out, _ = run(capsys, "count", "--graph", sample_path("path4.bwg"), "--lambda", "1/2",
                       "--oracle")
    assert code == 0
    assert out.splitlines() == ["11/8 (1.37500000000)", "oracle: ok"]


def test_count_rejects_bad_lambda(capsys):
    code, _, _ = run(capsys, "count", "--graph", sample_path("path4.bwg"), "--lambda", "0")
    assert code == 1


def test_encode_plate(capsys, tmp_path):
    target = tmp_path / "university.rbn"
    code, _, err = run(capsys, "encode", "plate", sample_path("university.plate"), "--verify", "-o",
                       str(target))
    assert code == 0
    assert "verify: QF" in err
    expected = plate_to_spec(parse_plate(read_sample("university.plate")))
    assert parse_spec(target.read_text()) == expected


def test_encode_prm(capsys):
    code, out, _ = run(capsys, "encode", "prm", sample_path("university.prm"), "--skeleton",
                       sample_path("university.skel"))
    assert code == 0
    assert "# domain 3" in out
    assert run(capsys, "encode", "prm", sample_path("university.prm"))[0] == 1


def test_encode_gadget(capsys):
    code, out, err = run(capsys, "encode", "gadget", sample_path("phi.cnf"), "--verify")
    assert code == 0
    assert "verify: 6 = 6" in err
    assert parse_dimacs(out).num_vars == 13


def test_encode_matrix(capsys):
    code, out, err = run(capsys, "encode", "matrix", "3", "2", "5", "6", "--to", "bwg")
    assert code == 0
    assert parse_bwg(out) == ClassBGraph(4, 3, 2, 2, isolated_free_edges=8)
    code, out, err = run(capsys, "encode", "matrix", "1", "1", "2", "2", "--verify")
    assert code == 0
    assert "verify: 10" in err
    assert len(parse_dimacs(out).clauses) == 2
    assert run(capsys, "encode", "matrix", "2", "1", "2", "3")[0] == 1


def test_classify(capsys):
    assert run(capsys, "classify", "--spec", sample_path("family.rbn"))[1] == \
        "DLLiteNFWithPrimitiveNegation\n"
    assert run(capsys, "classify", "--spec", sample_path("example5.rbn"))[1] == "FFFOk(3)\n"


def test_ground(capsys):
    code, out, _ = run(capsys, "ground", "--spec", sample_path("fig2.rbn"), "--n", "1")
    assert code == 0
    assert "root y() 1/3" in out


def test_mpe(capsys, tmp_path):
    spec = tmp_path / "role.rbn"
    spec.write_text("prob r(x,y) = 1/4.\ndef A(x) := exists y: r(x,y).\n")
    code, out, _ = run(capsys, "mpe", "--spec", str(spec), "--n", "2", "--evidence", "A(1)=1, A(2)=1")
    assert code == 0
    assert out.splitlines()[1] == "9/256 (0.0351562500000)"


def test_sample(capsys):
    code, out, _ = run(capsys, "sample", "--graph", sample_path("path4.bwg"), "--steps", "50",
                       "--seed", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("cover: ")
    assert len(lines) == 1 + 3


@pytest.mark.parametrize("argv", [[], ["infer"], ["count"], ["encode", "nope", "x"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit):
        relbn.main(argv)
