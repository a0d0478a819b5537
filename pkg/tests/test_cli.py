import json

import pytest

from brstlab.cli import main
from brstlab.expressions import parse_field, parse_operands
from brstlab.phasespace import Flat, Torus
from brstlab.scalars import ConfigurationError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_json_schema_and_determinism(capsys):
    argv = ["verify", "--backend", "point", "--lie", "aff1", "--order", "3", "--samples", "6",
            "--seed", "7", "--format", "json"]
    code, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    assert code == 0
    assert set(doc) == {"config", "cases", "summary"}
    assert doc["summary"] == {"pass": len(doc["cases"]), "fail": 0}
    assert all(set(c) <= {"name", "status", "witness"} and c["status"] in ("pass", "fail") for c in doc["cases"])
    assert run(capsys, *argv)[1] == out


def test_verify_single_suite_text(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "homotopy", "--backend", "torus-perturbed",
                       "--order", "3", "--samples", "4")
    assert code == 0 and "PASS homotopy/quantum-homotopy-identity" in out


def test_incompatible_algebra(capsys):
    code, _, err = run(capsys, "verify", "--backend", "flat:2,1", "--lie", "su2")
    assert code == 2 and "abelian:1" in err


def test_torus_table(tmp_path, capsys):
    path = tmp_path / "t.json"
    code, _, _ = run(capsys, "torus", "--max-degree", "1", "--out", str(path))
    doc = json.loads(path.read_text())
    assert code == 0 and doc["verdict"]["label"] == "CERTIFIED-BY-THEOREM"
    row = next(r for r in doc["table"] if r["u"] == "z" and r["v"] == "p")
    assert row["product"] == "(z*p + lam*(z))"


def test_torus_perturbed_refuses_table(capsys):
    code, _, err = run(capsys, "torus", "--variant", "perturbed", "--max-degree", "1")
    assert code == 2 and "seed z obstructed at order 1" in err


def test_torus_perturbed_obstruction(capsys):
    code, out, _ = run(capsys, "torus", "--variant", "perturbed", "--emit", "obstruction", "--max-degree", "1")
    doc = json.loads(out)
    assert code == 0
    first = next(o for o in doc["obstructions"] if o["seed"] == "z")
    assert first["order"] == 1 and first["residual"] == "-i*z"
    assert doc["verdict"]["extendable"] == ["1", "p"]


def test_reduce_flat(capsys):
    code, out, _ = run(capsys, "reduce", "--backend", "flat:2,1", "--order", "3", "--max-degree", "1")
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["fail"] == 0
    assert doc["vey_orders"]["1"] == [1, 1]


def test_eval(capsys):
    assert run(capsys, "eval", "--expr", "z;p")[1].strip() == "(z*p + lam*(z))"
    assert run(capsys, "eval", "--expr", "x1;p1", "--backend", "flat:2,1")[1].strip() == "(x1*p1 + lam*(-i))"
    out = run(capsys, "eval", "--expr", "J*z", "--op", "restrict", "--backend", "torus-perturbed")[1]
    assert out.strip() == "(lam^2*(z))"
    code, _, err = run(capsys, "eval", "--expr", "z", "--op", "star")
    assert code == 2 and "two operands" in err


def test_parser():
    T = Torus()
    f = parse_field(T, 2, "z^-2*(1/2 + i*p) - lam*J + e^1^e_1*w")
    assert str(f) == "(1/2*z^-2 + i*z^-2*p + lam*(-J)) + e^1^e_1*(w)"
    assert str(parse_field(Flat(2, 1), 2, "x1*p2^2 - 3")) == "(-3 + x1*p2^2)"
    assert str(parse_field(T, 2, "e_1^e^1")) == str(parse_field(T, 2, "-e^1^e_1"))
    assert len(parse_operands(T, 2, "z;p")) == 2
    for bad in ("x1", "p^-1", "(z", "z z", "", "z^1/2", "q"):
        with pytest.raises(ConfigurationError):
            parse_field(T, 2, bad)
