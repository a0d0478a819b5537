import random

import pytest
import sympy as sp

from brstlab.brst.augment import InvarianceError
from brstlab.brst.fields import SuperField
from brstlab.liealg import su2
from brstlab.phasespace import Flat, PerturbedTorus, PhaseFunction, Point, Torus
from brstlab.reduction import (
    CERTIFIED, ReductionRefused, alternate_homotopy_check, consistency_verdict, dirac_check,
    field_lam_dict, reduced_table, solve_invariant, vey_order_audit,
)
from brstlab.scalars import ConfigurationError, I, ONE

import oracles as O

N = 5
T, PT = Torus(), PerturbedTorus()
Z, P = (1, 0, 0, 0), (0, 0, 1, 0)


def test_solver_examples():
    out = solve_invariant(PT, Z, N)
    assert not out.ok and out.obstruction.order == 1
    assert out.obstruction.residual == PhaseFunction.monomial(Z, -I)
    for m in range(4):
        ext = solve_invariant(PT, (0, 0, m, 0), N).extension
        assert ext == SuperField.monomial(PT, N, 0, (0, 0, m, 0))
    assert solve_invariant(T, Z, N).extension == SuperField.monomial(T, N, 0, Z)


def test_solver_rejects_non_invariant_seed():
    with pytest.raises(InvarianceError):
        solve_invariant(T, (0, 1, 0, 0), N)
    with pytest.raises(ConfigurationError):
        solve_invariant(Point(su2()), (), N)


def test_verdicts():
    v = consistency_verdict(T, T.invariant_box(3), N)
    assert v.status == "CONSISTENT" and v.label == CERTIFIED
    v = consistency_verdict(PT, PT.invariant_box(3), N)
    assert v.status == "FAILS" and v.witness == Z
    assert sorted(v.extendable) == sorted(k for k in PT.invariant_box(3) if k[0] == 0)
    F = Flat(2, 1)
    v = consistency_verdict(F, F.invariant_box(3), N)
    assert v.status == "CONSISTENT" and v.label == CERTIFIED


def test_verdict_stable_under_reshuffle_and_order():
    box = PT.invariant_box(2)
    shuffled = box[:]
    random.Random(4).shuffle(shuffled)
    a = consistency_verdict(PT, box, 3)
    b = consistency_verdict(PT, shuffled, 3)
    c = consistency_verdict(PT, box, 6)
    assert a.status == b.status == c.status == "FAILS"
    assert a.witness == b.witness == c.witness
    assert sorted(a.failing) == sorted(b.failing) == sorted(c.failing)
    assert a.obstruction.order == c.obstruction.order == 1


def test_reduced_table_examples():
    tab = reduced_table(T, 1, N)

    def red(u, v):
        return field_lam_dict(tab[(u, v)])
    assert red(Z, P) == {(0, (1, 0, 1, 0)): ONE, (1, Z): ONE}
    assert red(P, Z) == {(0, (1, 0, 1, 0)): ONE}
    assert red(Z, (-1, 0, 0, 0)) == {(0, T.unit): ONE}
    assert red(T.unit, (1, 0, 1, 0)) == {(0, (1, 0, 1, 0)): ONE}
    with pytest.raises(ReductionRefused):
        reduced_table(PT, 1, N)


def test_reduced_table_matches_sympy_oracle():
    tab = reduced_table(T, 3, N)
    phi, p, lam = O.phi, O.p, O.lam
    for (u, v), prod in tab.items():
        fu = sp.exp(sp.I * u[0] * phi) * p ** u[2]
        fv = sp.exp(sp.I * v[0] * phi) * p ** v[2]
        want = O.exp_bidiff(fu, fv, [(lam / sp.I, phi, p)], N)
        got = sum(O.torus_expr(PhaseFunction({k: c})) * lam ** r for (r, k), c in field_lam_dict(prod).items())
        assert sp.expand(got - want) == 0, (u, v)


def test_vey_audit():
    rep = vey_order_audit(T, N, 4)
    assert rep.ok and rep.orders[0] == (0, 0) and rep.orders[1] == (1, 1)
    rep = vey_order_audit(Flat(2, 1), N, 4)
    assert rep.ok and all(max(o) <= r for r, o in rep.orders.items())


def test_dirac_check():
    assert dirac_check(T, T.invariant_box(1), N) is None
    F = Flat(2, 1)
    assert dirac_check(F, F.invariant_box(1), N) is None


def test_alternate_choice_equivalence():
    rep = alternate_homotopy_check(order=4, max_degree=1)
    assert rep.ok and len(rep.orders_ok) == 5
