import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from brstlab.brst.augment import homotopy, prolong, restrict
from brstlab.brst.fields import SuperField
from brstlab.liealg import su2
from brstlab.phasespace import (
    Flat, PerturbedTorus, PhaseFunction, Point, Torus, covariance_check, make_backend,
    strong_invariance_check,
)
from brstlab.scalars import ConfigurationError, I, ONE, Scalar
from brstlab.sampling import random_function

import oracles as O

N = 3
Z, Wk, Pk, Jk = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)


def mono(key, c=1):
    return PhaseFunction.monomial(key, Scalar.coerce(c))


def lam_dict(series):
    return {(r, k): v for r, f in enumerate(series.coeffs) for k, v in f.terms.items()}


def test_torus_star_examples():
    T = Torus()
    assert lam_dict(T.star(mono(Z), mono(Pk), 2)) == {(0, (1, 0, 1, 0)): ONE, (1, Z): ONE}
    assert lam_dict(T.star(mono(Jk), mono(Wk), 2)) == {(0, (0, 1, 0, 1)): ONE, (1, Wk): ONE}
    assert lam_dict(T.star(mono(Wk), mono(Jk), 2)) == {(0, (0, 1, 0, 1)): ONE}
    f = mono((2, -1, 3, 1), Scalar(1, 2))
    assert lam_dict(T.star(mono(T.unit), f, 2)) == lam_dict(T.star(f, mono(T.unit), 2)) == {(0, (2, -1, 3, 1)): Scalar(1, 2)}


def test_flat_star_examples():
    F = Flat(2, 1)
    x1, p1 = F.atoms["x1"], F.atoms["p1"]
    assert lam_dict(F.star(mono(x1), mono(p1), 2)) == {(0, (1, 0, 1, 0)): ONE, (1, F.unit): -I}
    assert lam_dict(F.star(mono(p1), mono(x1), 2)) == {(0, (1, 0, 1, 0)): ONE}
    assert not F.restrict(mono(F.atoms["p2"]))


def test_strong_invariance_examples():
    T = Torus()
    # (1/i lam)(J * w - w * J) = -i w
    assert T.lie_classical(0, mono(Wk)) == mono(Wk, -I)
    assert not T.lie_classical(0, mono(Pk))
    assert strong_invariance_check(T, [(2, 3, 1, 1), Wk, Pk]) is None
    assert strong_invariance_check(Flat(3, 2), [Flat(3, 2).random_key(random.Random(s)) for s in range(10)]) is None
    assert strong_invariance_check(PerturbedTorus(), [Pk, Z]) == (Z, 0)


def test_perturbed_examples():
    PT = PerturbedTorus()
    # the inverse transformation moves J to J - lam p
    assert PT.s_map({(0, Jk): ONE}, 2, -1) == {(0, Jk): ONE, (1, Pk): -ONE}
    # ad(p) z = p * z - z * p = i lam d_phi z = -lam z
    assert lam_dict(PT.ad_star(mono(Z), 2)) == {(1, Z): -ONE}
    # z * J = zJ - lam^2 z
    assert lam_dict(PT.star(mono(Z), mono(Jk), 3)) == {(0, (1, 0, 0, 1)): ONE, (2, Z): -ONE}


def test_covariance():
    for be in (Torus(), PerturbedTorus(), Flat(3, 2), Point(su2())):
        assert covariance_check(be, N) is None


def torus_functions():
    key = st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(0, 2), st.integers(0, 2))
    return st.dictionaries(key, st.builds(Scalar, st.integers(-3, 3), st.integers(-2, 2)),
                           min_size=1, max_size=3).map(PhaseFunction)


@settings(max_examples=15)
@given(torus_functions(), torus_functions())
def test_torus_star_matches_oracle(f, g):
    got = O.series_expr(Torus().star(f, g, N), O.torus_expr)
    assert O.same(got, O.torus_star(O.torus_expr(f), O.torus_expr(g), N))


@settings(max_examples=10)
@given(torus_functions(), torus_functions())
def test_perturbed_star_matches_oracle(f, g):
    got = O.series_expr(PerturbedTorus().star(f, g, N), O.torus_expr)
    assert O.same(got, O.perturbed_star(O.torus_expr(f), O.torus_expr(g), N))


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from(["standard", "weyl"]))
def test_flat_star_matches_oracle(seed, ordering):
    F = Flat(2, 1, ordering)
    rng = random.Random(seed)
    f, g = random_function(rng, F), random_function(rng, F)
    got = O.series_expr(F.star(f, g, N), lambda u: O.flat_expr(u, 2))
    assert O.same(got, O.flat_star(O.flat_expr(f, 2), O.flat_expr(g, 2), 2, N, ordering == "weyl"))


@given(torus_functions(), torus_functions())
def test_torus_poisson_matches_oracle(f, g):
    a, b = O.torus_expr(f), O.torus_expr(g)
    want = (-sp.diff(a, O.phi) * sp.diff(b, O.p) + sp.diff(a, O.p) * sp.diff(b, O.phi)
            - sp.diff(a, O.J) * sp.diff(b, O.psi) + sp.diff(a, O.psi) * sp.diff(b, O.J))
    assert O.same(O.torus_expr(Torus().poisson(f, g)), want)


def field(be, key, mask=0, c=1):
    return SuperField.monomial(be, N, mask, key, c)


def test_classical_homotopy_examples():
    T = Torus()
    e1 = 1 << 1  # antighost bit for n = 1
    assert homotopy(field(T, (0, 0, 0, 3))) == field(T, (0, 0, 0, 2), e1)
    assert homotopy(field(T, (0, 1, 0, 1))) == field(T, Wk, e1)
    assert not homotopy(field(T, (1, 0, 1, 0)))
    F = Flat(2, 2)
    e_1, e_2 = 1 << 2, 1 << 3
    x = field(F, (0, 0, 1, 1), e_1)
    assert homotopy(x) == field(F, (0, 0, 1, 0), e_1 | e_2, Fraction(-1, 3))


def test_restrict_prolong_examples():
    T = Torus()
    f = SuperField.from_function(T, N, mono((1, 0, 0, 2)) + mono(Wk))
    assert restrict(f) == field(T, Wk)
    assert prolong(field(T, (1, 1, 0, 0))) == field(T, (1, 1, 0, 0))
    rng = random.Random(3)
    for be in (T, Flat(3, 2), PerturbedTorus()):
        for _ in range(5):
            c = SuperField.from_function(be, N, random_function(rng, be, constraint=True))
            assert restrict(prolong(c)) == c
            assert not homotopy(prolong(c))


def test_make_backend():
    assert make_backend("flat:3,2:weyl").ordering == "weyl"
    for bad in ("flat:2", "sphere", "point"):
        with pytest.raises(ConfigurationError):
            make_backend(bad)
