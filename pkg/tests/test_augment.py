import random

from hypothesis import given, settings, strategies as st

from brstlab.brst import augment as au
from brstlab.brst import operators as op
from brstlab.brst.fields import SuperField, star_kappa
from brstlab.phasespace import Flat, PerturbedTorus, Torus
from brstlab.sampling import random_boundary, random_field
from brstlab.scalars import Scalar

N = 4
T, PT = Torus(), PerturbedTorus()
Z, W, P, J = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)
A1 = 2


def mono(be, key, mask=0, c=1, r=0):
    return SuperField.monomial(be, N, mask, key, Scalar.coerce(c), r)


def test_standard_restriction_is_pullback():
    rng = random.Random(0)
    for _ in range(10):
        f = random_field(rng, T, N, antighosts=0)
        assert au.deformed_restriction(f) == au.restrict(f)


def test_perturbed_restriction_examples():
    assert au.deformed_restriction(mono(PT, (1, 0, 0, 1))) == mono(PT, Z, 0, 1, 2)
    assert not au.deformed_restriction(mono(PT, J))


def test_ideal_membership_examples():
    assert au.ideal_membership(mono(T, J))
    rng = random.Random(1)
    for _ in range(5):
        f = random_field(rng, T, N, antighosts=0)
        assert au.ideal_membership(star_kappa(f, mono(T, J), 0))
    assert not au.ideal_membership(mono(T, Z))
    assert au.ideal_membership(mono(PT, J))


def test_standard_torus_homotopy_is_undeformed():
    rng = random.Random(2)
    for _ in range(10):
        f = random_field(rng, T, N, antighosts=0)
        assert au.deformed_homotopy(f) == au.homotopy(f)


def _aug(rng, be):
    return au.AugmentedField(random_boundary(rng, be, N, 2), random_field(rng, be, N, 4))


@settings(max_examples=10)
@given(st.sampled_from([T, PT, Flat(2, 1), Flat(2, 2)]), st.integers(0, 10**6))
def test_homotopy_identities(be, seed):
    x = _aug(random.Random(seed), be)
    assert not (au.aug_koszul_q(au.aug_homotopy_q(x)) + au.aug_homotopy_q(au.aug_koszul_q(x)) - x)
    assert not (au.aug_koszul(au.aug_homotopy(x)) + au.aug_homotopy(au.aug_koszul(x)) - x)
    assert not (au.aug_brst_q(au.h_prime_q(x)) + au.h_prime_q(au.aug_brst_q(x)) - x)
    assert not (au.aug_brst(au.h_prime(x)) + au.h_prime(au.aug_brst(x)) - x)


@settings(max_examples=8)
@given(st.sampled_from([T, Flat(2, 1), Flat(2, 2)]), st.integers(0, 10**6))
def test_strongly_invariant_h_prime_is_half_h(be, seed):
    x = _aug(random.Random(seed), be)
    anti = au.aug_ce_q(au.aug_homotopy_q(x)) + au.aug_homotopy_q(au.aug_ce_q(x))
    assert not anti
    assert au.h_prime_q(x) == au.aug_homotopy_q(x).scale(Scalar(1, 0) / 2)


@settings(max_examples=10)
@given(st.sampled_from([T, PT, Flat(2, 1)]), st.integers(0, 10**6))
def test_deformed_restriction_properties(be, seed):
    rng = random.Random(seed)
    c = random_boundary(rng, be, N)
    assert au.deformed_restriction(au.prolong(c)) == c
    g = random_field(rng, be, N, antighosts=1)
    assert not au.deformed_restriction(op.quant_koszul(g))
    f = random_field(rng, be, N, antighosts=0)
    r, prol = au.deformed_restriction, au.prolong
    assert f == prol(r(f)) + op.quant_koszul(au.deformed_homotopy(f))
    assert au.closed_form_restriction(f) == r(f)


def test_psi_examples():
    p = mono(T, P)
    assert au.psi_inverse(p) == au.prolong(p)
    assert au.psi(au.psi_inverse(p)) == p
    one = SuperField.one(T, N)
    assert au.psi_inverse(one) == one
    z = mono(T, Z)
    rep = au.psi_inverse(z)
    assert not op.brst_standard(rep) and au.psi(rep) == z


def test_perturbed_lie_action_on_c():
    u = mono(PT, (2, 1, 1, 0))
    # -d_psi u - lam d_phi u
    assert au.lie_c(u, 0) == mono(PT, (2, 1, 1, 0), 0, Scalar(0, -1)) + mono(PT, (2, 1, 1, 0), 0, Scalar(0, -2), 1)
    assert au.lie_c(mono(T, (2, 1, 1, 0)), 0) == mono(T, (2, 1, 1, 0), 0, Scalar(0, -1))
