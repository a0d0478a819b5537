"""Acceptance criteria, one test each.  Every test prints a single PASS/FAIL line with its runtime."""

import random
import time
from fractions import Fraction

import pytest
import sympy as sp

from brstlab.brst import augment as au
from brstlab.brst import operators as op
from brstlab.brst.fields import SuperField, star_kappa
from brstlab.liealg import aff1, su2
from brstlab.phasespace import Flat, PerturbedTorus, PhaseFunction, Point, Torus
from brstlab.reduction import (
    CERTIFIED, alternate_homotopy_check, consistency_verdict, dirac_check, field_lam_dict,
    reduced_table, solve_invariant, vey_order_audit,
)
from brstlab.sampling import random_field
from brstlab.scalars import I, ONE
from brstlab.suites import Context, classical_cases

import oracles as O

N = 5
KAPPAS = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)]


def configs():
    return [Torus(), PerturbedTorus(), Flat(2, 1), Flat(3, 2), Point(su2()), Point(aff1())]


@pytest.fixture
def verdict(capsys):
    """Call with (number, title, ok, started, limit); prints one line and asserts."""
    def check(number, title, ok, started, limit):
        elapsed = time.perf_counter() - started
        status = "PASS" if ok and elapsed < limit else "FAIL"
        with capsys.disabled():
            print(f"\ncriterion {number:2d} {title}: {status} ({elapsed:.2f}s, limit {limit}s)")
        assert ok, f"criterion {number} identity check failed"
        assert elapsed < limit, f"criterion {number} took {elapsed:.2f}s"
    return check


def first_bad(items, pred):
    for x in items:
        if not pred(x):
            return x
    return None


def word_monomials(be, keys, antighosts=None, constraint_only=False):
    """All word x key monomials (lam^0), optionally restricted in antighost degree."""
    n = be.dim
    out = []
    for m in range(1 << (2 * n)):
        l = bin(m >> n).count("1")
        if antighosts is not None and l != antighosts:
            continue
        if constraint_only and m >> n:
            continue
        for k in keys:
            out.append(SuperField.monomial(be, N, m, k))
    return out


def torus_keys(D=1, with_J=True, with_w=True):
    Js = range(3) if with_J else (0,)
    ws = range(-D, D + 1) if with_w else (0,)
    return [(a, b, m, j) for a in range(-D, D + 1) for b in ws for m in range(2) for j in Js]


def flat_keys(F, deg=1, constraint=False):
    keys = []
    for idx in range(2 ** (2 * F.d)):
        key = tuple((idx >> i) & 1 for i in range(2 * F.d))
        if sum(key) <= deg + 1 and not (constraint and not F.is_constraint_key(key)):
            keys.append(key)
    return keys


def test_01_nilpotent_charge(verdict):
    t0 = time.perf_counter()
    ok = True
    for be in configs():
        for k in KAPPAS:
            th = op.theta_kappa(be, N, k)
            ok &= not star_kappa(th, th, k)
    verdict(1, "nilpotent charge", ok, t0, 5)


def test_02_double_complex(verdict):
    t0 = time.perf_counter()
    rng = random.Random(2)
    ce, kz = op.quant_ce, op.quant_koszul
    ok = True
    for be in configs():
        for _ in range(50):
            f = random_field(rng, be, N)
            a, b = ce(f), kz(f)
            ok &= not ce(a) and not kz(b) and not (ce(b) + kz(a))
            ok &= op.brst_standard(f) == a + b.scale(2)
    verdict(2, "double complex", ok, t0, 10)


def test_03_kappa_splitting(verdict):
    t0 = time.perf_counter()
    rng = random.Random(3)
    ok = True
    for be in configs():
        for _ in range(6):
            f = random_field(rng, be, N)
            for k in KAPPAS:
                d_k = op.brst_kappa(f, k)
                ce_k = op.ce_kappa_formula(f, k)
                kz_k = op.koszul_kappa_formula(f, k)
                ok &= d_k == op.brst_kappa_formula(f, k)
                ok &= d_k == ce_k + kz_k.scale(2)
                ok &= op.conjugate(op.quant_ce, f, k) == ce_k
                ok &= op.conjugate(op.quant_koszul, f, k) == kz_k
                # the two pieces are super-commuting differentials
                ok &= not op.conjugate(op.quant_ce, ce_k, k)
                ok &= not op.conjugate(op.quant_koszul, kz_k, k)
                ok &= not (op.conjugate(op.quant_ce, kz_k, k) + op.conjugate(op.quant_koszul, ce_k, k))
            ok &= op.brst_weyl(f) == op.weyl_brst_formula(f)
            ok &= op.weyl_ce_formula(f) == op.conjugate(op.quant_ce, f, Fraction(1, 2))
            ok &= op.weyl_koszul_formula(f) == op.conjugate(op.quant_koszul, f, Fraction(1, 2))
    verdict(3, "kappa splitting", ok, t0, 20)


def test_04_commutation_lemma(verdict):
    t0 = time.perf_counter()
    rng = random.Random(4)
    lap = op.laplacian
    ok = True
    for be in (Point(su2()), Point(aff1()), Torus()):
        for _ in range(20):
            f = random_field(rng, be, N)

            def comm(A, B):
                return A(B(f)) - B(A(f))
            ok &= comm(lap, op.op_q) == op.op_c(f)
            for B in (op.op_c, op.op_ms, op.op_ma, op.op_u):
                ok &= not comm(lap, B)
            ok &= comm(lap, op.quant_ce) == -op.op_q(f).scale(2) - op.op_ma_minus_ms_over_ilam(f) + op.op_u(f)
            for k in KAPPAS:
                ok &= op.conjugate(op.op_q, f, k) == op.op_q(f) - op.op_c(f).scale(2 * I * k, 1)
                for B in (op.op_ms, op.op_ma, op.op_u):
                    ok &= op.conjugate(B, f, k) == B(f)
                ok &= op.conjugate(op.quant_ce, f, k) == (
                    op.quant_ce(f) + op.op_q(f).scale(4 * I * k, 1) + (op.op_ma(f) - op.op_ms(f)).scale(2 * k)
                    - op.op_u(f).scale(2 * I * k, 1) + op.op_c(f).scale(4 * k * k, 2))
    verdict(4, "commutation lemma", ok, t0, 10)


def test_05_deformed_augmentation(verdict):
    t0 = time.perf_counter()
    r, prol = au.deformed_restriction, au.prolong
    ok = True
    F = Flat(2, 1)
    cases = [(Torus(), torus_keys(1, with_J=False), torus_keys(1)),
             (PerturbedTorus(), torus_keys(1, with_J=False), torus_keys(1)),
             (F, flat_keys(F, 1, constraint=True), flat_keys(F, 1))]
    for be, ckeys, keys in cases:
        for c in word_monomials(be, ckeys, constraint_only=True):
            ok &= r(prol(c)) == c
        for g in word_monomials(be, keys, antighosts=1):
            ok &= not r(op.quant_koszul(g))
        for f in word_monomials(be, keys, antighosts=0):
            proj = prol(r(f))
            ok &= prol(r(proj)) == proj
            rest = f - proj
            ok &= not r(rest)
            ok &= rest == op.quant_koszul(au.deformed_homotopy(f))
    verdict(5, "deformed augmentation", ok, t0, 10)


def test_06_quantum_homotopy(verdict):
    t0 = time.perf_counter()
    ok = True
    F = Flat(2, 2)
    for be, keys in ((F, flat_keys(F, 1)), (Torus(), torus_keys(1))):
        zero = SuperField.zero(be, N)
        for x in word_monomials(be, keys):
            a = au.AugmentedField(zero, x)
            ok &= not (au.aug_koszul_q(au.aug_homotopy_q(a)) + au.aug_homotopy_q(au.aug_koszul_q(a)) - a)
        for c in word_monomials(be, [k for k in keys if be.is_constraint_key(k)], constraint_only=True):
            a = au.AugmentedField(c, zero)
            ok &= not (au.aug_koszul_q(au.aug_homotopy_q(a)) + au.aug_homotopy_q(au.aug_koszul_q(a)) - a)
    verdict(6, "quantum homotopy", ok, t0, 15)


def test_07_classical_suite(verdict):
    t0 = time.perf_counter()
    ok = True
    for be in configs():
        cases = classical_cases(Context(be, N, 10, random.Random(7)))
        ok &= all(c.passed for c in cases)
        if type(be) is Torus:
            ok &= any(c.name == "reduced-poisson-bracket-on-cotangent-circle" and c.passed for c in cases)
    verdict(7, "classical suite", ok, t0, 10)


def test_08_standard_torus_table(verdict):
    t0 = time.perf_counter()
    T = Torus()
    tab = reduced_table(T, 3, N)
    phi, p, lam = O.phi, O.p, O.lam
    ok = len(tab) == 28 * 28
    for (u, v), prod in tab.items():
        fu = sp.exp(sp.I * u[0] * phi) * p ** u[2]
        fv = sp.exp(sp.I * v[0] * phi) * p ** v[2]
        want = O.exp_bidiff(fu, fv, [(lam / sp.I, phi, p)], N)
        got = sum(O.torus_expr(PhaseFunction({k: c})) * lam ** r for (r, k), c in field_lam_dict(prod).items())
        ok &= sp.expand(got - want) == 0
    ok &= field_lam_dict(tab[((1, 0, 0, 0), (0, 0, 1, 0))]) == {(0, (1, 0, 1, 0)): ONE, (1, (1, 0, 0, 0)): ONE}
    verdict(8, "standard torus reduced table", ok, t0, 5)


def test_09_perturbed_counterexample(verdict):
    t0 = time.perf_counter()
    PT = PerturbedTorus()
    out = solve_invariant(PT, (1, 0, 0, 0), N)
    ok = not out.ok and out.obstruction.order == 1 and bool(out.obstruction.residual)
    box = PT.invariant_box(3)
    v = consistency_verdict(PT, box, N)
    ok &= v.status == "FAILS" and v.witness == (1, 0, 0, 0)
    ok &= set(v.extendable) == {k for k in box if k[0] == 0}
    ok &= set(v.failing) == {k for k in box if k[0] != 0}
    verdict(9, "perturbed torus counterexample", ok, t0, 5)


def test_10_strong_invariance_collapse(verdict):
    t0 = time.perf_counter()
    ok = True
    F21, F32 = Flat(2, 1), Flat(3, 2)
    for be, keys in ((Torus(), torus_keys(1, with_J=False)), (F21, flat_keys(F21, 2, constraint=True)),
                     (F32, flat_keys(F32, 1, constraint=True))):
        for c in word_monomials(be, keys, constraint_only=True):
            for b in range(be.dim):
                ok &= au.lie_c(c, b) == au.lie_c_classical(c, b)
            ok &= au.ce_on_c(c) == au.class_ce_on_c(c)
        v = consistency_verdict(be, be.invariant_box(2), N)
        ok &= v.status == "CONSISTENT" and v.label == CERTIFIED
    verdict(10, "strong-invariance collapse", ok, t0, 5)


def test_11_cohomology_round_trip(verdict):
    t0 = time.perf_counter()
    T = Torus()
    ok = True
    for key in ((0, 0, 0, 0), (1, 0, 0, 0), (0, 0, 1, 0), (1, 0, 1, 0)):
        for mask in (0, 1):  # the invariant itself and e^1 times it
            c = SuperField.monomial(T, N, mask, key)
            a = au.psi_inverse(c)
            ok &= not op.brst_standard(a)
            ok &= au.psi(a) == c
    verdict(11, "quantum cohomology round trip", ok, t0, 10)


def test_12_dirac_picture(verdict):
    t0 = time.perf_counter()
    T, F = Torus(), Flat(2, 1)
    ok = dirac_check(T, T.invariant_box(3), N) is None
    ok &= dirac_check(F, F.invariant_box(2), N) is None
    verdict(12, "Dirac picture", ok, t0, 10)


def test_13_vey_audit(verdict):
    t0 = time.perf_counter()
    ok = True
    for be in (Torus(), Flat(2, 1)):
        rep = vey_order_audit(be, N, 4)
        ok &= rep.ok and all(o[0] <= r and o[1] <= r for r, o in rep.orders.items())
    verdict(13, "Vey audit", ok, t0, 10)


def test_14_alternate_homotopy(verdict):
    t0 = time.perf_counter()
    rep = alternate_homotopy_check(order=N, max_degree=2)
    ok = rep.ok and len(rep.orders_ok) == N + 1
    verdict(14, "alternate homotopy spot check", ok, t0, 20)
