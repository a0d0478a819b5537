"""BRST charges, the BRST differentials and the operator family q, c, u, m_s, m_a."""

from __future__ import annotations

from fractions import Fraction

from ..grassmann import bidegree, laplacian_table, remove_left, wedge_sign
from ..liealg import chi_element, omega
from ..scalars import I, ONE, ZERO, Scalar
from .fields import (
    NEG_I, SuperField, antighost_bit, ghost_bit, graded_commutator, insert_left, star_kappa,
    super_poisson, wedge_left,
)

HALF = Fraction(1, 2)
WEYL = HALF
STANDARD = Fraction(0)


def _frac(kappa) -> Fraction:
    return Fraction(kappa)


# ------------------------------------------------------------------ elements

def momentum_field(backend, order, a: int | None = None) -> SuperField:
    """J = sum_a e^a (x) J_a, or the function J_a at word 1 when a (0-based) is given."""
    acc: dict = {}
    idx = range(backend.dim) if a is None else (a,)
    for b in idx:
        mask = 0 if a is not None else 1 << ghost_bit(backend.dim, b)
        for r, k, c in backend.momentum_terms(b):
            acc[(mask, r, k)] = acc.get((mask, r, k), ZERO) + c
    return SuperField(backend, order, acc)


def classical_momentum_field(backend, order) -> SuperField:
    return momentum_field(backend, order).select(lambda m, r, k: r == 0)


def omega_field(backend, order) -> SuperField:
    return SuperField.from_grass(backend, omega(backend.algebra, order))


def chi_field(backend, order) -> SuperField:
    return SuperField.from_grass(backend, chi_element(backend.algebra, order))


def gamma_field(backend, order) -> SuperField:
    n = backend.dim
    return SuperField(backend, order, {
        ((1 << ghost_bit(n, a)) | (1 << antighost_bit(n, a)), 0, backend.unit): Scalar(HALF)
        for a in range(n)})


def theta_kappa(backend, order, kappa) -> SuperField:
    """Omega + J + i lam (1 - 2 kappa) chi."""
    kap = _frac(kappa)
    th = omega_field(backend, order) + momentum_field(backend, order)
    if kap != HALF:
        th = th + chi_field(backend, order).scale(I * (1 - 2 * kap), lam_power=1)
    return th


def theta_classical(backend, order) -> SuperField:
    return omega_field(backend, order) + classical_momentum_field(backend, order)


# ------------------------------------------------------------------ lam-divided commutators

def _ad_over_ilam(x_of_order, a: SuperField, kappa) -> SuperField:
    """(1/i lam)[x, a]_kappa computed at order N+1, returned at order N."""
    N = a.order
    a1 = a.with_order(N + 1)
    comm = graded_commutator(x_of_order(N + 1), a1, kappa)
    return comm.lam_divide().scale(NEG_I)


def brst_kappa(a: SuperField, kappa) -> SuperField:
    """D_kappa = (1/i lam) ad_kappa(Theta_kappa)."""
    be = a.backend
    return _ad_over_ilam(lambda N: theta_kappa(be, N, kappa), a, kappa)


def brst_standard(a):
    return brst_kappa(a, STANDARD)


def brst_weyl(a):
    return brst_kappa(a, WEYL)


def ghost_number_op(a: SuperField, kappa=WEYL) -> SuperField:
    be = a.backend
    return _ad_over_ilam(lambda N: gamma_field(be, N), a, kappa)


def grading_op(a: SuperField) -> SuperField:
    n = a.n
    return a.map_words(lambda m: ((m, Scalar(bidegree(n, m)[0] - bidegree(n, m)[1])),))


def lie_m(a: SuperField, b: int) -> SuperField:
    """Quantum action (1/i lam)(J_b * F - F * J_b) on the function part (b 0-based)."""
    be = a.backend
    return _ad_over_ilam(lambda N: momentum_field(be, N, b), a, STANDARD)


def lie_m_classical(a: SuperField, b: int) -> SuperField:
    be = a.backend
    return super_poisson(momentum_field(be, a.order, b).select(lambda m, r, k: r == 0), a)


def s_kappa(a: SuperField, kappa) -> SuperField:
    """exp(2 i kappa lam Delta) (x) id."""
    kap = Scalar(_frac(kappa))
    n = a.n
    out, term, j = a, a, 0
    while True:
        j += 1
        term = term.map_words(lambda m: laplacian_table(n, m)).scale(
            Scalar(0, 2) * kap * Fraction(1, j), lam_power=1)
        if not term:
            return out
        out = out + term


def laplacian(a: SuperField) -> SuperField:
    n = a.n
    return a.map_words(lambda m: laplacian_table(n, m))


# ------------------------------------------------------------------ operator family, basis forms

def _structure(a: SuperField):
    return list(a.backend.algebra.nonzero())


def op_q(a: SuperField) -> SuperField:
    """-1/2 sum f^c_ab e_c ^ i(e^a) i(e^b)."""
    n = a.n
    out = SuperField.zero(a.backend, a.order)
    for c, x, y, v in _structure(a):
        t = insert_left(insert_left(a, antighost_bit(n, y)), antighost_bit(n, x))
        out = out + wedge_left(t, antighost_bit(n, c)).scale(-v / 2)
    return out


def op_c(a: SuperField) -> SuperField:
    """-1/2 sum f^c_ab i(e_c) i(e^a) i(e^b)."""
    n = a.n
    out = SuperField.zero(a.backend, a.order)
    for c, x, y, v in _structure(a):
        t = insert_left(insert_left(a, antighost_bit(n, y)), antighost_bit(n, x))
        out = out + insert_left(t, ghost_bit(n, c)).scale(-v / 2)
    return out


def op_u(a: SuperField) -> SuperField:
    """sum f^b_ab i(e^a)."""
    n = a.n
    out = SuperField.zero(a.backend, a.order)
    for b, x, y, v in _structure(a):
        if b == y:
            out = out + insert_left(a, antighost_bit(n, x)).scale(v)
    return out


def op_ms(a: SuperField) -> SuperField:
    """sum_a i(e^a) (F * J_a)."""
    be, n, N = a.backend, a.n, a.order
    out = SuperField.zero(be, N)
    for b in range(n):
        out = out + insert_left(star_kappa(a, momentum_field(be, N, b), STANDARD), antighost_bit(n, b))
    return out


def op_ma(a: SuperField) -> SuperField:
    """sum_a i(e^a) (J_a * F)."""
    be, n, N = a.backend, a.n, a.order
    out = SuperField.zero(be, N)
    for b in range(n):
        out = out + insert_left(star_kappa(momentum_field(be, N, b), a, STANDARD), antighost_bit(n, b))
    return out


def op_ma_minus_ms_over_ilam(a: SuperField) -> SuperField:
    """(1/i lam)(m_a - m_s), computed one order higher."""
    a1 = a.with_order(a.order + 1)
    return (op_ma(a1) - op_ms(a1)).lam_divide().scale(NEG_I)


# ------------------------------------------------------------------ operator family, definitions

def _split(n: int, m: int):
    low = (1 << n) - 1
    alpha = m & low
    xis = [b for b in range(n, 2 * n) if m >> b & 1]
    return alpha, xis


def _bracket_terms(a: SuperField, fn_ij):
    """Shared loop over pairs xi_i < xi_j of a word's antighost factors."""
    n = a.n
    L = a.backend.algebra

    def word_map(m):
        alpha, xis = _split(n, m)
        k = bin(alpha).count("1")
        out: dict = {}
        for i in range(len(xis)):
            for j in range(i + 1, len(xis)):
                rest = 0
                for t, b in enumerate(xis):
                    if t not in (i, j):
                        rest |= 1 << b
                sign = -1 if (i + j + 2 - 1) & 1 else 1
                for c, v in L.bracket(xis[i] - n, xis[j] - n).items():
                    for w, coeff in fn_ij(alpha, k, c, rest):
                        out[w] = out.get(w, ZERO) + Scalar(v * sign) * coeff
        return tuple(out.items())
    return a.map_words(word_map)


def op_q_def(a: SuperField) -> SuperField:
    """q(alpha ^ xi) = (-1)^k alpha ^ sum_{i<j} (-1)^{i+j-1} [xi_i, xi_j] ^ (xi without i, j)."""
    n = a.n

    def fn(alpha, k, c, rest):
        cb = 1 << (n + c)
        s = wedge_sign(cb, rest)
        if not s:
            return ()
        # alpha sits entirely before the antighosts, so the concatenation is canonical
        return ((alpha | cb | rest, Scalar((-1) ** k * s)),)
    return _bracket_terms(a, fn)


def op_c_def(a: SuperField) -> SuperField:
    """c(alpha ^ xi) = sum_{i<j} (-1)^{i+j-1} i([xi_i, xi_j]) alpha ^ (xi without i, j)."""
    def fn(alpha, k, c, rest):
        s, w = remove_left(c, alpha)
        return ((w | rest, Scalar(s)),) if s else ()
    return _bracket_terms(a, fn)


def _m_def(a: SuperField, antisym: bool) -> SuperField:
    """(-1)^k sum_a alpha ^ i(e^a) xi (x) (F * J_a or J_a * F), insertion done on xi alone."""
    be, n, N = a.backend, a.n, a.order
    out = SuperField.zero(be, N)
    for b in range(n):
        J = momentum_field(be, N, b)
        prod = star_kappa(J, a, STANDARD) if antisym else star_kappa(a, J, STANDARD)

        def word_map(m, b=b):
            alpha, xis = _split(n, m)
            if n + b not in xis:
                return ()
            pos = xis.index(n + b)
            k = bin(alpha).count("1")
            s = (-1) ** k * (-1) ** pos
            return ((m ^ (1 << (n + b)), Scalar(s)),)
        out = out + prod.map_words(word_map)
    return out


def op_ms_def(a):
    return _m_def(a, False)


def op_ma_def(a):
    return _m_def(a, True)


def op_u_poisson(a: SuperField) -> SuperField:
    return super_poisson(chi_field(a.backend, a.order), a)


def op_u_commutator(a: SuperField, kappa) -> SuperField:
    be = a.backend
    return _ad_over_ilam(lambda N: chi_field(be, N), a, kappa)


# ------------------------------------------------------------------ differentials

def chevalley_eilenberg(a: SuperField, action) -> SuperField:
    """-1/2 sum f^c_ab e^a^e^b^i(e_c) + sum_a e^a ^ (ad(e_a) + action(a))."""
    be, n, N = a.backend, a.n, a.order
    out = SuperField.zero(be, N)
    for c, x, y, v in _structure(a):
        t = insert_left(a, ghost_bit(n, c))
        t = wedge_left(wedge_left(t, ghost_bit(n, y)), ghost_bit(n, x))
        out = out + t.scale(-v / 2)
        # ad(e_x) contributes f^c_xy e_c ^ i(e^y)
        t = wedge_left(insert_left(a, antighost_bit(n, y)), antighost_bit(n, c))
        out = out + wedge_left(t, ghost_bit(n, x)).scale(v)
    for b in range(n):
        act = action(a, b)
        if act:
            out = out + wedge_left(act, ghost_bit(n, b))
    return out


def quant_ce(a: SuperField) -> SuperField:
    return chevalley_eilenberg(a, lie_m)


def class_ce(a: SuperField) -> SuperField:
    return chevalley_eilenberg(a, lie_m_classical)


def quant_koszul(a: SuperField) -> SuperField:
    """m_s + i lam (u/2 - q)."""
    return op_ms(a) + (op_u(a).scale(HALF) - op_q(a)).scale(I, lam_power=1)


def class_koszul(a: SuperField) -> SuperField:
    """sum_a i(e^a) (F J_a) with the classical momentum."""
    be, n, N = a.backend, a.n, a.order
    out = SuperField.zero(be, N)
    for b in range(n):
        for r, k, c in be.momentum_terms(b):
            if r:
                continue
            shifted = a.map_keys(lambda key, k=k, c=c: ((0, tuple(x + y for x, y in zip(key, k)), c),))
            out = out + insert_left(shifted, antighost_bit(n, b))
    return out


def class_brst(a: SuperField) -> SuperField:
    return class_ce(a) + class_koszul(a).scale(2)


def poisson_brst(a: SuperField) -> SuperField:
    return super_poisson(theta_classical(a.backend, a.order), a)


# ------------------------------------------------------------------ splitting formulas

def ce_kappa_formula(a: SuperField, kappa) -> SuperField:
    """delta_q + 4 i k lam q - 2k(m_s - m_a) - 2 i k lam u + 4 k^2 lam^2 c."""
    k = _frac(kappa)
    return (quant_ce(a) + op_q(a).scale(4 * I * k, 1) - (op_ms(a) - op_ma(a)).scale(2 * k)
            - op_u(a).scale(2 * I * k, 1) + op_c(a).scale(4 * k * k, 2))


def koszul_kappa_formula(a: SuperField, kappa) -> SuperField:
    return quant_koszul(a) - op_c(a).scale(2 * _frac(kappa), 2)


def brst_kappa_formula(a: SuperField, kappa) -> SuperField:
    """delta_q + 2((1-k) m_s + k m_a) + 2 i lam (2k-1) q - i lam (2k-1) u - 4k(1-k) lam^2 c."""
    k = _frac(kappa)
    return (quant_ce(a) + op_ms(a).scale(2 * (1 - k)) + op_ma(a).scale(2 * k)
            + op_q(a).scale(2 * I * (2 * k - 1), 1) - op_u(a).scale(I * (2 * k - 1), 1)
            - op_c(a).scale(4 * k * (1 - k), 2))


def weyl_brst_formula(a: SuperField) -> SuperField:
    """delta_q + m_s + m_a - lam^2 c."""
    return quant_ce(a) + op_ms(a) + op_ma(a) - op_c(a).scale(ONE, 2)


def weyl_ce_formula(a: SuperField) -> SuperField:
    return (quant_ce(a) + op_q(a).scale(2 * I, 1) - (op_ms(a) - op_ma(a))
            - op_u(a).scale(I, 1) + op_c(a).scale(ONE, 2))


def weyl_koszul_formula(a: SuperField) -> SuperField:
    return (op_ms(a) + op_u(a).scale(I / 2, 1) - op_q(a).scale(I, 1) - op_c(a).scale(ONE, 2))


def conjugate(op, a: SuperField, kappa) -> SuperField:
    """S_kappa^{-1} op S_kappa."""
    return s_kappa(op(s_kappa(a, kappa)), -_frac(kappa))
