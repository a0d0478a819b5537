"""Augmentation: restriction, prolongation, Koszul homotopies and their deformations.

Ghost-graded extensions carry the sign (-1)^k of the ghost degree for the
restriction and prolongation; the homotopy wedges e_a on the left of the
whole word, which is the same convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..grassmann import add_left, bidegree
from ..scalars import BrstlabError, ZERO, InversionError, Scalar
from .fields import SuperField, antighost_bit
from .operators import (
    chevalley_eilenberg, class_ce, class_koszul, lie_m, lie_m_classical, quant_ce, quant_koszul,
    brst_standard, class_brst,
)


class ClosednessError(BrstlabError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvarianceError(ClosednessError):
    pass


def _ghost_sign(n: int, m: int) -> int:
    return -1 if bidegree(n, m)[0] & 1 else 1


# ------------------------------------------------------------------ classical maps

def restrict(a: SuperField) -> SuperField:
    """iota*(alpha (x) f) = (-1)^k alpha (x) iota* f on the antighost-free part."""
    be, n = a.backend, a.n
    return SuperField._wrap(be, a.order, {
        (m, r, k): v * _ghost_sign(n, m) for (m, r, k), v in a.items()
        if not bidegree(n, m)[1] and be.is_constraint_key(k)})


def prolong(c: SuperField) -> SuperField:
    """prol(alpha (x) u) = (-1)^k alpha (x) prol u."""
    be, n, N = c.backend, c.n, c.order
    acc: dict = {}
    for (m, r, k), v in c.items():
        if bidegree(n, m)[1] or not be.is_constraint_key(k):
            raise ClosednessError("prolongation needs a boundary field (ghosts and constraint functions only)")
        sg = _ghost_sign(n, m)
        for s, k2, cc in be.prolong_terms(k):
            if r + s <= N:
                key = (m, r + s, k2)
                acc[key] = acc.get(key, ZERO) + v * cc * sg
    return SuperField._wrap(be, N, acc)


def homotopy(a: SuperField) -> SuperField:
    """Geometric Koszul homotopy h, applied degree by degree in the antighosts."""
    be, n, N = a.backend, a.n, a.order
    acc: dict = {}
    for (m, r, k), v in a.items():
        l = bidegree(n, m)[1]
        for b, s, k2, c in be.homotopy_terms(k, l):
            if r + s > N:
                continue
            sg, w = add_left(antighost_bit(n, b), m)
            if not sg:
                continue
            key = (w, r + s, k2)
            acc[key] = acc.get(key, ZERO) + v * c * sg
    return SuperField._wrap(be, N, acc)


# ------------------------------------------------------------------ Neumann helper

def neumann(x: SuperField, step, what: str, bound: int | None = None) -> SuperField:
    """sum_j step^j x; step must raise lam-order or a finite degree each time."""
    limit = bound if bound is not None else x.order + 2 * x.n + 4
    total, term = x, x
    for _ in range(limit):
        term = step(term)
        if not term:
            return total
        total = total + term
    raise InversionError(
        f"Neumann series for {what} did not terminate after {limit} steps; "
        f"residual has minimal lam-order {term.min_lam()} and bidegrees {sorted(term.bidegrees())}")


# ------------------------------------------------------------------ deformed restriction

def lam_b1(a: SuperField) -> SuperField:
    """lam B_1 = d_1 - d_{q,1} on antighost degree one."""
    return class_koszul(a) - quant_koszul(a)


def deformed_restriction(a: SuperField) -> SuperField:
    """r = iota* (id - lam B_1 h_0)^{-1} on the antighost-free part."""
    x = a.antighost_part(0)
    y = neumann(x, lambda t: lam_b1(homotopy(t)), "the deformed restriction")
    return restrict(y)


def closed_form_restriction(a: SuperField) -> SuperField:
    """iota* o S_op with S_op the differential-operator series of the backend.

    standard torus: S_op = id; perturbed torus: exp(-lam ad(P) d_J) with the
    undeformed star; flat: exp(c lam sum_a d_{x^j} d_{p_j}) over the constrained
    pairs, c = i (standard) or i/2 (Weyl).
    """
    from ..phasespace import Flat, PerturbedTorus, Torus

    be = a.backend
    if isinstance(be, PerturbedTorus):
        base = be._base
        Pd = {(0, k): v for k, v in be.P.terms.items()}

        def step(t: SuperField, j: int) -> SuperField:
            acc: dict = {}
            N = t.order
            for m, F in t.lam_parts().items():
                dF = {}
                for (r, k), v in F.items():
                    if k[3]:
                        dF[(r, (k[0], k[1], k[2], k[3] - 1))] = v * k[3]
                comm = base.star_lam(Pd, dF, N)
                for kk, vv in base.star_lam(dF, Pd, N).items():
                    comm[kk] = comm.get(kk, ZERO) - vv
                for (r, k), v in comm.items():
                    if r + 1 <= N:
                        acc[(m, r + 1, k)] = acc.get((m, r + 1, k), ZERO) + v * Fraction(-1, j)
            return SuperField._wrap(be, t.order, acc)
    elif isinstance(be, Flat):
        c = Scalar(0, 1) if be.ordering == "standard" else Scalar(0, Fraction(1, 2))
        pairs = [(be.d - be.k + a, be._jindex(a)) for a in range(be.k)]

        def step(t: SuperField, j: int) -> SuperField:
            def fn(key):
                out = []
                for xi, pi in pairs:
                    if key[xi] and key[pi]:
                        k2 = list(key)
                        k2[xi] -= 1
                        k2[pi] -= 1
                        out.append((1, tuple(k2), c * key[xi] * key[pi] * Fraction(1, j)))
                return out
            return t.map_keys(fn)
    elif isinstance(be, Torus):
        return restrict(a)
    else:
        raise BrstlabError(f"no closed-form restriction for {be.name}")
    out, term, j = a, a, 0
    while True:
        j += 1
        term = step(term, j)
        if not term:
            return restrict(out)
        out = out + term


# ------------------------------------------------------------------ deformed homotopy

def deformed_homotopy(a: SuperField) -> SuperField:
    """qh_0 = h_0 (id - lam B_1 h_0)^{-1}, qh_i = h_i (h_{i-1} d_q + d_q h_i)^{-1}."""
    be, n, N = a.backend, a.n, a.order
    out = SuperField.zero(be, N)
    for l in range(n + 1):
        part = a.antighost_part(l)
        if not part:
            continue
        if l == 0:
            y = neumann(part, lambda t: lam_b1(homotopy(t)), "qh_0")
        else:
            def step(t):
                return t - homotopy(quant_koszul(t)) - quant_koszul(homotopy(t))
            y = neumann(part, step, f"qh_{l}")
        out = out + homotopy(y)
    return out


# ------------------------------------------------------------------ augmented complex

@dataclass(frozen=True)
class AugmentedField:
    boundary: SuperField
    bulk: SuperField

    def __add__(self, o):
        return AugmentedField(self.boundary + o.boundary, self.bulk + o.bulk)

    def __sub__(self, o):
        return AugmentedField(self.boundary - o.boundary, self.bulk - o.bulk)

    def scale(self, s):
        return AugmentedField(self.boundary.scale(s), self.bulk.scale(s))

    def __bool__(self):
        return bool(self.boundary) or bool(self.bulk)

    @classmethod
    def of_bulk(cls, bulk):
        return cls(SuperField.zero(bulk.backend, bulk.order), bulk)

    @classmethod
    def of_boundary(cls, c):
        return cls(c, SuperField.zero(c.backend, c.order))


def lie_c(c: SuperField, b: int) -> SuperField:
    """L_C(e_b) = r o L_M(e_b) o prol on boundary fields, word by word."""
    be, N = c.backend, c.order
    out = SuperField.zero(be, N)
    for m, F in c.lam_parts().items():
        u = SuperField._wrap(be, N, {(0, r, k): v for (r, k), v in F.items()})
        img = deformed_restriction(lie_m(prolong(u), b))
        out = out + SuperField._wrap(be, N, {(m, r, k): v for (_, r, k), v in img.items()})
    return out


def lie_c_classical(c: SuperField, b: int) -> SuperField:
    be, N = c.backend, c.order
    out = SuperField.zero(be, N)
    for m, F in c.lam_parts().items():
        u = SuperField._wrap(be, N, {(0, r, k): v for (r, k), v in F.items()})
        img = restrict(lie_m_classical(prolong(u), b))
        out = out + SuperField._wrap(be, N, {(m, r, k): v for (_, r, k), v in img.items()})
    return out


def ce_on_c(c: SuperField) -> SuperField:
    return chevalley_eilenberg(c, lie_c)


def class_ce_on_c(c: SuperField) -> SuperField:
    return chevalley_eilenberg(c, lie_c_classical)


def aug_koszul_q(x: AugmentedField) -> AugmentedField:
    return AugmentedField(deformed_restriction(x.bulk), quant_koszul(x.bulk))


def aug_homotopy_q(x: AugmentedField) -> AugmentedField:
    zero = SuperField.zero(x.bulk.backend, x.bulk.order)
    return AugmentedField(zero, prolong(x.boundary) + deformed_homotopy(x.bulk))


def aug_koszul(x: AugmentedField) -> AugmentedField:
    return AugmentedField(restrict(x.bulk), class_koszul(x.bulk))


def aug_homotopy(x: AugmentedField) -> AugmentedField:
    zero = SuperField.zero(x.bulk.backend, x.bulk.order)
    return AugmentedField(zero, prolong(x.boundary) + homotopy(x.bulk))


def aug_ce_q(x: AugmentedField) -> AugmentedField:
    return AugmentedField(ce_on_c(x.boundary), quant_ce(x.bulk))


def aug_ce(x: AugmentedField) -> AugmentedField:
    return AugmentedField(class_ce_on_c(x.boundary), class_ce(x.bulk))


def aug_brst_q(x: AugmentedField) -> AugmentedField:
    """delta_q^c + 2 r + D_0."""
    return AugmentedField(ce_on_c(x.boundary) + deformed_restriction(x.bulk).scale(2),
                          brst_standard(x.bulk))


def aug_brst(x: AugmentedField) -> AugmentedField:
    return AugmentedField(class_ce_on_c(x.boundary) + restrict(x.bulk).scale(2), class_brst(x.bulk))


def _h_prime(x: AugmentedField, ce, hom) -> AugmentedField:
    """1/2 h (id + 1/2 (ce h + h ce))^{-1}; the inner operator raises (k, l) by (1, 1)."""
    n = x.bulk.n
    total, term = x, x
    for _ in range(n + 3):
        y = ce(hom(term)) + hom(ce(term))
        term = y.scale(Fraction(-1, 2))
        if not term:
            return hom(total).scale(Fraction(1, 2))
        total = total + term
    raise InversionError("the h' denominator is not nilpotent on this input")


def h_prime_q(x: AugmentedField) -> AugmentedField:
    return _h_prime(x, aug_ce_q, aug_homotopy_q)


def h_prime(x: AugmentedField) -> AugmentedField:
    return _h_prime(x, aug_ce, aug_homotopy)


# ------------------------------------------------------------------ cohomology

def psi(a: SuperField) -> SuperField:
    res = brst_standard(a)
    if res:
        raise ClosednessError("input is not closed under the standard BRST operator", res)
    return deformed_restriction(a.antighost_part(0))


def psi_inverse(c: SuperField) -> SuperField:
    res = ce_on_c(c)
    if res:
        raise ClosednessError("boundary input is not closed under the constraint CE differential", res)
    term = prolong(c)
    total = term
    for _ in range(c.n + 1):
        term = deformed_homotopy(quant_ce(term)).scale(Fraction(-1, 2))
        if not term:
            break
        total = total + term
    return total


def psi_classical(a: SuperField) -> SuperField:
    res = class_brst(a)
    if res:
        raise ClosednessError("input is not closed under the classical BRST operator", res)
    return restrict(a.antighost_part(0))


def psi_inverse_classical(c: SuperField) -> SuperField:
    res = class_ce_on_c(c)
    if res:
        raise ClosednessError("boundary input is not closed under the classical CE differential", res)
    term = prolong(c)
    total = term
    for _ in range(c.n + 1):
        term = homotopy(class_ce(term)).scale(Fraction(-1, 2))
        if not term:
            break
        total = total + term
    return total


def ideal_membership(f: SuperField) -> bool:
    return not deformed_restriction(f)


def _as_boundary(u, backend, order) -> SuperField:
    if isinstance(u, SuperField):
        return u
    return SuperField.from_function(backend, order, u)


def reduced_star(u, v, backend=None, order=None, check: bool = True) -> SuperField:
    """r((prol u) * (prol v)) for ghost-zero invariants."""
    if isinstance(u, SuperField):
        backend, order = u.backend, u.order
    u = _as_boundary(u, backend, order)
    v = _as_boundary(v, backend, order)
    if check:
        for name, x in (("left", u), ("right", v)):
            res = ce_on_c(x)
            if res:
                raise InvarianceError(f"{name} factor is not a quantum invariant", res)
    from .fields import star_kappa
    return deformed_restriction(star_kappa(prolong(u), prolong(v), 0))
