"""Quantum reduction: invariant solver, consistency verdicts, reduced products and audits."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .brst.augment import (
    InvarianceError, class_ce_on_c, closed_form_restriction, ce_on_c, deformed_restriction,
    lie_c, lie_c_classical, prolong,
)
from .brst.fields import SuperField, ghost_bit, star_kappa
from .phasespace import (
    AlternateChoice, Backend, PhaseFunction, Point, Torus, _addk, strong_invariance_check,
)
from .scalars import BrstlabError, ConfigurationError, ONE, Scalar, ZERO

CERTIFIED = "CERTIFIED-BY-THEOREM"
SAMPLED = "SAMPLE-CONSISTENT"
FAILS = "FAILS"


class ReductionRefused(BrstlabError):
    """Raised when a reduced product is requested but the reduction is inconsistent."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


@dataclass
class Obstruction:
    order: int
    residual: PhaseFunction
    certificate: str


@dataclass
class SolveOutcome:
    seed: PhaseFunction
    extension: SuperField | None = None
    obstruction: Obstruction | None = None

    @property
    def ok(self) -> bool:
        return self.extension is not None


def _require_reducible(backend: Backend) -> None:
    if isinstance(backend, Point):
        raise ConfigurationError("the point backend has no constraint surface to reduce on")
    if not backend.algebra.is_abelian:
        raise ConfigurationError("the reduction pipeline is only available for abelian actions")


def _as_seed(backend, u) -> PhaseFunction:
    if isinstance(u, tuple):
        return PhaseFunction.monomial(u)
    return u


def seed_field(backend: Backend, u, order: int) -> SuperField:
    f = SuperField.from_function(backend, order, _as_seed(backend, u))
    for (m, r, k) in f._c:
        if m or not backend.is_constraint_key(k):
            raise ConfigurationError(f"seed term {backend.format_key(k)} is not a constraint function")
    return f


def _ghost_component(g: SuperField, a: int, r: int) -> PhaseFunction:
    m = 1 << ghost_bit(g.n, a)
    return PhaseFunction._wrap({k: v for (mm, rr, k), v in g.items() if mm == m and rr == r})


def solve_invariant(backend: Backend, seed, order: int) -> SolveOutcome:
    """Extend a classical invariant seed order by order to a quantum invariant.

    At each order s+1 the equation {J_a, phi_{s+1}} = -g_a is solved, g being the
    lam^{s+1} part of the quantum CE differential of the partial sum.  Solutions are
    taken in the complement of the invariants (zero group average).
    """
    _require_reducible(backend)
    u0 = _as_seed(backend, seed)
    phi = seed_field(backend, u0, order)
    res = class_ce_on_c(phi)
    if res:
        raise InvarianceError("seed is not a classical invariant", res)
    n = backend.dim
    for s in range(order):
        g = ce_on_c(phi)
        low = g.select(lambda m, r, k: r <= s)
        if low:
            raise BrstlabError(f"internal: CE residual survives at order <= {s}")
        rhs = [-_ghost_component(g, a, s + 1) for a in range(n)]
        sol, rest = backend.solve_action(rhs)
        if rest is not None:
            avg = -rest
            cert = (f"the group average of the order-{s + 1} CE defect is "
                    f"{backend.format_function(avg)}, which must vanish for a correction to exist")
            return SolveOutcome(u0, obstruction=Obstruction(s + 1, avg, cert))
        if sol:
            phi = phi + SuperField.from_function(backend, order, sol).scale(ONE, s + 1)
    g = ce_on_c(phi)
    if g:
        raise BrstlabError("internal: solver output is not a quantum invariant")
    return SolveOutcome(u0, extension=phi)


def _simplicity(key):
    return (sum(abs(e) for e in key), tuple((abs(e), e < 0) for e in key))


@dataclass
class Verdict:
    status: str  # CONSISTENT or FAILS
    label: str   # CERTIFIED-BY-THEOREM, SAMPLE-CONSISTENT or FAILS
    backend: str
    order: int
    sample: list
    extendable: list
    failing: list
    witness: tuple | None = None
    obstruction: Obstruction | None = None
    linear: bool = True
    extensions: dict = field(default_factory=dict, repr=False)

    @property
    def consistent(self) -> bool:
        return self.status == "CONSISTENT"

    def to_json(self, backend: Backend) -> dict:
        out = {
            "status": self.status, "label": self.label, "backend": self.backend,
            "order": self.order, "sample_size": len(self.sample),
            "extendable": [backend.format_key(k) for k in self.extendable],
            "failing": [backend.format_key(k) for k in self.failing],
            "linear_on_sample": self.linear,
        }
        if self.witness is not None:
            out["witness"] = backend.format_key(self.witness)
            out["obstruction"] = {
                "order": self.obstruction.order,
                "residual": backend.format_function(self.obstruction.residual),
                "certificate": self.obstruction.certificate,
            }
        return out


def consistency_verdict(backend: Backend, sample=None, order: int = 5, seed: int = 0,
                        combos: int = 3, max_degree: int = 3) -> Verdict:
    """Decide consistent reduction on a sample of classical invariants (monomial keys)."""
    _require_reducible(backend)
    keys = list(sample) if sample is not None else backend.invariant_box(max_degree)
    rng = random.Random(seed)
    outcomes = {k: solve_invariant(backend, k, order) for k in keys}
    ext = [k for k in keys if outcomes[k].ok]
    bad = [k for k in keys if not outcomes[k].ok]
    linear = True
    if len(ext) >= 2:
        for _ in range(combos):
            picks = rng.sample(ext, min(3, len(ext)))
            cs = [Scalar(rng.randint(-3, 3) or 1, rng.randint(-2, 2)) for _ in picks]
            comb = PhaseFunction()
            want = SuperField.zero(backend, order)
            for k, c in zip(picks, cs):
                comb = comb + PhaseFunction.monomial(k, c)
                want = want + outcomes[k].extension.scale(c)
            got = solve_invariant(backend, comb, order)
            if not got.ok or got.extension != want:
                linear = False
    if bad:
        w = min(bad, key=_simplicity)
        return Verdict("FAILS", FAILS, backend.name, order, keys, ext, bad, w,
                       outcomes[w].obstruction, linear,
                       {k: outcomes[k].extension for k in ext})
    probe = list(keys) + [backend.random_key(rng) for _ in range(12)]
    strong = strong_invariance_check(backend, probe, min(order, 3)) is None
    label = CERTIFIED if strong and linear else SAMPLED
    status = "CONSISTENT" if linear else "FAILS"
    return Verdict(status, label if linear else FAILS, backend.name, order, keys, ext, bad,
                   linear=linear, extensions={k: outcomes[k].extension for k in ext})


def collapse_check(backend: Backend, fields) -> str | None:
    """Compare the quantum and classical actions on boundary fields; None when equal."""
    for f in fields:
        for b in range(backend.dim):
            if lie_c(f, b) != lie_c_classical(f, b):
                return f"L_C(e_{b + 1}) differs on {f}"
        if ce_on_c(f) != class_ce_on_c(f):
            return f"quantum and classical CE differ on {f}"
    return None


# ------------------------------------------------------------------ reduced products

def _series_of(f: SuperField) -> dict:
    return {(r, k): v for (m, r, k), v in f.items()}


def reduced_product(u: SuperField, v: SuperField, restriction=closed_form_restriction) -> SuperField:
    """r(prol u * prol v) without invariance checks; u, v ghost-zero boundary fields."""
    return restriction(star_kappa(prolong(u), prolong(v), 0))


def reduced_table(backend: Backend, max_degree: int = 3, order: int = 5, verdict: Verdict | None = None):
    """All products of invariant monomials within the box, keyed by (u_key, v_key)."""
    if verdict is None:
        verdict = consistency_verdict(backend, backend.invariant_box(max_degree), order)
    if not verdict.consistent:
        w = backend.format_key(verdict.witness) if verdict.witness is not None else "?"
        where = f" (seed {w} obstructed at order {verdict.obstruction.order})" if verdict.obstruction else ""
        raise ReductionRefused("no consistent quantum reduction on the sample" + where, verdict)
    keys = backend.invariant_box(max_degree)
    ext = {k: verdict.extensions.get(k) or solve_invariant(backend, k, order).extension for k in keys}
    table = {}
    for ku in keys:
        for kv in keys:
            table[(ku, kv)] = reduced_product(ext[ku], ext[kv])
    return table


def format_table(backend: Backend, table) -> list[dict]:
    from .brst.fields import format_field
    return [{"u": backend.format_key(a), "v": backend.format_key(b), "product": format_field(p)}
            for (a, b), p in table.items()]


# ------------------------------------------------------------------ Vey audit

class _ProductCache:
    def __init__(self, backend, order):
        self.backend, self.order = backend, order
        self.cache = {}

    def coeff(self, k1, k2, r) -> PhaseFunction:
        key = (k1, k2)
        if key not in self.cache:
            be, N = self.backend, self.order
            p = reduced_product(SuperField.monomial(be, N, 0, k1), SuperField.monomial(be, N, 0, k2))
            by_r: dict = {}
            for (m, rr, k), v in p.items():
                by_r.setdefault(rr, {})[k] = v
            self.cache[key] = {rr: PhaseFunction._wrap(d) for rr, d in by_r.items()}
        return self.cache[key].get(r, PhaseFunction())


class _Commutators:
    """Memoised [..[C_r(., g), h_1].., h_t](f) on monomials, via
    D_{H,h}(f) = D_H(h f) - h D_H(f)."""

    def __init__(self, cache, gens, backend):
        self.cache, self.backend = cache, backend
        self.gens = gens
        self.memo = {}

    def __call__(self, hs, fk, gk, r, side):
        key = (hs, fk, gk, r, side)
        got = self.memo.get(key)
        if got is None:
            if not hs:
                got = self.cache.coeff(fk, gk, r) if side == 0 else self.cache.coeff(gk, fk, r)
            else:
                h = self.gens[hs[-1]]
                got = (self(hs[:-1], _addk(fk, h), gk, r, side)
                       - self.backend.mul(PhaseFunction.monomial(h), self(hs[:-1], fk, gk, r, side)))
            self.memo[key] = got
        return got


@dataclass
class VeyReport:
    backend: str
    orders: dict  # r -> (order in first argument, order in second argument)
    ok: bool
    failure: str | None = None


def _probe_keys(backend: Backend, degree: int) -> list:
    if isinstance(backend, Torus) or (isinstance(backend, AlternateChoice) and isinstance(backend.base, Torus)):
        return [(a, 0, m, 0) for a in (-1, 0, 1) for m in range(degree + 1)]
    return backend.invariant_box(degree)


def vey_order_audit(backend: Backend, order: int = 5, max_r: int = 4, probe_degree: int | None = None) -> VeyReport:
    """Measure the differential order of each reduced cochain C_r by commutators with generators.

    An operator has order <= s iff every (s+1)-fold commutator with multiplication by
    generators vanishes.  The measured order is the least such s found on the probes.
    """
    _require_reducible(backend)
    gens = []
    for g in backend.reduced_generators():
        ((k, c),) = g.terms.items()
        gens.append(k)
    probes = _probe_keys(backend, probe_degree if probe_degree is not None else max_r)
    comm = _Commutators(_ProductCache(backend, order), gens, backend)
    orders = {}
    for r in range(min(max_r, order) + 1):
        measured = []
        for side in (0, 1):
            s = 0
            while True:
                witness = None
                for hs in itertools.combinations_with_replacement(range(len(gens)), s + 1):
                    for f in probes:
                        for g in probes:
                            if comm(hs, f, g, r, side):
                                witness = (f, g)
                                break
                        if witness:
                            break
                    if witness:
                        break
                if witness is None:
                    break
                if s >= r:
                    f, g = witness
                    pair = (f, g) if side == 0 else (g, f)
                    msg = (f"C_{r} has order > {r} in argument {side + 1} on "
                           f"({backend.format_key(pair[0])}, {backend.format_key(pair[1])})")
                    orders[r] = tuple(measured) + (s + 1,)
                    return VeyReport(backend.name, orders, False, msg)
                s += 1
            measured.append(s)
        orders[r] = tuple(measured)
    return VeyReport(backend.name, orders, True)


# ------------------------------------------------------------------ Dirac picture

def dirac_check(backend: Backend, keys, order: int = 5):
    """First pair (u, v) with prol u * prol v - prol(u *red v) outside the quantum ideal, or None."""
    for ku in keys:
        for kv in keys:
            u = SuperField.monomial(backend, order, 0, ku)
            v = SuperField.monomial(backend, order, 0, kv)
            prod = star_kappa(prolong(u), prolong(v), 0)
            red = deformed_restriction(prod)
            diff = prod - prolong(red)
            if deformed_restriction(diff):
                return ku, kv
    return None


# ------------------------------------------------------------------ alternate prolongation

def torus_phi_derivative(key):
    """d_phi on a torus monomial: z^k ... -> i k z^k ...; commutes with the circle action."""
    if key[0]:
        return ((key, Scalar(0, key[0])),)
    return ()


@dataclass
class AlternateReport:
    backend: str
    orders_ok: list  # per lam-order, True when Phi is multiplicative modulo lam^{r+1}
    identity: bool   # Phi acts as the identity on the sample
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return all(self.orders_ok) and self.failure is None


def _rewrap(f: SuperField, backend) -> SuperField:
    return SuperField._wrap(backend, f.order, dict(f.items()))


def _truncate(f: SuperField, r: int) -> SuperField:
    return f.select(lambda m, rr, k: rr <= r)


def alternate_homotopy_check(base: Backend | None = None, transforms=None, order: int = 5,
                             max_degree: int = 2) -> AlternateReport:
    """Compare reductions for prol and the alternate choice prol + lam J_a T_a.

    The candidate equivalence is Phi = r' o prol, with r' the deformed restriction of
    the alternate choice.  It is checked order by order to intertwine both reduced products
    on the sample box, and that its images are quantum invariants for the alternate choice.
    """
    base = base if base is not None else Torus()
    transforms = transforms if transforms is not None else [torus_phi_derivative] * base.dim
    alt = AlternateChoice(base, transforms)
    keys = base.invariant_box(max_degree)
    N = order

    def phi_map(x: SuperField) -> SuperField:
        return _rewrap(deformed_restriction(_rewrap(prolong(x), alt)), alt)

    ext = {}
    images = {}
    identity = True
    for k in keys:
        out = solve_invariant(base, k, N)
        if not out.ok:
            return AlternateReport(base.name, [False], False, f"seed {base.format_key(k)} does not extend")
        ext[k] = out.extension
        images[k] = phi_map(out.extension)
        if ce_on_c(images[k]):
            return AlternateReport(base.name, [False], False,
                                   f"image of {base.format_key(k)} is not invariant for the alternate choice")
        if _series_of(images[k]) != _series_of(out.extension):
            identity = False
    orders_ok = [True] * (N + 1)
    for ku in keys:
        for kv in keys:
            lhs = phi_map(reduced_product(ext[ku], ext[kv], deformed_restriction))
            rhs = reduced_product(images[ku], images[kv], deformed_restriction)
            for r in range(N + 1):
                if _series_of(_truncate(lhs, r)) != _series_of(_truncate(rhs, r)):
                    orders_ok[r] = False
    failure = None
    if not all(orders_ok):
        failure = f"Phi fails to be multiplicative from order {orders_ok.index(False)}"
    return AlternateReport(base.name, orders_ok, identity, failure)


# ------------------------------------------------------------------ closed forms

def torus_closed_form(u: PhaseFunction, v: PhaseFunction, order: int) -> dict:
    """sum_a (lam/i)^a / a! d_phi^a u d_p^a v on z^k p^m monomials, as {(r, key): Scalar}."""
    from math import comb
    out: dict = {}
    for (k1, _, m1, _), x in u.terms.items():
        for (k2, _, m2, _), y in v.terms.items():
            # d_phi^a z^k1 = (i k1)^a z^k1 and (1/i)^a (i k1)^a = k1^a
            for a in range(min(m2, order) + 1):
                c = k1 ** a * comb(m2, a)
                if c:
                    key = (a, (k1 + k2, 0, m1 + m2 - a, 0))
                    out[key] = out.get(key, ZERO) + x * y * c
    return {k: v for k, v in out.items() if v}


def field_lam_dict(f: SuperField) -> dict:
    """{(r, key): Scalar} of a ghost-free field."""
    return {(r, k): v for (m, r, k), v in f.items() if not m}
