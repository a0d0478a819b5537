"""Verification suites: each check compares two independent routes and reports a Case."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import grassmann as gr
from .brst import augment as au
from .brst import operators as op
from .brst.fields import SuperField, format_field, star_kappa, super_poisson
from .liealg import chi_element, omega, validate
from .phasespace import (
    Backend, PerturbedTorus, PhaseFunction, Point, Torus, covariance_check, strong_invariance_check,
)
from .reduction import collapse_check, dirac_check, solve_invariant
from .sampling import random_boundary, random_field, random_function, random_grass
from .scalars import I, ONE, Scalar

KAPPAS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1))
SUITES = ("liealg", "grassmann", "backend", "brst", "homotopy", "classical")


@dataclass
class Case:
    name: str
    status: str
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Context:
    backend: Backend
    order: int
    samples: int
    rng: random.Random


def case(name: str, witness=None) -> Case:
    if witness is None or witness is False:
        return Case(name, "pass")
    return Case(name, "fail", witness if isinstance(witness, str) else str(witness))


def first_failure(items, check):
    """First item (formatted) for which check(item) is False, else None."""
    for x in items:
        if not check(x):
            return str(x)
    return None


def reducible(be: Backend) -> bool:
    return not isinstance(be, Point) and be.algebra.is_abelian


# ------------------------------------------------------------------ liealg

def liealg_cases(ctx: Context) -> list[Case]:
    L = ctx.backend.algebra
    N = ctx.order
    out = [case("jacobi-and-antisymmetry", validate(L))]
    om = omega(L, N)
    for k in KAPPAS:
        prod = gr.cliff_kappa(om, om, k)
        out.append(case(f"omega-nilpotent-kappa={k}", str(prod) if prod else None))
    pb = gr.grass_poisson(om, om)
    out.append(case("omega-classical-master-equation", str(pb) if pb else None))
    chi = L.chi()
    bad = None
    for a in range(L.dim):
        for b in range(L.dim):
            s = sum((L.f[c][a][b] * chi[c] for c in range(L.dim)), Fraction(0))
            if s:
                bad = f"chi([e_{a + 1}, e_{b + 1}]) = {s}"
    out.append(case("chi-vanishes-on-commutators", bad))
    lap = gr.super_laplacian(om)
    out.append(case("laplacian-omega-is-chi", None if lap == chi_element(L, N) else str(lap)))
    return out


# ------------------------------------------------------------------ grassmann

def grassmann_cases(ctx: Context) -> list[Case]:
    n, N, rng = ctx.backend.dim, ctx.order, ctx.rng
    xs = [random_grass(rng, n, N) for _ in range(ctx.samples)]
    triples = [(xs[i], xs[(i + 1) % len(xs)], xs[(i + 2) % len(xs)]) for i in range(len(xs))]
    out = []
    for k in KAPPAS:
        out.append(case(f"clifford-associative-kappa={k}", first_failure(
            triples, lambda t, k=k: gr.cliff_kappa(gr.cliff_kappa(t[0], t[1], k), t[2], k)
            == gr.cliff_kappa(t[0], gr.cliff_kappa(t[1], t[2], k), k))))
        out.append(case(f"s-kappa-intertwines-kappa={k}", first_failure(
            triples, lambda t, k=k: gr.s_kappa(gr.cliff_kappa(t[0], t[1], k), k)
            == gr.cliff_kappa(gr.s_kappa(t[0], k), gr.s_kappa(t[1], k), 0))))

    def first_order(pair):
        a0, a1 = pair[0].parity_parts()
        b0, b1 = pair[1].parity_parts()
        for a, pa in ((a0, 0), (a1, 1)):
            for b, pb in ((b0, 0), (b1, 1)):
                sgn = -1 if pa * pb else 1
                comm = gr.cliff_kappa(a, b, Fraction(1, 2)) - gr.cliff_kappa(b, a, Fraction(1, 2)).scale(sgn)
                low = {w: v for w, v in comm.items() if w[1] <= 1}
                if low != dict(gr.grass_poisson(a, b).scale(I, 1).items()):
                    return False
        return True
    flat = [random_grass(rng, n, N, max_lam=0) for _ in range(ctx.samples)]
    out.append(case("commutator-first-order-is-i-bracket", first_failure(
        list(zip(flat, flat[1:] + flat[:1])), first_order)))

    def derivation(t):
        a, b = t[0], t[1]
        a0, a1 = a.parity_parts()
        for v in range(2 * n):
            lhs = gr.insert_left(v, gr.wedge(a, b))
            rhs = gr.wedge(gr.insert_left(v, a), b) + gr.wedge(a0, gr.insert_left(v, b)) \
                - gr.wedge(a1, gr.insert_left(v, b))
            if lhs != rhs:
                return False
        return True
    out.append(case("insertion-is-odd-derivation", first_failure(triples, derivation)))

    def poisson_jacobi(t):
        parts = [x.parity_parts() for x in t]
        for pa in (0, 1):
            for pb in (0, 1):
                for pc in (0, 1):
                    a, b, c = parts[0][pa], parts[1][pb], parts[2][pc]
                    P = gr.grass_poisson
                    lhs = P(a, P(b, c))
                    rhs = P(P(a, b), c) + P(b, P(a, c)).scale(-1 if pa * pb else 1)
                    if lhs != rhs:
                        return False
        return True
    out.append(case("super-poisson-jacobi", first_failure(triples[: max(3, len(triples) // 4)], poisson_jacobi)))
    return out


# ------------------------------------------------------------------ backend

def _fn_field(be, N, f):
    return SuperField.from_function(be, N, f)


def backend_cases(ctx: Context) -> list[Case]:
    be, N, rng = ctx.backend, ctx.order, ctx.rng
    out = []
    count = max(3, ctx.samples // 3)
    fs = [_fn_field(be, N, random_function(rng, be)) for _ in range(count)]
    triples = [(fs[i], fs[(i + 1) % count], fs[(i + 2) % count]) for i in range(count)]
    out.append(case("star-associative", first_failure(
        triples, lambda t: star_kappa(star_kappa(t[0], t[1], 0), t[2], 0)
        == star_kappa(t[0], star_kappa(t[1], t[2], 0), 0))))

    def c1(t):
        comm = star_kappa(t[0], t[1], 0) - star_kappa(t[1], t[0], 0)
        first = comm.select(lambda m, r, k: r == 1)
        want = super_poisson(t[0], t[1]).scale(I, 1)
        return first == want and not comm.select(lambda m, r, k: r == 0)
    out.append(case("antisymmetric-first-order-is-i-poisson", first_failure(triples, c1)))
    out.append(case("poisson-jacobi", first_failure(
        triples, lambda t: super_poisson(t[0], super_poisson(t[1], t[2]))
        == super_poisson(super_poisson(t[0], t[1]), t[2]) + super_poisson(t[1], super_poisson(t[0], t[2])))))
    cov = covariance_check(be, N)
    out.append(case("quantum-covariance", None if cov is None else f"(a, b) = ({cov[0] + 1}, {cov[1] + 1})"))
    keys = [be.random_key(rng) for _ in range(ctx.samples)] + list(be.atoms.values())
    strong = strong_invariance_check(be, keys, min(N, 3))
    if be.strongly_invariant_by_design:
        out.append(case("strong-invariance", None if strong is None else be.format_key(strong[0])))
    else:
        # a deliberately non-strongly-invariant backend must exhibit a witness
        out.append(case("strong-invariance-violated-as-designed",
                        "no violation found" if strong is None else None))
    if reducible(be):
        cs = [random_boundary(rng, be, N) for _ in range(count)]
        out.append(case("restrict-after-prolong-is-identity", first_failure(
            cs, lambda c: au.restrict(au.prolong(c)) == c)))
        out.append(case("homotopy-kills-prolongation", first_failure(
            cs, lambda c: not au.homotopy(au.prolong(c)))))
    return out


# ------------------------------------------------------------------ brst

def _parity_split(f: SuperField):
    return f.parity_parts()


def brst_cases(ctx: Context) -> list[Case]:
    be, N, rng = ctx.backend, ctx.order, ctx.rng
    out = []
    for k in KAPPAS:
        th = op.theta_kappa(be, N, k)
        sq = star_kappa(th, th, k)
        out.append(case(f"theta-nilpotent-kappa={k}", format_field(sq) if sq else None))
    fs = [random_field(rng, be, N) for _ in range(ctx.samples)]
    few = fs[: max(3, ctx.samples // 4)]
    ce, kz = op.quant_ce, op.quant_koszul
    out.append(case("ce-squares-to-zero", first_failure(fs, lambda f: not ce(ce(f)))))
    out.append(case("koszul-squares-to-zero", first_failure(fs, lambda f: not kz(kz(f)))))
    out.append(case("ce-koszul-anticommute", first_failure(fs, lambda f: not (ce(kz(f)) + kz(ce(f))))))
    out.append(case("brst-standard-splits", first_failure(
        fs, lambda f: op.brst_standard(f) == ce(f) + kz(f).scale(2))))
    for k in KAPPAS:
        out.append(case(f"brst-squares-to-zero-kappa={k}", first_failure(
            few, lambda f, k=k: not op.brst_kappa(op.brst_kappa(f, k), k))))

    def derivation(pair):
        a, b = pair
        a0, a1 = a.parity_parts()
        D = op.brst_standard
        lhs = D(star_kappa(a, b, 0))
        rhs = star_kappa(D(a), b, 0) + star_kappa(a0, D(b), 0) - star_kappa(a1, D(b), 0)
        return lhs == rhs
    pairs = [(few[i], few[(i + 1) % len(few)]) for i in range(len(few))]
    out.append(case("brst-is-graded-derivation", first_failure(pairs, derivation)))
    for k in KAPPAS:
        out.append(case(f"brst-explicit-formula-kappa={k}", first_failure(
            few, lambda f, k=k: op.brst_kappa(f, k) == op.brst_kappa_formula(f, k))))
        out.append(case(f"ce-kappa-formula-kappa={k}", first_failure(
            few, lambda f, k=k: op.conjugate(ce, f, k) == op.ce_kappa_formula(f, k))))
        out.append(case(f"koszul-kappa-formula-kappa={k}", first_failure(
            few, lambda f, k=k: op.conjugate(kz, f, k) == op.koszul_kappa_formula(f, k))))
        out.append(case(f"brst-kappa-is-conjugate-kappa={k}", first_failure(
            few, lambda f, k=k: op.conjugate(op.brst_standard, f, k) == op.brst_kappa(f, k))))
        out.append(case(f"q-conjugation-kappa={k}", first_failure(
            few, lambda f, k=k: op.conjugate(op.op_q, f, k) == op.op_q(f) - op.op_c(f).scale(2 * I * k, 1))))
        out.append(case(f"u-from-commutator-kappa={k}", first_failure(
            few, lambda f, k=k: op.op_u_commutator(f, k) == op.op_u(f))))
    out.append(case("weyl-brst-formula", first_failure(few, lambda f: op.brst_weyl(f) == op.weyl_brst_formula(f))))
    out.append(case("weyl-ce-formula", first_failure(
        few, lambda f: op.conjugate(ce, f, Fraction(1, 2)) == op.weyl_ce_formula(f))))
    out.append(case("weyl-koszul-formula", first_failure(
        few, lambda f: op.conjugate(kz, f, Fraction(1, 2)) == op.weyl_koszul_formula(f))))
    out.extend(commutation_cases(be, fs))
    for name, a, b in (("q", op.op_q_def, op.op_q), ("c", op.op_c_def, op.op_c),
                       ("m_s", op.op_ms_def, op.op_ms), ("m_a", op.op_ma_def, op.op_ma)):
        out.append(case(f"{name}-definition-matches-basis-form", first_failure(fs, lambda f, a=a, b=b: a(f) == b(f))))
    out.append(case("u-from-poisson-bracket", first_failure(fs, lambda f: op.op_u_poisson(f) == op.op_u(f))))
    out.append(case("ghost-number-is-grading", first_failure(
        fs, lambda f: op.ghost_number_op(f) == op.grading_op(f))))
    return out


def commutation_cases(be: Backend, fs) -> list[Case]:
    """Commutators of the super-Laplacian with the basic operators."""
    lap = op.laplacian

    def comm(A, B, f):
        return A(B(f)) - B(A(f))
    return [
        case("laplacian-q-commutator-is-c", first_failure(fs, lambda f: comm(lap, op.op_q, f) == op.op_c(f))),
        case("laplacian-commutes-with-c", first_failure(fs, lambda f: not comm(lap, op.op_c, f))),
        case("laplacian-commutes-with-m_s", first_failure(fs, lambda f: not comm(lap, op.op_ms, f))),
        case("laplacian-commutes-with-m_a", first_failure(fs, lambda f: not comm(lap, op.op_ma, f))),
        case("laplacian-commutes-with-u", first_failure(fs, lambda f: not comm(lap, op.op_u, f))),
        case("laplacian-ce-commutator", first_failure(
            fs, lambda f: comm(lap, op.quant_ce, f)
            == -op.op_q(f).scale(2) - op.op_ma_minus_ms_over_ilam(f) + op.op_u(f))),
    ]


# ------------------------------------------------------------------ homotopy

def _aug_samples(ctx, count):
    be, N, rng = ctx.backend, ctx.order, ctx.rng
    return [au.AugmentedField(random_boundary(rng, be, N, 2), random_field(rng, be, N)) for _ in range(count)]


def _exact_on_c(be, d: SuperField) -> bool:
    """d = delta_q^c v for a ghost-zero v (abelian, one ghost per word)."""
    if not d:
        return True
    n = be.dim
    rhs = [PhaseFunction._wrap({k: v for (m, r, k), v in d.items() if m == 1 << a and r == s})
           for s in range(d.order + 1) for a in range(n)]
    # solve order by order in lam for v
    v = SuperField.zero(be, d.order)
    for s in range(d.order + 1):
        parts = rhs[s * n:(s + 1) * n]
        sol, res = be.solve_action(parts)
        if res is not None:
            return False
        v = v + SuperField.from_function(be, d.order, sol).scale(ONE, s)
    return au.ce_on_c(v) == d


def homotopy_cases(ctx: Context) -> list[Case]:
    be, N, rng = ctx.backend, ctx.order, ctx.rng
    if not reducible(be):
        return []
    count = max(3, ctx.samples // 3)
    xs = _aug_samples(ctx, count)
    out = [
        case("quantum-homotopy-identity", first_failure(
            xs, lambda x: not (au.aug_koszul_q(au.aug_homotopy_q(x)) + au.aug_homotopy_q(au.aug_koszul_q(x)) - x))),
        case("classical-homotopy-identity", first_failure(
            xs, lambda x: not (au.aug_koszul(au.aug_homotopy(x)) + au.aug_homotopy(au.aug_koszul(x)) - x))),
        case("h-prime-homotopy-identity", first_failure(
            xs, lambda x: not (au.aug_brst_q(au.h_prime_q(x)) + au.h_prime_q(au.aug_brst_q(x)) - x))),
    ]
    cs = [random_boundary(rng, be, N) for _ in range(count)]
    fs = [random_field(rng, be, N, antighosts=0) for _ in range(count)]
    gs = [random_field(rng, be, N, antighosts=1) for _ in range(count)]
    r, prol = au.deformed_restriction, au.prolong
    out += [
        case("deformed-restriction-after-prolong-is-identity", first_failure(cs, lambda c: r(prol(c)) == c)),
        case("deformed-restriction-kills-koszul-image", first_failure(gs, lambda g: not r(op.quant_koszul(g)))),
        case("prolong-restrict-is-idempotent", first_failure(fs, lambda f: prol(r(prol(r(f)))) == prol(r(f)))),
        case("direct-sum-decomposition", first_failure(
            fs, lambda f: f == prol(r(f)) + op.quant_koszul(au.deformed_homotopy(f)))),
        case("complement-lies-in-ideal", first_failure(fs, lambda f: not r(f - prol(r(f))))),
        case("closed-form-restriction", first_failure(fs, lambda f: r(f) == au.closed_form_restriction(f))),
    ]
    if be.strongly_invariant_by_design:
        fields = [random_boundary(rng, be, N, ghosts=0) for _ in range(count)]
        out.append(case("quantum-action-equals-classical", collapse_check(be, fields)))
    out.extend(cohomology_cases(be, N, _invariant_seeds(be)))
    box = be.invariant_box(1)
    seeds = [k for k in box if solve_invariant(be, k, N).ok]
    d = dirac_check(be, seeds, N)
    out.append(case("dirac-products-agree-modulo-ideal",
                    None if d is None else f"({be.format_key(d[0])}, {be.format_key(d[1])})"))
    return out


def _invariant_seeds(be: Backend) -> list[PhaseFunction]:
    if isinstance(be, Torus):
        keys = [(0, 0, 0, 0), (1, 0, 0, 0), (0, 0, 1, 0), (1, 0, 1, 0)]
    else:
        keys = be.invariant_box(1)
    return [PhaseFunction.monomial(k) for k in keys]


def cohomology_cases(be: Backend, N: int, seeds) -> list[Case]:
    """Psi o Psi^{-1} on extended invariants (ghost 0) and on e^a-multiples (ghost 1)."""
    closed = []
    for u in seeds:
        sol = solve_invariant(be, u, N)
        if not sol.ok:
            continue
        closed.append(sol.extension)
        if be.dim == 1:
            closed.append(sol.extension.map_words(lambda m: ((m | 1, ONE),)))
    bad_round = bad_closed = None
    for c in closed:
        a = au.psi_inverse(c)
        if op.brst_standard(a):
            bad_closed = bad_closed or format_field(c)
        if not _exact_on_c(be, au.psi(a) - c):
            bad_round = bad_round or format_field(c)
    return [case("psi-inverse-is-brst-closed", bad_closed),
            case("psi-round-trip-modulo-exact", bad_round)]


# ------------------------------------------------------------------ classical

def _torus_bracket(u: PhaseFunction, v: PhaseFunction) -> PhaseFunction:
    """Canonical bracket on T*S^1 for z^a p^m monomials: -d_phi u d_p v + d_p u d_phi v."""
    out = {}
    for (a, _, m, _), x in u.terms.items():
        for (b, _, n, _), y in v.terms.items():
            c = m * b - a * n
            if c and m + n >= 1:
                key = (a + b, 0, m + n - 1, 0)
                out[key] = out.get(key, Scalar(0)) + x * y * Scalar(0, c)
    return PhaseFunction(out)


def classical_cases(ctx: Context) -> list[Case]:
    be, N, rng = ctx.backend, ctx.order, ctx.rng
    fs = [random_field(rng, be, N, max_lam=0) for _ in range(ctx.samples)]
    out = [
        case("classical-brst-squares-to-zero", first_failure(fs, lambda f: not op.class_brst(op.class_brst(f)))),
        case("classical-brst-is-bracket-with-charge", first_failure(
            fs, lambda f: op.class_brst(f) == op.poisson_brst(f))),
        case("classical-ce-koszul-anticommute", first_failure(
            fs, lambda f: not (op.class_ce(op.class_koszul(f)) + op.class_koszul(op.class_ce(f))))),
    ]
    om = op.theta_classical(be, N)
    pb = super_poisson(om, om)
    out.append(case("classical-charge-master-equation", format_field(pb) if pb else None))
    if not reducible(be):
        return out
    seeds = [PhaseFunction.monomial(k) for k in be.invariant_box(2)]
    cs = [SuperField.from_function(be, N, u) for u in seeds]
    if be.dim == 1:
        cs += [c.map_words(lambda m: ((m | 1, ONE),)) for c in cs[:4]]
    bad = None
    for c in cs:
        a = au.psi_inverse_classical(c)
        if op.class_brst(a) or au.psi_classical(a) != c:
            bad = bad or format_field(c)
    out.append(case("classical-psi-round-trip", bad))
    if isinstance(be, Torus) and not isinstance(be, PerturbedTorus):
        bad = None
        for u in seeds:
            for v in seeds:
                A = au.psi_inverse_classical(SuperField.from_function(be, N, u))
                B = au.psi_inverse_classical(SuperField.from_function(be, N, v))
                red = au.psi_classical(super_poisson(A, B))
                if red != SuperField.from_function(be, N, _torus_bracket(u, v)):
                    bad = bad or f"({be.format_function(u)}, {be.format_function(v)})"
        out.append(case("reduced-poisson-bracket-on-cotangent-circle", bad))
    return out


RUNNERS = {
    "liealg": liealg_cases,
    "grassmann": grassmann_cases,
    "backend": backend_cases,
    "brst": brst_cases,
    "homotopy": homotopy_cases,
    "classical": classical_cases,
}


def run_suites(names, ctx: Context) -> list[Case]:
    cases = []
    for name in names:
        for c in RUNNERS[name](ctx):
            c.name = f"{name}/{c.name}"
            cases.append(c)
    return cases
