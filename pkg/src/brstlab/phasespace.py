"""Function-algebra backends: torus T*S1 x T*S1, flat T*R^d, and a point.

A PhaseFunction maps monomial keys to Scalars.  Keys are exponent tuples and
pointwise multiplication adds them componentwise for every backend:

  torus   (k, l, m, n)  for z^k w^l p^m J^n, z = exp(i phi), w = exp(i psi)
  flat    (a_1..a_d, b_1..b_d) for x^a p^b
  point   ()

A lam-graded function is a dict {(r, key): Scalar}; Series(PhaseFunction) is
the public wrapper.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

from .liealg import LieAlgebra, abelian
from .scalars import I, ONE, ZERO, ConfigurationError, Scalar, Series

NEG_I = Scalar(0, -1)


def falling(n: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= n - j
    return out


def _addk(m1: tuple, m2: tuple) -> tuple:
    return tuple(a + b for a, b in zip(m1, m2))


class PhaseFunction:
    """Finite sum of monomials with Scalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        self.terms: dict[tuple, Scalar] = {}
        if terms:
            for k, v in terms.items():
                v = Scalar.coerce(v)
                if v:
                    self.terms[tuple(k)] = v

    @classmethod
    def _wrap(cls, d):
        f = cls.__new__(cls)
        f.terms = {k: v for k, v in d.items() if v}
        return f

    @classmethod
    def monomial(cls, key: tuple, coeff=ONE) -> "PhaseFunction":
        return cls({key: coeff})

    def __add__(self, o):
        acc = dict(self.terms)
        for k, v in o.terms.items():
            acc[k] = acc.get(k, ZERO) + v
        return PhaseFunction._wrap(acc)

    def __sub__(self, o):
        return self + (-o)

    def __neg__(self):
        return PhaseFunction._wrap({k: -v for k, v in self.terms.items()})

    def __mul__(self, o):
        if isinstance(o, PhaseFunction):
            acc: dict[tuple, Scalar] = {}
            for k1, v1 in self.terms.items():
                for k2, v2 in o.terms.items():
                    k = _addk(k1, k2)
                    acc[k] = acc.get(k, ZERO) + v1 * v2
            return PhaseFunction._wrap(acc)
        s = Scalar.coerce(o)
        return PhaseFunction._wrap({k: v * s for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, o):
        if isinstance(o, PhaseFunction):
            return self.terms == o.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"PhaseFunction({dict(sorted(self.terms.items()))!r})"


def lam_to_series(d: Mapping[tuple[int, tuple], Scalar], order: int) -> Series:
    parts: list[dict] = [dict() for _ in range(order + 1)]
    for (r, k), v in d.items():
        if r <= order and v:
            parts[r][k] = v
    return Series([PhaseFunction._wrap(p) for p in parts])


def series_to_lam(s: Series) -> dict[tuple[int, tuple], Scalar]:
    return {(r, k): v for r, f in enumerate(s.coeffs) for k, v in f.terms.items()}


def _acc(d: dict, key, v: Scalar) -> None:
    d[key] = d.get(key, ZERO) + v


class Backend:
    """Capability record for one phase space.  Subclasses fill in the kernels."""

    name = "backend"
    nvars = 0
    strongly_invariant_by_design = False

    def __init__(self, algebra: LieAlgebra):
        self.algebra = algebra
        self._star_cache: dict = {}
        self._poisson_cache: dict = {}

    # ---- shape
    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def unit(self) -> tuple:
        return (0,) * self.nvars

    def constrained_exponents(self, key: tuple) -> tuple[int, ...]:
        return ()

    def lowered(self, key: tuple, a: int) -> tuple:
        raise ConfigurationError(f"{self.name} has no constrained momenta")

    def is_constraint_key(self, key: tuple) -> bool:
        return not any(self.constrained_exponents(key))

    # ---- kernels to implement
    def _star_kernel(self, k1: tuple, k2: tuple, top: int) -> tuple:
        raise NotImplementedError

    def _poisson_kernel(self, k1: tuple, k2: tuple) -> tuple:
        raise NotImplementedError

    def momentum_terms(self, a: int) -> tuple:
        """Quantum momentum J_a (a 0-based) as ((r, key, coeff), ...)."""
        return ()

    # ---- public operations
    def star_kernel(self, k1: tuple, k2: tuple, top: int) -> tuple:
        key = (k1, k2, top)
        hit = self._star_cache.get(key)
        if hit is None:
            hit = self._star_kernel(k1, k2, top)
            self._star_cache[key] = hit
        return hit

    def poisson_kernel(self, k1: tuple, k2: tuple) -> tuple:
        key = (k1, k2)
        hit = self._poisson_cache.get(key)
        if hit is None:
            hit = self._poisson_kernel(k1, k2)
            self._poisson_cache[key] = hit
        return hit

    def mul(self, f: PhaseFunction, g: PhaseFunction) -> PhaseFunction:
        return f * g

    def star_lam(self, F: Mapping, G: Mapping, order: int) -> dict:
        out: dict = {}
        for (r1, k1), v1 in F.items():
            for (r2, k2), v2 in G.items():
                base = r1 + r2
                if base > order:
                    continue
                v = v1 * v2
                for t, k, c in self.star_kernel(k1, k2, order - base):
                    _acc(out, (base + t, k), v * c)
        return {k: v for k, v in out.items() if v}

    def star(self, f, g, order: int) -> Series:
        """f * g for PhaseFunctions or Series(PhaseFunction)."""
        F = series_to_lam(f) if isinstance(f, Series) else {(0, k): v for k, v in f.terms.items()}
        G = series_to_lam(g) if isinstance(g, Series) else {(0, k): v for k, v in g.terms.items()}
        return lam_to_series(self.star_lam(F, G, order), order)

    def poisson(self, f: PhaseFunction, g: PhaseFunction) -> PhaseFunction:
        acc: dict = {}
        for k1, v1 in f.terms.items():
            for k2, v2 in g.terms.items():
                for k, c in self.poisson_kernel(k1, k2):
                    _acc(acc, k, v1 * v2 * c)
        return PhaseFunction._wrap(acc)

    def momentum(self, a: int, order: int) -> Series:
        """Quantum momentum map component J_a, a is 1-based."""
        return lam_to_series({(r, k): c for r, k, c in self.momentum_terms(a - 1)}, order)

    def classical_momentum(self, a: int) -> PhaseFunction:
        return PhaseFunction({k: c for r, k, c in self.momentum_terms(a) if r == 0})

    def lie_classical(self, a: int, f: PhaseFunction) -> PhaseFunction:
        """Classical action {J_a, f} of the basis vector e_a (a 0-based)."""
        return self.poisson(self.classical_momentum(a), f)

    def restrict(self, f: PhaseFunction) -> PhaseFunction:
        return PhaseFunction._wrap({k: v for k, v in f.terms.items() if self.is_constraint_key(k)})

    def prolong_terms(self, key: tuple) -> tuple:
        """prol of a constraint monomial as ((lam shift, key, coeff), ...)."""
        return ((0, key, ONE),)

    def prolong(self, u: PhaseFunction) -> PhaseFunction:
        for k in u.terms:
            if not self.is_constraint_key(k):
                raise ConfigurationError(f"{self.format_key(k)} is not a constraint function")
        acc: dict = {}
        for k, v in u.terms.items():
            for s, k2, c in self.prolong_terms(k):
                if s == 0:
                    _acc(acc, k2, v * c)
        return PhaseFunction._wrap(acc)

    def homotopy_terms(self, key: tuple, l: int) -> tuple:
        """h_l on one monomial: ((a 0-based, lam shift, key, coeff), ...); e_a is wedged on the left."""
        beta = self.constrained_exponents(key)
        m = sum(beta)
        if not m:
            return ()
        return tuple((a, 0, self.lowered(key, a), Scalar(Fraction(b, l + m)))
                     for a, b in enumerate(beta) if b)

    def solve_action(self, rhs: Sequence[PhaseFunction]):
        """Solve {J_a, phi} = rhs_a on C with phi in the complement of invariants.

        Returns (phi, residual); residual is None when solvable."""
        raise NotImplementedError

    def invariant_box(self, max_degree: int) -> list[tuple]:
        return [self.unit]

    def reduced_generators(self) -> list[PhaseFunction]:
        return []

    # ---- text
    atoms: dict[str, tuple] = {}

    def format_key(self, key: tuple) -> str:
        return "1"

    def format_function(self, f: PhaseFunction) -> str:
        if not f:
            return "0"
        parts = []
        for k in sorted(f.terms):
            c = f.terms[k]
            mono = self.format_key(k)
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def format_series(self, s: Series) -> str:
        parts = []
        for r, f in enumerate(s.coeffs):
            if not f:
                continue
            body = self.format_function(f)
            if r == 0:
                parts.append(body)
            else:
                lam = "lam" if r == 1 else f"lam^{r}"
                parts.append(f"{lam}*({body})")
        return " + ".join(parts) if parts else "0"

    def random_key(self, rng: random.Random, degree: int = 2, constraint: bool = False) -> tuple:
        return self.unit

    def describe(self) -> str:
        return self.name


def _fmt_pow(var: str, e: int) -> str:
    if e == 0:
        return ""
    return var if e == 1 else f"{var}^{e}"


def _join(parts: Iterable[str]) -> str:
    s = "*".join(p for p in parts if p)
    return s or "1"


# ------------------------------------------------------------------ torus

class Torus(Backend):
    """T*S1 x T*S1 with coordinates (phi, p, psi, J), U(1) acting on psi, momentum J.

    Star: mu o exp((lam/i)(d_phi (x) d_p + d_J (x) d_psi)).
    """

    name = "torus"
    nvars = 4
    strongly_invariant_by_design = True
    atoms = {"z": (1, 0, 0, 0), "w": (0, 1, 0, 0), "p": (0, 0, 1, 0), "J": (0, 0, 0, 1)}

    def __init__(self):
        super().__init__(abelian(1))

    def constrained_exponents(self, key):
        return (key[3],)

    def lowered(self, key, a):
        return (key[0], key[1], key[2], key[3] - 1)

    def _star_kernel(self, k1, k2, top):
        z1, w1, p1, j1 = k1
        z2, w2, p2, j2 = k2
        out = []
        # (lam/i)^a (i z1)^a (d_p)^a  and  (lam/i)^b (d_J)^b (i w2)^b: the i's cancel
        for a in range(min(p2, top) + 1):
            ca = Fraction(z1 ** a * comb(p2, a))
            if not ca:
                continue
            for b in range(min(j1, top - a) + 1):
                cb = Fraction(w2 ** b * comb(j1, b))
                if not cb:
                    continue
                out.append((a + b, (z1 + z2, w1 + w2, p1 + p2 - a, j1 + j2 - b), Scalar(ca * cb)))
        return tuple(out)

    def _poisson_kernel(self, k1, k2):
        z1, w1, p1, j1 = k1
        z2, w2, p2, j2 = k2
        acc: dict = {}
        tot = (z1 + z2, w1 + w2, p1 + p2, j1 + j2)
        # -d_phi f d_p g + d_p f d_phi g - d_J f d_psi g + d_psi f d_J g
        if z1 and p2:
            _acc(acc, (tot[0], tot[1], tot[2] - 1, tot[3]), Scalar(0, -z1 * p2))
        if p1 and z2:
            _acc(acc, (tot[0], tot[1], tot[2] - 1, tot[3]), Scalar(0, p1 * z2))
        if j1 and w2:
            _acc(acc, (tot[0], tot[1], tot[2], tot[3] - 1), Scalar(0, -j1 * w2))
        if w1 and j2:
            _acc(acc, (tot[0], tot[1], tot[2], tot[3] - 1), Scalar(0, w1 * j2))
        return tuple((k, v) for k, v in acc.items() if v)

    def momentum_terms(self, a):
        return ((0, (0, 0, 0, 1), ONE),)

    def solve_action(self, rhs):
        (g,) = rhs
        phi, res = {}, {}
        for k, v in g.terms.items():
            if k[1] == 0:
                res[k] = v
            else:
                # {J, w^l X} = -i l w^l X
                phi[k] = v / Scalar(0, -k[1])
        residual = PhaseFunction._wrap(res) if res else None
        return PhaseFunction._wrap(phi), residual

    def invariant_box(self, max_degree):
        D = max_degree
        return [(a, 0, m, 0) for a in range(-D, D + 1) for m in range(D + 1)]

    def reduced_generators(self):
        return [PhaseFunction.monomial(k) for k in ((1, 0, 0, 0), (-1, 0, 0, 0), (0, 0, 1, 0))]

    def format_key(self, key):
        return _join((_fmt_pow("z", key[0]), _fmt_pow("w", key[1]),
                      _fmt_pow("p", key[2]), _fmt_pow("J", key[3])))

    def random_key(self, rng, degree=2, constraint=False):
        return (rng.randint(-degree, degree), rng.randint(-degree, degree),
                rng.randint(0, degree), 0 if constraint else rng.randint(0, degree))


class PerturbedTorus(Torus):
    """Torus with the star conjugated by S = exp(lam P d_J), P a polynomial in p."""

    name = "torus-perturbed"
    strongly_invariant_by_design = False

    def __init__(self, P: PhaseFunction | None = None):
        super().__init__()
        P = P if P is not None else PhaseFunction.monomial((0, 0, 1, 0))
        for k in P.terms:
            if k[0] or k[1] or k[3]:
                raise ConfigurationError("the perturbation P must depend on p alone")
        self.P = P
        self._base = Torus()

    def s_map(self, F: Mapping, order: int, sign: int = 1) -> dict:
        """exp(sign * lam * P d_J) on a lam-graded function."""
        out: dict = {}
        for (r, k), v in F.items():
            # (P d_J)^j / j!  applied to J^n
            cur = {k: v}
            j = 0
            while cur and r + j <= order:
                for kk, vv in cur.items():
                    _acc(out, (r + j, kk), vv)
                j += 1
                nxt: dict = {}
                for kk, vv in cur.items():
                    n = kk[3]
                    if not n:
                        continue
                    low = (kk[0], kk[1], kk[2], n - 1)
                    for pk, pv in self.P.terms.items():
                        _acc(nxt, _addk(low, pk), vv * pv * Fraction(sign * n, j))
                cur = {kk: vv for kk, vv in nxt.items() if vv}
        return {k: v for k, v in out.items() if v}

    def _star_kernel(self, k1, k2, top):
        F = self.s_map({(0, k1): ONE}, top, -1)
        G = self.s_map({(0, k2): ONE}, top, -1)
        prod = self._base.star_lam(F, G, top)
        res = self.s_map(prod, top, 1)
        return tuple((r, k, v) for (r, k), v in sorted(res.items()))

    def ad_star(self, f: PhaseFunction, order: int) -> Series:
        """ad(P) f = P * f - f * P with the undeformed torus star."""
        return self._base.star(self.P, f, order) - self._base.star(f, self.P, order)


# ------------------------------------------------------------------ flat

class Flat(Backend):
    """Polynomials on T*R^d, abelian R^k acting by translation in the last k positions.

    J_a = p_{d-k+a}.  Ordering 'standard': mu o exp((lam/i) sum d_x (x) d_p);
    'weyl': the symmetrised exponent (lam/2i) sum (d_x (x) d_p - d_p (x) d_x).
    """

    strongly_invariant_by_design = True

    def __init__(self, d: int, k: int, ordering: str = "standard"):
        if not 1 <= k <= d:
            raise ConfigurationError(f"flat backend needs 1 <= k <= d, got d={d}, k={k}")
        if ordering not in ("standard", "weyl"):
            raise ConfigurationError(f"unknown ordering {ordering!r}")
        super().__init__(abelian(k))
        self.d, self.k, self.ordering = d, k, ordering
        self.nvars = 2 * d
        self.name = f"flat:{d},{k}" + ("" if ordering == "standard" else ":weyl")
        self.atoms = {}
        for j in range(d):
            self.atoms[f"x{j + 1}"] = tuple(1 if i == j else 0 for i in range(2 * d))
            self.atoms[f"p{j + 1}"] = tuple(1 if i == d + j else 0 for i in range(2 * d))

    def _jindex(self, a: int) -> int:
        return self.d + self.d - self.k + a

    def constrained_exponents(self, key):
        return tuple(key[self._jindex(a)] for a in range(self.k))

    def lowered(self, key, a):
        i = self._jindex(a)
        return key[:i] + (key[i] - 1,) + key[i + 1:]

    def _pair_terms(self, f_x, f_p, g_x, g_p, top):
        """Univariate kernel for one (x, p) pair: ((t, coeff, fx', fp', gx', gp'), ...)."""
        out = []
        if self.ordering == "standard":
            for a in range(min(f_x, g_p, top) + 1):
                c = Fraction(falling(f_x, a) * falling(g_p, a), factorial(a))
                out.append((a, NEG_I ** a * c, f_x - a, f_p, g_x, g_p - a))
        else:
            for a in range(min(f_x, g_p, top) + 1):
                for b in range(min(f_p, g_x, top - a) + 1):
                    c = Fraction(falling(f_x, a) * falling(g_p, a) * falling(f_p, b) * falling(g_x, b),
                                 factorial(a) * factorial(b) * 2 ** (a + b))
                    out.append((a + b, NEG_I ** (a + b) * c * (-1) ** b,
                                f_x - a, f_p - b, g_x - b, g_p - a))
        return out

    def _star_kernel(self, k1, k2, top):
        d = self.d
        partial = [(0, ONE, (), ())]
        for j in range(d):
            nxt = []
            for t, c, fx, gx in partial:
                for dt, dc, a1, b1, a2, b2 in self._pair_terms(k1[j], k1[d + j], k2[j], k2[d + j], top - t):
                    nxt.append((t + dt, c * dc, fx + ((a1, b1),), gx + ((a2, b2),)))
            partial = nxt
        acc: dict = {}
        for t, c, fx, gx in partial:
            key = tuple(fx[j][0] + gx[j][0] for j in range(d)) + tuple(fx[j][1] + gx[j][1] for j in range(d))
            _acc(acc, (t, key), c)
        return tuple((t, key, v) for (t, key), v in sorted(acc.items()) if v)

    def _poisson_kernel(self, k1, k2):
        d = self.d
        acc: dict = {}
        tot = _addk(k1, k2)
        for j in range(d):
            xi, pi = j, d + j
            # d_p f d_x g - d_x f d_p g
            if k1[pi] and k2[xi]:
                key = list(tot)
                key[pi] -= 1
                key[xi] -= 1
                _acc(acc, tuple(key), Scalar(k1[pi] * k2[xi]))
            if k1[xi] and k2[pi]:
                key = list(tot)
                key[pi] -= 1
                key[xi] -= 1
                _acc(acc, tuple(key), Scalar(-k1[xi] * k2[pi]))
        return tuple((k, v) for k, v in acc.items() if v)

    def momentum_terms(self, a):
        return ((0, tuple(1 if i == self._jindex(a) else 0 for i in range(2 * self.d)), ONE),)

    def solve_action(self, rhs):
        d, k = self.d, self.k
        ys = [d - k + a for a in range(k)]  # positions of the group coordinates x^{d-k+a}
        acc: dict = {}
        for a, g in enumerate(rhs):
            for key, v in g.terms.items():
                deg = sum(key[y] for y in ys)
                new = list(key)
                new[ys[a]] += 1
                _acc(acc, tuple(new), v * Fraction(1, deg + 1))
        phi = PhaseFunction._wrap(acc)
        res = {}
        for a, g in enumerate(rhs):
            diff = self.lie_classical(a, phi) - g
            for key, v in diff.terms.items():
                _acc(res, (a,) + key, v)
        residual = None
        if any(res.values()):
            residual = PhaseFunction._wrap({kk[1:]: v for kk, v in res.items()})
        return phi, residual

    def invariant_box(self, max_degree):
        free = self.d - self.k
        out = []

        def rec(j, cur):
            if j == 2 * free:
                key = [0] * (2 * self.d)
                for i in range(free):
                    key[i] = cur[i]
                    key[self.d + i] = cur[free + i]
                out.append(tuple(key))
                return
            for e in range(max_degree + 1):
                rec(j + 1, cur + [e])
        rec(0, [])
        return out

    def reduced_generators(self):
        free = self.d - self.k
        gens = []
        for i in range(free):
            gens.append(PhaseFunction.monomial(self.atoms[f"x{i + 1}"]))
            gens.append(PhaseFunction.monomial(self.atoms[f"p{i + 1}"]))
        return gens

    def format_key(self, key):
        d = self.d
        return _join([_fmt_pow(f"x{j + 1}", key[j]) for j in range(d)]
                     + [_fmt_pow(f"p{j + 1}", key[d + j]) for j in range(d)])

    def random_key(self, rng, degree=2, constraint=False):
        key = [rng.randint(0, 1 if self.d > 2 else degree) for _ in range(2 * self.d)]
        if constraint:
            for a in range(self.k):
                key[self._jindex(a)] = 0
        return tuple(key)


# ------------------------------------------------------------------ point

class Point(Backend):
    """One-point phase space with vanishing momentum map, any Lie algebra."""

    nvars = 0
    strongly_invariant_by_design = True

    def __init__(self, algebra: LieAlgebra):
        super().__init__(algebra)
        self.name = f"point:{algebra.name}"

    def _star_kernel(self, k1, k2, top):
        return ((0, (), ONE),)

    def _poisson_kernel(self, k1, k2):
        return ()

    def homotopy_terms(self, key, l):
        raise ConfigurationError("the point backend has no constraints and no Koszul homotopy")

    def solve_action(self, rhs):
        res = PhaseFunction()
        for g in rhs:
            res = res + g
        return PhaseFunction(), (res if res else None)


# ------------------------------------------------------------------ alternate choice

class AlternateChoice(Backend):
    """Same phase space, with prolongation prol + lam J_a T_a and matching h_0.

    T_a act on constraint monomials: t(key) -> ((key', coeff), ...) and must
    commute with the group action.  h_0' = h_0 - lam e_a T_a restrict.
    """

    def __init__(self, base: Backend, transforms):
        super().__init__(base.algebra)
        self.base = base
        self.transforms = transforms
        self.name = base.name + "+alt"
        self.nvars = base.nvars
        self.atoms = base.atoms
        self.strongly_invariant_by_design = base.strongly_invariant_by_design

    def __getattr__(self, item):
        return getattr(self.base, item)

    def constrained_exponents(self, key):
        return self.base.constrained_exponents(key)

    def lowered(self, key, a):
        return self.base.lowered(key, a)

    def star_kernel(self, k1, k2, top):
        return self.base.star_kernel(k1, k2, top)

    def poisson_kernel(self, k1, k2):
        return self.base.poisson_kernel(k1, k2)

    def momentum_terms(self, a):
        return self.base.momentum_terms(a)

    def _jkey(self, a):
        return self.base.momentum_terms(a)[0][1]

    def prolong_terms(self, key):
        out = [(0, key, ONE)]
        for a, t in enumerate(self.transforms):
            for k2, c in t(key):
                out.append((1, _addk(k2, self._jkey(a)), c))
        return tuple(out)

    def homotopy_terms(self, key, l):
        out = list(self.base.homotopy_terms(key, l))
        if l == 0 and self.is_constraint_key(key):
            for a, t in enumerate(self.transforms):
                for k2, c in t(key):
                    out.append((a, 1, k2, -c))
        return tuple(out)

    def solve_action(self, rhs):
        return self.base.solve_action(rhs)

    def invariant_box(self, max_degree):
        return self.base.invariant_box(max_degree)

    def reduced_generators(self):
        return self.base.reduced_generators()

    def format_key(self, key):
        return self.base.format_key(key)

    def random_key(self, rng, degree=2, constraint=False):
        return self.base.random_key(rng, degree, constraint)


# ------------------------------------------------------------------ checks

def strong_invariance_check(backend: Backend, keys: Iterable[tuple], order: int = 3):
    """First key f with (1/i lam)(J_a * f - f * J_a) != {J_a, f}, or None."""
    for key in keys:
        f = {(0, key): ONE}
        for a in range(backend.dim):
            J = {(r, k): c for r, k, c in backend.momentum_terms(a)}
            comm = backend.star_lam(J, f, order + 1)
            for k2, v in backend.star_lam(f, J, order + 1).items():
                _acc(comm, k2, -v)
            lhs = {(r - 1, k): v * NEG_I for (r, k), v in comm.items() if v and r >= 1}
            if any(v for (r, k), v in comm.items() if r == 0):
                return key, a
            rhs = backend.lie_classical(a, PhaseFunction.monomial(key))
            want = {(0, k): v for k, v in rhs.terms.items()}
            if {k: v for k, v in lhs.items() if v} != want:
                return key, a
    return None


def covariance_check(backend: Backend, order: int = 3):
    """J_a * J_b - J_b * J_a == i lam sum_c f^c_ab J_c; returns the first failing (a, b) or None."""
    n = backend.dim
    L = backend.algebra
    for a in range(n):
        for b in range(n):
            Ja = {(r, k): c for r, k, c in backend.momentum_terms(a)}
            Jb = {(r, k): c for r, k, c in backend.momentum_terms(b)}
            lhs = backend.star_lam(Ja, Jb, order)
            for k, v in backend.star_lam(Jb, Ja, order).items():
                _acc(lhs, k, -v)
            rhs: dict = {}
            for c in range(n):
                if L.f[c][a][b]:
                    for r, k, v in backend.momentum_terms(c):
                        if r + 1 <= order:
                            _acc(rhs, (r + 1, k), I * v * L.f[c][a][b])
            if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
                return a, b
    return None


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(r"\s*(?:(?P<word>e[\^_]\d+(?:\^e[\^_]\d+)*)|(?P<num>\d+(?:/\d+)?)"
                    r"|(?P<name>lam|[xp]\d+|[zwpJi])|(?P<op>[-+*^();]))")


def tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ConfigurationError(f"unexpected input at {text[pos:]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


def make_backend(text: str, algebra: LieAlgebra | None = None) -> Backend:
    """Resolve 'torus', 'torus-perturbed', 'flat:<d>,<k>[:weyl]' or 'point'."""
    if text == "torus":
        return Torus()
    if text == "torus-perturbed":
        return PerturbedTorus()
    if text.startswith("flat:"):
        body = text[5:]
        ordering = "standard"
        if body.endswith(":weyl"):
            body, ordering = body[:-5], "weyl"
        try:
            d, k = (int(x) for x in body.split(","))
        except ValueError as exc:
            raise ConfigurationError(f"bad flat backend {text!r}") from exc
        return Flat(d, k, ordering)
    if text == "point":
        if algebra is None:
            raise ConfigurationError("the point backend needs a Lie algebra")
        return Point(algebra)
    raise ConfigurationError(f"unknown backend {text!r}")
