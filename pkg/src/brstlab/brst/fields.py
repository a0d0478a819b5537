"""SuperFields: ghost words tensored with lam-series of phase-space functions."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

from ..grassmann import (
    GrassElement, add_left, bidegree, cliff_table, poisson_table, popcount, remove_left,
    remove_right, wedge_sign, word_str,
)
from ..phasespace import Backend, lam_to_series
from ..scalars import ONE, ZERO, ConfigurationError, DivisionError, Scalar, Series

Key = tuple  # (mask, r, monomial key)
NEG_I = Scalar(0, -1)


class SuperField:
    """Element of (ghosts + antighosts) x functions, truncated at lam**order.

    Coefficients are stored flat as {(mask, r, key): Scalar} without zeros.
    """

    __slots__ = ("backend", "order", "_c")

    def __init__(self, backend: Backend, order: int, coeffs: Mapping[Key, object] | None = None):
        self.backend = backend
        self.order = order
        self._c: dict[Key, Scalar] = {}
        if coeffs:
            for (m, r, k), v in coeffs.items():
                v = Scalar.coerce(v)
                if r <= order and v:
                    self._c[(m, r, tuple(k))] = v

    @classmethod
    def _wrap(cls, backend, order, acc) -> "SuperField":
        f = cls.__new__(cls)
        f.backend, f.order = backend, order
        f._c = {k: v for k, v in acc.items() if v and k[1] <= order}
        return f

    # ---- constructors
    @classmethod
    def zero(cls, backend, order):
        return cls._wrap(backend, order, {})

    @classmethod
    def one(cls, backend, order):
        return cls._wrap(backend, order, {(0, 0, backend.unit): ONE})

    @classmethod
    def from_function(cls, backend, order, f, mask: int = 0, coeff=ONE) -> "SuperField":
        """mask (x) f for a PhaseFunction or Series(PhaseFunction)."""
        c = Scalar.coerce(coeff)
        acc = {}
        if isinstance(f, Series):
            for r, pf in enumerate(f.coeffs):
                for k, v in pf.terms.items():
                    acc[(mask, r, k)] = v * c
        else:
            for k, v in f.terms.items():
                acc[(mask, 0, k)] = v * c
        return cls._wrap(backend, order, acc)

    @classmethod
    def from_grass(cls, backend, g: GrassElement, order: int | None = None) -> "SuperField":
        if g.n != backend.dim:
            raise ConfigurationError("Grassmann dimension does not match the Lie algebra")
        N = g.order if order is None else order
        return cls._wrap(backend, N, {(m, r, backend.unit): v for (m, r), v in g.items()})

    @classmethod
    def monomial(cls, backend, order, mask: int, key: tuple, coeff=ONE, r: int = 0):
        return cls._wrap(backend, order, {(mask, r, tuple(key)): Scalar.coerce(coeff)})

    # ---- views
    @property
    def n(self) -> int:
        return self.backend.dim

    def items(self):
        return self._c.items()

    @property
    def terms(self) -> dict[int, Series]:
        groups: dict[int, dict] = {}
        for (m, r, k), v in self._c.items():
            groups.setdefault(m, {})[(r, k)] = v
        return {m: lam_to_series(g, self.order) for m, g in sorted(groups.items())}

    def lam_parts(self) -> dict[int, dict]:
        """{mask: {(r, key): coeff}}."""
        groups: dict[int, dict] = {}
        for (m, r, k), v in self._c.items():
            groups.setdefault(m, {})[(r, k)] = v
        return groups

    def to_grass(self) -> GrassElement:
        unit = self.backend.unit
        acc = {}
        for (m, r, k), v in self._c.items():
            if k != unit:
                raise ConfigurationError("field has non-constant function parts")
            acc[(m, r)] = v
        return GrassElement(self.n, self.order, acc)

    # ---- linear structure
    def _same(self, o: "SuperField") -> None:
        if o.backend is not self.backend or o.order != self.order:
            raise ConfigurationError(
                f"SuperField context mismatch ({self.backend.name}, N={self.order}) vs "
                f"({o.backend.name}, N={o.order})")

    def __add__(self, o):
        self._same(o)
        acc = dict(self._c)
        for k, v in o._c.items():
            acc[k] = acc.get(k, ZERO) + v
        return SuperField._wrap(self.backend, self.order, acc)

    def __sub__(self, o):
        self._same(o)
        acc = dict(self._c)
        for k, v in o._c.items():
            acc[k] = acc.get(k, ZERO) - v
        return SuperField._wrap(self.backend, self.order, acc)

    def __neg__(self):
        return SuperField._wrap(self.backend, self.order, {k: -v for k, v in self._c.items()})

    def scale(self, s, lam_power: int = 0) -> "SuperField":
        s = Scalar.coerce(s)
        return SuperField._wrap(self.backend, self.order, {
            (m, r + lam_power, k): v * s for (m, r, k), v in self._c.items()})

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, o):
        if not isinstance(o, SuperField):
            return NotImplemented
        return self.backend is o.backend and self.order == o.order and self._c == o._c

    def __hash__(self):
        return hash((self.order, frozenset(self._c.items())))

    def with_order(self, order: int) -> "SuperField":
        return SuperField._wrap(self.backend, order, self._c)

    def select(self, pred: Callable[[int, int, tuple], bool]) -> "SuperField":
        return SuperField._wrap(self.backend, self.order,
                                {k: v for k, v in self._c.items() if pred(*k)})

    def bidegree_part(self, k: int | None = None, l: int | None = None) -> "SuperField":
        n = self.n

        def ok(m, r, key):
            kk, ll = bidegree(n, m)
            return (k is None or kk == k) and (l is None or ll == l)
        return self.select(ok)

    def antighost_part(self, l: int) -> "SuperField":
        return self.bidegree_part(l=l)

    def parity_parts(self) -> tuple["SuperField", "SuperField"]:
        return (self.select(lambda m, r, k: not popcount(m) & 1),
                self.select(lambda m, r, k: popcount(m) & 1))

    def bidegrees(self) -> set[tuple[int, int]]:
        return {bidegree(self.n, m) for (m, r, k) in self._c}

    def min_lam(self) -> int | None:
        return min((r for (_, r, _) in self._c), default=None)

    def map_words(self, fn: Callable[[int], Iterable[tuple[int, object]]]) -> "SuperField":
        """Word-linear map, fn(mask) -> ((mask', coeff), ...)."""
        acc: dict = {}
        cache: dict = {}
        for (m, r, k), v in self._c.items():
            out = cache.get(m)
            if out is None:
                out = cache[m] = tuple(fn(m))
            for w, c in out:
                key = (w, r, k)
                acc[key] = acc.get(key, ZERO) + v * c
        return SuperField._wrap(self.backend, self.order, acc)

    def map_keys(self, fn: Callable[[tuple], Iterable[tuple[int, tuple, object]]]) -> "SuperField":
        """Function-linear map, fn(key) -> ((lam shift, key', coeff), ...)."""
        acc: dict = {}
        N = self.order
        for (m, r, k), v in self._c.items():
            for s, k2, c in fn(k):
                if r + s <= N:
                    key = (m, r + s, k2)
                    acc[key] = acc.get(key, ZERO) + v * c
        return SuperField._wrap(self.backend, self.order, acc)

    def lam_divide(self) -> "SuperField":
        """Divide by lam; the result has order N - 1."""
        bad = [k for k in self._c if k[1] == 0]
        if bad:
            m, r, key = bad[0]
            raise DivisionError(
                f"classical term {word_str(self.n, m)} (x) {self.backend.format_key(key)} "
                "is nonzero; cannot divide by lambda")
        return SuperField._wrap(self.backend, max(self.order - 1, 0),
                                {(m, r - 1, k): v for (m, r, k), v in self._c.items()})

    def __repr__(self):
        return f"SuperField({self})"

    def __str__(self):
        return format_field(self)


def format_field(f: SuperField) -> str:
    if not f:
        return "0"
    parts = []
    for m, s in f.terms.items():
        body = f.backend.format_series(s)
        parts.append(f"({body})" if not m else f"{word_str(f.n, m)}*({body})")
    return " + ".join(parts)


# ------------------------------------------------------------------ products

def _bilinear(a: SuperField, b: SuperField, word_table, fun_product) -> SuperField:
    a._same(b)
    N = a.order
    A, B = a.lam_parts(), b.lam_parts()
    acc: dict = {}
    for m1, F in A.items():
        for m2, G in B.items():
            table = word_table(m1, m2)
            if not table:
                continue
            FG = fun_product(F, G)
            if not FG:
                continue
            for m, s, c in table:
                for (r, k), v in FG.items():
                    if r + s <= N:
                        key = (m, r + s, k)
                        acc[key] = acc.get(key, ZERO) + v * c
    return SuperField._wrap(a.backend, N, acc)


def _pointwise(F, G, N):
    out: dict = {}
    for (r1, k1), v1 in F.items():
        for (r2, k2), v2 in G.items():
            if r1 + r2 <= N:
                key = (r1 + r2, tuple(x + y for x, y in zip(k1, k2)))
                out[key] = out.get(key, ZERO) + v1 * v2
    return {k: v for k, v in out.items() if v}


def star_kappa(a: SuperField, b: SuperField, kappa) -> SuperField:
    """(alpha (x) F) *_kappa (beta (x) G) = (alpha o_kappa beta) (x) (F * G)."""
    kap = Fraction(kappa)
    n, N, be = a.n, a.order, a.backend
    return _bilinear(a, b, lambda m1, m2: cliff_table(n, m1, m2, kap, N),
                     lambda F, G: be.star_lam(F, G, N))


def wedge(a: SuperField, b: SuperField) -> SuperField:
    """Classical product: wedge on words, pointwise on functions."""
    N = a.order

    def table(m1, m2):
        s = wedge_sign(m1, m2)
        return ((m1 | m2, 0, Scalar(s)),) if s else ()
    return _bilinear(a, b, table, lambda F, G: _pointwise(F, G, N))


def super_poisson(a: SuperField, b: SuperField) -> SuperField:
    """{a (x) F, b (x) G} = a^b (x) {F, G} + {a, b} (x) FG."""
    n, N, be = a.n, a.order, a.backend

    def fun_bracket(F, G):
        out: dict = {}
        for (r1, k1), v1 in F.items():
            for (r2, k2), v2 in G.items():
                if r1 + r2 > N:
                    continue
                for k, c in be.poisson_kernel(k1, k2):
                    key = (r1 + r2, k)
                    out[key] = out.get(key, ZERO) + v1 * v2 * c
        return {k: v for k, v in out.items() if v}

    def wtable(m1, m2):
        s = wedge_sign(m1, m2)
        return ((m1 | m2, 0, Scalar(s)),) if s else ()

    part1 = _bilinear(a, b, wtable, fun_bracket)
    part2 = _bilinear(a, b, lambda m1, m2: tuple((m, 0, c) for m, c in poisson_table(n, m1, m2)),
                      lambda F, G: _pointwise(F, G, N))
    return part1 + part2


def graded_commutator(x: SuperField, a: SuperField, kappa) -> SuperField:
    """x *_k a - (-1)^{|x||a|} a *_k x, extended over parity components."""
    out = SuperField.zero(a.backend, a.order)
    for xp, xpar in zip(x.parity_parts(), (0, 1)):
        if not xp:
            continue
        for ap, apar in zip(a.parity_parts(), (0, 1)):
            if not ap:
                continue
            s = -1 if xpar and apar else 1
            out = out + star_kappa(xp, ap, kappa) - star_kappa(ap, xp, kappa).scale(s)
    return out


# ------------------------------------------------------------------ word-level operators

def insert_left(a: SuperField, bit: int) -> SuperField:
    def fn(m):
        s, w = remove_left(bit, m)
        return ((w, s),) if s else ()
    return a.map_words(fn)


def insert_right(a: SuperField, bit: int) -> SuperField:
    def fn(m):
        s, w = remove_right(bit, m)
        return ((w, s),) if s else ()
    return a.map_words(fn)


def wedge_left(a: SuperField, bit: int) -> SuperField:
    def fn(m):
        s, w = add_left(bit, m)
        return ((w, s),) if s else ()
    return a.map_words(fn)


def ghost_bit(n, a):
    """Bit of the ghost e^{a+1} (a is 0-based)."""
    return a


def antighost_bit(n, a):
    return n + a
