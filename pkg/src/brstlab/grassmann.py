"""The exterior algebra on ghosts e^1..e^n and antighosts e_1..e_n.

A word is a 2n-bit mask: bit a-1 is the ghost e^a, bit n+a-1 the antighost e_a.
Canonical order is ascending bit index, so ghosts come first.  The left insertion
i(e_a) removes e^a and i(e^a) removes e_a, with the sign of moving the factor to
the front.  Right insertion is j(v)w = -(-1)^|w| i(v)w.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping

from .scalars import ONE, ZERO, ConfigurationError, Scalar, Series

TWO_I = Scalar(0, 2)


# ---------------------------------------------------------------- word kernels

def popcount(m: int) -> int:
    return bin(m).count("1")


def ghost_bit(n: int, a: int) -> int:
    """Bit of e^a (a is 1-based)."""
    return a - 1


def antighost_bit(n: int, a: int) -> int:
    """Bit of e_a (a is 1-based)."""
    return n + a - 1


def bidegree(n: int, m: int) -> tuple[int, int]:
    low = (1 << n) - 1
    return popcount(m & low), popcount(m >> n)


def ghost_number(n: int, m: int) -> int:
    k, l = bidegree(n, m)
    return k - l


def wedge_sign(m1: int, m2: int) -> int:
    """Sign of w1 ^ w2 relative to the canonical word, 0 if a factor repeats."""
    if m1 & m2:
        return 0
    swaps = 0
    rest = m2
    while rest:
        b = rest & -rest
        swaps += popcount(m1 & ~((b << 1) - 1))
        rest ^= b
    return -1 if swaps & 1 else 1


def remove_left(bit: int, m: int) -> tuple[int, int]:
    """Left insertion removing the factor at ``bit``: (sign, new mask), sign 0 if absent."""
    b = 1 << bit
    if not m & b:
        return 0, 0
    sign = -1 if popcount(m & (b - 1)) & 1 else 1
    return sign, m ^ b


def remove_right(bit: int, m: int) -> tuple[int, int]:
    s, w = remove_left(bit, m)
    if not s:
        return 0, 0
    # j(v)w = -(-1)^|w| i(v)w
    return (s if popcount(m) & 1 else -s), w


def add_left(bit: int, m: int) -> tuple[int, int]:
    """Left multiplication g ^ w by the generator at ``bit``."""
    b = 1 << bit
    if m & b:
        return 0, 0
    return (-1 if popcount(m & (b - 1)) & 1 else 1), m | b


@lru_cache(maxsize=None)
def _pair_step(n: int, w1: int, w2: int, star: bool) -> tuple[tuple[int, int, int], ...]:
    """One application of P (star=False) or P* (star=True) to the tensor w1 (x) w2."""
    out = []
    for a in range(n):
        g, ag = a, n + a
        left_bit, right_bit = (ag, g) if star else (g, ag)
        s1, v1 = remove_right(left_bit, w1)
        if not s1:
            continue
        s2, v2 = remove_left(right_bit, w2)
        if not s2:
            continue
        out.append((s1 * s2, v1, v2))
    return tuple(out)


@lru_cache(maxsize=None)
def cliff_table(n: int, m1: int, m2: int, kappa: Fraction, max_s: int
                ) -> tuple[tuple[int, int, Scalar], ...]:
    """w1 o_kappa w2 as ((mask, lam power, coefficient), ...) up to lam**max_s."""
    kap = Scalar(kappa)
    weights = ((False, kap), (True, ONE - kap))
    acc: dict[tuple[int, int], Scalar] = {}
    state = {(m1, m2): ONE}
    s = 0
    while state:
        for (w1, w2), c in state.items():
            sign = wedge_sign(w1, w2)
            if sign:
                key = (w1 | w2, s)
                acc[key] = acc.get(key, ZERO) + c * sign
        s += 1
        if s > max_s:
            break
        nxt: dict[tuple[int, int], Scalar] = {}
        factor = TWO_I * Fraction(1, s)
        for (w1, w2), c in state.items():
            for star, wt in weights:
                if not wt:
                    continue
                for sg, v1, v2 in _pair_step(n, w1, w2, star):
                    nxt[(v1, v2)] = nxt.get((v1, v2), ZERO) + c * wt * factor * sg
        state = {k: v for k, v in nxt.items() if v}
    return tuple((m, s, c) for (m, s), c in sorted(acc.items()) if c)


@lru_cache(maxsize=None)
def poisson_table(n: int, m1: int, m2: int) -> tuple[tuple[int, Scalar], ...]:
    """{w1, w2} = 2 mu (P + P*)(w1 (x) w2)."""
    acc: dict[int, Scalar] = {}
    for star in (False, True):
        for sg, v1, v2 in _pair_step(n, m1, m2, star):
            s = wedge_sign(v1, v2)
            if s:
                acc[v1 | v2] = acc.get(v1 | v2, ZERO) + Scalar(2 * sg * s)
    return tuple((m, c) for m, c in sorted(acc.items()) if c)


@lru_cache(maxsize=None)
def laplacian_table(n: int, m: int) -> tuple[tuple[int, int], ...]:
    """Delta w = sum_a i(e_a) i(e^a) w as ((mask, sign), ...)."""
    acc: dict[int, int] = {}
    for a in range(n):
        s1, w = remove_left(n + a, m)
        if not s1:
            continue
        s2, w = remove_left(a, w)
        if not s2:
            continue
        acc[w] = acc.get(w, 0) + s1 * s2
    return tuple((w, s) for w, s in sorted(acc.items()) if s)


def word_str(n: int, m: int) -> str:
    if not m:
        return "1"
    parts = []
    for b in range(2 * n):
        if m >> b & 1:
            parts.append(f"e^{b + 1}" if b < n else f"e_{b - n + 1}")
    return "^".join(parts)


_FACTOR = re.compile(r"e([\^_])(\d+)")


def parse_word(n: int, text: str) -> tuple[int, int]:
    """Parse 'e^1^e_2' (any factor order) into (sign, canonical mask)."""
    t = text.strip()
    if t == "1":
        return 1, 0
    factors = t.split("^e")
    items = [factors[0]] + ["e" + f for f in factors[1:]]
    sign, m = 1, 0
    for item in items:
        mt = _FACTOR.fullmatch(item)
        if not mt:
            raise ConfigurationError(f"bad Grassmann factor {item!r} in {text!r}")
        a = int(mt.group(2))
        if not 1 <= a <= n:
            raise ConfigurationError(f"generator index {a} out of range 1..{n}")
        bit = ghost_bit(n, a) if mt.group(1) == "^" else antighost_bit(n, a)
        s = wedge_sign(m, 1 << bit)
        if not s:
            return 0, 0
        sign *= s
        m |= 1 << bit
    return sign, m


# -------------------------------------------------------------- GrassElement

class GrassElement:
    """Element of the exterior algebra with lambda-series coefficients."""

    __slots__ = ("n", "order", "_c")

    def __init__(self, n: int, order: int, coeffs: Mapping[tuple[int, int], Scalar] | None = None):
        self.n = n
        self.order = order
        self._c: dict[tuple[int, int], Scalar] = {}
        if coeffs:
            for (m, r), v in coeffs.items():
                if r <= order and v:
                    self._c[(m, r)] = Scalar.coerce(v)

    # construction
    @classmethod
    def _wrap(cls, n, order, acc):
        e = cls.__new__(cls)
        e.n, e.order = n, order
        e._c = {k: v for k, v in acc.items() if v}
        return e

    @classmethod
    def one(cls, n: int, order: int) -> "GrassElement":
        return cls(n, order, {(0, 0): ONE})

    @classmethod
    def word(cls, n: int, order: int, text_or_mask, coeff=ONE, lam_power: int = 0) -> "GrassElement":
        if isinstance(text_or_mask, str):
            s, m = parse_word(n, text_or_mask)
        else:
            s, m = 1, text_or_mask
        return cls(n, order, {(m, lam_power): Scalar.coerce(coeff) * s})

    @classmethod
    def ghost(cls, n, order, a):
        return cls(n, order, {(1 << ghost_bit(n, a), 0): ONE})

    @classmethod
    def antighost(cls, n, order, a):
        return cls(n, order, {(1 << antighost_bit(n, a), 0): ONE})

    @property
    def terms(self) -> dict[int, Series]:
        """Map word mask -> Series(Scalar)."""
        out: dict[int, list] = {}
        for (m, r), v in self._c.items():
            out.setdefault(m, [ZERO] * (self.order + 1))[r] = v
        return {m: Series(c) for m, c in sorted(out.items())}

    def items(self):
        return self._c.items()

    def _same(self, o: "GrassElement") -> None:
        if o.n != self.n or o.order != self.order:
            raise ConfigurationError("GrassElement context mismatch")

    def __add__(self, o):
        self._same(o)
        acc = dict(self._c)
        for k, v in o._c.items():
            acc[k] = acc.get(k, ZERO) + v
        return GrassElement._wrap(self.n, self.order, acc)

    def __sub__(self, o):
        return self + (-o)

    def __neg__(self):
        return GrassElement._wrap(self.n, self.order, {k: -v for k, v in self._c.items()})

    def scale(self, s, lam_power: int = 0) -> "GrassElement":
        s = Scalar.coerce(s)
        return GrassElement._wrap(self.n, self.order, {
            (m, r + lam_power): v * s for (m, r), v in self._c.items()
            if r + lam_power <= self.order})

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, o):
        if not isinstance(o, GrassElement):
            return NotImplemented
        return self.n == o.n and self.order == o.order and self._c == o._c

    def __hash__(self):
        return hash((self.n, self.order, frozenset(self._c.items())))

    def map_words(self, fn) -> "GrassElement":
        """Apply a word-linear map given by fn(mask) -> iterable of (mask, coeff)."""
        acc: dict[tuple[int, int], Scalar] = {}
        for (m, r), v in self._c.items():
            for w, c in fn(m):
                key = (w, r)
                acc[key] = acc.get(key, ZERO) + v * c
        return GrassElement._wrap(self.n, self.order, acc)

    def homogeneous(self, k: int | None = None, l: int | None = None) -> "GrassElement":
        n = self.n
        return GrassElement._wrap(n, self.order, {
            (m, r): v for (m, r), v in self._c.items()
            if (k is None or bidegree(n, m)[0] == k) and (l is None or bidegree(n, m)[1] == l)})

    def parity_parts(self) -> tuple["GrassElement", "GrassElement"]:
        even = {k: v for k, v in self._c.items() if not popcount(k[0]) & 1}
        odd = {k: v for k, v in self._c.items() if popcount(k[0]) & 1}
        return (GrassElement._wrap(self.n, self.order, even),
                GrassElement._wrap(self.n, self.order, odd))

    def __repr__(self):
        return f"GrassElement({self})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for m, s in self.terms.items():
            parts.append(f"({s})*{word_str(self.n, m)}" if m else f"({s})")
        return " + ".join(parts)


def _bilinear(a: GrassElement, b: GrassElement, table) -> GrassElement:
    a._same(b)
    N = a.order
    acc: dict[tuple[int, int], Scalar] = {}
    for (m1, r1), v1 in a._c.items():
        for (m2, r2), v2 in b._c.items():
            base = r1 + r2
            if base > N:
                continue
            v = v1 * v2
            for m, s, c in table(m1, m2, N - base):
                key = (m, base + s)
                acc[key] = acc.get(key, ZERO) + v * c
    return GrassElement._wrap(a.n, N, acc)


def wedge(a: GrassElement, b: GrassElement) -> GrassElement:
    def table(m1, m2, _):
        s = wedge_sign(m1, m2)
        return ((m1 | m2, 0, Scalar(s)),) if s else ()
    return _bilinear(a, b, table)


def cliff_kappa(a: GrassElement, b: GrassElement, kappa) -> GrassElement:
    kap = Fraction(kappa)
    n = a.n
    return _bilinear(a, b, lambda m1, m2, top: cliff_table(n, m1, m2, kap, top))


def grass_poisson(a: GrassElement, b: GrassElement) -> GrassElement:
    n = a.n
    return _bilinear(a, b, lambda m1, m2, _: tuple((m, 0, c) for m, c in poisson_table(n, m1, m2)))


def generator_bit(n: int, v: str) -> int:
    """Bit removed by inserting the basis vector named 'e_a' (in g) or 'e^a' (in g*)."""
    mt = _FACTOR.fullmatch(v.strip())
    if not mt:
        raise ConfigurationError(f"bad basis vector {v!r}")
    a = int(mt.group(2))
    if not 1 <= a <= n:
        raise ConfigurationError(f"index {a} out of range")
    # e_a pairs with the ghost e^a, e^a pairs with the antighost e_a
    return ghost_bit(n, a) if mt.group(1) == "_" else antighost_bit(n, a)


def insert_left(v: str | int, a: GrassElement) -> GrassElement:
    bit = v if isinstance(v, int) else generator_bit(a.n, v)

    def fn(m):
        s, w = remove_left(bit, m)
        return ((w, s),) if s else ()
    return a.map_words(fn)


def insert_right(v: str | int, a: GrassElement) -> GrassElement:
    bit = v if isinstance(v, int) else generator_bit(a.n, v)

    def fn(m):
        s, w = remove_right(bit, m)
        return ((w, s),) if s else ()
    return a.map_words(fn)


def insert_combination(vec: Mapping[int, Scalar], a: GrassElement, right: bool = False) -> GrassElement:
    """Insertion of a linear combination sum_bit coeff * (dual of bit)."""
    out = GrassElement(a.n, a.order)
    for bit, c in vec.items():
        part = insert_right(bit, a) if right else insert_left(bit, a)
        out = out + part.scale(c)
    return out


def super_laplacian(a: GrassElement) -> GrassElement:
    n = a.n
    return a.map_words(lambda m: laplacian_table(n, m))


def s_kappa(a: GrassElement, kappa) -> GrassElement:
    """exp(2 i kappa lam Delta) a, a finite sum."""
    kap = Scalar(Fraction(kappa))
    out = a
    term = a
    j = 0
    while True:
        j += 1
        term = super_laplacian(term).scale(TWO_I * kap * Fraction(1, j), lam_power=1)
        if not term:
            return out
        out = out + term


def gamma(n: int, order: int) -> GrassElement:
    """1/2 sum_a e^a ^ e_a."""
    return GrassElement(n, order, {
        ((1 << ghost_bit(n, a)) | (1 << antighost_bit(n, a)), 0): Scalar(Fraction(1, 2))
        for a in range(1, n + 1)})


def from_terms(n: int, order: int, items: Iterable[tuple[str, Scalar]]) -> GrassElement:
    out = GrassElement(n, order)
    for text, c in items:
        out = out + GrassElement.word(n, order, text, c)
    return out


__all__ = [
    "GrassElement", "wedge", "cliff_kappa", "grass_poisson", "insert_left", "insert_right",
    "super_laplacian", "s_kappa", "gamma", "word_str", "parse_word", "cliff_table",
    "poisson_table", "laplacian_table", "wedge_sign", "remove_left", "remove_right",
    "add_left", "bidegree", "ghost_number", "popcount", "factorial",
]
