"""Exact coefficients: Gaussian rationals and lambda-truncated power series."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable, Sequence


class BrstlabError(Exception):
    """Base class for library errors."""


class ConfigurationError(BrstlabError):
    pass


class InversionError(BrstlabError):
    pass


class DivisionError(BrstlabError):
    pass


_new = object.__new__


class Scalar:
    """An element re + i*im of Q(i), stored as two reduced fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re: Any = 0, im: Any = 0):
        if isinstance(re, Scalar):
            self.re, self.im = re.re, re.im + Fraction(im)
            return
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _raw(re: Fraction, im: Fraction) -> "Scalar":
        s = _new(Scalar)
        s.re = re
        s.im = im
        return s

    @classmethod
    def coerce(cls, x: Any) -> "Scalar":
        return x if isinstance(x, Scalar) else cls(x)

    def __add__(self, o):
        if not isinstance(o, Scalar):
            o = Scalar.coerce(o)
        return Scalar._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        if not isinstance(o, Scalar):
            o = Scalar.coerce(o)
        return Scalar._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return Scalar.coerce(o) - self

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __mul__(self, o):
        if not isinstance(o, Scalar):
            if isinstance(o, (int, Fraction)):
                return Scalar._raw(self.re * o, self.im * o)
            o = Scalar.coerce(o)
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return Scalar._raw(a * c, b)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar._raw(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * Scalar.coerce(o).inverse()

    def __rtruediv__(self, o):
        return Scalar.coerce(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        if isinstance(o, Scalar):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return not self.im and self.re == o
        if isinstance(o, complex):
            return self.re == o.real and self.im == o.imag
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return format_scalar(self)


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(s: Scalar) -> str:
    re, im = s.re, s.im
    if not im:
        return _frac(re)
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    else:
        ims = _frac(im) + "*i"
    if not re:
        return ims
    if ims.startswith("-"):
        return f"({_frac(re)} - {ims[1:]})"
    return f"({_frac(re)} + {ims})"


def parse_scalar(text: str) -> Scalar:
    """Parse 'a', 'a/b', 'i', 'a*i' style literals (as produced by format_scalar)."""
    t = text.strip().replace(" ", "")
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    if not t.endswith("i"):
        return Scalar(Fraction(t))
    body = t[:-1].rstrip("*")
    # split real/imag at the last sign that is not leading
    cut = max(body.rfind("+", 1), body.rfind("-", 1))
    if cut > 0 and body[cut - 1] not in "/":
        re_part, im_part = body[:cut], body[cut:]
    else:
        re_part, im_part = "0", body
    if im_part in ("", "+"):
        im_part = "1"
    elif im_part == "-":
        im_part = "-1"
    return Scalar(Fraction(re_part), Fraction(im_part))


class Series:
    """Truncated power series sum_r coeffs[r] * lam**r, r = 0..order.

    The payload needs +, -, unary -, truth value, and multiplication by Scalar.
    Products between payloads are supplied by the caller when they are not ``*``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Any]):
        if not coeffs:
            raise ConfigurationError("a Series needs at least the order-0 coefficient")
        self.coeffs = tuple(coeffs)

    @classmethod
    def constant(cls, value: Any, order: int, zero: Any = ZERO) -> "Series":
        return cls([value] + [zero] * order)

    @classmethod
    def lam(cls, order: int) -> "Series":
        c = [ZERO] * (order + 1)
        if order >= 1:
            c[1] = ONE
        return cls(c)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, r: int):
        return self.coeffs[r]

    def _check(self, other: "Series") -> None:
        if other.order != self.order:
            raise ConfigurationError(f"series order mismatch: {self.order} vs {other.order}")

    def __add__(self, other: "Series") -> "Series":
        self._check(other)
        return Series([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "Series") -> "Series":
        self._check(other)
        return Series([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "Series":
        return Series([-a for a in self.coeffs])

    def scale(self, s: Any) -> "Series":
        return Series([a * s for a in self.coeffs])

    def mul(self, other: "Series", product: Callable[[Any, Any], Any] | None = None) -> "Series":
        self._check(other)
        prod = product or (lambda a, b: a * b)
        n = self.order
        out: list[Any] = []
        for r in range(n + 1):
            acc = None
            for s in range(r + 1):
                a, b = self.coeffs[s], other.coeffs[r - s]
                if not a or not b:
                    continue
                t = prod(a, b)
                acc = t if acc is None else acc + t
            out.append(acc if acc is not None else self.coeffs[0] * ZERO)
        return Series(out)

    def __mul__(self, other):
        if isinstance(other, Series):
            return self.mul(other)
        return self.scale(other)

    def shift(self) -> "Series":
        """Multiply by lam, dropping the top coefficient."""
        zero = self.coeffs[0] * ZERO
        return Series([zero] + list(self.coeffs[:-1]))

    def truncate(self, order: int) -> "Series":
        if order <= self.order:
            return Series(self.coeffs[: order + 1])
        zero = self.coeffs[0] * ZERO
        return Series(list(self.coeffs) + [zero] * (order - self.order))

    def __bool__(self):
        return any(bool(c) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Series({list(self.coeffs)!r})"

    def __str__(self):
        parts = []
        for r, c in enumerate(self.coeffs):
            if not c:
                continue
            lam = "" if r == 0 else ("lam" if r == 1 else f"lam^{r}")
            cs = str(c)
            if not lam:
                parts.append(cs)
            elif c == 1:
                parts.append(lam)
            else:
                parts.append(f"{cs}*{lam}")
        return " + ".join(parts) if parts else "0"


def series_mul(a: Series, b: Series) -> Series:
    return a.mul(b)


def series_invert(a: Series, product: Callable[[Any, Any], Any] | None = None,
                  invert0: Callable[[Any], Any] | None = None) -> Series:
    """Two-sided inverse via a0^{-1} * sum_j (1 - a0^{-1} a)^j, truncated at the order."""
    a0 = a.coeffs[0]
    try:
        inv0 = invert0(a0) if invert0 else Scalar.coerce(a0).inverse()
    except ZeroDivisionError as exc:
        raise InversionError("leading coefficient is not invertible") from exc
    n = a.order
    zero = a0 * ZERO
    prod = product or (lambda x, y: x * y)
    # b_r = -inv0 * sum_{s=1..r} a_s b_{r-s}
    b = [inv0]
    for r in range(1, n + 1):
        acc = zero
        for s in range(1, r + 1):
            if a.coeffs[s] and b[r - s]:
                acc = acc + prod(a.coeffs[s], b[r - s])
        b.append(-prod(inv0, acc) if acc else zero)
    return Series(b)


def series_compose(a: Series, b: Series) -> Series:
    """Substitute lam -> b(lam) into a; b must have zero constant term."""
    a._check(b)
    if b.coeffs[0]:
        raise ConfigurationError("compose needs an inner series without constant term")
    n = a.order
    out = Series.constant(a.coeffs[n], n)
    for r in range(n - 1, -1, -1):
        out = out.mul(b) + Series.constant(a.coeffs[r], n)
    return out


def lambda_divide(a: Series) -> Series:
    """Divide by lam; the top order is lost and the result has order N-1 (order 0 stays 0)."""
    if a.coeffs[0]:
        raise DivisionError(f"constant term {a.coeffs[0]} is nonzero; cannot divide by lambda")
    if a.order == 0:
        return Series(a.coeffs)
    return Series(a.coeffs[1:])
