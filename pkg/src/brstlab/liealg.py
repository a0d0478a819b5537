"""Structure constants of finite-dimensional Lie algebras over Q."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .scalars import ConfigurationError


@dataclass(frozen=True)
class LieAlgebra:
    """Basis e_1..e_n with [e_a, e_b] = sum_c f[c][a][b] e_c (indices 0-based here)."""

    dim: int
    f: tuple  # f[c][a][b], nested tuples of Fraction
    name: str = "custom"

    @classmethod
    def from_array(cls, f, name: str = "custom") -> "LieAlgebra":
        n = len(f)
        if n < 1:
            raise ConfigurationError("Lie algebra dimension must be >= 1")
        ft = tuple(tuple(tuple(Fraction(f[c][a][b]) for b in range(n)) for a in range(n))
                   for c in range(n))
        return cls(n, ft, name)

    @property
    def is_abelian(self) -> bool:
        return not any(v for plane in self.f for row in plane for v in row)

    def bracket(self, a: int, b: int) -> dict[int, Fraction]:
        """[e_a, e_b] as a sparse vector."""
        return {c: self.f[c][a][b] for c in range(self.dim) if self.f[c][a][b]}

    def nonzero(self):
        """Yield (c, a, b, value) over all nonzero structure constants."""
        n = self.dim
        for c in range(n):
            for a in range(n):
                for b in range(n):
                    v = self.f[c][a][b]
                    if v:
                        yield c, a, b, v

    def chi(self) -> tuple[Fraction, ...]:
        """Trace form chi_a = 1/2 sum_b f^b_ab."""
        return tuple(sum((self.f[b][a][b] for b in range(self.dim)), Fraction(0)) / 2
                     for a in range(self.dim))


def validate(L: LieAlgebra) -> str | None:
    """Return None when L is a Lie algebra, else a report of the first violation (1-based)."""
    n, f = L.dim, L.f
    for c in range(n):
        for a in range(n):
            for b in range(n):
                if f[c][a][b] != -f[c][b][a]:
                    return f"antisymmetry violated at (c,a,b)=({c + 1},{a + 1},{b + 1})"
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    s = sum(f[e][a][b] * f[d][e][c] + f[e][b][c] * f[d][e][a]
                            + f[e][c][a] * f[d][e][b] for e in range(n))
                    if s:
                        return (f"Jacobi violated at (a,b,c,d)=({a + 1},{b + 1},{c + 1},{d + 1}):"
                                f" sum = {s}")
    return None


def _zeros(n: int):
    return [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]


def abelian(k: int) -> LieAlgebra:
    return LieAlgebra.from_array(_zeros(k), f"abelian:{k}")


def su2() -> LieAlgebra:
    f = _zeros(3)
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        f[c][a][b] = Fraction(1)
        f[c][b][a] = Fraction(-1)
    return LieAlgebra.from_array(f, "su2")


def aff1() -> LieAlgebra:
    f = _zeros(2)
    f[1][0][1] = Fraction(1)
    f[1][1][0] = Fraction(-1)
    return LieAlgebra.from_array(f, "aff1")


def from_json(data: dict, name: str = "custom") -> LieAlgebra:
    """Load {"dim": n, "f": [[c, a, b, value], ...]} with 1-based indices and a < b."""
    try:
        n = int(data["dim"])
        entries = data.get("f", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad Lie algebra JSON: {exc}") from exc
    if n < 1:
        raise ConfigurationError("Lie algebra dimension must be >= 1")
    f = _zeros(n)
    for entry in entries:
        c, a, b, v = entry
        c, a, b = int(c) - 1, int(a) - 1, int(b) - 1
        if not (0 <= a < b < n and 0 <= c < n):
            raise ConfigurationError(f"structure constant entry out of range or a >= b: {entry}")
        f[c][a][b] = Fraction(v)
        f[c][b][a] = -Fraction(v)
    L = LieAlgebra.from_array(f, name)
    problem = validate(L)
    if problem:
        raise ConfigurationError(problem)
    return L


def preset(text: str) -> LieAlgebra:
    """Resolve 'abelian:<k>', 'su2', 'aff1' or '@file.json'."""
    if text == "su2":
        return su2()
    if text == "aff1":
        return aff1()
    if text.startswith("abelian:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigurationError(f"bad abelian dimension in {text!r}") from exc
        if k < 1:
            raise ConfigurationError("abelian dimension must be >= 1")
        return abelian(k)
    if text.startswith("@"):
        path = Path(text[1:])
        return from_json(json.loads(path.read_text()), path.stem)
    raise ConfigurationError(f"unknown Lie algebra {text!r}")


def omega(L: LieAlgebra, order: int = 0):
    """Omega = -1/4 sum f^c_ab e^a ^ e^b ^ e_c."""
    from .grassmann import GrassElement, antighost_bit, ghost_bit, wedge_sign
    from .scalars import Scalar

    n = L.dim
    acc: dict = {}
    for c, a, b, v in L.nonzero():
        s1 = wedge_sign(1 << ghost_bit(n, a + 1), 1 << ghost_bit(n, b + 1))
        if not s1:
            continue
        m = (1 << ghost_bit(n, a + 1)) | (1 << ghost_bit(n, b + 1))
        s2 = wedge_sign(m, 1 << antighost_bit(n, c + 1))
        key = (m | (1 << antighost_bit(n, c + 1)), 0)
        acc[key] = acc.get(key, Scalar(0)) + Scalar(-v * s1 * s2 / 4)
    return GrassElement(n, order, acc)


def chi_element(L: LieAlgebra, order: int = 0):
    """sum_a chi_a e^a."""
    from .grassmann import GrassElement, ghost_bit
    from .scalars import Scalar

    n = L.dim
    return GrassElement(n, order, {(1 << ghost_bit(n, a + 1), 0): Scalar(x)
                                   for a, x in enumerate(L.chi()) if x})
