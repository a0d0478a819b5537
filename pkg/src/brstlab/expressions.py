"""Recursive-descent parser turning CLI expressions into SuperFields.

Grammar (with the ghost-word and lam extensions)::

    expr   := term (('+'|'-') term)*
    term   := ['-'] factor ('*' factor)*
    factor := atom ('^' ['-'] int)?
    atom   := variable | rational | 'i' | 'lam' | word | '(' expr ')'

Products are the graded-commutative pointwise product; ``;`` separates the two
operands of a binary operation.
"""

from __future__ import annotations

from fractions import Fraction

from .brst.fields import SuperField, wedge
from .grassmann import parse_word
from .phasespace import Backend, Torus, tokenize
from .scalars import ConfigurationError, I, ONE, Scalar


class _Parser:
    def __init__(self, backend: Backend, order: int, tokens):
        self.be, self.N = backend, order
        self.toks = tokens
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None:
            raise ConfigurationError("unexpected end of expression")
        if value is not None and tok[1] != value:
            raise ConfigurationError(f"expected {value!r}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def const(self, c) -> SuperField:
        return SuperField.one(self.be, self.N).scale(Scalar.coerce(c))

    def expr(self) -> SuperField:
        out = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> SuperField:
        neg = False
        if self.peek()[1] == "-":
            self.take()
            neg = True
        out = self.factor()
        while self.peek()[1] == "*":
            self.take()
            out = wedge(out, self.factor())
        return -out if neg else out

    def factor(self) -> SuperField:
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        self.take()
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        kind, text = self.take()
        if kind != "num" or "/" in text:
            raise ConfigurationError(f"exponent must be an integer, found {text!r}")
        e = sign * int(text)
        if e < 0:
            base, e = self.invert(base), -e
        out = SuperField.one(self.be, self.N)
        for _ in range(e):
            out = wedge(out, base)
        return out

    def invert(self, f: SuperField) -> SuperField:
        items = list(f.items())
        if len(items) != 1:
            raise ConfigurationError("only single monomials can be raised to negative powers")
        (m, r, k), v = items[0]
        if m or r:
            raise ConfigurationError("ghost words and lam cannot be inverted")
        if not isinstance(self.be, Torus) or any(k[2:]):
            raise ConfigurationError(f"{self.be.format_key(k)} is not invertible")
        return SuperField.monomial(self.be, self.N, 0, tuple(-x for x in k), v.inverse())

    def atom(self) -> SuperField:
        kind, text = self.take()
        if kind == "num":
            return self.const(Fraction(text))
        if kind == "word":
            sign, m = parse_word(self.be.dim, text)
            return SuperField.monomial(self.be, self.N, m, self.be.unit, sign)
        if kind == "name":
            if text == "i":
                return self.const(I)
            if text == "lam":
                return SuperField.monomial(self.be, self.N, 0, self.be.unit, ONE, 1)
            key = self.be.atoms.get(text)
            if key is None:
                raise ConfigurationError(f"variable {text!r} does not exist on backend {self.be.name}")
            return SuperField.monomial(self.be, self.N, 0, key)
        if text == "(":
            out = self.expr()
            self.take(")")
            return out
        raise ConfigurationError(f"unexpected token {text!r}")


def parse_field(backend: Backend, order: int, text: str) -> SuperField:
    tokens = tokenize(text)
    if not tokens:
        raise ConfigurationError("empty expression")
    p = _Parser(backend, order, tokens)
    out = p.expr()
    if p.pos != len(tokens):
        raise ConfigurationError(f"trailing input starting at {tokens[p.pos][1]!r}")
    return out


def parse_operands(backend: Backend, order: int, text: str) -> list[SuperField]:
    """Split on ';' and parse each operand."""
    return [parse_field(backend, order, part) for part in text.split(";")]
