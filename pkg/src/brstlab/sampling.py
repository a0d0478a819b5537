"""Seeded random samples for the verification suites."""

from __future__ import annotations

import random

from .brst.fields import SuperField
from .grassmann import GrassElement, bidegree
from .phasespace import Backend, PhaseFunction
from .scalars import Scalar


def random_scalar(rng: random.Random) -> Scalar:
    return Scalar(rng.randint(-3, 3), rng.randint(-2, 2))


def random_grass(rng: random.Random, n: int, order: int, terms: int = 4, max_lam: int = 1) -> GrassElement:
    acc = {}
    for _ in range(terms):
        acc[(rng.randrange(1 << (2 * n)), rng.randint(0, max_lam))] = random_scalar(rng)
    return GrassElement(n, order, acc)


def random_field(rng: random.Random, backend: Backend, order: int, terms: int = 3, max_lam: int = 1,
                 degree: int = 2, antighosts: int | None = None) -> SuperField:
    """Random SuperField; antighosts fixes the antighost degree when given."""
    n = backend.dim
    acc = {}
    for _ in range(terms):
        m = rng.randrange(1 << (2 * n))
        if antighosts is not None:
            ghosts = m & ((1 << n) - 1)
            picks = rng.sample(range(n), min(antighosts, n))
            m = ghosts | sum(1 << (n + b) for b in picks)
            if bidegree(n, m)[1] != antighosts:
                continue
        acc[(m, rng.randint(0, max_lam), backend.random_key(rng, degree))] = random_scalar(rng)
    return SuperField(backend, order, acc)


def random_boundary(rng: random.Random, backend: Backend, order: int, terms: int = 3, max_lam: int = 1,
                    degree: int = 2, ghosts: int | None = None) -> SuperField:
    """Random ghost-only field with constraint-surface coefficients."""
    n = backend.dim
    acc = {}
    for _ in range(terms):
        if ghosts is None:
            m = rng.randrange(1 << n)
        else:
            m = sum(1 << b for b in rng.sample(range(n), min(ghosts, n)))
        acc[(m, rng.randint(0, max_lam), backend.random_key(rng, degree, constraint=True))] = random_scalar(rng)
    return SuperField(backend, order, acc)


def random_function(rng: random.Random, backend: Backend, terms: int = 3, degree: int = 2,
                    constraint: bool = False) -> PhaseFunction:
    acc = PhaseFunction()
    for _ in range(terms):
        acc = acc + PhaseFunction.monomial(backend.random_key(rng, degree, constraint), random_scalar(rng))
    return acc
