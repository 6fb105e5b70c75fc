"""Seeded random idempotents with known rank.

``F = V * diag(0, ..., 0, 1, ..., 1) * V^-1`` where ``V`` is a product of
transvections ``I + c*x^k*E_ij``.  The rank of ``F`` is the number of ones,
so every generated matrix doubles as a labelled test case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .matrix import OreMatrix, Transvection, mat_mul
from .ore import OrePoly, RingSpec
from .scalars import QQ, QQi, Field, GaussianRational, RationalFunctionField

__all__ = ["GenSpec", "random_coefficient", "random_monomial", "generate_idempotent", "witness_matrix"]


@dataclass(frozen=True)
class GenSpec:
    size: int
    rank: int
    transvection_count: int = 3
    max_monomial_degree: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be at least 1")
        if not 0 <= self.rank <= self.size:
            raise ValueError(f"rank must lie in 0..{self.size}, got {self.rank}")
        if self.transvection_count < 0 or self.max_monomial_degree < 0:
            raise ValueError("transvection_count and max_monomial_degree must be nonnegative")


def random_coefficient(rng: random.Random, K: Field):
    """A nonzero element of ``K`` from a small pool.

    Integers in ``[-5, 5]``, Gaussian integers with parts in ``[-2, 2]``, and
    for rational function fields ``c * v^e`` with ``e <= 1`` and ``c`` drawn
    recursively from the base field.
    """
    if K == QQ:
        return K(rng.choice([n for n in range(-5, 6) if n]))
    if K == QQi:
        while True:
            a, b = rng.randint(-2, 2), rng.randint(-2, 2)
            if a or b:
                return GaussianRational(a, b)
    if isinstance(K, RationalFunctionField):
        c = random_coefficient(rng, K.base)
        return K(c) * K.gen() ** rng.randint(0, 1)
    raise TypeError(f"no coefficient pool for {K!r}")


def random_monomial(rng: random.Random, ring: RingSpec, max_degree: int) -> OrePoly:
    """``c * x^k`` with ``c`` nonzero and ``0 <= k <= max_degree``."""
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    return ring.monomial(random_coefficient(rng, ring.field), rng.randint(0, max_degree))


def witness_matrix(ring: RingSpec, size: int, witness: list[Transvection]) -> tuple[OreMatrix, OreMatrix]:
    """``V`` and ``V^-1`` for the product of the witness transvections."""
    V = OreMatrix.identity(ring, size)
    Vinv = OreMatrix.identity(ring, size)
    for tv in witness:
        V = mat_mul(V, tv.matrix(size))
        Vinv = mat_mul(tv.inverse().matrix(size), Vinv)
    return V, Vinv


def generate_idempotent(spec: GenSpec, ring: RingSpec) -> tuple[OreMatrix, list[Transvection]]:
    rng = random.Random(spec.seed)
    s = spec.size
    witness: list[Transvection] = []
    if s > 1:
        for _ in range(spec.transvection_count):
            i, j = rng.sample(range(s), 2)
            witness.append(Transvection(i, j, random_monomial(rng, ring, spec.max_monomial_degree)))
    V, Vinv = witness_matrix(ring, s, witness)
    E = OreMatrix.diagonal(ring, [0] * (s - spec.rank) + [1] * spec.rank)
    return mat_mul(mat_mul(V, E), Vinv), witness
