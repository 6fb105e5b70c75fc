"""Exact diagonalization of idempotent matrices over Ore extensions K[x; sigma, delta]."""

from .scalars import QQ, QQi, RationalFunctionField, GaussianRational
from .ore import (
    RingSpec,
    OrePoly,
    Identity,
    Conjugation,
    Shift,
    Scale,
    ZeroDerivation,
    TDerivative,
    QDifference,
)
from .matrix import OreMatrix, Transvection, Permutation, is_idempotent, mat_mul
from .qs import DiagResult, diagonalize_idempotent, verify_result, NotIdempotentError
from .textio import ParseError, parse_problem, parse_ring, parse_matrix, parse_poly, print_result
from .idemgen import GenSpec, generate_idempotent, random_monomial

__all__ = [
    "QQ",
    "QQi",
    "RationalFunctionField",
    "GaussianRational",
    "RingSpec",
    "OrePoly",
    "Identity",
    "Conjugation",
    "Shift",
    "Scale",
    "ZeroDerivation",
    "TDerivative",
    "QDifference",
    "OreMatrix",
    "Transvection",
    "Permutation",
    "is_idempotent",
    "mat_mul",
    "DiagResult",
    "diagonalize_idempotent",
    "verify_result",
    "NotIdempotentError",
    "ParseError",
    "parse_problem",
    "parse_ring",
    "parse_matrix",
    "parse_poly",
    "print_result",
    "GenSpec",
    "generate_idempotent",
    "random_monomial",
]
