"""Skew polynomial rings ``K[x; sigma, delta]``.

Elements are written with coefficients on the left, ``a0 + a1*x + ... + an*x^n``,
and multiplied with the commutation rule ``x*a = sigma(a)*x + delta(a)``.
The twist ``sigma`` and the derivation ``delta`` are drawn from a closed menu
(see :class:`Identity`, :class:`Conjugation`, :class:`Shift`, :class:`Scale`,
:class:`ZeroDerivation`, :class:`TDerivative`, :class:`QDifference`) so that
``sigma`` is always bijective and ``delta`` is always a sigma-derivation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any

from .scalars import (
    Field,
    FieldMismatchError,
    GaussianRationalField,
    RationalFunctionField,
)

__all__ = [
    "NEG_INF",
    "RingMismatchError",
    "Identity",
    "Conjugation",
    "Shift",
    "Scale",
    "ZeroDerivation",
    "TDerivative",
    "QDifference",
    "RingSpec",
    "OrePoly",
    "apply_sigma_k",
    "deg",
    "lc",
    "right_reduce_step",
    "left_reduce_step",
    "SigmaDerivationReport",
    "check_sigma_derivation",
]

#: degree of the zero polynomial; compares below every int
NEG_INF = float("-inf")


class RingMismatchError(TypeError):
    pass


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    def apply(self, a):
        return a

    def inverse(self) -> Identity:
        return self

    def power(self, k: int) -> Identity:
        return self

    def is_identity(self) -> bool:
        return True

    def text(self, field: Field) -> str:
        return "id"


@dataclass(frozen=True)
class Conjugation:
    """Complex conjugation on Q(i)."""

    def apply(self, a):
        return a.conjugate()

    def inverse(self) -> Conjugation:
        return self

    def power(self, k: int):
        return self if k % 2 else Identity()

    def is_identity(self) -> bool:
        return False

    def text(self, field: Field) -> str:
        return "conj"


@dataclass(frozen=True)
class Shift:
    """``t -> t + c`` on a rational function field; ``c`` lies in the base."""

    c: Any

    def apply(self, a):
        return a.substitute_shift(self.c)

    def inverse(self) -> Shift:
        return Shift(-self.c)

    def power(self, k: int):
        return Shift(self.c * k) if k else Identity()

    def is_identity(self) -> bool:
        return not self.c

    def text(self, field: Field) -> str:
        return f"shift({field.base.render(self.c)})"


@dataclass(frozen=True)
class Scale:
    """``t -> u*t`` on a rational function field; ``u`` is a nonzero base element."""

    u: Any

    def apply(self, a):
        return a.substitute_scale(self.u)

    def inverse(self) -> Scale:
        return Scale(1 / self.u)

    def power(self, k: int):
        return Scale(self.u**k) if k else Identity()

    def is_identity(self) -> bool:
        return self.u == 1

    def text(self, field: Field) -> str:
        return f"scale({field.base.render(self.u)})"


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroDerivation:
    def apply(self, a):
        return a * 0

    def is_zero(self) -> bool:
        return True

    def text(self) -> str:
        return "zero"


@dataclass(frozen=True)
class TDerivative:
    """``d/dt`` on a rational function field."""

    def apply(self, a):
        return a.derivative()

    def is_zero(self) -> bool:
        return False

    def text(self) -> str:
        return "ddt"


@dataclass(frozen=True)
class QDifference:
    """``f -> (f(u*t) - f(t)) / (t*(u - 1))``; pairs with ``Scale(u)``."""

    u: Any

    def apply(self, a):
        if not a:
            return a
        t = a.field.gen()
        return (a.substitute_scale(self.u) - a) / (t * (self.u - 1))

    def is_zero(self) -> bool:
        return False

    def text(self) -> str:
        return "qdiff"


# ---------------------------------------------------------------------------
# the ring
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingSpec:
    """Descriptor of ``K[x; sigma, delta]``.

    Construction validates the combination: conjugation needs Q(i), shifts and
    scalings need a rational function field, ``d/dt`` needs ``sigma = id`` and
    the q-difference derivation needs ``sigma = scale(u)`` with ``u`` not 0 or 1.
    """

    field: Field
    sigma: Any = field(default_factory=Identity)
    delta: Any = field(default_factory=ZeroDerivation)

    def __post_init__(self):
        K, sigma, delta = self.field, self.sigma, self.delta
        if isinstance(sigma, Conjugation) and not isinstance(K, GaussianRationalField):
            raise ValueError("conjugation is only available over Q(i)")
        if isinstance(sigma, (Shift, Scale)):
            if not isinstance(K, RationalFunctionField):
                raise ValueError(f"{type(sigma).__name__.lower()} needs a rational function field")
            value = sigma.c if isinstance(sigma, Shift) else sigma.u
            try:
                value = K.base(value)
            except FieldMismatchError as exc:
                raise ValueError(f"parameter {value!r} is not in {K.base}") from exc
            if isinstance(sigma, Scale) and not value:
                raise ValueError("scale(0) is not an automorphism")
            object.__setattr__(self, "sigma", type(sigma)(value))
        if isinstance(delta, TDerivative):
            if not isinstance(K, RationalFunctionField):
                raise ValueError("d/dt needs a rational function field")
            if not isinstance(self.sigma, Identity):
                raise ValueError("d/dt is a sigma-derivation only for sigma = id")
        if isinstance(delta, QDifference):
            if not isinstance(K, RationalFunctionField):
                raise ValueError("the q-difference derivation needs a rational function field")
            if not isinstance(self.sigma, Scale):
                raise ValueError("the q-difference derivation needs sigma = scale(q)")
            u = K.base(delta.u)
            if u != self.sigma.u:
                raise ValueError("q-difference parameter must match the scale of sigma")
            if u == 1:
                raise ValueError("q-difference needs q != 0, 1")
            object.__setattr__(self, "delta", QDifference(u))

    # -- constructors --------------------------------------------------------

    def __call__(self, value) -> OrePoly:
        """The constant polynomial with value ``value`` (or ``value`` itself)."""
        if isinstance(value, OrePoly):
            self._check(value.ring)
            return value
        c = self.field(value)
        return OrePoly._make(self, (c,) if c else ())

    def _check(self, other: RingSpec):
        if other is not self and other != self:
            raise RingMismatchError(f"ring mismatch: {self} vs {other}")

    @property
    def zero(self) -> OrePoly:
        return OrePoly._make(self, ())

    @property
    def one(self) -> OrePoly:
        return OrePoly._make(self, (self.field.one,))

    @property
    def x(self) -> OrePoly:
        return self.monomial(1, 1)

    def monomial(self, c, k: int) -> OrePoly:
        """``c*x^k``."""
        c = self.field(c)
        if not c:
            return self.zero
        return OrePoly._make(self, (self.field.zero,) * k + (c,))

    def poly(self, coeffs) -> OrePoly:
        """Polynomial from left coefficients ``a0, a1, ...``."""
        return OrePoly(self, coeffs)

    # -- maps ----------------------------------------------------------------

    def sigma_k(self, a, k: int):
        return apply_sigma_k(a, k, self)

    def text(self) -> str:
        from .textio import render_ring

        return render_ring(self)

    def __str__(self):
        return self.text()


def apply_sigma_k(a, k: int, ring: RingSpec):
    """``sigma^k(a)``; negative ``k`` uses the inverse automorphism."""
    if k == 0:
        return a
    s = ring.sigma if k > 0 else ring.sigma.inverse()
    return s.power(abs(k)).apply(a)


class OrePoly:
    """An element ``sum a_k x^k`` of a skew polynomial ring.

    Instances are immutable.  ``coeffs`` holds the left coefficients in
    ascending order with no trailing zeros; the zero polynomial has ``()``.
    """

    __slots__ = ("ring", "coeffs", "_hash")

    def __init__(self, ring: RingSpec, coeffs=()):
        K = ring.field
        cs = [K(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.ring = ring
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def _make(cls, ring, coeffs: tuple) -> OrePoly:
        obj = object.__new__(cls)
        obj.ring = ring
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    # -- basic data ----------------------------------------------------------

    @property
    def deg(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def lc(self):
        if not self.coeffs:
            raise ValueError("leading coefficient of the zero polynomial")
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant(self):
        if len(self.coeffs) > 1:
            raise ValueError(f"{self} is not a constant")
        return self.coeffs[0] if self.coeffs else self.ring.field.zero

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.ring.field.zero

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> OrePoly | None:
        if isinstance(other, OrePoly):
            self.ring._check(other.ring)
            return other
        try:
            return self.ring(other)
        except (FieldMismatchError, TypeError):
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        while out and not out[-1]:
            out.pop()
        return OrePoly._make(self.ring, tuple(out))

    __radd__ = __add__

    def __neg__(self):
        return OrePoly._make(self.ring, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return poly_mul(self, o)

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return poly_mul(o, self)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined in an Ore ring")
        out = self.ring.one
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, OrePoly):
            return self.coeffs == other.coeffs and (self.ring is other.ring or self.ring == other.ring)
        try:
            o = self.ring(other)
        except (FieldMismatchError, TypeError):
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __str__(self):
        from .textio import render_poly

        return render_poly(self)

    def __repr__(self):
        return f"OrePoly({self})"


def _x_times(h: list, sigma, delta, K) -> list:
    # x * (sum b_k x^k) = sum sigma(b_k) x^(k+1) + delta(b_k) x^k
    out = [K.zero] * (len(h) + 1)
    for k, b in enumerate(h):
        if not b:
            continue
        out[k + 1] = sigma.apply(b)
        if delta is not None:
            d = delta.apply(b)
            if d:
                out[k] = out[k] + d
    return out


def poly_mul(f: OrePoly, g: OrePoly) -> OrePoly:
    """Product ``f*g`` in ``K[x; sigma, delta]``."""
    ring = f.ring
    ring._check(g.ring)
    if not f.coeffs or not g.coeffs:
        return ring.zero
    K = ring.field
    sigma = ring.sigma
    delta = None if ring.delta.is_zero() else ring.delta
    fc = f.coeffs
    out = [K.zero] * (len(fc) + len(g.coeffs) - 1)
    if delta is None:
        # x^i * b = sigma^i(b) x^i
        for i, a in enumerate(fc):
            if not a:
                continue
            s = sigma.power(i) if i else None
            for j, b in enumerate(g.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * (s.apply(b) if s is not None else b)
    else:
        h = list(g.coeffs)
        for i, a in enumerate(fc):
            if i:
                h = _x_times(h, sigma, delta, K)
            if not a:
                continue
            for j, b in enumerate(h):
                if b:
                    out[j] = out[j] + a * b
    while out and not out[-1]:
        out.pop()
    return OrePoly._make(ring, tuple(out))


def deg(f: OrePoly):
    return f.deg


def lc(f: OrePoly):
    return f.lc


def right_reduce_step(f: OrePoly, g: OrePoly) -> tuple[OrePoly, OrePoly]:
    """One right-division step: ``f = g*m + f'`` with ``deg f' < deg f``.

    ``m = c*x^(deg f - deg g)`` where ``c = sigma^(-deg g)(lc(g)^-1 * lc(f))``.
    """
    if not f or not g:
        raise ValueError("right_reduce_step needs nonzero operands")
    d = f.deg - g.deg
    if d < 0:
        raise ValueError(f"deg g = {g.deg} exceeds deg f = {f.deg}")
    ring = f.ring
    c = apply_sigma_k((1 / g.lc) * f.lc, -g.deg, ring)
    m = ring.monomial(c, d)
    rest = f - g * m
    if rest.deg >= f.deg:
        raise ArithmeticError("degree did not drop in right_reduce_step")
    return m, rest


def left_reduce_step(f: OrePoly, g: OrePoly) -> tuple[OrePoly, OrePoly]:
    """One left-division step: ``f = m*g + f'`` with ``deg f' < deg f``.

    ``m = c*x^d`` with ``d = deg f - deg g`` and ``c * sigma^d(lc(g)) = lc(f)``.
    """
    if not f or not g:
        raise ValueError("left_reduce_step needs nonzero operands")
    d = f.deg - g.deg
    if d < 0:
        raise ValueError(f"deg g = {g.deg} exceeds deg f = {f.deg}")
    ring = f.ring
    c = f.lc / apply_sigma_k(g.lc, d, ring)
    m = ring.monomial(c, d)
    rest = f - m * g
    if rest.deg >= f.deg:
        raise ArithmeticError("degree did not drop in left_reduce_step")
    return m, rest


@dataclass
class SigmaDerivationReport:
    samples: int
    failures: int = 0
    counterexample: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.failures == 0


def check_sigma_derivation(ring: RingSpec, samples: int = 1000, seed: int = 0) -> SigmaDerivationReport:
    """Check the sigma-derivation and multiplicativity laws on random pairs.

    Failures are counted and the first counterexample ``(a, b, law)`` is kept;
    nothing is raised.
    """
    rng = random.Random(seed)
    K = ring.field
    report = SigmaDerivationReport(samples)
    sigma, delta = ring.sigma, ring.delta
    for _ in range(samples):
        a, b = K.random_element(rng), K.random_element(rng)
        lhs = delta.apply(a * b)
        rhs = sigma.apply(a) * delta.apply(b) + delta.apply(a) * b
        bad = None
        if lhs != rhs:
            bad = "delta(ab) = sigma(a)delta(b) + delta(a)b"
        elif sigma.apply(a * b) != sigma.apply(a) * sigma.apply(b):
            bad = "sigma(ab) = sigma(a)sigma(b)"
        elif sigma.apply(a + b) != sigma.apply(a) + sigma.apply(b):
            bad = "sigma(a+b) = sigma(a)+sigma(b)"
        elif delta.apply(a + b) != delta.apply(a) + delta.apply(b):
            bad = "delta(a+b) = delta(a)+delta(b)"
        if bad:
            report.failures += 1
            if report.counterexample is None:
                report.counterexample = (a, b, bad)
    return report
