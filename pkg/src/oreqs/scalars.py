"""Exact coefficient fields.

Three kinds of field are provided:

* ``QQ``: the rationals, whose elements are plain :class:`fractions.Fraction`
  values;
* ``QQi``: the Gaussian rationals Q(i), elements are :class:`GaussianRational`;
* ``RationalFunctionField(base, var)``: rational functions in one variable
  over any of the above.  Because the base may itself be a rational function
  field, towers such as Q(q)(t) are available without special casing.

Rational functions have two interchangeable backends.  ``generic`` keeps
``num/den`` as dense coefficient tuples over the base field and works over
any base.  ``flint`` flattens a tower over Q into quotients of multivariate
polynomials and uses FLINT's multivariate gcd, which keeps nested towers
like Q(q)(t) fast; it is picked automatically whenever the ground field is Q.

Every element is kept in canonical form, so ``==`` is structural equality.
Values from a subfield (Python ints, fractions, elements of the base of a
tower) are coerced on the fly; values from unrelated fields raise
:class:`FieldMismatchError`.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Any

try:
    from flint import fmpq, fmpq_mpoly_ctx
except ImportError:  # pragma: no cover
    fmpq = fmpq_mpoly_ctx = None

__all__ = [
    "FieldMismatchError",
    "Field",
    "RationalField",
    "GaussianRationalField",
    "RationalFunctionField",
    "GaussianRational",
    "RationalFunction",
    "DenseRationalFunction",
    "FlintRationalFunction",
    "QQ",
    "QQi",
    "field_of",
    "field_add",
    "field_mul",
    "field_inv",
    "field_conj",
    "rf_substitute",
    "rf_derivative",
]


class FieldMismatchError(TypeError):
    """Raised when two values from unrelated fields are combined."""


def _top_level_sum(s: str) -> bool:
    # True when s has a '+' or '-' outside parentheses (ignoring a leading sign).
    depth = 0
    for pos, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and pos > 0:
            return True
    return False


def _paren(s: str) -> str:
    return f"({s})" if _top_level_sum(s) else s


def _join_terms(terms: list[str]) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for term in terms[1:]:
        if term.startswith("-"):
            out += " - " + term[1:]
        else:
            out += " + " + term
    return out


def _render_rational(a: Fraction) -> str:
    if a.denominator == 1:
        return str(a.numerator)
    return f"{a.numerator}/{a.denominator}"


# ---------------------------------------------------------------------------
# Field descriptors
# ---------------------------------------------------------------------------


class Field:
    """Descriptor of an exact commutative field."""

    name: str = "?"

    def __call__(self, value: Any) -> Any:
        raise NotImplementedError

    @property
    def zero(self) -> Any:
        return self(0)

    @property
    def one(self) -> Any:
        return self(1)

    def gens(self) -> dict[str, Any]:
        """Named generators usable in text expressions."""
        return {}

    def contains(self, value: Any) -> bool:
        raise NotImplementedError

    def render(self, value: Any) -> str:
        return str(self(value))

    def random_element(self, rng: random.Random, size: int = 3) -> Any:
        raise NotImplementedError

    def random_nonzero(self, rng: random.Random, size: int = 3) -> Any:
        while True:
            a = self.random_element(rng, size)
            if a:
                return a

    def __repr__(self) -> str:
        return self.name


class RationalField(Field):
    name = "Q"

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, GaussianRational) and not value.im:
            return value.re
        if isinstance(value, RationalFunction) and value.is_constant():
            return self(value.constant())
        raise FieldMismatchError(f"cannot coerce {value!r} into Q")

    def contains(self, value):
        return isinstance(value, Fraction)

    def render(self, value):
        return _render_rational(self(value))

    def random_element(self, rng, size=3):
        num = rng.randint(-size, size)
        den = rng.randint(1, size)
        return Fraction(num, den)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")


class GaussianRationalField(Field):
    name = "Qi"

    def __call__(self, value):
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussianRational(value, 0)
        if isinstance(value, RationalFunction) and value.is_constant():
            return self(value.constant())
        raise FieldMismatchError(f"cannot coerce {value!r} into Q(i)")

    def gens(self):
        return {"i": GaussianRational(0, 1)}

    def contains(self, value):
        return isinstance(value, GaussianRational)

    def random_element(self, rng, size=3):
        return GaussianRational(QQ.random_element(rng, size), QQ.random_element(rng, size))

    def __eq__(self, other):
        return isinstance(other, GaussianRationalField)

    def __hash__(self):
        return hash("Qi")


QQ = RationalField()
QQi = GaussianRationalField()


class RationalFunctionField(Field):
    """The field ``base(var)`` of rational functions over ``base``."""

    def __init__(self, base: Field, var: str = "t", backend: str = "auto"):
        if var in base.gens():
            raise ValueError(f"variable {var!r} already names a generator of {base}")
        if backend not in ("auto", "flint", "generic"):
            raise ValueError(f"unknown backend {backend!r}")
        names = [var]
        ground = base
        while isinstance(ground, RationalFunctionField):
            names.append(ground.var)
            ground = ground.base
        if isinstance(base, RationalFunctionField):
            if backend == "auto":
                backend = base.backend
            elif backend != base.backend:
                raise ValueError("a tower must use one backend throughout")
        elif backend == "auto":
            backend = "flint" if ground == QQ and fmpq_mpoly_ctx is not None else "generic"
        if backend == "flint" and (ground != QQ or fmpq_mpoly_ctx is None):
            raise ValueError("the flint backend needs python-flint and ground field Q")
        self.base = base
        self.var = var
        self.backend = backend
        # outermost variable first, so in lex order "leading" means highest power of var
        self._ctx = fmpq_mpoly_ctx.get(tuple(names), "lex") if backend == "flint" else None
        self._gen = None

    @property
    def name(self) -> str:
        inner = {"Q": "Q", "Qi": "Q(i)"}.get(self.base.name, self.base.name)
        return f"{inner}({self.var})"

    def gen(self) -> RationalFunction:
        if self._gen is None:
            if self._ctx is not None:
                ctx = self._ctx
                self._gen = FlintRationalFunction._raw(self, ctx.gen(0), ctx.constant(1))
            else:
                self._gen = DenseRationalFunction._raw(self, (self.base.zero, self.base.one), (self.base.one,))
        return self._gen

    def gens(self):
        out = dict(self.base.gens())
        out[self.var] = self.gen()
        return out

    def tower(self) -> list[Field]:
        """Fields from the bottom of the tower up to and including self."""
        below = self.base.tower() if isinstance(self.base, RationalFunctionField) else [self.base]
        return below + [self]

    def __call__(self, value):
        if isinstance(value, RationalFunction):
            if value.field == self:
                return value
            if self._is_subfield(value.field):
                return self._from_base(self.base(value))
            if value.is_constant():
                return self(value.constant())
            raise FieldMismatchError(f"cannot coerce element of {value.field} into {self}")
        return self._from_base(self.base(value))

    def _from_base(self, c) -> RationalFunction:
        if self._ctx is not None:
            ctx = self._ctx
            if isinstance(c, FlintRationalFunction):
                return FlintRationalFunction._raw(self, _lift_poly(c.num, ctx), _lift_poly(c.den, ctx))
            return FlintRationalFunction._raw(self, ctx.constant(_to_fmpq(c)), ctx.constant(1))
        if not c:
            return DenseRationalFunction._raw(self, (), (self.base.one,))
        return DenseRationalFunction._raw(self, (c,), (self.base.one,))

    def _is_subfield(self, other: Field) -> bool:
        f = self.base
        while True:
            if f == other:
                return True
            if not isinstance(f, RationalFunctionField):
                return other == f
            f = f.base

    def contains(self, value):
        return isinstance(value, RationalFunction) and value.field == self

    def from_polys(self, num, den=None) -> RationalFunction:
        """Build ``num/den`` from ascending coefficient sequences."""
        base = self.base
        num = tuple(base(c) for c in num)
        den = (base.one,) if den is None else tuple(base(c) for c in den)
        if self._ctx is None:
            return DenseRationalFunction._canonical(self, num, den)
        t = self.gen()

        def build(coeffs):
            out = self.zero
            for k, c in enumerate(coeffs):
                if c:
                    out = out + self._from_base(c) * t**k
            return out

        return build(num) / build(den)

    def random_element(self, rng, size=3):
        def poly(deg):
            return [self.base.random_element(rng, size) for _ in range(deg + 1)]

        num = poly(rng.randint(0, 2))
        den = poly(rng.randint(0, 2))
        if not any(den):
            den = [self.base.one]
        return self.from_polys(num, den)

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunctionField)
            and other.var == self.var
            and other.backend == self.backend
            and other.base == self.base
        )

    def __hash__(self):
        return hash(("RF", self.base, self.var, self.backend))


def field_of(value: Any) -> Field:
    """Return the field descriptor of a scalar."""
    if isinstance(value, RationalFunction):
        return value.field
    if isinstance(value, GaussianRational):
        return QQi
    if isinstance(value, (int, Fraction)):
        return QQ
    raise TypeError(f"{value!r} is not a field element")


# ---------------------------------------------------------------------------
# Q(i)
# ---------------------------------------------------------------------------


class GaussianRational:
    """An element ``re + im*i`` of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        if isinstance(other, RationalFunction):
            raise FieldMismatchError(f"cannot combine Q(i) with {other.field}")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> GaussianRational:
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussianRational(1)
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __str__(self):
        re, im = self.re, self.im
        if not im:
            return _render_rational(re)
        if im == 1:
            ipart = "i"
        elif im == -1:
            ipart = "-i"
        else:
            ipart = f"{_render_rational(im)}*i"
        if not re:
            return ipart
        if ipart.startswith("-"):
            return f"{_render_rational(re)}{ipart}"
        return f"{_render_rational(re)}+{ipart}"

    def __repr__(self):
        return f"GaussianRational({self})"


# ---------------------------------------------------------------------------
# dense polynomials over a base field (tuples, ascending powers)
# ---------------------------------------------------------------------------


def _strip(coeffs) -> tuple:
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, c in enumerate(b):
        out[k] = out[k] + c
    return _strip(out)


def _psub(a, b):
    return _padd(a, tuple(-c for c in b))


def _pmul(a, b, zero):
    if not a or not b:
        return ()
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return _strip(out)


def _pscale(a, c):
    if not c:
        return ()
    return _strip([x * c for x in a])


def _pdivmod(a, b, zero):
    inv = 1 / b[-1]
    rem = list(a)
    db = len(b) - 1
    if len(a) <= db:
        return (), _strip(rem)
    quo = [zero] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = rem[k]
        if not c:
            continue
        c = c * inv
        quo[k - db] = c
        for j in range(db + 1):
            if b[j]:
                rem[k - db + j] = rem[k - db + j] - c * b[j]
    return _strip(quo), _strip(rem[:db])


def _pmonic(a):
    inv = 1 / a[-1]
    return tuple(c * inv for c in a[:-1]) + (a[-1] * inv,)


def _pgcd(a, b, zero):
    # monic remainder sequence: keeps coefficients canonical instead of
    # letting scalar multiples grow from step to step
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return _pmonic(a) if a else a
    b = _pmonic(b)
    while True:
        _, r = _pdivmod(a, b, zero)
        if not r:
            return b
        if len(r) == 1:
            return (r[0] * (1 / r[0]),)
        a, b = b, _pmonic(r)


def _pderiv(a):
    return _strip([a[k] * k for k in range(1, len(a))])


def _pshift(a, c, zero, one):
    # a(t + c) by Horner's rule
    out: tuple = ()
    lin = (c, one)
    for coef in reversed(a):
        out = _padd(_pmul(out, lin, zero), (coef,))
    return out


def _pscale_var(a, u, one):
    # a(u*t)
    out = []
    p = one
    for coef in a:
        out.append(coef * p)
        p = p * u
    return _strip(out)


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Element of a :class:`RationalFunctionField`; see the two backends below."""

    __slots__ = ()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.field == self.field:
                return other
            if self.field._is_subfield(other.field):
                return self.field(other)
            if other.field._is_subfield(self.field):
                return None  # let the larger field handle it
            raise FieldMismatchError(f"cannot combine {self.field} with {other.field}")
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.field(other)
        return None

    def _lift(self, other):
        # other.field strictly contains self.field
        return other.field(self)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RationalFunction):
                return self._lift(other) - other
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RationalFunction):
                return self._lift(other) / other
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __eq__(self, other):
        if isinstance(other, RationalFunction) and other.field == self.field:
            return self._same(other)
        try:
            o = self._coerce(other)
        except FieldMismatchError:
            return False
        if o is None:
            return NotImplemented
        return self._same(o)

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant())
            else:
                self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return f"RationalFunction[{self.field}]({self})"


class DenseRationalFunction(RationalFunction):
    """A canonical quotient ``num/den`` of coprime coefficient tuples, ``den`` monic."""

    __slots__ = ("field", "num", "den", "_hash")

    @classmethod
    def _raw(cls, field: RationalFunctionField, num: tuple, den: tuple) -> RationalFunction:
        obj = object.__new__(cls)
        obj.field = field
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def _canonical(cls, field, num, den) -> RationalFunction:
        base = field.base
        num = _strip(num)
        den = _strip(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            return cls._raw(field, (), (base.one,))
        if len(den) > 1:
            g = _pgcd(num, den, base.zero)
            if len(g) > 1:
                num, _ = _pdivmod(num, g, base.zero)
                den, _ = _pdivmod(den, g, base.zero)
        lc = den[-1]
        if lc != base.one:
            inv = 1 / lc
            num = tuple(c * inv for c in num)
            den = tuple(c * inv for c in den[:-1]) + (base.one,)
        return cls._raw(field, num, den)

    def canonicalize(self) -> RationalFunction:
        return DenseRationalFunction._canonical(self.field, self.num, self.den)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RationalFunction):
                return self._lift(other) + other
            return NotImplemented
        zero = self.field.base.zero
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return DenseRationalFunction._canonical(self.field, _padd(self.num, o.num), self.den)
        num = _padd(_pmul(self.num, o.den, zero), _pmul(o.num, self.den, zero))
        return DenseRationalFunction._canonical(self.field, num, _pmul(self.den, o.den, zero))

    __radd__ = __add__

    def __neg__(self):
        return DenseRationalFunction._raw(self.field, tuple(-c for c in self.num), self.den)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RationalFunction):
                return self._lift(other) * other
            return NotImplemented
        if not self.num or not o.num:
            return self.field.zero
        zero = self.field.base.zero
        if len(o.num) == 1 and len(o.den) == 1:
            # scalar from the base field: no gcd needed
            return DenseRationalFunction._raw(self.field, _pscale(self.num, o.num[0]), self.den)
        if len(self.num) == 1 and len(self.den) == 1:
            return DenseRationalFunction._raw(self.field, _pscale(o.num, self.num[0]), o.den)
        # cross-cancel before multiplying keeps the gcds small
        g1 = _pgcd(self.num, o.den, zero)
        g2 = _pgcd(o.num, self.den, zero)
        a, b, c, d = self.num, self.den, o.num, o.den
        if len(g1) > 1:
            a, _ = _pdivmod(a, g1, zero)
            d, _ = _pdivmod(d, g1, zero)
        if len(g2) > 1:
            c, _ = _pdivmod(c, g2, zero)
            b, _ = _pdivmod(b, g2, zero)
        num = _pmul(a, c, zero)
        den = _pmul(b, d, zero)
        lc = den[-1]
        if lc != self.field.base.one:
            inv = 1 / lc
            num = tuple(x * inv for x in num)
            den = tuple(x * inv for x in den)
        return DenseRationalFunction._raw(self.field, num, den)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if not self.num:
            raise ZeroDivisionError(f"inverse of zero in {self.field}")
        return DenseRationalFunction._canonical(self.field, self.den, self.num)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return self.field.one
        # num, den coprime and den monic, so the powers are canonical as they stand
        zero = self.field.base.zero
        num, den = self.num, self.den
        for _ in range(k - 1):
            num = _pmul(num, self.num, zero)
            den = _pmul(den, self.den, zero)
        return DenseRationalFunction._raw(self.field, num, den)

    # -- predicates ----------------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    def _same(self, other) -> bool:
        return self.num == other.num and self.den == other.den

    def _key(self):
        return (self.field.var, self.num, self.den)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant(self):
        """The value as an element of the base field (requires is_constant)."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num[0] if self.num else self.field.base.zero


    # -- maps ----------------------------------------------------------------

    def substitute_shift(self, c) -> RationalFunction:
        """Image under the automorphism ``t -> t + c`` (``c`` in the base)."""
        c = self.field.base(c)
        if not c or not self.num:
            return self
        base = self.field.base
        return DenseRationalFunction._canonical(
            self.field,
            _pshift(self.num, c, base.zero, base.one),
            _pshift(self.den, c, base.zero, base.one),
        )

    def substitute_scale(self, u) -> RationalFunction:
        """Image under the automorphism ``t -> u*t`` (``u`` nonzero, in the base)."""
        u = self.field.base(u)
        if not u:
            raise ZeroDivisionError("substitution t -> 0*t is not an automorphism")
        if not self.num:
            return self
        one = self.field.base.one
        return DenseRationalFunction._canonical(
            self.field, _pscale_var(self.num, u, one), _pscale_var(self.den, u, one)
        )

    def derivative(self) -> RationalFunction:
        """d/dt by the quotient rule; base coefficients are constants."""
        if len(self.num) <= 1 and len(self.den) == 1:
            return self.field.zero
        zero = self.field.base.zero
        num = _psub(_pmul(_pderiv(self.num), self.den, zero), _pmul(self.num, _pderiv(self.den), zero))
        return DenseRationalFunction._canonical(self.field, num, _pmul(self.den, self.den, zero))

    # -- text ----------------------------------------------------------------

    def _render_poly(self, coeffs) -> str:
        return _render_univariate(enumerate(coeffs), self.field.base, self.field.var)

    def __str__(self):
        if len(self.den) == 1:
            return self._render_poly(self.num)
        return f"({self._render_poly(self.num)})/({self._render_poly(self.den)})"


def _render_univariate(items, base: Field, var: str) -> str:
    """Render ``sum c_k var^k`` from ascending ``(k, c_k)`` pairs."""
    terms = []
    for k, c in items:
        if not c:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        s = base.render(c)
        if not mono:
            terms.append(s)
        elif c == base.one:
            terms.append(mono)
        elif c == -base.one:
            terms.append("-" + mono)
        else:
            terms.append(f"{_paren(s)}*{mono}")
    return _join_terms(terms)


# ---------------------------------------------------------------------------
# rational functions over Q, backed by FLINT
# ---------------------------------------------------------------------------


def _to_fmpq(c) -> Any:
    c = QQ(c)
    return fmpq(c.numerator, c.denominator)


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def _lift_poly(p, ctx):
    # base context has the same variables minus the outermost one
    return ctx.from_dict({(0,) + e: c for e, c in p.to_dict().items()})


def _project_poly(p, ctx):
    return ctx.from_dict({e[1:]: c for e, c in p.to_dict().items()})


def _t_coeffs(p, ctx) -> dict[int, Any]:
    """Split ``p`` by powers of the outermost variable."""
    groups: dict[int, dict] = {}
    for e, c in p.to_dict().items():
        groups.setdefault(e[0], {})[(0,) + e[1:]] = c
    return {k: ctx.from_dict(d) for k, d in groups.items()}


class FlintRationalFunction(RationalFunction):
    """``num/den`` as multivariate polynomials over Q in every tower variable.

    Canonical form: ``gcd(num, den) = 1`` and ``den`` has leading coefficient
    1 in lex order with the outermost variable first.
    """

    __slots__ = ("field", "num", "den", "_hash")

    @classmethod
    def _raw(cls, field, num, den) -> FlintRationalFunction:
        obj = object.__new__(cls)
        obj.field = field
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def _canonical(cls, field, num, den) -> FlintRationalFunction:
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            return cls._raw(field, num, field._ctx.constant(1))
        if not den.is_constant():
            g = num.gcd(den)
            if not g.is_one():
                num = num / g
                den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            num = num * inv
            den = den * inv
        return cls._raw(field, num, den)

    def canonicalize(self) -> FlintRationalFunction:
        return FlintRationalFunction._canonical(self.field, self.num, self.den)

    def _normalized(self, num, den) -> FlintRationalFunction:
        # num, den already coprime
        lc = den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            num = num * inv
            den = den * inv
        return FlintRationalFunction._raw(self.field, num, den)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RationalFunction):
                return self._lift(other) + other
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            if self.den.is_one():
                return FlintRationalFunction._raw(self.field, self.num + o.num, self.den)
            return FlintRationalFunction._canonical(self.field, self.num + o.num, self.den)
        # Henrici: only the common factor of the denominators can cancel
        a, b, c, d = self.num, self.den, o.num, o.den
        g = b.gcd(d)
        if g.is_one():
            return self._normalized(a * d + c * b, b * d)
        b1, d1 = b / g, d / g
        num = a * d1 + c * b1
        if num.is_zero():
            return self.field.zero
        h = num.gcd(g)
        if not h.is_one():
            num, g = num / h, g / h
        return self._normalized(num, b1 * d1 * g)

    __radd__ = __add__

    def __neg__(self):
        return FlintRationalFunction._raw(self.field, -self.num, self.den)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RationalFunction):
                return self._lift(other) * other
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return self.field.zero
        a, b, c, d = self.num, self.den, o.num, o.den
        if not d.is_one():
            g = a.gcd(d)
            if not g.is_one():
                a, d = a / g, d / g
        if not b.is_one():
            g = c.gcd(b)
            if not g.is_one():
                c, b = c / g, b / g
        return self._normalized(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> FlintRationalFunction:
        if self.num.is_zero():
            raise ZeroDivisionError(f"inverse of zero in {self.field}")
        return self._normalized(self.den, self.num)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return self.field.one
        return FlintRationalFunction._raw(self.field, self.num**k, self.den**k)

    # -- predicates ----------------------------------------------------------

    def __bool__(self):
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degrees()[0] <= 0 and self.den.degrees()[0] <= 0

    def constant(self):
        """The value as an element of the base field (requires is_constant)."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        base = self.field.base
        if isinstance(base, RationalFunctionField):
            bctx = base._ctx
            return FlintRationalFunction._raw(base, _project_poly(self.num, bctx), _project_poly(self.den, bctx))
        if self.num.is_zero():
            return Fraction(0)
        (c,) = self.num.to_dict().values()
        return _to_fraction(c)

    def _same(self, other) -> bool:
        return self.num == other.num and self.den == other.den

    def _key(self):
        return (self.field.var, str(self.num), str(self.den))

    # -- maps ----------------------------------------------------------------

    def _substitute(self, alpha, beta, gamma) -> FlintRationalFunction:
        """Image under ``t -> (alpha*t + beta)/gamma``, all three free of ``t``."""
        ctx = self.field._ctx
        lin = alpha * ctx.gen(0) + beta
        cn, cd = _t_coeffs(self.num, ctx), _t_coeffs(self.den, ctx)
        top = max(max(cn), max(cd))
        lin_pow = [ctx.constant(1)]
        gam_pow = [ctx.constant(1)]
        for _ in range(top):
            lin_pow.append(lin_pow[-1] * lin)
            gam_pow.append(gam_pow[-1] * gamma)

        def image(coeffs):
            out = ctx.from_dict({})
            for k, c in coeffs.items():
                out = out + c * lin_pow[k] * gam_pow[top - k]
            return out

        return FlintRationalFunction._canonical(self.field, image(cn), image(cd))

    def substitute_shift(self, c) -> FlintRationalFunction:
        """Image under the automorphism ``t -> t + c`` (``c`` in the base)."""
        c = self.field.base(c)
        if not c or self.num.is_zero() or self.is_constant():
            return self
        ce = self.field._from_base(c)
        return self._substitute(ce.den, ce.num, ce.den)

    def substitute_scale(self, u) -> FlintRationalFunction:
        """Image under the automorphism ``t -> u*t`` (``u`` nonzero, in the base)."""
        u = self.field.base(u)
        if not u:
            raise ZeroDivisionError("substitution t -> 0*t is not an automorphism")
        if self.num.is_zero() or self.is_constant():
            return self
        ue = self.field._from_base(u)
        return self._substitute(ue.num, self.field._ctx.from_dict({}), ue.den)

    def derivative(self) -> FlintRationalFunction:
        """d/dt by the quotient rule; base elements are constants."""
        if self.is_constant():
            return self.field.zero
        n, d = self.num, self.den
        return FlintRationalFunction._canonical(self.field, n.derivative(0) * d - n * d.derivative(0), d * d)

    # -- text ----------------------------------------------------------------

    def _render_poly(self, p) -> str:
        base = self.field.base
        items = []
        for k, c in sorted(_t_coeffs(p, self.field._ctx).items()):
            if isinstance(base, RationalFunctionField):
                bctx = base._ctx
                items.append((k, FlintRationalFunction._raw(base, _project_poly(c, bctx), bctx.constant(1))))
            else:
                (v,) = c.to_dict().values()
                items.append((k, _to_fraction(v)))
        return _render_univariate(items, base, self.field.var)

    def __str__(self):
        if self.den.is_one():
            return self._render_poly(self.num)
        return f"({self._render_poly(self.num)})/({self._render_poly(self.den)})"


# ---------------------------------------------------------------------------
# functional surface
# ---------------------------------------------------------------------------


def _same_field(a, b):
    fa, fb = field_of(a), field_of(b)
    if fa != fb:
        raise FieldMismatchError(f"field mismatch: {fa} vs {fb}")


def field_add(a, b):
    """Sum of two elements of the same field."""
    _same_field(a, b)
    return a + b


def field_mul(a, b):
    _same_field(a, b)
    return a * b


def field_inv(a):
    if not a:
        raise ZeroDivisionError("inversion of zero")
    if isinstance(a, int):
        a = Fraction(a)
    return 1 / a


def field_conj(a: GaussianRational) -> GaussianRational:
    return QQi(a).conjugate()


def rf_substitute(a: RationalFunction, *, shift=None, scale=None) -> RationalFunction:
    """Apply ``t -> t + shift`` or ``t -> scale*t`` to a rational function."""
    if (shift is None) == (scale is None):
        raise ValueError("give exactly one of shift= or scale=")
    if shift is not None:
        return a.substitute_shift(shift)
    return a.substitute_scale(scale)


def rf_derivative(a: RationalFunction) -> RationalFunction:
    return a.derivative()
