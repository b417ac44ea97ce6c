"""Exact scalars over Q(i), small dense matrices, and formal exponential sums.

Rational parts are :class:`fractions.Fraction`, which already keeps values in
lowest terms with a positive denominator.  Nothing in this module ever rounds.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Fraction

_RATIONAL_RE = re.compile(r"^(-?)(\d+)(?:/(\d+))?$")


class FormatError(ValueError):
    """A literal or file did not match the expected grammar."""


def parse_rational(text: str) -> Fraction:
    """Parse ``-3/5``, ``4`` or ``0``.  Whitespace and decimals are rejected."""
    if not isinstance(text, str):
        raise FormatError(f"rational literal must be a string, got {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise FormatError(f"malformed rational literal {text!r}")
    sign, num, den = m.groups()
    if den is not None and int(den) == 0:
        raise FormatError(f"zero denominator in {text!r}")
    value = Fraction(int(num), int(den) if den is not None else 1)
    return -value if sign else value


def render_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


Scalar = Union["GaussianRational", Fraction, int]


class GaussianRational:
    """Complex number ``re + im*i`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Fraction | int = 0, im: Fraction | int = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))

    @classmethod
    def coerce(cls, value: Scalar) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        raise TypeError(f"cannot convert {value!r} to GaussianRational")

    def __add__(self, other: Scalar) -> GaussianRational:
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> GaussianRational:
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Scalar) -> GaussianRational:
        return (-self) + other

    def __mul__(self, other: Scalar) -> GaussianRational:
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.im and not o.im:
            return GaussianRational(self.re * o.re)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def conj(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def norm_sq(self) -> Fraction:
        """``re**2 + im**2``, the squared modulus."""
        return self.re * self.re + self.im * self.im

    def inv(self) -> GaussianRational:
        n = self.norm_sq()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other: Scalar) -> GaussianRational:
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other: Scalar) -> GaussianRational:
        return GaussianRational.coerce(other) * self.inv()

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"GaussianRational({self})"

    def __str__(self) -> str:
        re_s, im_s = render_rational(self.re), render_rational(abs(self.im))
        if not self.im:
            return re_s
        if not self.re:
            return f"-{im_s}i" if self.im < 0 else f"{im_s}i"
        return f"{re_s}{'-' if self.im < 0 else '+'}{im_s}i"

    def to_literal(self) -> dict:
        return {"re": render_rational(self.re), "im": render_rational(self.im)}

    @classmethod
    def from_literal(cls, obj) -> GaussianRational:
        if not isinstance(obj, Mapping) or set(obj) != {"re", "im"}:
            raise FormatError(f"complex literal must be {{'re', 'im'}}, got {obj!r}")
        return cls(parse_rational(obj["re"]), parse_rational(obj["im"]))


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

Vector = tuple  # tuple[GaussianRational, ...]


def vector(values: Iterable[Scalar]) -> Vector:
    return tuple(GaussianRational.coerce(v) for v in values)


def basis_vector(n: int, k: int) -> Vector:
    return tuple(ONE if j == k else ZERO for j in range(n))


def vec_norm_sq(v: Sequence[GaussianRational]) -> Fraction:
    return sum((z.norm_sq() for z in v), Fraction(0))


class Matrix:
    """Dense row-major matrix of Gaussian rationals."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: Sequence[Sequence[Scalar]]):
        data = tuple(tuple(GaussianRational.coerce(x) for x in row) for row in rows)
        if not data or any(len(r) != len(data[0]) for r in data):
            raise ValueError("matrix rows must be non-empty and of equal length")
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", len(data[0]))
        object.__setattr__(self, "entries", data)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    def __reduce__(self):
        return (Matrix, (self.entries,))

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, values: Sequence[Scalar]) -> Matrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> GaussianRational:
        i, j = ij
        return self.entries[i][j]

    def __iter__(self) -> Iterator[tuple[GaussianRational, ...]]:
        return iter(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in row) for row in self.entries)
        return f"Matrix([{body}])"

    def scale(self, c: Scalar) -> Matrix:
        return Matrix([[c * x for x in row] for row in self.entries])

    def transpose(self) -> Matrix:
        return Matrix(list(zip(*self.entries)))

    def dagger(self) -> Matrix:
        """Conjugate transpose."""
        return Matrix([[x.conj() for x in col] for col in zip(*self.entries)])

    def __matmul__(self, other: Matrix) -> Matrix:
        if not isinstance(other, Matrix):
            return NotImplemented
        return mat_mul(self, other)

    def is_identity(self) -> bool:
        return self == Matrix.identity(self.rows) if self.rows == self.cols else False


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    cols = list(zip(*b.entries))
    return Matrix(
        [[sum((x * y for x, y in zip(row, col)), ZERO) for col in cols] for row in a.entries]
    )


def mat_apply(m: Matrix, v: Sequence[GaussianRational]) -> Vector:
    if m.cols != len(v):
        raise ValueError(f"dimension mismatch: {m.rows}x{m.cols} applied to length {len(v)}")
    out = []
    for row in m.entries:
        acc = ZERO
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return tuple(out)


def is_unitary(m: Matrix) -> bool:
    """True iff ``m @ m.dagger()`` is exactly the identity."""
    if m.rows != m.cols:
        return False
    return (m @ m.dagger()).is_identity()


class ExpSum:
    """Formal sum ``sum_k c_k * e**(rho_k)`` with integer exponent tags.

    Tags are distinct nonnegative integers and tag 0 stands for ``e**0 = 1``.
    Because the exponentials of distinct algebraic numbers are linearly
    independent over the algebraic numbers, a sum is zero exactly when every
    coefficient is zero, so zero coefficients are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Scalar] | None = None):
        clean = {}
        for tag, c in (terms or {}).items():
            if not isinstance(tag, int) or tag < 0:
                raise ValueError(f"exponent tag must be a nonnegative int, got {tag!r}")
            c = GaussianRational.coerce(c)
            if c:
                clean[tag] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("ExpSum is immutable")

    def __reduce__(self):
        return (ExpSum, (self.terms,))

    @classmethod
    def _raw(cls, terms: dict) -> ExpSum:
        obj = object.__new__(cls)
        object.__setattr__(obj, "terms", dict(sorted(terms.items())))
        return obj

    @classmethod
    def zero(cls) -> ExpSum:
        return cls._raw({})

    @classmethod
    def one(cls) -> ExpSum:
        return cls._raw({0: ONE})

    @classmethod
    def const(cls, c: Scalar) -> ExpSum:
        return cls({0: c})

    @classmethod
    def exp(cls, tag: int, coeff: Scalar = 1) -> ExpSum:
        return cls({tag: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coeff(self, tag: int) -> GaussianRational:
        return self.terms.get(tag, ZERO)

    def __add__(self, other: ExpSum) -> ExpSum:
        if not isinstance(other, ExpSum):
            return NotImplemented
        out = dict(self.terms)
        for tag, c in other.terms.items():
            s = out.get(tag, ZERO) + c
            if s:
                out[tag] = s
            else:
                out.pop(tag, None)
        return ExpSum._raw(out)

    def __neg__(self) -> ExpSum:
        return ExpSum._raw({t: -c for t, c in self.terms.items()})

    def __sub__(self, other: ExpSum) -> ExpSum:
        return self + (-other)

    def scale(self, c: Scalar) -> ExpSum:
        c = GaussianRational.coerce(c)
        if not c:
            return ExpSum.zero()
        return ExpSum._raw({t: c * x for t, x in self.terms.items()})

    def __mul__(self, other: ExpSum) -> ExpSum:
        """Product of sums; exponents add, ``e**a * e**b = e**(a+b)``."""
        if not isinstance(other, ExpSum):
            return NotImplemented
        if len(other.terms) == 1 and 0 in other.terms:
            return self.scale(other.terms[0])
        if len(self.terms) == 1 and 0 in self.terms:
            return other.scale(self.terms[0])
        out: dict[int, GaussianRational] = {}
        for ta, ca in self.terms.items():
            for tb, cb in other.terms.items():
                s = out.get(ta + tb, ZERO) + ca * cb
                if s:
                    out[ta + tb] = s
                else:
                    out.pop(ta + tb, None)
        return ExpSum._raw(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __repr__(self) -> str:
        return f"ExpSum({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for tag, c in self.terms.items():
            cs = str(c) if not (c.re and c.im) else f"({c})"
            parts.append(cs if tag == 0 else f"{cs}·e^[{tag}]")
        return " + ".join(parts)

    def to_literal(self):
        """One term renders as an object, several as a list, tags ascending."""
        items = [{"tag": t, "coeff": c.to_literal()} for t, c in self.terms.items()]
        return items[0] if len(items) == 1 else items

    @classmethod
    def from_literal(cls, obj) -> ExpSum:
        items = obj if isinstance(obj, list) else [obj]
        out: dict[int, GaussianRational] = {}
        for item in items:
            if not isinstance(item, Mapping) or set(item) != {"tag", "coeff"}:
                raise FormatError(f"weight term must be {{'tag', 'coeff'}}, got {item!r}")
            tag = item["tag"]
            if not isinstance(tag, int) or isinstance(tag, bool) or tag < 0:
                raise FormatError(f"exponent tag must be a nonnegative integer, got {tag!r}")
            if tag in out:
                raise FormatError(f"duplicate exponent tag {tag}")
            out[tag] = GaussianRational.from_literal(item["coeff"])
        return cls(out)


# function-style aliases for the arithmetic surface
def gr_add(a: GaussianRational, b: GaussianRational) -> GaussianRational:
    return a + b


def gr_sub(a: GaussianRational, b: GaussianRational) -> GaussianRational:
    return a - b


def gr_mul(a: GaussianRational, b: GaussianRational) -> GaussianRational:
    return a * b


def gr_conj(a: GaussianRational) -> GaussianRational:
    return a.conj()


def gr_norm_sq(a: GaussianRational) -> Fraction:
    return a.norm_sq()


def gr_inv(a: GaussianRational) -> GaussianRational:
    return a.inv()


def es_add(a: ExpSum, b: ExpSum) -> ExpSum:
    return a + b


def es_mul(a: ExpSum, b: ExpSum) -> ExpSum:
    return a * b


def es_scale(a: ExpSum, c: Scalar) -> ExpSum:
    return a.scale(c)


def es_is_zero(a: ExpSum) -> bool:
    return a.is_zero()
