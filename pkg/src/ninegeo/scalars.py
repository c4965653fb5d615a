"""Exact scalars in the ring Q(i, sqrt2).

Every value is stored as  a + b*sqrt2 + c*i + d*i*sqrt2  with Fraction
components, so equality is component-wise and no rounding ever happens.
Pure rationals are the b = c = d = 0 case.  Plain ints and Fractions are
accepted by all arithmetic and coerced on the fly.
"""

from __future__ import annotations

from fractions import Fraction

_F0 = Fraction(0)
_F1 = Fraction(1)
_F2 = Fraction(2)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to Fraction")


class ExactScalar:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a = _frac(a)
        self.b = _frac(b)
        self.c = _frac(c)
        self.d = _frac(d)

    # -- constructors ------------------------------------------------
    @staticmethod
    def coerce(x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        return ExactScalar(_frac(x))

    # -- structure ---------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.b == 0 and self.c == 0 and self.d == 0

    @property
    def is_real(self) -> bool:
        """No i component (may still involve sqrt2)."""
        return self.c == 0 and self.d == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.a

    def real(self) -> "ExactScalar":
        return ExactScalar(self.a, self.b)

    def imag(self) -> "ExactScalar":
        """Coefficient of i, an element of Q(sqrt2)."""
        return ExactScalar(self.c, self.d)

    def conj(self) -> "ExactScalar":
        """Complex conjugation i -> -i (a ring involution)."""
        return ExactScalar(self.a, self.b, -self.c, -self.d)

    def flip(self) -> "ExactScalar":
        """The other involution sqrt2 -> -sqrt2."""
        return ExactScalar(self.a, -self.b, self.c, -self.d)

    # -- arithmetic --------------------------------------------------
    def __add__(self, other):
        o = ExactScalar.coerce(other)
        return ExactScalar(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other):
        return ExactScalar.coerce(other) + (-self)

    def __mul__(self, other):
        o = ExactScalar.coerce(other)
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = o.a, o.b, o.c, o.d
        # (a + b r + c i + d i r)(e + f r + g i + h i r), r^2 = 2, i^2 = -1
        return ExactScalar(
            a * e + 2 * b * f - c * g - 2 * d * h,
            a * f + b * e - c * h - d * g,
            a * g + c * e + 2 * b * h + 2 * d * f,
            a * h + b * g + c * f + d * e,
        )

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if not self:
            raise ZeroDivisionError("division by zero ExactScalar")
        # x * conj(x) lands in Q(sqrt2); a second flip-multiply lands in Q.
        y = self * self.conj()            # e + f*sqrt2
        e, f = y.a, y.b
        n = e * e - 2 * f * f             # y * flip(y), rational and nonzero
        return self.conj() * y.flip() * ExactScalar(Fraction(1, 1) / n)

    def __truediv__(self, other):
        return self * ExactScalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return ExactScalar.coerce(other) * self.inverse()

    # -- comparisons & hashing ---------------------------------------
    def __eq__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (o.a, o.b, o.c, o.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __bool__(self):
        return bool(self.a or self.b or self.c or self.d)

    def __float__(self):
        if self.c or self.d:
            raise ValueError(f"{self} has an imaginary part")
        return float(self.a) + float(self.b) * 2.0 ** 0.5

    def __complex__(self):
        r2 = 2.0 ** 0.5
        return complex(float(self.a) + float(self.b) * r2,
                       float(self.c) + float(self.d) * r2)

    def __repr__(self):
        parts = []
        for coef, sym in ((self.a, ""), (self.b, "*r2"), (self.c, "*i"), (self.d, "*i*r2")):
            if coef:
                parts.append(f"{coef}{sym}" if sym else f"{coef}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")


ZERO = ExactScalar()
ONE = ExactScalar(1)
I = ExactScalar(0, 0, 1, 0)
SQRT2 = ExactScalar(0, 1, 0, 0)
INV_SQRT2 = ExactScalar(0, Fraction(1, 2), 0, 0)


def scalar_arith(a: ExactScalar, b: ExactScalar, op: str) -> ExactScalar:
    """Dispatch form of the four ring operations; '/' errors on b == 0."""
    a = ExactScalar.coerce(a)
    b = ExactScalar.coerce(b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError(f"unknown op {op!r}")
