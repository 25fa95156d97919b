"""Scalar backends.

Coordinates may be ints, ``Fraction`` (exact), ``float``/``complex``
(inexact), or :class:`QuadraticNumber`, an exact element ``a + b*sqrt(d)`` of
a quadratic field.  With ``d < 0`` the latter is an exact complex pair, which
is how isotropic points and cube roots of unity stay exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import IncompatibleFields

EPS = 1e-9


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


def squarefree_part(n: int) -> tuple[int, int]:
    """Write n = k**2 * d with d squarefree; returns (k, d)."""
    from sympy import factorint

    if n == 0:
        return 0, 0
    sign = -1 if n < 0 else 1
    k, d = 1, sign
    for p, e in factorint(abs(n), limit=10**6).items():
        k *= p ** (e // 2)
        if e % 2:
            d *= p
    # a large cofactor may still hide a square
    r = math.isqrt(abs(d))
    if r * r == abs(d) and abs(d) > 1:
        k *= r
        d = sign
    return k, d


class QuadraticNumber:
    """Exact a + b*sqrt(d) with rational a, b and squarefree integer d != 0, 1."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = _frac(a)
        self.b = _frac(b)
        if d in (0, 1):
            raise ValueError("d must be squarefree and not 0 or 1")
        self.d = d

    @staticmethod
    def make(a, b, d):
        """Build a + b*sqrt(d), collapsing to a Fraction when b == 0."""
        b = _frac(b)
        if b == 0:
            return _frac(a)
        return QuadraticNumber(a, b, d)

    def _coerce(self, other):
        if isinstance(other, QuadraticNumber):
            if other.d != self.d:
                raise IncompatibleFields(f"sqrt({self.d}) vs sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return complex(self) + other
        return QuadraticNumber.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return complex(self) * other
        a, b = c
        return QuadraticNumber.make(
            self.a * a + self.d * self.b * b, self.a * b + self.b * a, self.d
        )

    __rmul__ = __mul__

    def conjugate(self):
        """Galois conjugate a - b*sqrt(d) (complex conjugate when d < 0)."""
        return QuadraticNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return complex(self) / other
        a, b = c
        n = a * a - self.d * b * b
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return QuadraticNumber.make(
            (self.a * a - self.d * self.b * b) / n, (self.b * a - self.a * b) / n, self.d
        )

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return other / complex(self)
        return self.conjugate() * (c[0] / self.norm())

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return complex(self) ** n
        if n < 0:
            return 1 / (self ** (-n))
        result, base = Fraction(1), self
        while n:
            if n & 1:
                result = base * result
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, QuadraticNumber):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __complex__(self):
        if self.d < 0:
            return complex(float(self.a), float(self.b) * math.sqrt(-self.d))
        return complex(float(self.a) + float(self.b) * math.sqrt(self.d))

    def __float__(self):
        if self.d < 0 and self.b != 0:
            raise TypeError("non-real quadratic number")
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __abs__(self):
        return abs(complex(self))

    def is_real(self) -> bool:
        return self.d > 0 or self.b == 0

    def sign(self) -> int:
        """Exact sign of a real quadratic number."""
        if not self.is_real():
            raise TypeError("sign of a non-real number")
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a**2 with d*b**2
        diff = self.a * self.a - self.d * self.b * self.b
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.d}))"


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadraticNumber))


def is_zero(x, eps: float = EPS) -> bool:
    if is_exact(x):
        return x == 0
    return abs(x) <= eps


def is_real(x) -> bool:
    if isinstance(x, QuadraticNumber):
        return x.is_real()
    if isinstance(x, complex):
        return x.imag == 0
    return True


def is_real_approx(x, eps: float = EPS) -> bool:
    if isinstance(x, complex):
        return abs(x.imag) <= eps * max(1.0, abs(x))
    return is_real(x)


def to_complex(x) -> complex:
    return complex(x)


def to_float(x) -> float:
    if isinstance(x, complex):
        return x.real
    if isinstance(x, QuadraticNumber) and not x.is_real():
        return float(x.a)
    return float(x)


def conj(x):
    if isinstance(x, QuadraticNumber):
        return x.conjugate() if x.d < 0 else x
    if isinstance(x, complex):
        return x.conjugate()
    return x


def real_part(x):
    """Real part, staying exact for quadratic numbers."""
    if isinstance(x, QuadraticNumber):
        return x if x.d > 0 else x.a
    if isinstance(x, complex):
        return x.real
    return x


def sign(x) -> int:
    if isinstance(x, QuadraticNumber):
        return x.sign()
    if isinstance(x, complex):
        x = x.real
    return (x > 0) - (x < 0)


def _rational_sqrt(x: Fraction):
    """Exact square root of a rational: a Fraction or a QuadraticNumber."""
    x = _frac(x)
    if x == 0:
        return Fraction(0)
    n, m = x.numerator, x.denominator
    # sqrt(n/m) = sqrt(n*m)/m
    k, d = squarefree_part(n * m)
    if d == 1:
        return Fraction(k, m)
    return QuadraticNumber(0, Fraction(k, m), d)


def exact_sqrt(x):
    """Square root kept exact when it lies in the field of x, else None.

    Rationals always succeed (possibly adjoining a square root).  For an
    element of Q(sqrt d) the root is returned only if it lies in Q(sqrt d).
    """
    if isinstance(x, (int, Fraction)):
        return _rational_sqrt(x)
    if isinstance(x, QuadraticNumber):
        a, b, d = x.a, x.b, x.d
        n = a * a - d * b * b
        rn = _rational_sqrt(n)
        if not isinstance(rn, Fraction):
            return None
        for s in (rn, -rn):
            u2 = (a + s) / 2  # candidate square of the rational part
            if u2 != 0:
                ru = _rational_sqrt(u2)
                if isinstance(ru, Fraction):
                    return QuadraticNumber.make(ru, b / (2 * ru), d)
            v2 = (a - s) / (2 * d)  # candidate square of the irrational part
            if v2 != 0:
                rv = _rational_sqrt(v2)
                if isinstance(rv, Fraction):
                    return QuadraticNumber.make(b / (2 * rv), rv, d)
        return None
    return None


def sqrt_any(x):
    """Exact square root when available, otherwise a complex/float root."""
    r = exact_sqrt(x)
    if r is not None:
        return r
    c = complex(x)
    if c.imag == 0 and c.real >= 0:
        return math.sqrt(c.real)
    import cmath

    return cmath.sqrt(c)


def parse_scalar(token):
    """Parse "p/q", an integer, or a decimal string.

    Integers and "p/q" become Fractions; decimals become floats.
    """
    if isinstance(token, bool):
        raise ValueError("boolean is not a scalar")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, float):
        return token
    if not isinstance(token, str):
        raise ValueError(f"not a scalar: {token!r}")
    s = token.strip()
    if "/" in s:
        p, q = s.split("/", 1)
        return Fraction(int(p), int(q))
    try:
        return Fraction(int(s))
    except ValueError:
        return float(s)


def format_scalar(x) -> str:
    """Canonical text form; exact rationals as "p/q" or an integer."""
    if isinstance(x, bool):
        raise ValueError("boolean is not a scalar")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return repr(x)
    raise ValueError(f"cannot serialize {x!r}")


def to_backend(x, backend: str):
    if backend == "float":
        if isinstance(x, complex) or (isinstance(x, QuadraticNumber) and not x.is_real()):
            return complex(x)
        return float(x)
    return x
