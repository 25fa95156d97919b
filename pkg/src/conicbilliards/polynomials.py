"""Homogeneous trivariate polynomials and rational functions of degree 0."""

from __future__ import annotations

from fractions import Fraction
from itertools import product as _iproduct

from .scalars import EPS, is_exact


def _add_into(acc, mono, c):
    v = acc.get(mono, 0) + c
    if v == 0 and is_exact(v):
        acc.pop(mono, None)
    else:
        acc[mono] = v


class HomPoly:
    """Polynomial in (y1, y2, y3) stored as {(i, j, k): coefficient}."""

    __slots__ = ("terms", "_float")

    def __init__(self, terms=None):
        self.terms = {}
        for mono, c in (terms or {}).items():
            if isinstance(c, int):
                c = Fraction(c)
            if c != 0:
                self.terms[tuple(mono)] = c
        self._float = None

    @classmethod
    def constant(cls, c):
        return cls({(0, 0, 0): c})

    @classmethod
    def linear(cls, coeffs):
        return cls({(1, 0, 0): coeffs[0], (0, 1, 0): coeffs[1], (0, 0, 1): coeffs[2]})

    @classmethod
    def quadratic(cls, q):
        """The form h^T q h of a symmetric 3x3 matrix."""
        terms = {}
        for i in range(3):
            for j in range(3):
                mono = [0, 0, 0]
                mono[i] += 1
                mono[j] += 1
                _add_into(terms, tuple(mono), q[i][j])
        return cls(terms)

    @classmethod
    def variable(cls, i):
        mono = [0, 0, 0]
        mono[i] = 1
        return cls({tuple(mono): Fraction(1)})

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, HomPoly):
            other = HomPoly.constant(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(acc, m, c)
        return HomPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return HomPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, HomPoly) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HomPoly):
            if other == 0:
                return HomPoly()
            return HomPoly({m: c * other for m, c in self.terms.items()})
        acc = {}
        for (m1, c1), (m2, c2) in _iproduct(self.terms.items(), other.terms.items()):
            _add_into(acc, (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]), c1 * c2)
        return HomPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = HomPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, HomPoly):
            other = HomPoly.constant(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __call__(self, h):
        return self.evaluate(h)

    def evaluate(self, h):
        """Value at a coordinate triple (any scalar backend)."""
        y1, y2, y3 = h
        if all(isinstance(x, float) for x in h):
            if self._float is None:
                self._float = [(m, complex(c) if isinstance(c, complex) else float(c)) for m, c in self.terms.items()]
            terms = self._float
        else:
            terms = self.terms.items()
        deg = max(self.degree(), 0)
        p1, p2, p3 = _powers(y1, deg), _powers(y2, deg), _powers(y3, deg)
        total = 0
        for (i, j, k), c in terms:
            total = total + c * p1[i] * p2[j] * p3[k]
        return total

    def compose_linear(self, m):
        """The polynomial y -> P(m y) for a 3x3 matrix m."""
        rows = [HomPoly.linear(m[i]) for i in range(3)]
        deg = max(self.degree(), 0)
        pw = [[HomPoly.constant(1)] for _ in range(3)]
        for i in range(3):
            for _ in range(deg):
                pw[i].append(pw[i][-1] * rows[i])
        acc = HomPoly()
        for (i, j, k), c in self.terms.items():
            acc = acc + (pw[0][i] * pw[1][j] * pw[2][k]) * c
        return acc

    def map_coefficients(self, f):
        return HomPoly({m: f(c) for m, c in self.terms.items()})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))

    def to_sympy(self, gens):
        import sympy

        expr = 0
        for (i, j, k), c in self.terms.items():
            expr += _to_sympy_number(c) * gens[0] ** i * gens[1] ** j * gens[2] ** k
        return sympy.Poly(expr, *gens)

    @classmethod
    def from_sympy(cls, poly):
        terms = {}
        for mono, c in poly.terms():
            terms[tuple(mono)] = _from_sympy_number(c)
        return cls(terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        names = ("y1", "y2", "y3")
        parts = []
        for mono, c in self.sorted_terms():
            v = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(names, mono) if e)
            parts.append(f"({c})" + (f"*{v}" if v else ""))
        return " + ".join(parts)


def _powers(x, n):
    out = [1]
    for _ in range(n):
        out.append(out[-1] * x)
    return out


def _to_sympy_number(c):
    import sympy

    if isinstance(c, Fraction):
        return sympy.Rational(c.numerator, c.denominator)
    if isinstance(c, int):
        return sympy.Integer(c)
    return sympy.nsimplify(c)


def _from_sympy_number(c):
    import sympy

    c = sympy.nsimplify(c)
    if c.is_Rational:
        return Fraction(int(c.p), int(c.q))
    return complex(c)


def poly_gcd(p: HomPoly, q: HomPoly) -> HomPoly:
    """Exact gcd of two rational-coefficient polynomials (via sympy)."""
    import sympy

    gens = sympy.symbols("y1 y2 y3")
    g = sympy.gcd(p.to_sympy(gens), q.to_sympy(gens))
    return HomPoly.from_sympy(sympy.Poly(g, *gens))


def poly_div_exact(p: HomPoly, q: HomPoly) -> HomPoly:
    import sympy

    gens = sympy.symbols("y1 y2 y3")
    quo, rem = sympy.div(p.to_sympy(gens), q.to_sympy(gens))
    if not rem.is_zero:
        raise ArithmeticError("inexact polynomial division")
    return HomPoly.from_sympy(sympy.Poly(quo, *gens))


class RationalIntegral:
    """A degree-0 homogeneous rational function num/den.

    Values are compared by cross-multiplication; ``num`` and ``den`` are kept
    as given unless :meth:`reduced` is called.
    """

    __slots__ = ("num", "den", "degree")

    def __init__(self, num: HomPoly, den: HomPoly, degree: int | None = None):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = num, den
        self.degree = degree if degree is not None else max(num.degree(), den.degree())

    def pair(self, h):
        return self.num.evaluate(h), self.den.evaluate(h)

    def __call__(self, h):
        n, d = self.pair(h)
        return n / d

    def value(self, h):
        return self(h)

    def defined_at(self, h, eps: float = EPS) -> bool:
        n, d = self.pair(h)
        if is_exact(d) and is_exact(n):
            return d != 0
        scale = max(abs(n), abs(d))
        return scale > 0 and abs(d) > eps * scale

    def compose_linear(self, m) -> "RationalIntegral":
        return RationalIntegral(self.num.compose_linear(m), self.den.compose_linear(m), self.degree)

    def reduced(self) -> "RationalIntegral":
        """Remove the exact polynomial gcd of numerator and denominator."""
        g = poly_gcd(self.num, self.den)
        if g.degree() <= 0:
            return RationalIntegral(self.num, self.den, max(self.num.degree(), self.den.degree()))
        n = poly_div_exact(self.num, g)
        d = poly_div_exact(self.den, g)
        return RationalIntegral(n, d, max(n.degree(), d.degree()))

    def __mul__(self, other: "RationalIntegral") -> "RationalIntegral":
        return RationalIntegral(self.num * other.num, self.den * other.den)

    def __pow__(self, k: int) -> "RationalIntegral":
        return RationalIntegral(self.num**k, self.den**k)

    def __repr__(self):
        return f"RationalIntegral(degree={self.degree})"


class FactoredIntegral(RationalIntegral):
    """A RationalIntegral kept as products of powers of factors.

    Floating-point evaluation goes through the factors, which avoids the
    cancellation of the expanded high-degree monomial sums.
    """

    __slots__ = ("num_factors", "den_factors")

    def __init__(self, num_factors, den_factors, degree: int | None = None):
        self.num_factors = [(f, k) for f, k in num_factors]
        self.den_factors = [(f, k) for f, k in den_factors]
        super().__init__(_expand(self.num_factors), _expand(self.den_factors), degree)

    def pair(self, h):
        return _factored_value(self.num_factors, h), _factored_value(self.den_factors, h)

    def compose_linear(self, m) -> "FactoredIntegral":
        return FactoredIntegral(
            [(f.compose_linear(m), k) for f, k in self.num_factors],
            [(f.compose_linear(m), k) for f, k in self.den_factors],
            self.degree,
        )

    def squared(self) -> "FactoredIntegral":
        return FactoredIntegral(
            [(f, 2 * k) for f, k in self.num_factors], [(f, 2 * k) for f, k in self.den_factors], 2 * self.degree
        )


def _expand(factors) -> HomPoly:
    acc = HomPoly.constant(1)
    for f, k in factors:
        acc = acc * f**k
    return acc


def _factored_value(factors, h):
    acc = 1
    for f, k in factors:
        acc = acc * f.evaluate(h) ** k
    return acc


def values_equal(p1, p2, eps: float = EPS):
    """Compare two (num, den) value pairs; returns (equal, deviation)."""
    n1, d1 = p1
    n2, d2 = p2
    lhs, rhs = n1 * d2, n2 * d1
    if all(is_exact(x) for x in (n1, d1, n2, d2)):
        if lhs == rhs:
            return True, 0
        a, b = n1 / d1, n2 / d2
        return False, abs(complex(a - b)) / max(abs(complex(a)), abs(complex(b)), 1e-300)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    dev = abs(lhs - rhs) / scale
    return dev <= eps, dev
