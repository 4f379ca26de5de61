"""Dense univariate polynomials over exact rationals.

Supports the handful of exact operations the toolkit needs: arithmetic,
evaluation, euclidean division, gcd, the Sylvester matrix and its
determinant (the resultant), and rational root finding for the pole
analysis of rational functions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

Coeff = Union[int, Fraction]


class RationalPolynomial:
    """Polynomial ``c_0 + c_1 x + ... + c_d x^d`` with Fraction coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Coeff]):
        cs = [Fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> "RationalPolynomial":
        return cls([0])

    @classmethod
    def x(cls) -> "RationalPolynomial":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        """Degree, with the convention ``degree(0) == -1``."""
        if self.is_zero():
            return -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        terms = []
        for n, c in enumerate(self.coeffs):
            if c == 0 and self.degree >= 0:
                continue
            if n == 0:
                terms.append(str(c))
            elif n == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{n}")
        return " + ".join(terms) if terms else "0"

    def __add__(self, other: "RationalPolynomial | Coeff") -> "RationalPolynomial":
        if not isinstance(other, RationalPolynomial):
            other = RationalPolynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return RationalPolynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial([-c for c in self.coeffs])

    def __sub__(self, other: "RationalPolynomial | Coeff") -> "RationalPolynomial":
        if not isinstance(other, RationalPolynomial):
            other = RationalPolynomial([other])
        return self + (-other)

    def __rsub__(self, other: Coeff) -> "RationalPolynomial":
        return (-self) + other

    def __mul__(self, other: "RationalPolynomial | Coeff") -> "RationalPolynomial":
        if not isinstance(other, RationalPolynomial):
            c = Fraction(other)
            return RationalPolynomial([c * x for x in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __call__(self, value: Coeff) -> Fraction:
        v = Fraction(value)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def compose(self, inner: "RationalPolynomial") -> "RationalPolynomial":
        acc = RationalPolynomial.zero()
        for c in reversed(self.coeffs):
            acc = acc * inner + RationalPolynomial([c])
        return acc

    def divmod(self, other: "RationalPolynomial") -> tuple["RationalPolynomial", "RationalPolynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        quot = [Fraction(0)] * max(1, len(self.coeffs) - len(other.coeffs) + 1)
        rem = list(self.coeffs)
        d = other.degree
        lead = other.leading()
        while len(rem) - 1 >= d and any(c != 0 for c in rem):
            if rem[-1] == 0:
                rem.pop()
                continue
            shift = len(rem) - 1 - d
            factor = rem[-1] / lead
            quot[shift] = factor
            for i in range(d + 1):
                rem[shift + i] -= factor * other.coeffs[i]
            rem.pop()
            if not rem:
                rem = [Fraction(0)]
        return RationalPolynomial(quot), RationalPolynomial(rem)

    def monic(self) -> "RationalPolynomial":
        if self.is_zero():
            return self
        lead = self.leading()
        return RationalPolynomial([c / lead for c in self.coeffs])


def poly_gcd(p: RationalPolynomial, q: RationalPolynomial) -> RationalPolynomial:
    """Monic gcd via the euclidean algorithm."""
    a, b = p, q
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic() if not a.is_zero() else a


def sylvester_matrix(p: RationalPolynomial, q: RationalPolynomial) -> list[list[Fraction]]:
    """The (deg p + deg q)-square Sylvester matrix of two nonzero polynomials."""
    if p.is_zero() or q.is_zero():
        raise ValueError("Sylvester matrix requires nonzero polynomials")
    m, n = p.degree, q.degree
    size = m + n
    rows: list[list[Fraction]] = []
    pc = list(reversed(p.coeffs))
    qc = list(reversed(q.coeffs))
    for shift in range(n):
        row = [Fraction(0)] * size
        for i, c in enumerate(pc):
            row[shift + i] = c
        rows.append(row)
    for shift in range(m):
        row = [Fraction(0)] * size
        for i, c in enumerate(qc):
            row[shift + i] = c
        rows.append(row)
    return rows


def det_fraction(matrix: list[list[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination with rational pivots."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    m = [row[:] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] == 0:
                continue
            factor = m[r][col] * inv
            for c in range(col, n):
                m[r][c] -= factor * m[col][c]
    return det


def sylvester_resultant(p: RationalPolynomial, q: RationalPolynomial) -> Fraction:
    """Resultant of two nonzero polynomials, exact.

    Vanishes exactly when the polynomials share a root (equivalently when
    their gcd is nonconstant); degenerate constant inputs resolve through
    the usual conventions ``Res(c, q) = c^{deg q}``.
    """
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of the zero polynomial is undefined")
    if p.degree == 0:
        return p.coeffs[0] ** q.degree
    if q.degree == 0:
        return q.coeffs[0] ** p.degree
    return det_fraction(sylvester_matrix(p, q))


def rational_roots(p: RationalPolynomial) -> list[Fraction]:
    """All rational roots of a nonzero polynomial, each listed once.

    Scales to integer coefficients and runs the classical p/q divisor
    search; exact, with multiplicity discarded.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has every root")
    denom_lcm = 1
    for c in p.coeffs:
        denom_lcm = denom_lcm * c.denominator // _gcd(denom_lcm, c.denominator)
    ints = [int(c * denom_lcm) for c in p.coeffs]
    while ints and ints[0] == 0:
        ints = ints[1:]
    roots: list[Fraction] = []
    if len(ints) < len(p.coeffs):
        roots.append(Fraction(0))
    if not ints or len(ints) == 1:
        return roots
    a0, ad = abs(ints[0]), abs(ints[-1])
    for num in _divisors(a0):
        for den in _divisors(ad):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand not in roots and p(cand) == 0:
                    roots.append(cand)
    return sorted(roots)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _divisors(n: int) -> list[int]:
    if n == 0:
        return [1]
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)
