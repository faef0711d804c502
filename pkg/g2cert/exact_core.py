"""
Exact scalars and exact linear algebra.

Rationals are ``fractions.Fraction``. Quadratic irrationals a + b*sqrt(D) are
``QuadExt`` values with D a squarefree integer > 1; any operation whose
result has no irrational part collapses back to a Fraction, so rational code
paths never see a radical. ``MPoly`` is a sparse polynomial over Q in the
variables a1..am. Matrices are plain lists of rows.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from g2cert.errors import MismatchedRadicand, NotSymmetric

logger = logging.getLogger(__name__)

Rat = Fraction
Mat = List[List["Scalar"]]


def as_rat(value) -> Fraction:
    """Coerce an int, Fraction or 'p/q' string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def rat_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None if irrational."""
    q = as_rat(q)
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _squarefree_split(n: int) -> Tuple[int, int]:
    """Write n > 0 as k^2 * m with m squarefree; returns (k, m)."""
    k, m = 1, 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
            k *= d
        if n % d == 0:
            n //= d
            m *= d
        d += 1
    return k, m * n


# ---------------------------------------------------------------------------
# Q(sqrt D)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadExt:
    """a + b*sqrt(D) with b != 0 and D a squarefree integer > 1.

    Build values with ``quad`` or ``sqrt_of``; they normalize perfect-square
    radicands and vanishing irrational parts to Fraction.
    """

    a: Fraction
    b: Fraction
    D: int

    # -- helpers -----------------------------------------------------------

    def _coerce(self, other) -> Tuple[Fraction, Fraction]:
        if isinstance(other, QuadExt):
            if other.D != self.D:
                raise MismatchedRadicand(f"sqrt({self.D}) and sqrt({other.D}) cannot be mixed")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        raise TypeError

    def _make(self, a: Fraction, b: Fraction):
        if b == 0:
            return a
        return QuadExt(a, b, self.D)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self._make(self.a + a, self.b + b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.D)

    def __sub__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self._make(self.a - a, self.b - b)

    def __rsub__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self._make(a - self.a, b - self.b)

    def __mul__(self, other):
        try:
            a, b = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self._make(self.a * a + self.b * b * self.D, self.a * b + self.b * a)

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - self.b * self.b * self.D
        # norm != 0 because sqrt(D) is irrational and b != 0
        return self._make(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        if isinstance(other, QuadExt):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of a quadratic irrational by zero")
            return self._make(self.a / other, self.b / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return (self.a, self.b, self.D) == (other.a, other.b, other.D)
        if isinstance(other, (int, Fraction)):
            return False  # b != 0 by construction
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def sign(self) -> int:
        return qe_sign(self)

    def __str__(self):
        if self.a == 0:
            return f"{self.b}*sqrt({self.D})"
        op = "+" if self.b > 0 else "-"
        return f"({self.a} {op} {abs(self.b)}*sqrt({self.D}))"


Scalar = Union[Fraction, QuadExt]


def quad(a, b, D) -> Scalar:
    """Normalized a + b*sqrt(D) for a rational radicand D >= 0."""
    a, b, D = as_rat(a), as_rat(b), as_rat(D)
    if D < 0:
        raise ValueError(f"negative radicand {D}")
    if b == 0 or D == 0:
        return a
    root = rat_sqrt(D)
    if root is not None:
        return a + b * root
    # sqrt(p/q) = sqrt(p*q)/q, then pull squares out of p*q
    k, m = _squarefree_split(D.numerator * D.denominator)
    return QuadExt(a, b * Fraction(k, D.denominator), m)


def sqrt_of(D) -> Scalar:
    """sqrt(D) for rational D >= 0, exact."""
    return quad(0, 1, D)


def qe_sign(x: Scalar) -> int:
    """Exact sign of a rational or of a + b*sqrt(D)."""
    if not isinstance(x, QuadExt):
        x = as_rat(x)
        return (x > 0) - (x < 0)
    a, b = x.a, x.b
    sa, sb = (a > 0) - (a < 0), (b > 0) - (b < 0)
    if sa == 0:
        return sb
    if sa == sb:
        return sa
    # opposite signs: compare a^2 with b^2 D
    diff = a * a - b * b * x.D
    return sa if diff > 0 else -sa


def qe_arith(x: Scalar, y: Optional[Scalar], op: str) -> Scalar:
    """Dispatch add/mul/inv/neg; kept for callers that pick the op at runtime."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    if op == "inv":
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return x.inverse() if isinstance(x, QuadExt) else 1 / as_rat(x)
    raise ValueError(f"unknown operation {op!r}")


def radicand(values: Iterable) -> Optional[int]:
    """The common radicand of a collection of scalars, None if all rational."""
    found = None
    for v in values:
        if isinstance(v, QuadExt):
            if found is not None and found != v.D:
                raise MismatchedRadicand(f"sqrt({found}) and sqrt({v.D}) in one computation")
            found = v.D
    return found


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials
# ---------------------------------------------------------------------------

Monomial = Tuple[int, ...]


class MPoly:
    """Sparse polynomial over Q in variables a1..a_nvars.

    Terms map exponent tuples (length nvars) to nonzero Fractions. Instances
    are treated as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[Dict[Monomial, Fraction]] = None):
        self.nvars = nvars
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff != 0:
                    self.terms[tuple(mono)] = Fraction(coeff)

    @classmethod
    def constant(cls, nvars: int, value) -> "MPoly":
        return cls(nvars, {(0,) * nvars: as_rat(value)})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MPoly":
        """The variable a_{index+1}."""
        mono = [0] * nvars
        mono[index] = 1
        return cls(nvars, {tuple(mono): Fraction(1)})

    # -- coercion ----------------------------------------------------------

    def _lift(self, other) -> Optional["MPoly"]:
        if isinstance(other, MPoly):
            if other.nvars == self.nvars:
                return other
            n = max(self.nvars, other.nvars)
            return other._padded(n)
        if isinstance(other, (int, Fraction)):
            return MPoly.constant(self.nvars, other)
        return None

    def _padded(self, n: int) -> "MPoly":
        pad = (0,) * (n - self.nvars)
        return MPoly(n, {m + pad: c for m, c in self.terms.items()})

    def _aligned(self, other) -> Tuple["MPoly", "MPoly"]:
        other = self._lift(other)
        if other is None:
            raise TypeError
        n = max(self.nvars, other.nvars)
        left = self if self.nvars == n else self._padded(n)
        right = other if other.nvars == n else other._padded(n)
        return left, right

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        try:
            left, right = self._aligned(other)
        except TypeError:
            return NotImplemented
        terms = dict(left.terms)
        for m, c in right.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        out = MPoly(left.nvars)
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = MPoly(self.nvars)
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        try:
            left, right = self._aligned(other)
        except TypeError:
            return NotImplemented
        return left + (-right)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return MPoly(self.nvars)
            out = MPoly(self.nvars)
            out.terms = {m: c * other for m, c in self.terms.items()}
            return out
        try:
            left, right = self._aligned(other)
        except TypeError:
            return NotImplemented
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in left.terms.items():
            for m2, c2 in right.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                s = terms.get(m, 0) + c1 * c2
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        out = MPoly(left.nvars)
        out.terms = terms
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        result = MPoly.constant(self.nvars, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if other.nvars != self.nvars:
            left, right = self._aligned(other)
            return left.terms == right.terms
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def leading(self) -> Tuple[Monomial, Fraction]:
        """Leading term in lex order with a1 > a2 > ..."""
        mono = max(self.terms)
        return mono, self.terms[mono]

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            term = coeff
            for x, e in zip(point, mono):
                if e:
                    term *= Fraction(x) ** e
            total += term
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, reverse=True):
            coeff = self.terms[mono]
            factors = []
            for i, e in enumerate(mono):
                if e == 1:
                    factors.append(f"a{i + 1}")
                elif e > 1:
                    factors.append(f"a{i + 1}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{coeff}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def poly_perfect_square(p: MPoly) -> Optional[Tuple[Fraction, MPoly]]:
    """Return (c, q) with p == c*q**2 and c > 0, or None.

    Square root taken term by term in lex order (a1 first), which is the
    univariate square root in the main variable with polynomial coefficients.
    The zero polynomial is c = 1, q = 0.
    """
    if p.is_zero():
        return Fraction(1), MPoly(p.nvars)
    lead_mono, c = p.leading()
    if c <= 0:
        return None
    if any(e % 2 for e in lead_mono):
        return None
    target = p * (1 / c)
    half_degree = p.degree() // 2
    q_lead = tuple(e // 2 for e in lead_mono)
    q = MPoly(p.nvars, {q_lead: Fraction(1)})
    remainder = target - q * q
    last = q_lead
    while not remainder.is_zero():
        mono, coeff = remainder.leading()
        step = tuple(x - y for x, y in zip(mono, q_lead))
        if min(step) < 0 or sum(step) > half_degree or step >= last:
            return None
        term = MPoly(p.nvars, {step: coeff / 2})
        remainder = remainder - 2 * q * term - term * term
        q = q + term
        last = step
    return c, q


# ---------------------------------------------------------------------------
# Exact linear algebra on lists of rows
# ---------------------------------------------------------------------------

def identity(n: int) -> Mat:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Mat:
    return [[Fraction(0)] * cols for _ in range(rows)]


def transpose(m: Mat) -> Mat:
    return [list(col) for col in zip(*m)] if m else []


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def mat_vec(a: Mat, v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def mat_scale(a: Mat, s) -> Mat:
    return [[x * s for x in row] for row in a]


def mat_add(a: Mat, b: Mat) -> Mat:
    return [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(a, b)]


def trace(a: Mat):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def rref(m: Mat) -> Tuple[Mat, List[int]]:
    """Reduced row echelon form and pivot columns (increasing)."""
    rows = [list(r) for r in m]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(m: Mat) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Mat, ncols: Optional[int] = None) -> List[list]:
    """Basis of {x : m x = 0}; one vector per free column, with a 1 there."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    reduced, pivots = rref(m) if m else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def det(m: Mat):
    """Determinant by Gaussian elimination."""
    n = len(m)
    rows = [list(r) for r in m]
    result = Fraction(1)
    for col in range(n):
        pivot = next((i for i in range(col, n) if rows[i][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            result = -result
        p = rows[col][col]
        result = result * p
        for i in range(col + 1, n):
            if rows[i][col] != 0:
                f = rows[i][col] / p
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    return result


def is_symmetric(m: Mat) -> bool:
    n = len(m)
    return all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


def is_positive_definite(m: Mat) -> bool:
    """Sylvester's criterion with exact signs."""
    if not is_symmetric(m):
        raise NotSymmetric("positive definiteness needs a symmetric matrix")
    n = len(m)
    for k in range(1, n + 1):
        minor = det([row[:k] for row in m[:k]])
        if qe_sign(minor) <= 0:
            return False
    return True
