"""Exterior algebra on n <= 8 degree-1 generators e^1..e^n.

Coefficients may be any exact scalar from exact_core (Fraction, QuadExt) or
an MPoly, which is how generic forms sum(a_i z_i) are represented.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from g2cert.errors import DimensionMismatch

logger = logging.getLogger(__name__)

Index = tuple[int, ...]
Vector = tuple  # components indexed 0..n-1, i.e. v[i-1] pairs with e^i


def _is_zero(c) -> bool:
    return c == 0


def merge_sign(left: Index, right: Index) -> int:
    """Sign of sorting left + right, or 0 when an index repeats."""
    if set(left) & set(right):
        return 0
    inversions = 0
    for i in left:
        for j in right:
            if i > j:
                inversions += 1
    return -1 if inversions % 2 else 1


class Multivector:
    """Sparse element of the exterior algebra on n generators."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[Index, object] | None = None):
        self.n = n
        self.terms: dict[Index, object] = {}
        if terms:
            for idx, c in terms.items():
                if not _is_zero(c):
                    self.terms[tuple(idx)] = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Multivector":
        return cls(n)

    @classmethod
    def scalar(cls, n: int, value) -> "Multivector":
        return cls(n, {(): value})

    @classmethod
    def monomial(cls, n: int, indices: Sequence[int], coeff=Fraction(1)) -> "Multivector":
        """coeff * e^{i1} ^ ... ^ e^{ik} for indices in any order."""
        for i in indices:
            if not 1 <= i <= n:
                raise DimensionMismatch(f"index {i} out of range 1..{n}")
        if len(set(indices)) != len(indices):
            return cls(n)
        order = sorted(indices)
        sign = 1
        seq = list(indices)
        for a in range(len(seq)):
            for b in range(a + 1, len(seq)):
                if seq[a] > seq[b]:
                    sign = -sign
        return cls(n, {tuple(order): coeff * sign})

    @classmethod
    def generator(cls, n: int, i: int) -> "Multivector":
        return cls.monomial(n, (i,))

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Multivector"):
        if other.n != self.n:
            raise DimensionMismatch(f"forms on {self.n} and {other.n} generators")

    def __add__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for idx, c in other.terms.items():
            s = terms[idx] + c if idx in terms else c
            if _is_zero(s):
                terms.pop(idx, None)
            else:
                terms[idx] = s
        out = Multivector(self.n)
        out.terms = terms
        return out

    def __neg__(self):
        out = Multivector(self.n)
        out.terms = {idx: -c for idx, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "Multivector":
        if _is_zero(s):
            return Multivector(self.n)
        return Multivector(self.n, {idx: c * s for idx, c in self.terms.items()})

    def __mul__(self, s):
        if isinstance(s, Multivector):
            return NotImplemented
        return self.scale(s)

    def __rmul__(self, s):
        if isinstance(s, Multivector):
            return NotImplemented
        return Multivector(self.n, {idx: s * c for idx, c in self.terms.items()})

    def __truediv__(self, s):
        return self.scale(1 / Fraction(s) if isinstance(s, int) else 1 / s)

    def wedge(self, other: "Multivector") -> "Multivector":
        return wedge(self, other)

    def __xor__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return wedge(self, other)

    # -- queries -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Multivector):
            return self.n == other.n and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {len(idx) for idx in self.terms}

    def degree(self) -> int:
        """Degree of a homogeneous form; -1 for zero."""
        degrees = self.degrees()
        if not degrees:
            return -1
        if len(degrees) > 1:
            raise ValueError(f"form of mixed degree {sorted(degrees)}")
        return degrees.pop()

    def support(self) -> set[int]:
        """Generator indices that occur in some term."""
        return {i for idx in self.terms for i in idx}

    def coefficients(self) -> Iterator:
        return iter(self.terms.values())

    def map_coefficients(self, f) -> "Multivector":
        return Multivector(self.n, {idx: f(c) for idx, c in self.terms.items()})

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"Multivector({self.n}, {format_form(self)!r})"


def wedge(a: Multivector, b: Multivector) -> Multivector:
    """Exterior product with Koszul signs."""
    if a.n != b.n:
        raise DimensionMismatch(f"forms on {a.n} and {b.n} generators")
    terms: dict[Index, object] = {}
    for i1, c1 in a.terms.items():
        for i2, c2 in b.terms.items():
            sign = merge_sign(i1, i2)
            if not sign:
                continue
            idx = tuple(sorted(i1 + i2))
            value = c1 * c2 if sign > 0 else -(c1 * c2)
            if idx in terms:
                value = terms[idx] + value
            terms[idx] = value
    return Multivector(a.n, terms)


def wedge_all(forms: Iterable[Multivector], n: int) -> Multivector:
    result = Multivector.scalar(n, Fraction(1))
    for f in forms:
        result = wedge(result, f)
    return result


def interior(v: Sequence, a: Multivector) -> Multivector:
    """Contraction of the first slot: iota_v e^{i1..ik} = sum_p (-1)^p v_{ip} e^{..ip-hat..}."""
    if len(v) != a.n:
        raise DimensionMismatch(f"vector of length {len(v)} against forms on {a.n} generators")
    terms: dict[Index, object] = {}
    for idx, c in a.terms.items():
        for p, i in enumerate(idx):
            vi = v[i - 1]
            if _is_zero(vi):
                continue
            rest = idx[:p] + idx[p + 1:]
            value = c * vi if p % 2 == 0 else -(c * vi)
            if rest in terms:
                value = terms[rest] + value
            terms[rest] = value
    return Multivector(a.n, terms)


def grade(a: Multivector, k: int) -> Multivector:
    return Multivector(a.n, {idx: c for idx, c in a.terms.items() if len(idx) == k})


def coefficient(a: Multivector, idx: Sequence[int]):
    return a.terms.get(tuple(idx), Fraction(0))


def top_coefficient(a: Multivector):
    """Coefficient of e^{1..n}."""
    return coefficient(a, tuple(range(1, a.n + 1)))


def basis_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(int(j == i)) for j in range(1, n + 1))


def one_form(n: int, components: Sequence) -> Multivector:
    return Multivector(n, {(i + 1,): c for i, c in enumerate(components)})


def evaluate_one_form(eta: Multivector, v: Sequence):
    """eta(v) for a 1-form eta."""
    return interior(v, eta).terms.get((), Fraction(0))


def pair(omega: Multivector, u: Sequence, v: Sequence):
    """omega(u, v) = iota_v iota_u omega for a 2-form."""
    return interior(v, interior(u, omega)).terms.get((), Fraction(0))


def monomials(n: int, k: int) -> list[Index]:
    """Strictly increasing index tuples of length k, in lex order."""
    return list(combinations(range(1, n + 1), k))


def to_coordinates(a: Multivector, k: int) -> list:
    return [a.terms.get(idx, Fraction(0)) for idx in monomials(a.n, k)]


def from_coordinates(n: int, k: int, coords: Sequence) -> Multivector:
    return Multivector(n, dict(zip(monomials(n, k), coords)))


def substitute(a: Multivector, images: Sequence[Multivector]) -> Multivector:
    """Pullback along the algebra map sending e^i to images[i-1]."""
    n = images[0].n if images else a.n
    out = Multivector(n)
    cache: dict[Index, Multivector] = {}
    for idx, c in a.terms.items():
        if idx not in cache:
            cache[idx] = wedge_all((images[i - 1] for i in idx), n)
        out = out + cache[idx].scale(c)
    return out


def reindex(a: Multivector, mapping: dict[int, int], n: int) -> Multivector:
    """Relabel generators; terms using an unmapped index are dropped."""
    terms = {}
    for idx, c in a.terms.items():
        if all(i in mapping for i in idx):
            new = tuple(mapping[i] for i in idx)
            # mapping is order preserving, no re-sorting needed
            terms[new] = c
    return Multivector(n, terms)


def _format_coefficient(c) -> str:
    text = str(c)
    if text.startswith("("):
        return text
    if any(ch in text for ch in "+- ") and not (text.startswith("-") and text[1:].replace("/", "").isdigit()):
        return f"({text})"
    return text


def format_form(a: Multivector) -> str:
    """Human form in table shorthand, e.g. 'e13 + e24 - 1/2*e57'; parseable back."""
    if not a.terms:
        return "0"
    parts = []
    for idx, c in sorted(a.terms.items(), key=lambda t: (len(t[0]), t[0])):
        name = "e" + "".join(str(i) for i in idx) if idx else ""
        if isinstance(c, Fraction) or isinstance(c, int):
            c = Fraction(c)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not name:
                body = str(mag)
            elif mag == 1:
                body = name
            else:
                body = f"{mag}*{name}"
        else:
            sign = "+"
            body = f"{_format_coefficient(c)}*{name}" if name else _format_coefficient(c)
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text
