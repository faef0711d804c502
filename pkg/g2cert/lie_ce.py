#!/usr/bin/env python3
"""Nilpotent Lie algebras given by Chevalley-Eilenberg structure equations.

An algebra is stored through its differential on the coframe, d e^i in
Lambda^2. The salamon shorthand "(0,0,0,0,12,23,34)" means d e^5 = e^12,
d e^6 = e^23 and d e^7 = e^34; brackets are dual with the sign
[e_j, e_k] = -sum_i c^i_jk e_i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from g2cert.errors import BadSpec, DimensionMismatch, JacobiViolation, NotCentral
from g2cert.exact_core import kernel_basis, rref, transpose
from g2cert.exterior import (
    Index,
    Multivector,
    basis_vector,
    format_form,
    from_coordinates,
    interior,
    monomials,
    pair,
    reindex,
    substitute,
    to_coordinates,
    wedge,
)

logger = logging.getLogger(__name__)

SUPPORTED_DIMENSIONS = (6, 7)


@dataclass(frozen=True)
class Subspace:
    """Span of k-forms (or of vectors when kind == "vector") in canonical RREF.

    Rows are coordinates against ``monomials(n, degree)``; for vectors the
    degree is 1 and coordinates are the components.
    """

    n: int
    degree: int
    rows: tuple[tuple, ...]
    pivots: tuple[int, ...]
    kind: str = "form"

    @classmethod
    def span(cls, n: int, degree: int, elements: Sequence, kind: str = "form") -> "Subspace":
        coords = []
        for el in elements:
            coords.append(list(to_coordinates(el, degree)) if isinstance(el, Multivector) else list(el))
        coords = [c for c in coords if any(x != 0 for x in c)]
        if not coords:
            return cls(n, degree, (), (), kind)
        reduced, pivots = rref(coords)
        rows = tuple(tuple(r) for r in reduced[: len(pivots)])
        return cls(n, degree, rows, tuple(pivots), kind)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def forms(self) -> list[Multivector]:
        return [from_coordinates(self.n, self.degree, row) for row in self.rows]

    def vectors(self) -> list[tuple]:
        return [tuple(row) for row in self.rows]

    def reduce(self, element) -> list:
        """Remainder of element after elimination against the basis."""
        v = list(to_coordinates(element, self.degree)) if isinstance(element, Multivector) else list(element)
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                f = v[p]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def contains(self, element) -> bool:
        if isinstance(element, Multivector) and element.is_zero():
            return True
        return all(x == 0 for x in self.reduce(element))

    __contains__ = contains

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.rows)

    def describe(self) -> str:
        if self.kind == "vector":
            names = []
            for row in self.rows:
                names.append(format_form(from_coordinates(self.n, 1, row)).replace("e", "e_"))
            return "<" + ", ".join(names) + ">"
        return "<" + ", ".join(format_form(f) for f in self.forms()) + ">"


class NilpotentLieAlgebra:
    """Lie algebra of dimension n with d e^i = d1[i-1]."""

    def __init__(self, name: str, d1: Sequence[Multivector]):
        self.name = name
        self.n = len(d1)
        self.d1: tuple[Multivector, ...] = tuple(d1)
        self._monomial_d: dict[Index, Multivector] = {}
        self._closed: dict[int, Subspace] = {}
        self._exact: dict[int, Subspace] = {}

    def __repr__(self):
        return f"NilpotentLieAlgebra({self.name!r}, n={self.n})"

    def structure_text(self) -> str:
        slots = []
        for form in self.d1:
            text = format_form(form)
            slots.append(text.replace("e", "").replace(" ", ""))
        return "(" + ",".join(slots) + ")"

    def d_monomial(self, idx: Index) -> Multivector:
        if idx not in self._monomial_d:
            result = Multivector(self.n)
            for p, i in enumerate(idx):
                if self.d1[i - 1].is_zero():
                    continue
                left = Multivector.monomial(self.n, idx[:p])
                right = Multivector.monomial(self.n, idx[p + 1:])
                term = wedge(wedge(left, self.d1[i - 1]), right)
                result = result + (term if p % 2 == 0 else -term)
            self._monomial_d[idx] = result
        return self._monomial_d[idx]


def differential(g: NilpotentLieAlgebra, a: Multivector) -> Multivector:
    """Chevalley-Eilenberg differential, the antiderivation extending d1."""
    if a.n != g.n:
        raise DimensionMismatch(f"{g.name} has dimension {g.n}, form has {a.n} generators")
    result = Multivector(g.n)
    for idx, c in a.terms.items():
        dm = g.d_monomial(idx)
        if not dm.is_zero():
            result = result + dm.scale(c)
    return result


def check_jacobi(g: NilpotentLieAlgebra) -> None:
    for i, form in enumerate(g.d1, start=1):
        residual = differential(g, form)
        if not residual.is_zero():
            raise JacobiViolation(i, format_form(residual))


def build_algebra(d1: Sequence[Multivector], name: str = "") -> NilpotentLieAlgebra:
    """Validate structure equations and build the algebra."""
    n = len(d1)
    if n not in SUPPORTED_DIMENSIONS:
        raise BadSpec(f"{name or 'algebra'}: dimension {n} not in {SUPPORTED_DIMENSIONS}")
    for i, form in enumerate(d1, start=1):
        if form.n != n:
            raise BadSpec(f"{name}: d e^{i} lives on {form.n} generators, expected {n}")
        if form.degrees() - {2}:
            raise BadSpec(f"{name}: d e^{i} = {format_form(form)} is not a 2-form")
        for idx, c in form.terms.items():
            if not isinstance(c, Fraction):
                raise BadSpec(f"{name}: d e^{i} has non-rational coefficient {c}")
            if max(idx) >= i:
                raise BadSpec(f"{name}: d e^{i} uses e^{max(idx)}, not a nilpotent basis")
    g = NilpotentLieAlgebra(name, d1)
    check_jacobi(g)
    return g


def _differential_matrix(g: NilpotentLieAlgebra, k: int) -> list[list]:
    """Matrix of d: Lambda^k -> Lambda^(k+1), one column per k-monomial."""
    columns = [to_coordinates(g.d_monomial(idx), k + 1) for idx in monomials(g.n, k)]
    if k + 1 > g.n or not columns:
        return []
    return transpose(columns)


def closed_forms(g: NilpotentLieAlgebra, k: int) -> Subspace:
    if k not in g._closed:
        ncols = len(monomials(g.n, k))
        basis = kernel_basis(_differential_matrix(g, k), ncols)
        g._closed[k] = Subspace.span(g.n, k, basis)
    return g._closed[k]


def exact_forms(g: NilpotentLieAlgebra, k: int) -> Subspace:
    if k not in g._exact:
        if k == 0:
            images = []
        else:
            images = [g.d_monomial(idx) for idx in monomials(g.n, k - 1)]
        g._exact[k] = Subspace.span(g.n, k, images)
    return g._exact[k]


def cohomology_dim(g: NilpotentLieAlgebra, k: int) -> int:
    return closed_forms(g, k).dim - exact_forms(g, k).dim


def cohomology_representatives(g: NilpotentLieAlgebra, k: int) -> list[Multivector]:
    """Closed k-forms whose classes form a basis of H^k."""
    exact = exact_forms(g, k)
    reps = []
    current = exact
    for form in closed_forms(g, k).forms():
        if not current.contains(form):
            reps.append(form)
            current = Subspace.span(g.n, k, [*current.forms(), form])
    return reps


def betti_numbers(g: NilpotentLieAlgebra) -> list[int]:
    return [cohomology_dim(g, k) for k in range(g.n + 1)]


def is_central(g: NilpotentLieAlgebra, x: Sequence) -> bool:
    return all(interior(x, form).is_zero() for form in g.d1)


def center(g: NilpotentLieAlgebra) -> Subspace:
    """{X : iota_X d e^i = 0 for all i}, as vectors."""
    rows = []
    for form in g.d1:
        contractions = [to_coordinates(interior(basis_vector(g.n, j), form), 1) for j in range(1, g.n + 1)]
        rows.extend(transpose(contractions))
    basis = kernel_basis(rows, g.n)
    return Subspace.span(g.n, 1, basis, kind="vector")


def central_basis_indices(g: NilpotentLieAlgebra) -> list[int]:
    """Indices j with e_j central."""
    return [j for j in range(1, g.n + 1) if is_central(g, basis_vector(g.n, j))]


def bracket(g: NilpotentLieAlgebra, u: Sequence, v: Sequence) -> tuple:
    return tuple(-pair(form, u, v) for form in g.d1)


def nilpotency_step(g: NilpotentLieAlgebra) -> int:
    """Length of the lower central series; abelian algebras have step 1."""
    basis = [basis_vector(g.n, j) for j in range(1, g.n + 1)]
    current = basis
    step = 0
    while current:
        step += 1
        images = [bracket(g, x, y) for x in basis for y in current]
        nxt = Subspace.span(g.n, 1, images, kind="vector")
        current = nxt.vectors()
        if step > g.n:
            raise BadSpec(f"{g.name}: lower central series does not terminate")
    return step


@dataclass(frozen=True)
class QuotientMap:
    """Transport of forms between g and g/<X> for central X.

    The annihilator of X has the basis f^j = e^i - (X_i / X_k) e^k, where k is
    the last index with X_k != 0 and i runs over the other indices in order.
    A form annihilated by X has the same f-coordinates as the e-coordinates of
    its k-free terms, so pushing forward is dropping terms with e^k.
    """

    n: int
    X: tuple
    pivot: int
    kept: tuple[int, ...]
    mapping: dict = field(hash=False, compare=False)

    @classmethod
    def for_vector(cls, n: int, X: Sequence) -> "QuotientMap":
        X = tuple(Fraction(x) if isinstance(x, int) else x for x in X)
        nonzero = [i for i in range(1, n + 1) if X[i - 1] != 0]
        if not nonzero:
            raise NotCentral("the zero vector does not define a quotient")
        pivot = nonzero[-1]
        kept = tuple(i for i in range(1, n + 1) if i != pivot)
        mapping = {old: new for new, old in enumerate(kept, start=1)}
        return cls(n, X, pivot, kept, mapping)

    def push(self, a: Multivector) -> Multivector:
        return reindex(a, self.mapping, self.n - 1)

    def coframe_images(self) -> list[Multivector]:
        xk = self.X[self.pivot - 1]
        images = []
        for i in self.kept:
            image = Multivector.generator(self.n, i)
            ratio = self.X[i - 1] / xk
            if ratio != 0:
                image = image - Multivector.generator(self.n, self.pivot).scale(ratio)
            images.append(image)
        return images

    def lift(self, a: Multivector) -> Multivector:
        return substitute(a, self.coframe_images())

    def projection_matrix(self) -> list[list]:
        """Rows: f^j in e-coordinates."""
        return [to_coordinates(img, 1) for img in self.coframe_images()]


def quotient_map(g: NilpotentLieAlgebra, X: Sequence) -> QuotientMap:
    if len(X) != g.n:
        raise DimensionMismatch(f"vector of length {len(X)} for {g.name} of dimension {g.n}")
    if not any(x != 0 for x in X) or not is_central(g, X):
        raise NotCentral(f"{tuple(str(x) for x in X)} is not a nonzero central vector of {g.name}")
    return QuotientMap.for_vector(g.n, X)


def quotient_by_central(g: NilpotentLieAlgebra, X: Sequence) -> NilpotentLieAlgebra:
    """The algebra g/<X> on the annihilator of X."""
    qmap = quotient_map(g, X)
    xk = qmap.X[qmap.pivot - 1]
    dk = g.d1[qmap.pivot - 1]
    d1 = []
    for i in qmap.kept:
        form = g.d1[i - 1]
        ratio = qmap.X[i - 1] / xk
        if ratio != 0:
            form = form - dk.scale(ratio)
        d1.append(qmap.push(form))
    logger.debug("quotient of %s by e_%d direction, kept coframe %s", g.name, qmap.pivot, qmap.kept)
    h = NilpotentLieAlgebra(f"{g.name}/X", d1)
    check_jacobi(h)
    return h
