#!/usr/bin/env python3
"""Obstructions to coclosed G2-structures.

Three certificate types, each checked exactly:

- contraction: central Y and a vector X such that iota_X iota_Y kappa lies in
  a space U of 2-forms with Lambda^2 U = 0, for every closed 4-form kappa;
- ideal: two closed 1-forms a, b such that every closed 4-form lies in the
  ideal they generate (z ^ a ^ b = 0);
- lambda positivity: on h = g/<e_k>, a splitting Lambda^5 = W + <w> with
  d(Lambda^4) and tau ^ d e^j inside W, such that lambda restricted to
  H = {a : sum a z ^ d e^k in W} is a nonnegative multiple of a square.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import partial
from itertools import combinations
from typing import Callable, Iterable, Sequence

from g2cert.config import Settings
from g2cert.errors import BadCertificate
from g2cert.exact_core import MPoly, kernel_basis, poly_perfect_square
from g2cert.exterior import (
    Multivector,
    basis_vector,
    format_form,
    interior,
    monomials,
    to_coordinates,
    wedge,
)
from g2cert.lie_ce import (
    NilpotentLieAlgebra,
    Subspace,
    central_basis_indices,
    closed_forms,
    differential,
    exact_forms,
    is_central,
    quotient_by_central,
    quotient_map,
)
from g2cert.su3 import lambda_invariant

logger = logging.getLogger(__name__)


class Method(str, Enum):
    CONTRACTION = "contraction"
    IDEAL = "ideal"
    LAMBDA = "lambda"


class LambdaVerdict(str, Enum):
    PROVEN = "proven"
    INCONCLUSIVE = "inconclusive"
    FAILS = "fails"


def _vector_name(v: Sequence) -> str:
    return format_form(Multivector(len(v), {(i + 1,): c for i, c in enumerate(v)}))


@dataclass(frozen=True)
class ContractionCertificate:
    X: tuple
    Y: tuple
    U: Subspace

    method = Method.CONTRACTION

    def describe(self) -> str:
        return f"X={_vector_name(self.X)}, Y={_vector_name(self.Y)}, U={self.U.describe()}"


@dataclass(frozen=True)
class IdealCertificate:
    a: Multivector
    b: Multivector

    method = Method.IDEAL

    def describe(self) -> str:
        return f"ideal generated by ({format_form(self.a)}, {format_form(self.b)})"


@dataclass(frozen=True)
class LambdaCertificate:
    X: tuple
    w: tuple
    W: Subspace
    verdict: LambdaVerdict
    coefficient: Fraction | None = None
    square_root: MPoly | None = None
    polynomial: MPoly | None = None
    reason: str = ""

    method = Method.LAMBDA

    @property
    def proven(self) -> bool:
        return self.verdict is LambdaVerdict.PROVEN

    def describe(self) -> str:
        w = ", ".join(format_form(f) for f in self.w)
        text = f"X={_vector_name(self.X)}, w=<{w}>, verdict {self.verdict.value}"
        if self.proven and self.square_root is not None:
            text += f", lambda|H = {self.coefficient}*({self.square_root})^2"
        return text


ObstructionCertificate = ContractionCertificate | IdealCertificate | LambdaCertificate


def _first_hit(func: Callable, items: Iterable, jobs: int = 1):
    """First non-None func(item) in item order; parallel when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        for item in items:
            result = func(item)
            if result is not None:
                return result
        return None
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for result in pool.map(func, items, chunksize=max(1, len(items) // (4 * jobs))):
            if result is not None:
                return result
    return None


def _square_free(U: Subspace) -> bool:
    """Lambda^2 U = 0: all pairwise wedges, squares included, vanish."""
    basis = U.forms()
    for i, u in enumerate(basis):
        for v in basis[i:]:
            if not wedge(u, v).is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# contraction
# ---------------------------------------------------------------------------

def check_contraction(g: NilpotentLieAlgebra, X: Sequence, Y: Sequence, U: Subspace) -> bool:
    """True iff iota_X iota_Y kappa lies in U for every closed 4-form kappa."""
    if len(X) != g.n or len(Y) != g.n or U.n != g.n:
        raise BadCertificate(f"certificate dimensions do not match {g.name}")
    if Subspace.span(g.n, 1, [X, Y], kind="vector").dim != 2:
        raise BadCertificate("X and Y must be linearly independent")
    if not is_central(g, Y):
        raise BadCertificate("Y must be central")
    if U.degree != 2:
        raise BadCertificate("U must be a space of 2-forms")
    if not _square_free(U):
        raise BadCertificate("Lambda^2 U != 0")
    for kappa in closed_forms(g, 4).forms():
        if not U.contains(interior(X, interior(Y, kappa))):
            return False
    return True


def _contraction_candidate(g: NilpotentLieAlgebra, max_u_dim: int, pair: tuple[int, int]):
    x, y = pair
    X, Y = basis_vector(g.n, x), basis_vector(g.n, y)
    images = [interior(X, interior(Y, kappa)) for kappa in closed_forms(g, 4).forms()]
    S = Subspace.span(g.n, 2, images)
    if S.dim > max_u_dim or not _square_free(S):
        return None
    return ContractionCertificate(X, Y, S)


def search_contraction(g: NilpotentLieAlgebra, settings: Settings | None = None, jobs: int = 1):
    """First (X, Y) over basis vectors, Y central, whose contraction span is square free."""
    settings = settings or Settings()
    pairs = [(x, y) for x in range(1, g.n + 1) for y in central_basis_indices(g) if x != y]
    closed_forms(g, 4)  # computed once before the pool copies g
    found = _first_hit(partial(_contraction_candidate, g, settings.max_u_dim), pairs, jobs)
    if found:
        logger.info("%s: contraction certificate %s", g.name, found.describe())
    return found


# ---------------------------------------------------------------------------
# ideal
# ---------------------------------------------------------------------------

def check_ideal(g: NilpotentLieAlgebra, a: Multivector, b: Multivector) -> bool:
    """True iff z ^ a ^ b = 0 for every closed 4-form z."""
    for form in (a, b):
        if form.n != g.n or form.degrees() - {1}:
            raise BadCertificate(f"{format_form(form)} is not a 1-form on {g.name}")
        if not differential(g, form).is_zero():
            raise BadCertificate(f"{format_form(form)} is not closed")
    ab = wedge(a, b)
    if ab.is_zero():
        raise BadCertificate("the two 1-forms are linearly dependent")
    return all(wedge(z, ab).is_zero() for z in closed_forms(g, 4).forms())


def search_ideal(g: NilpotentLieAlgebra, settings: Settings | None = None, jobs: int = 1):
    """Pairs of closed coframe elements, (e^1, e^2) first."""
    closed = [i for i in range(1, g.n + 1) if g.d1[i - 1].is_zero()]
    for i, j in combinations(closed, 2):
        a, b = Multivector.generator(g.n, i), Multivector.generator(g.n, j)
        if check_ideal(g, a, b):
            cert = IdealCertificate(a, b)
            logger.info("%s: ideal certificate %s", g.name, cert.describe())
            return cert
    return None


# ---------------------------------------------------------------------------
# lambda positivity
# ---------------------------------------------------------------------------

def restricted_lambda_poly(
    h: NilpotentLieAlgebra,
    z: Sequence[Multivector],
    constraint: Sequence[Sequence] | None = None,
) -> MPoly:
    """lambda(sum a_alpha z_alpha) on the subspace spanned by the constraint vectors.

    Each constraint vector c_k gives the direction sum_alpha c_k[alpha] z_alpha
    with its own variable a_k; no constraint means the z themselves.
    """
    if constraint is None:
        constraint = [[Fraction(int(i == j)) for j in range(len(z))] for i in range(len(z))]
    m = len(constraint)
    tau = Multivector(h.n)
    for k, c in enumerate(constraint):
        direction = Multivector(h.n)
        for coeff, form in zip(c, z):
            if coeff != 0:
                direction = direction + form.scale(coeff)
        tau = tau + direction.scale(MPoly.variable(m, k))
    if m == 0 or tau.is_zero():
        return MPoly(max(m, 1))
    value = lambda_invariant(tau)
    return value if isinstance(value, MPoly) else MPoly.constant(m, value)


def _annihilator(W: Subspace, size: int) -> list[list]:
    return kernel_basis([list(r) for r in W.rows], size) if W.rows else [
        [Fraction(int(i == j)) for j in range(size)] for i in range(size)
    ]


def _sample_sign(poly: MPoly, settings: Settings) -> Fraction | None:
    """A negative value of poly at a seeded rational sample point, if any."""
    rng = random.Random(settings.seed)
    radius = max(1, settings.sample_radius)
    for _ in range(settings.lambda_samples):
        point = []
        for _ in range(poly.nvars):
            den = rng.randint(1, 3)
            point.append(Fraction(rng.randint(-radius * den, radius * den), den))
        value = poly.evaluate(point)
        if value < 0:
            logger.debug("lambda sample %s gives %s", point, value)
            return value
    return None


@dataclass
class _LambdaSetup:
    h: NilpotentLieAlgebra
    X: tuple
    pivot: int
    closed3: list
    exact5: Subspace
    tau_products: list
    constraint_forms: list


def _lambda_setup(g: NilpotentLieAlgebra, X: Sequence) -> _LambdaSetup:
    nonzero = [i for i, x in enumerate(X, start=1) if x != 0]
    if len(nonzero) != 1:
        raise BadCertificate("lambda positivity needs X to be a coordinate vector e_k")
    k = nonzero[0]
    if not is_central(g, X):
        raise BadCertificate(f"e_{k} is not central in {g.name}")
    h = quotient_by_central(g, X)
    de_k = quotient_map(g, X).push(g.d1[k - 1])
    closed3 = closed_forms(h, 3).forms()
    tau_products = [wedge(tau, de) for tau in closed3 for de in h.d1 if not de.is_zero()]
    constraint_forms = [wedge(z, de_k) for z in closed3]
    return _LambdaSetup(h, tuple(X), k, closed3, exact_forms(h, 5), tau_products, constraint_forms)


def _evaluate_lambda(setup: _LambdaSetup, w: Sequence[Multivector], W: Subspace, settings: Settings) -> LambdaCertificate:
    h = setup.h
    functionals = _annihilator(W, len(monomials(h.n, 5)))

    def outside(form: Multivector) -> bool:
        coords = to_coordinates(form, 5)
        return any(sum((f * c for f, c in zip(fn, coords)), Fraction(0)) != 0 for fn in functionals)

    def result(verdict, reason, **extra):
        return LambdaCertificate(setup.X, tuple(w), W, verdict, reason=reason, **extra)

    if not W.contains_subspace(setup.exact5):
        return result(LambdaVerdict.FAILS, "beta ^ d beta not in W for some 2-form beta")
    if any(outside(p) for p in setup.tau_products):
        return result(LambdaVerdict.FAILS, "tau ^ d e^j not in W for some closed tau")

    matrix = []
    for fn in functionals:
        matrix.append([
            sum((f * c for f, c in zip(fn, to_coordinates(p, 5))), Fraction(0))
            for p in setup.constraint_forms
        ])
    H = kernel_basis(matrix, len(setup.closed3)) if matrix else [
        [Fraction(int(i == j)) for j in range(len(setup.closed3))] for i in range(len(setup.closed3))
    ]
    poly = restricted_lambda_poly(h, setup.closed3, H)
    square = poly_perfect_square(poly)
    if square is not None:
        c, q = square
        return result(LambdaVerdict.PROVEN, "lambda|H is a positive multiple of a square",
                      coefficient=c, square_root=q, polynomial=poly)
    negative = _sample_sign(poly, settings)
    if negative is not None:
        return result(LambdaVerdict.FAILS, f"lambda takes the negative value {negative} on H", polynomial=poly)
    return result(LambdaVerdict.INCONCLUSIVE, "no negative sample and no square certificate", polynomial=poly)


def check_lambda_obstruction(
    g: NilpotentLieAlgebra,
    X: Sequence,
    w: Sequence[Multivector],
    W: Subspace,
    settings: Settings | None = None,
) -> LambdaCertificate:
    """Proven, Fails or Inconclusive for an explicit splitting Lambda^5 = W + <w>."""
    settings = settings or Settings()
    setup = _lambda_setup(g, X)
    n5 = len(monomials(setup.h.n, 5))
    if W.n != setup.h.n or W.degree != 5 or any(f.n != setup.h.n or f.degrees() - {5} for f in w):
        raise BadCertificate("w and W must be 5-forms on the quotient")
    if W.dim + len(w) != n5 or Subspace.span(setup.h.n, 5, [*W.forms(), *w]).dim != n5:
        raise BadCertificate("Lambda^5 is not the direct sum of W and <w>")
    return _evaluate_lambda(setup, w, W, settings)


def coordinate_splitting(n: int, w_monomials: Sequence[tuple]) -> tuple[list[Multivector], Subspace]:
    """<w> spanned by the given monomial 5-forms, W by the remaining ones."""
    w = [Multivector.monomial(n, idx) for idx in w_monomials]
    rest = [Multivector.monomial(n, idx) for idx in monomials(n, 5) if idx not in set(map(tuple, w_monomials))]
    return w, Subspace.span(n, 5, rest)


def _lambda_candidate(setup: _LambdaSetup, settings: Settings, w_monomials: tuple):
    w, W = coordinate_splitting(setup.h.n, w_monomials)
    cert = _evaluate_lambda(setup, w, W, settings)
    return cert if cert.proven else None


def search_lambda_obstruction(g: NilpotentLieAlgebra, settings: Settings | None = None, jobs: int = 1):
    """Spans of up to max_w_monomials monomial 5-forms, smallest first, lex order."""
    settings = settings or Settings()
    X = basis_vector(g.n, g.n)
    if not is_central(g, X):
        return None
    setup = _lambda_setup(g, X)
    blocked = set()
    for form in [*setup.exact5.forms(), *setup.tau_products]:
        blocked.update(form.terms)
    allowed = [idx for idx in monomials(setup.h.n, 5) if idx not in blocked]
    logger.debug("%s: monomial 5-forms available for w: %s", g.name, allowed)
    candidates = [
        combo
        for size in range(1, settings.max_w_monomials + 1)
        for combo in combinations(allowed, size)
    ]
    found = _first_hit(partial(_lambda_candidate, setup, settings), candidates, jobs)
    if found:
        logger.info("%s: lambda certificate %s", g.name, found.describe())
    return found


SEARCHES = {
    Method.CONTRACTION: search_contraction,
    Method.IDEAL: search_ideal,
    Method.LAMBDA: search_lambda_obstruction,
}


def search_obstruction(
    g: NilpotentLieAlgebra,
    method: Method | None = None,
    settings: Settings | None = None,
    jobs: int = 1,
):
    """Run one search, or all three in order when no method is given."""
    methods = [method] if method else list(Method)
    for m in methods:
        cert = SEARCHES[Method(m)](g, settings, jobs)
        if cert is not None:
            return cert
    return None


def verify_obstruction(g: NilpotentLieAlgebra, cert, settings: Settings | None = None) -> bool:
    """Re-check a stored or freshly found certificate from scratch."""
    if isinstance(cert, ContractionCertificate):
        return check_contraction(g, cert.X, cert.Y, cert.U)
    if isinstance(cert, IdealCertificate):
        return check_ideal(g, cert.a, cert.b)
    if isinstance(cert, LambdaCertificate):
        return check_lambda_obstruction(g, cert.X, cert.w, cert.W, settings).proven
    raise BadCertificate(f"unknown certificate type {type(cert).__name__}")
