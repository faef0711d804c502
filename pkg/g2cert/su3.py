#!/usr/bin/env python3
"""Linear SU(3)-structures on a 6-dimensional space.

A pair (omega, psi_minus) of a 2-form and a 3-form defines an SU(3)-structure
when omega is nondegenerate, the quartic invariant lambda(psi_minus) is
negative, omega ^ psi_minus = 0 and the induced metric is positive. All
quantities are relative to the coframe volume e^{123456}; orientation follows
the sign of omega^3.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from g2cert.errors import DimensionMismatch, NonNegativeLambda
from g2cert.exact_core import (
    Mat,
    is_positive_definite,
    mat_mul,
    mat_scale,
    qe_sign,
    sqrt_of,
    trace,
)
from g2cert.exterior import (
    Multivector,
    basis_vector,
    interior,
    one_form,
    pair,
    substitute,
    top_coefficient,
    wedge,
)

logger = logging.getLogger(__name__)

DIM = 6


def _require_six(*forms: Multivector) -> None:
    for f in forms:
        if f.n != DIM:
            raise DimensionMismatch(f"SU(3) data lives on 6 generators, got {f.n}")


def k_map(tau: Multivector, v) -> Multivector:
    """iota_v tau ^ tau."""
    _require_six(tau)
    return wedge(interior(v, tau), tau)


def K_matrix(tau: Multivector) -> Mat:
    """kappa[l][m] = coefficient of e^{1..6} in e^l ^ k_map(tau, e_m)."""
    _require_six(tau)
    columns = []
    for m in range(1, DIM + 1):
        k = k_map(tau, basis_vector(DIM, m))
        columns.append([top_coefficient(wedge(Multivector.generator(DIM, l), k)) for l in range(1, DIM + 1)])
    return [[columns[m][l] for m in range(DIM)] for l in range(DIM)]


def lambda_invariant(tau: Multivector):
    """Hitchin's quartic invariant (1/6) tr(K^2), relative to (e^{1..6})^2.

    Works over any coefficient ring, so a generic 3-form with MPoly
    coefficients yields the quartic polynomial.
    """
    K = K_matrix(tau)
    return trace(mat_mul(K, K)) / 6


def orientation_sign(omega: Multivector) -> int:
    """Sign of omega^3 against e^{1..6}; 0 when omega is degenerate."""
    _require_six(omega)
    cube = wedge(wedge(omega, omega), omega)
    return qe_sign(top_coefficient(cube))


def hhat_matrix(omega: Multivector, psi_minus: Multivector, K: Mat | None = None) -> Mat:
    """Symmetrized H[i][j] = s/2 (omega(K e_i, e_j) + omega(K e_j, e_i)).

    A positive multiple of the metric h(x, y) = omega(Jx, y) with J = K/sqrt|lambda|.
    """
    _require_six(omega, psi_minus)
    if K is None:
        K = K_matrix(psi_minus)
    s = orientation_sign(omega) or 1
    images = [tuple(K[l][m] for l in range(DIM)) for m in range(DIM)]
    units = [basis_vector(DIM, i) for i in range(1, DIM + 1)]
    H = [[Fraction(0)] * DIM for _ in range(DIM)]
    for i in range(DIM):
        for j in range(i, DIM):
            value = (pair(omega, images[i], units[j]) + pair(omega, images[j], units[i])) / 2
            if s < 0:
                value = -value
            H[i][j] = H[j][i] = value
    return H


def K_pullback(psi: Multivector, K: Mat) -> Multivector:
    """K* applied slotwise: K*(e^l) = sum_m kappa[l][m] e^m."""
    images = [one_form(DIM, K[l]) for l in range(DIM)]
    return substitute(psi, images)


def psi_plus(omega: Multivector, psi_minus: Multivector, K: Mat | None = None):
    """Unit psi_plus = -s |lambda|^(-3/2) K* psi_minus, exact over Q(sqrt|lambda|).

    This is J* psi_minus for J = K/sqrt|lambda|. validate_su3 rescales it so
    that psi_minus ^ psi_plus = 2/3 omega^3.
    """
    _require_six(omega, psi_minus)
    if K is None:
        K = K_matrix(psi_minus)
    lam = trace(mat_mul(K, K)) / 6
    if lam >= 0:
        raise NonNegativeLambda(f"lambda(psi_minus) = {lam} is not negative")
    s = orientation_sign(omega) or 1
    magnitude = -lam
    factor = Fraction(-s) / (magnitude * sqrt_of(magnitude))
    return K_pullback(psi_minus, K).scale(factor)


@dataclass(frozen=True)
class SU3Data:
    """A validated SU(3)-structure.

    psi_plus = -c/(3 lambda^2) K* psi_minus, for c the e^{1..6} coefficient
    of omega^3, is rational and satisfies psi_minus ^ psi_plus = 2/3 omega^3.
    scale is r = 3 sqrt|lambda| / |c|, the positive factor with
    unit psi_plus = r psi_plus; it is 1 for the standard pair.
    """

    omega: Multivector
    psi_minus: Multivector
    lambda_num: Fraction
    K: tuple
    hhat: tuple
    psi_plus: Multivector
    orientation: int
    scale: object = Fraction(1)

    def metric(self) -> Mat:
        """h = |lambda|^(-1/2) H."""
        scale = 1 / sqrt_of(-self.lambda_num)
        return mat_scale([list(r) for r in self.hhat], scale)


@dataclass(frozen=True)
class SU3Failure:
    """First violated SU(3) condition."""

    condition: str
    detail: str = ""

    def __bool__(self):
        return False


SU3_CONDITIONS = (
    "omega_nondegenerate",
    "lambda_negative",
    "omega_psi_compatible",
    "metric_positive",
    "normalized",
    "omega_psi_plus",
)


def validate_su3(omega: Multivector, psi_minus: Multivector) -> SU3Data | SU3Failure:
    """Check every SU(3) condition in order and report the first failure."""
    _require_six(omega, psi_minus)
    s = orientation_sign(omega)
    if s == 0:
        return SU3Failure("omega_nondegenerate", "omega^3 = 0")
    K = K_matrix(psi_minus)
    lam = trace(mat_mul(K, K)) / 6
    if lam >= 0:
        return SU3Failure("lambda_negative", f"lambda = {lam}")
    if not wedge(omega, psi_minus).is_zero():
        return SU3Failure("omega_psi_compatible", "omega ^ psi_minus != 0")
    H = hhat_matrix(omega, psi_minus, K)
    if not is_positive_definite(H):
        return SU3Failure("metric_positive", "induced metric is not positive definite")
    cube = wedge(wedge(omega, omega), omega)
    volume = top_coefficient(cube)
    # psi_minus ^ K* psi_minus = -2 lambda^2 e^123456
    plus = K_pullback(psi_minus, K).scale(-Fraction(volume) / (3 * lam * lam))
    if wedge(psi_minus, plus) != cube.scale(Fraction(2, 3)):
        return SU3Failure("normalized", "psi_minus ^ psi_plus != 2/3 omega^3")
    ratio = 3 * sqrt_of(-lam) / abs(volume)
    if not wedge(omega, plus).is_zero():
        return SU3Failure("omega_psi_plus", "omega ^ psi_plus != 0")
    logger.debug("SU(3) data valid, lambda = %s", lam)
    return SU3Data(
        omega=omega,
        psi_minus=psi_minus,
        lambda_num=lam,
        K=tuple(tuple(row) for row in K),
        hhat=tuple(tuple(row) for row in H),
        psi_plus=plus,
        orientation=s,
        scale=ratio,
    )


def lambda_volume_ratio(omega: Multivector, lambda_num: Fraction) -> Fraction | None:
    """lambda / (-4 (c/6)^2) for c the e^{1..6} coefficient of omega^3.

    Equal to 1 for pairs normalized like the standard structure; reported, not
    enforced.
    """
    c = top_coefficient(wedge(wedge(omega, omega), omega))
    if c == 0:
        return None
    return Fraction(lambda_num) / (-4 * (Fraction(c) / 6) ** 2)
