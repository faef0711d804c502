#!/usr/bin/env python3
"""G2-structures on 7-dimensional nilpotent Lie algebras.

A certificate (omega, psi_minus, eta) together with a central vector X builds
the 3-form phi = omega ^ eta + psi_plus, where psi_plus comes from the SU(3)
structure induced on g/<X>. The purely coclosed test reduces to three exact
identities in Lambda(g*):

    d psi_minus = 0
    omega ^ d omega = psi_minus ^ d eta
    omega^2 ^ d eta = -2 psi_plus ^ d omega

psi_plus is normalized by psi_minus ^ psi_plus = 2/3 omega^3, which keeps it
rational. With that normalization phi is a positive multiple of the 3-form
built from (omega, psi_minus / sqrt r, sqrt r eta), r being SU3Data.scale,
so purity and conditions (1)-(3) are unaffected and the metric is
h + r eta (x) eta.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from g2cert.errors import CertificateInvariantViolation, NotPositiveDefinite
from g2cert.exact_core import (
    Mat,
    det,
    identity,
    is_positive_definite,
    mat_add,
    mat_mul,
    mat_scale,
    qe_sign,
    rref,
    sqrt_of,
    transpose,
)
from g2cert.exterior import (
    Multivector,
    basis_vector,
    evaluate_one_form,
    format_form,
    interior,
    monomials,
    to_coordinates,
    top_coefficient,
    wedge,
)
from g2cert.lie_ce import NilpotentLieAlgebra, differential, is_central, quotient_map
from g2cert.su3 import SU3Data, lambda_volume_ratio, validate_su3

logger = logging.getLogger(__name__)

DIM = 7

STANDARD_PHI = {
    (1, 2, 7): 1, (3, 4, 7): 1, (5, 6, 7): 1, (1, 3, 5): 1,
    (1, 4, 6): -1, (2, 3, 6): -1, (2, 4, 5): -1,
}
STANDARD_PHI_DUAL = {
    (1, 2, 3, 4): 1, (1, 2, 5, 6): 1, (1, 3, 6, 7): 1, (1, 4, 5, 7): 1,
    (2, 3, 5, 7): 1, (2, 4, 6, 7): -1, (3, 4, 5, 6): 1,
}


def _form(table: dict) -> Multivector:
    return Multivector(DIM, {idx: Fraction(c) for idx, c in table.items()})


def standard_forms() -> tuple[Multivector, Multivector]:
    """The standard G2 3-form and its Hodge dual."""
    return _form(STANDARD_PHI), _form(STANDARD_PHI_DUAL)


def b_matrix(phi: Multivector) -> Mat:
    """B[i][j] = e^{1..7} coefficient of (1/6) iota_i phi ^ iota_j phi ^ phi."""
    contractions = [interior(basis_vector(DIM, i), phi) for i in range(1, DIM + 1)]
    B = [[Fraction(0)] * DIM for _ in range(DIM)]
    for i in range(DIM):
        left = wedge(contractions[i], phi)
        for j in range(i, DIM):
            value = top_coefficient(wedge(contractions[j], left)) / 6
            B[i][j] = B[j][i] = value
    return B


def is_positive_g2(phi: Multivector) -> tuple[bool, object]:
    """(positive, det B); positive iff B or -B is positive definite."""
    B = b_matrix(phi)
    d = det(B)
    if qe_sign(d) == 0:
        return False, d
    positive = is_positive_definite(B) or is_positive_definite(mat_scale(B, -1))
    return positive, d


def dual_four_form(omega: Multivector, psi_minus: Multivector, eta: Multivector) -> Multivector:
    """1/2 omega^2 + psi_minus ^ eta."""
    return wedge(omega, omega).scale(Fraction(1, 2)) + wedge(psi_minus, eta)


def phi_wedge_dphi(g: NilpotentLieAlgebra, phi: Multivector) -> Multivector:
    return wedge(phi, differential(g, phi))


@dataclass(frozen=True)
class G2Certificate:
    """Data (omega, psi_minus, eta) on an algebra, with optional explicit X."""

    algebra: str
    omega: Multivector
    psi_minus: Multivector
    eta: Multivector
    X: tuple | None = None
    param: Fraction | None = None


def infer_X(g: NilpotentLieAlgebra, cert: G2Certificate) -> tuple:
    """The unique central e_j off the support of omega and psi_minus with eta(e_j) != 0."""
    if cert.X is not None:
        return cert.X
    used = cert.omega.support() | cert.psi_minus.support()
    candidates = []
    for j in range(1, g.n + 1):
        e_j = basis_vector(g.n, j)
        if j in used or not is_central(g, e_j):
            continue
        if evaluate_one_form(cert.eta, e_j) != 0:
            candidates.append(j)
    if len(candidates) != 1:
        raise CertificateInvariantViolation(
            "X inference",
            f"{len(candidates)} candidate central vectors {candidates}; give X explicitly",
        )
    logger.debug("%s: inferred X = e_%d", g.name, candidates[0])
    return basis_vector(g.n, candidates[0])


def check_certificate_invariants(g: NilpotentLieAlgebra, cert: G2Certificate, X: Sequence) -> None:
    if not any(x != 0 for x in X) or not is_central(g, X):
        raise CertificateInvariantViolation("X central", f"X is not a nonzero central vector of {g.name}")
    if not interior(X, cert.omega).is_zero():
        raise CertificateInvariantViolation("iota_X omega = 0")
    if not interior(X, cert.psi_minus).is_zero():
        raise CertificateInvariantViolation("iota_X psi_minus = 0")
    if evaluate_one_form(cert.eta, X) == 0:
        raise CertificateInvariantViolation("eta(X) != 0")


@dataclass
class Construction:
    """phi and its metric, built from a certificate."""

    X: tuple
    su3: SU3Data
    psi_plus: Multivector
    phi: Multivector
    metric: Mat


def _su3_on_quotient(g: NilpotentLieAlgebra, cert: G2Certificate, X: Sequence):
    qmap = quotient_map(g, X)
    result = validate_su3(qmap.push(cert.omega), qmap.push(cert.psi_minus))
    return qmap, result


def construct_phi(g: NilpotentLieAlgebra, cert: G2Certificate) -> Construction:
    """phi = omega ^ eta + psi_plus with metric g = P^T h P + r eta (x) eta."""
    X = infer_X(g, cert)
    check_certificate_invariants(g, cert, X)
    qmap, su3 = _su3_on_quotient(g, cert, X)
    if not su3:
        raise CertificateInvariantViolation("SU(3) structure on g/<X>", f"{su3.condition}: {su3.detail}")
    plus = qmap.lift(su3.psi_plus)
    phi = wedge(cert.omega, cert.eta) + plus
    P = qmap.projection_matrix()
    h = su3.metric()
    eta_row = to_coordinates(cert.eta, 1)
    eta_sq = [[su3.scale * a * b for b in eta_row] for a in eta_row]
    metric = mat_add(mat_mul(transpose(P), mat_mul(h, P)), eta_sq)
    return Construction(X=tuple(X), su3=su3, psi_plus=plus, phi=phi, metric=metric)


@dataclass
class VerificationReport:
    """Outcome of the purely coclosed test on one certificate."""

    algebra: str
    param: Fraction | None = None
    su3_valid: bool = False
    cond1: bool = False
    cond2: bool = False
    cond3: bool = False
    phi_positive: bool = False
    coclosed: bool = False
    pure: bool = False
    hodge_coclosed: bool | None = None
    lambda_num: Fraction | None = None
    lambda_volume_ratio: Fraction | None = None
    X: tuple | None = None
    diagnostics: list[str] = field(default_factory=list)
    construction: Construction | None = None

    FLAGS = ("su3_valid", "cond1", "cond2", "cond3", "phi_positive")

    @property
    def passed(self) -> bool:
        return all(getattr(self, f) for f in self.FLAGS) and self.coclosed and self.pure

    def flags(self) -> dict[str, bool]:
        return {f: getattr(self, f) for f in self.FLAGS}


def check_purely_coclosed(g: NilpotentLieAlgebra, cert: G2Certificate) -> VerificationReport:
    """Evaluate SU(3) validity, conditions (1)-(3) and positivity, exactly.

    Orientation: e^{1..7} is positive and the dual 4-form is taken as
    1/2 omega^2 + psi_minus ^ eta, whose closedness is conditions (1)-(2).
    PASS rests on those conditions, condition (3) and positivity.

    hodge_coclosed records d(*phi) = 0 for the exact Hodge star of the
    constructed metric. For phi built as above, *phi is proportional to
    1/2 omega^2 - psi_minus ^ eta, so many certificates that satisfy (1)-(3)
    report False here; the flag is informational and never affects PASS.
    """
    report = VerificationReport(algebra=g.name, param=cert.param)
    X = infer_X(g, cert)
    check_certificate_invariants(g, cert, X)
    report.X = tuple(X)
    qmap, su3 = _su3_on_quotient(g, cert, X)

    omega, psi_minus, eta = cert.omega, cert.psi_minus, cert.eta
    d_omega = differential(g, omega)
    d_eta = differential(g, eta)

    d_psi = differential(g, psi_minus)
    report.cond1 = d_psi.is_zero()
    if not report.cond1:
        report.diagnostics.append(f"d psi_minus = {format_form(d_psi)}")

    residual2 = wedge(omega, d_omega) - wedge(psi_minus, d_eta)
    report.cond2 = residual2.is_zero()
    if not report.cond2:
        report.diagnostics.append(f"omega^d omega - psi_minus^d eta = {format_form(residual2)}")

    if not su3:
        report.diagnostics.append(f"SU(3) check failed at {su3.condition}: {su3.detail}")
        return report
    report.su3_valid = True
    report.lambda_num = su3.lambda_num
    report.lambda_volume_ratio = lambda_volume_ratio(su3.omega, su3.lambda_num)
    if report.lambda_volume_ratio not in (None, 1):
        logger.info("%s: lambda/volume ratio %s", g.name, report.lambda_volume_ratio)

    plus = qmap.lift(su3.psi_plus)
    residual3 = wedge(wedge(omega, omega), d_eta) + wedge(plus, d_omega).scale(2)
    report.cond3 = residual3.is_zero()
    if not report.cond3:
        report.diagnostics.append(f"omega^2^d eta + 2 psi_plus^d omega = {format_form(residual3)}")

    construction = construct_phi(g, cert)
    report.construction = construction
    report.phi_positive, _ = is_positive_g2(construction.phi)
    if not report.phi_positive:
        report.diagnostics.append("phi is not a positive 3-form")

    report.coclosed = differential(g, dual_four_form(omega, psi_minus, eta)).is_zero()
    report.pure = phi_wedge_dphi(g, construction.phi).is_zero()
    if not report.pure:
        report.diagnostics.append("phi ^ d phi != 0")

    try:
        star_phi, _ = hodge_star(construction.metric, construction.phi)
        report.hodge_coclosed = differential(g, star_phi).is_zero()
    except NotPositiveDefinite:
        report.hodge_coclosed = None
    if report.coclosed and report.hodge_coclosed is False:
        report.diagnostics.append("d(*phi) != 0 for the Hodge star of the constructed metric")
        logger.info("%s: conditions (1)-(2) hold but d(*phi) != 0 under the constructed metric", g.name)
    logger.debug("%s: flags %s", g.name, report.flags())
    return report


def metric_consistency(construction: Construction) -> bool:
    """b_phi = c G with c^2 r^3 = det G, for G = h + r eta (x) eta."""
    B = b_matrix(construction.phi)
    G = construction.metric
    c = None
    for i in range(DIM):
        for j in range(DIM):
            if G[i][j] != 0:
                c = B[i][j] / G[i][j]
                break
        if c is not None:
            break
    if c is None:
        return False
    if any(B[i][j] != c * G[i][j] for i in range(DIM) for j in range(DIM)):
        return False
    r = construction.su3.scale
    return c * c * r * r * r == det(G)


def _permutation_sign(seq: Sequence[int]) -> int:
    sign = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


def hodge_star(gmat: Mat, alpha: Multivector):
    """*alpha = factor * R with factor = sqrt(det g), returned as (R, factor).

    R pairs alpha with the inverse metric minors, so dR = 0 iff d*alpha = 0.
    """
    n = len(gmat)
    if not is_positive_definite(gmat):
        raise NotPositiveDefinite("hodge_star needs a positive definite metric")
    ginv = _inverse(gmat)
    full = tuple(range(1, n + 1))
    terms: dict = {}
    for idx, c in alpha.terms.items():
        k = len(idx)
        for K in monomials(n, k):
            minor = det([[ginv[i - 1][j - 1] for j in K] for i in idx])
            if minor == 0:
                continue
            rest = tuple(i for i in full if i not in K)
            value = c * minor * _permutation_sign(K + rest)
            terms[rest] = terms[rest] + value if rest in terms else value
    return Multivector(n, terms), sqrt_of(det(gmat))


def _inverse(m: Mat) -> Mat:
    n = len(m)
    augmented = [list(row) + ident for row, ident in zip(m, identity(n))]
    reduced, _ = rref(augmented)
    return [row[n:] for row in reduced]


def hodge_star_float(gmat: Mat, alpha: Multivector) -> dict[tuple, float]:
    """Floating point Hodge star, for cross-checks only; not used in verification."""
    g = np.array([[float(x) for x in row] for row in gmat])
    ginv = np.linalg.inv(g)
    scale = float(np.sqrt(np.linalg.det(g)))
    n = g.shape[0]
    full = tuple(range(1, n + 1))
    out: dict[tuple, float] = {}
    for idx, c in alpha.terms.items():
        rows = [i - 1 for i in idx]
        for K in combinations(full, len(idx)):
            minor = np.linalg.det(ginv[np.ix_(rows, [j - 1 for j in K])]) if idx else 1.0
            rest = tuple(i for i in full if i not in K)
            out[rest] = out.get(rest, 0.0) + scale * float(c) * minor * _permutation_sign(K + rest)
    return {k: v for k, v in out.items() if abs(v) > 1e-12}
