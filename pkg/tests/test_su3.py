"""
Tests for SU(3)-structures on 6-dimensional spaces.
"""

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from g2cert.errors import NonNegativeLambda
from g2cert.exact_core import det, identity, mat_mul, mat_scale
from g2cert.exterior import (
    Multivector,
    basis_vector,
    monomials,
    one_form,
    substitute,
    top_coefficient,
    wedge,
)
from g2cert.su3 import (
    K_matrix,
    K_pullback,
    hhat_matrix,
    k_map,
    lambda_invariant,
    lambda_volume_ratio,
    orientation_sign,
    psi_plus,
    validate_su3,
)


def e(indices: str) -> Multivector:
    return Multivector.monomial(6, [int(c) for c in indices])


OMEGA0 = e("12") + e("34") + e("56")
PSI_MINUS0 = e("136") + e("145") + e("235") - e("246")
RE_OMEGA = e("135") - e("146") - e("236") - e("245")

three_forms = st.dictionaries(
    st.sampled_from(monomials(6, 3)), st.integers(-2, 2).map(Fraction), min_size=1, max_size=5
).map(lambda terms: Multivector(6, terms))
matrices = st.lists(st.lists(st.integers(-2, 2), min_size=6, max_size=6), min_size=6, max_size=6)


class TestStandardStructure:
    """The flat SU(3)-structure on R^6."""

    def test_valid(self):
        data = validate_su3(OMEGA0, PSI_MINUS0)
        assert data
        assert data.lambda_num == -4
        assert data.orientation == 1

    def test_psi_plus(self):
        assert psi_plus(OMEGA0, PSI_MINUS0) == -RE_OMEGA

    def test_metric(self):
        data = validate_su3(OMEGA0, PSI_MINUS0)
        assert [list(r) for r in data.hhat] == mat_scale(identity(6), 2)
        assert data.metric() == identity(6)

    def test_volume_ratio(self):
        assert lambda_volume_ratio(OMEGA0, Fraction(-4)) == 1
        assert lambda_volume_ratio(e("12"), Fraction(-4)) is None

    def test_psi_plus_is_odd(self):
        assert psi_plus(OMEGA0, -PSI_MINUS0) == RE_OMEGA


class TestNormalization:
    """Validated psi_plus is rational with psi_minus ^ psi_plus = 2/3 omega^3."""

    def _cube(self, omega):
        return wedge(wedge(omega, omega), omega)

    def test_standard_pair_needs_no_rescaling(self):
        data = validate_su3(OMEGA0, PSI_MINUS0)
        assert data.scale == 1
        assert data.psi_plus == psi_plus(OMEGA0, PSI_MINUS0)

    def test_scaled_psi_minus(self):
        psi = PSI_MINUS0.scale(2)
        data = validate_su3(OMEGA0, psi)
        assert data.lambda_num == -64
        assert data.scale == 4
        assert data.psi_plus == RE_OMEGA.scale(Fraction(-1, 2))
        assert psi_plus(OMEGA0, psi) == data.psi_plus.scale(data.scale)
        assert wedge(psi, data.psi_plus) == self._cube(OMEGA0).scale(Fraction(2, 3))
        assert data.metric() == identity(6)

    def test_scaled_omega(self):
        omega = OMEGA0.scale(2)
        data = validate_su3(omega, PSI_MINUS0)
        assert data.scale == Fraction(1, 8)
        assert wedge(PSI_MINUS0, data.psi_plus) == self._cube(omega).scale(Fraction(2, 3))

    def test_coframe_change_keeps_scale(self):
        # e^1 -> 2 e^1 scales lambda by det^2 and omega^3 by det
        images = [one_form(6, [Fraction(2 if i == j == 0 else int(i == j)) for j in range(6)]) for i in range(6)]
        omega = substitute(OMEGA0, images)
        psi = substitute(PSI_MINUS0, images)
        data = validate_su3(omega, psi)
        assert data.lambda_num == -16
        assert data.scale == 1
        assert wedge(psi, data.psi_plus) == self._cube(omega).scale(Fraction(2, 3))

    @settings(max_examples=40, deadline=None)
    @given(three_forms)
    def test_pairing_with_K_pullback(self, tau):
        lam = lambda_invariant(tau)
        pulled = K_pullback(tau, K_matrix(tau))
        assert top_coefficient(wedge(tau, pulled)) == -2 * lam * lam


class TestFailures:
    """The first violated condition is the one reported."""

    def test_degenerate_omega(self):
        result = validate_su3(e("12") + e("34"), PSI_MINUS0)
        assert not result
        assert result.condition == "omega_nondegenerate"

    def test_positive_lambda(self):
        result = validate_su3(OMEGA0, e("123") + e("456"))
        assert result.condition == "lambda_negative"
        with pytest.raises(NonNegativeLambda):
            psi_plus(OMEGA0, e("123") + e("456"))

    def test_incompatible_pair(self):
        result = validate_su3(OMEGA0 + e("13"), PSI_MINUS0)
        assert result.condition == "omega_psi_compatible"

    def test_indefinite_metric(self):
        omega = e("12") + e("34") - e("56")
        assert orientation_sign(omega) == -1
        result = validate_su3(omega, PSI_MINUS0)
        assert result.condition == "metric_positive"


class TestLambdaInvariant:
    """lambda is a quartic density of weight two."""

    def test_standard_value(self):
        assert lambda_invariant(PSI_MINUS0) == -4
        assert lambda_invariant(RE_OMEGA) == -4

    @given(three_forms)
    def test_quartic(self, tau):
        assert lambda_invariant(tau.scale(2)) == 16 * lambda_invariant(tau)

    @settings(max_examples=40, deadline=None)
    @given(three_forms, matrices)
    def test_transforms_with_det_squared(self, tau, rows):
        A = [[Fraction(x) for x in row] for row in rows]
        d = det(A)
        assume(d != 0)
        images = [one_form(6, A[i]) for i in range(6)]
        assert lambda_invariant(substitute(tau, images)) == d * d * lambda_invariant(tau)

    def test_decomposable_is_zero(self):
        assert lambda_invariant(e("123")) == 0


class TestKOperator:
    """K_tau and the metric it induces."""

    def test_standard_K(self):
        K = K_matrix(PSI_MINUS0)
        expected = [[Fraction(0)] * 6 for _ in range(6)]
        for odd in (0, 2, 4):
            expected[odd + 1][odd] = Fraction(-2)
            expected[odd][odd + 1] = Fraction(2)
        assert K == expected

    def test_k_map_is_a_five_form(self):
        assert k_map(PSI_MINUS0, basis_vector(6, 1)).degrees() <= {5}

    @settings(max_examples=40, deadline=None)
    @given(three_forms)
    def test_K_squared_is_lambda(self, tau):
        K = K_matrix(tau)
        assert mat_mul(K, K) == mat_scale(identity(6), lambda_invariant(tau))

    def test_hhat_follows_orientation(self):
        flipped = -OMEGA0
        assert orientation_sign(flipped) == -1
        assert hhat_matrix(flipped, -PSI_MINUS0) == mat_scale(identity(6), 2)
