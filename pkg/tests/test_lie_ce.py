"""
Tests for nilpotent Lie algebras and their Chevalley-Eilenberg complex.
"""

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2cert.errors import BadSpec, JacobiViolation, NotCentral
from g2cert.exterior import Multivector, basis_vector, monomials
from g2cert.lie_ce import (
    betti_numbers,
    bracket,
    build_algebra,
    center,
    central_basis_indices,
    closed_forms,
    cohomology_dim,
    cohomology_representatives,
    differential,
    exact_forms,
    nilpotency_step,
    quotient_by_central,
    quotient_map,
)
from g2cert.parsing import parse_structure


def algebra(text: str, name: str = ""):
    return build_algebra(parse_structure(text), name or text)


def e(indices: str, n: int = 7) -> Multivector:
    return Multivector.monomial(n, [int(c) for c in indices])


@pytest.fixture(scope="module")
def g37B():
    return algebra("(0^4,12,23,34)", "37B")


def forms_on(n: int, k: int):
    return st.dictionaries(
        st.sampled_from(monomials(n, k)), st.integers(-3, 3).map(Fraction), max_size=8
    ).map(lambda terms: Multivector(n, terms))


class TestBuildAlgebra:
    """Validation of structure equations."""

    def test_jacobi_violation(self):
        with pytest.raises(JacobiViolation) as info:
            algebra("(0,0,12,0,34,0)")
        assert info.value.generator == 5

    def test_not_nilpotent_basis(self):
        with pytest.raises(BadSpec):
            algebra("(23,0,0,0,0,0)")

    def test_structure_text_round_trip(self, g37B):
        assert algebra(g37B.structure_text()).d1 == g37B.d1


class TestDifferential:
    """The differential on the full exterior algebra."""

    def test_leibniz_example(self, g37B):
        # d(e^5 ^ e^6) = e^12 ^ e^6 - e^5 ^ e^23
        assert differential(g37B, e("56")) == e("126") - e("235")

    @settings(max_examples=50)
    @given(st.integers(1, 5), st.data())
    def test_square_is_zero(self, k, data):
        g = algebra("(0^4,12,23,34)", "37B")
        form = data.draw(forms_on(7, k))
        assert differential(g, differential(g, form)).is_zero()


class TestCohomology:
    """Betti numbers and representatives."""

    def test_abelian(self):
        g = algebra("(0,0,0,0,0,0,0)", "n1")
        assert betti_numbers(g) == [comb(7, k) for k in range(8)]
        assert cohomology_dim(g, 4) == 35

    def test_27A_degree_four(self):
        assert cohomology_dim(algebra("(0^5,12,14+35)", "27A"), 4) == 16

    def test_poincare_duality(self, g37B):
        b = betti_numbers(g37B)
        assert b[0] == 1
        assert all(b[k] == b[7 - k] for k in range(8))

    def test_first_betti_number(self, g37B):
        assert cohomology_dim(g37B, 1) == 4

    def test_representatives_are_closed_and_independent(self, g37B):
        reps = cohomology_representatives(g37B, 2)
        assert len(reps) == cohomology_dim(g37B, 2)
        for r in reps:
            assert differential(g37B, r).is_zero()
            assert not exact_forms(g37B, 2).contains(r)

    def test_exact_inside_closed(self, g37B):
        for k in range(8):
            assert closed_forms(g37B, k).contains_subspace(exact_forms(g37B, k))


class TestStructure:
    """Center, brackets, step and quotients."""

    def test_center(self, g37B):
        assert center(g37B).dim == 3
        assert central_basis_indices(g37B) == [5, 6, 7]

    def test_bracket(self, g37B):
        b = bracket(g37B, basis_vector(7, 1), basis_vector(7, 2))
        assert b == (0, 0, 0, 0, -1, 0, 0)

    def test_step(self, g37B):
        assert nilpotency_step(g37B) == 2
        assert nilpotency_step(algebra("(0,0,0,0,0,0,0)")) == 1
        assert nilpotency_step(algebra("(0^2,12,13,14,15,16)")) == 6

    def test_quotient(self, g37B):
        q = quotient_by_central(g37B, basis_vector(7, 7))
        assert q.n == 6
        assert q.d1 == tuple(parse_structure("(0^4,12,23)"))

    def test_quotient_needs_central_vector(self, g37B):
        with pytest.raises(NotCentral):
            quotient_map(g37B, basis_vector(7, 1))

    def test_quotient_push_and_lift(self, g37B):
        X = (0, 0, 0, 0, 1, 0, 1)
        qmap = quotient_map(g37B, X)
        form = e("13") + e("24")
        assert qmap.lift(qmap.push(form)) == form
