"""
Tests for exact scalars, polynomials and linear algebra.
"""

import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from g2cert.errors import MismatchedRadicand, NotSymmetric
from g2cert.exact_core import (
    MPoly,
    QuadExt,
    det,
    is_positive_definite,
    kernel_basis,
    mat_vec,
    poly_perfect_square,
    quad,
    qe_arith,
    qe_sign,
    rank,
    rref,
    rat_sqrt,
    sqrt_of,
)

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=10)
quads = st.builds(lambda a, b: quad(a, b, 2), rationals, rationals)
small_matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n)
)


def _to_sympy(m):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m])


def _frac(m):
    return [[Fraction(x) for x in row] for row in m]


class TestSquareRoots:
    """Tests for rat_sqrt and sqrt_of."""

    def test_perfect_squares_stay_rational(self):
        assert rat_sqrt(Fraction(9, 4)) == Fraction(3, 2)
        assert sqrt_of(4) == 2
        assert isinstance(sqrt_of(Fraction(1, 9)), Fraction)

    def test_irrational_root(self):
        assert rat_sqrt(Fraction(2)) is None
        assert sqrt_of(8) == QuadExt(Fraction(0), Fraction(2), 2)

    def test_rational_radicand_is_rationalized(self):
        # sqrt(1/2) = sqrt(2)/2
        assert sqrt_of(Fraction(1, 2)) == QuadExt(Fraction(0), Fraction(1, 2), 2)

    def test_negative_radicand(self):
        assert rat_sqrt(Fraction(-1)) is None
        with pytest.raises(ValueError):
            sqrt_of(-1)


class TestQuadExt:
    """Arithmetic in Q(sqrt D)."""

    def test_square_collapses(self):
        r = sqrt_of(2)
        assert r * r == 2
        assert isinstance(r * r, Fraction)

    def test_mixed_radicands_rejected(self):
        with pytest.raises(MismatchedRadicand):
            sqrt_of(2) + sqrt_of(3)

    def test_signs(self):
        assert qe_sign(quad(1, -1, 2)) == -1
        assert qe_sign(quad(3, -2, 2)) == 1
        assert qe_sign(quad(-3, 2, 2)) == -1
        assert qe_sign(Fraction(0)) == 0

    @given(quads, quads, quads)
    def test_ring_axioms(self, x, y, z):
        assert (x + y) + z == x + (y + z)
        assert x * (y + z) == x * y + x * z
        assert x * y == y * x

    @given(quads)
    def test_inverse(self, x):
        assume(x != 0)
        assert x * (1 / x) == 1

    @given(quads)
    def test_sign_matches_float(self, x):
        value = float(x.a) + float(x.b) * math.sqrt(2) if isinstance(x, QuadExt) else float(x)
        expected = (value > 0) - (value < 0)
        assert qe_sign(x) == expected


class TestPerfectSquare:
    """Tests for poly_perfect_square."""

    def test_square_of_linear_form(self):
        a1, a2 = MPoly.variable(2, 0), MPoly.variable(2, 1)
        p = (a1 + a2 * 2) * (a1 + a2 * 2) * 3
        c, q = poly_perfect_square(p)
        assert c > 0
        assert q * q * c == p

    def test_not_a_square(self):
        a1, a2 = MPoly.variable(2, 0), MPoly.variable(2, 1)
        assert poly_perfect_square(a1 * a2) is None
        assert poly_perfect_square(a1 * a1 + a2 * a2) is None

    def test_negative_square_rejected(self):
        a1 = MPoly.variable(1, 0)
        assert poly_perfect_square(-(a1 * a1)) is None

    def test_zero(self):
        c, q = poly_perfect_square(MPoly(3))
        assert q.is_zero()

    @given(
        st.dictionaries(
            st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
            st.integers(-3, 3),
            min_size=1,
            max_size=4,
        ),
        st.integers(1, 5),
    )
    def test_squares_are_recognised(self, terms, scale):
        q = MPoly(3, {m: Fraction(c) for m, c in terms.items()})
        assume(not q.is_zero())
        p = q * q * scale
        found = poly_perfect_square(p)
        assert found is not None
        c, r = found
        assert r * r * c == p

    @given(
        st.dictionaries(
            st.tuples(st.integers(0, 2), st.integers(0, 2)), st.integers(-3, 3), min_size=1, max_size=5
        )
    )
    def test_agrees_with_sympy(self, terms):
        p = MPoly(2, {m: Fraction(c) for m, c in terms.items()})
        assume(not p.is_zero())
        x, y = sympy.symbols("x y")
        expr = sum(c * x ** m[0] * y ** m[1] for m, c in terms.items())
        _, factors = sympy.factor_list(expr)
        lc = sympy.Poly(expr, x, y).LC()
        sympy_square = lc > 0 and all(e % 2 == 0 for _, e in factors)
        assert (poly_perfect_square(p) is not None) == sympy_square


class TestLinearAlgebra:
    """Determinant, rank and kernel, checked against sympy."""

    @given(small_matrices)
    def test_det_matches_sympy(self, m):
        expected = _to_sympy(_frac(m)).det()
        assert det(_frac(m)) == Fraction(int(expected.p), int(expected.q))

    @given(small_matrices)
    def test_rank_nullity(self, m):
        m = _frac(m)
        basis = kernel_basis(m)
        assert rank(m) + len(basis) == len(m[0])
        for v in basis:
            assert all(x == 0 for x in mat_vec(m, v))
        assert rank(m) == _to_sympy(m).rank()

    def test_positive_definite(self):
        assert is_positive_definite(_frac([[2, 1], [1, 2]]))
        assert not is_positive_definite(_frac([[1, 2], [2, 1]]))

    def test_positive_definite_with_radicals(self):
        r = sqrt_of(2)
        assert is_positive_definite([[Fraction(2), r], [r, Fraction(2)]])
        assert not is_positive_definite([[Fraction(1), r], [r, Fraction(1)]])

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetric):
            is_positive_definite(_frac([[1, 0], [1, 1]]))

    @pytest.mark.parametrize("m, reduced, pivots", [
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]], [0, 1, 2]),
        ([[1, 2], [2, 4]], [[1, 2], [0, 0]], [0]),
        ([[0, 1], [1, 0]], [[1, 0], [0, 1]], [0, 1]),
    ])
    def test_rref(self, m, reduced, pivots):
        assert rref(_frac(m)) == (_frac(reduced), pivots)

    def test_kernel_basis_pattern(self):
        assert kernel_basis(_frac([[1, 1, 0]])) == _frac([[-1, 1, 0], [0, 0, 1]])
        assert kernel_basis(_frac([[1, 0], [0, 1]])) == []


class TestQeArith:
    """Runtime-dispatched field operations."""

    def test_conjugate_product(self):
        assert qe_arith(quad(1, 1, 2), quad(1, -1, 2), "mul") == -1

    def test_inverse(self):
        assert qe_arith(sqrt_of(3), None, "inv") == quad(0, Fraction(1, 3), 3)
        with pytest.raises(ZeroDivisionError):
            qe_arith(Fraction(0), None, "inv")

    def test_perfect_square_radicand(self):
        assert quad(0, 1, 4) == 2

    def test_add_and_neg(self):
        assert qe_arith(sqrt_of(2), qe_arith(sqrt_of(2), None, "neg"), "add") == 0

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            qe_arith(Fraction(1), Fraction(1), "pow")
