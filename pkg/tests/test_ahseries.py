from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis.strategies import dictionaries, integers, tuples

from src.ahseries import (Series, artin_hasse, cocycle_conditions, ep_two_param, ep_witt,
                          fp_cocycle, group_law_identities, p_integrality, truncation_depth,
                          verify_decomposition_identity, verify_gp_identity,
                          verify_quotient_identity, verify_twisted_identity)
from src.errors import BadConstantTerm, NonRationalCoefficients
from src.wittcore import WittVector
from tests.strategies import Q, Z4, rational_witt_vectors, small_lambdas, small_rationals


def series_without_constant():
    exps = tuples(integers(0, 2), integers(0, 2)).filter(lambda e: 0 < sum(e) <= 3)
    return dictionaries(exps, small_rationals(), max_size=4).map(
        lambda coeffs: Series(Q, ("X", "Y"), 3, coeffs))


class TestTruncatedSeries:
    @given(series_without_constant())
    def test_log_inverts_exp(self, s):
        assert s.exp().log() == s

    @given(series_without_constant(), series_without_constant())
    def test_exp_turns_sums_into_products(self, s, t):
        assert (s + t).exp() == s.exp() * t.exp()

    def test_reciprocal(self):
        X = Series.variable(Q, ("X",), 5)
        assert (X + 1) * (X + 1).reciprocal() == Series.one(Q, ("X",), 5)

    def test_exp_needs_zero_constant(self):
        with pytest.raises(BadConstantTerm):
            Series.one(Q, ("X",), 3).exp()

    def test_log_needs_rationals(self):
        X = Series.variable(Z4, ("X",), 3)
        with pytest.raises(NonRationalCoefficients):
            (X + 1).log()

    def test_compose(self):
        X = Series.variable(Q, ("X",), 4)
        assert ((X + 1) ** 2).compose({"X": X * X}) == X ** 4 + X * X * 2 + 1

    def test_truncation_depth(self):
        assert truncation_depth(2, 4) == 2
        assert truncation_depth(2, 7) == 2
        assert truncation_depth(3, 8) == 1


class TestArtinHasse:
    def test_low_order_coefficients(self):
        series = artin_hasse(2, 4)
        assert [series.coefficient(k) for k in range(5)] == \
            [1, 1, 1, Fraction(2, 3), Fraction(2, 3)]

    def test_p_integral(self):
        assert p_integrality(artin_hasse(3, 9), 3) is None
        assert p_integrality(ep_two_param(2, 4), 2) is None

    def test_two_parameter_lands_in_p_local_polynomials(self):
        series = ep_two_param(2, 5)
        assert series.ring.descriptor.describe() == "Z_(2)[lam,U]"
        assert series.coefficient(1) == series.ring.gens["U"]

    def test_not_p_integral(self):
        X = Series.variable(Q, ("X",), 2)
        assert p_integrality(X * Fraction(1, 2), 2) is not None

    def test_teichmuller_at_lambda_zero(self):
        series = ep_witt(WittVector(2, Q, [1, 0, 0]), 0, 4)
        expected = artin_hasse(2, 4)
        assert [series.coefficient(k) for k in range(5)] == \
            [expected.coefficient(k) for k in range(5)]

    def test_zero_vector(self):
        assert ep_witt(WittVector.zero(2, Q, 3), 1, 5) == Series.one(Q, ("X",), 5)

    def test_teichmuller_lambda_is_linear(self):
        lam = Fraction(3)
        X = Series.variable(Q, ("X",), 6)
        assert ep_witt(WittVector(2, Q, [lam, 0, 0]), lam, 6) == X * lam + 1


class TestDeformedExponential:
    @given(rational_witt_vectors(), rational_witt_vectors(), small_lambdas())
    def test_witt_sum_gives_product(self, x, y, lam):
        assert ep_witt(x + y, lam, 4) == ep_witt(x, lam, 4) * ep_witt(y, lam, 4)

    def test_finite_ring_uses_universal_series(self):
        v = WittVector(2, Z4, [1, 0, 0])
        series = ep_witt(v, 0, 4)
        # 2/3 = 2 * 3^-1 = 2 * 3 = 2 mod 4
        assert [series.coefficient(k) for k in range(5)] == [1, 1, 1, 2, 2]


class TestCocycles:
    def test_fp_is_a_symmetric_cocycle(self):
        v = WittVector(2, Q, [Fraction(1), Fraction(2), Fraction(-1, 3)])
        report = cocycle_conditions(fp_cocycle(v, 1, 4), 1)
        assert report.holds

    def test_one_plus_xy(self):
        F = Series(Q, ("X", "Y"), 4, {(0, 0): 1, (1, 1): 1})
        report = cocycle_conditions(F, 0)
        assert report.symmetry.holds
        assert not report.cocycle.holds
        assert report.cocycle.mismatch["monomial"] in ("X*Y*Z^2", "X^2*Y*Z")
        assert cocycle_conditions(F, 0, order=3).holds

    def test_needs_unit_constant(self):
        F = Series(Q, ("X", "Y"), 3, {(1, 1): 1})
        with pytest.raises(BadConstantTerm):
            cocycle_conditions(F, 0)


class TestIdentities:
    def test_quotient_identity(self):
        assert verify_quotient_identity(2, 3, 6).holds

    def test_group_law(self):
        assert all(c.holds for c in group_law_identities(2, 1))
        assert all(c.holds for c in group_law_identities(3, 1))

    @pytest.mark.parametrize("verify", [verify_twisted_identity, verify_gp_identity,
                                        verify_decomposition_identity])
    @pytest.mark.parametrize("length,order", [(2, 4), (3, 8)])
    def test_twisted_family(self, verify, length, order):
        comparison = verify(2, length, order)
        assert comparison.holds, comparison.mismatch
        assert comparison.order == order
