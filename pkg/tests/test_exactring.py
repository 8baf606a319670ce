from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis.strategies import data, integers, sampled_from
from sympy import Rational

from src.errors import AmbiguousQuotient, InvalidDescriptor, NotDivisible, NotFinite, NotIntegral
from src.exactring import (RingDescriptor, cayley_tables, declared_lift, enumerate_elements,
                           lift, make_ring, p_local_hull, parse_element, reduce)
from tests.strategies import (GAUSSIAN_LIFT, GAUSSIAN_MOD_4, Z4, gaussian_lift_elements,
                              gaussian_residues, gaussian_units, residues)

Z9 = make_ring(RingDescriptor.modular(9))
F2 = make_ring(RingDescriptor.modular(2))


class TestDescriptors:
    def test_modulus_below_two_is_rejected(self):
        with pytest.raises(InvalidDescriptor):
            RingDescriptor.modular(1)

    def test_cyclotomic_needs_prime(self):
        with pytest.raises(InvalidDescriptor):
            RingDescriptor.cyclotomic_quotient(4, 1)

    def test_fraction_field_of_zero_divisor_ring(self):
        with pytest.raises(InvalidDescriptor):
            RingDescriptor.fraction(RingDescriptor.modular(4))

    def test_from_mapping_needs_keys(self):
        with pytest.raises(InvalidDescriptor):
            RingDescriptor.from_mapping({"ring": "modular"})

    def test_equal_descriptors_share_handle(self):
        assert make_ring(RingDescriptor.modular(4)) is Z4
        assert make_ring(RingDescriptor.cyclotomic_quotient(2, 2)) is GAUSSIAN_MOD_4

    def test_describe(self):
        assert GAUSSIAN_MOD_4.descriptor.describe() == "Z[zeta_2^2]/(2^2)"
        assert p_local_hull(make_ring(RingDescriptor.integers()), 3).descriptor.describe() == "Z_(3)"


class TestFiniteRings:
    def test_gaussian_quotient_size(self):
        assert GAUSSIAN_MOD_4.cardinality == 16
        elements = enumerate_elements(GAUSSIAN_MOD_4)
        assert len(set(elements)) == 16

    def test_zeta_squared_is_minus_one(self):
        zeta = GAUSSIAN_MOD_4.zeta
        assert zeta * zeta == -1

    def test_infinite_ring_has_no_elements(self):
        with pytest.raises(NotFinite):
            enumerate_elements(GAUSSIAN_LIFT)

    def test_modular_division(self):
        assert Z4.exact_div(3, 3) == 1
        with pytest.raises(AmbiguousQuotient):
            Z4.exact_div(2, 2)
        with pytest.raises(NotDivisible):
            Z4.exact_div(1, 2)

    def test_zero_by_zero_is_ambiguous(self):
        integers = make_ring(RingDescriptor.integers())
        with pytest.raises(AmbiguousQuotient):
            integers.exact_div(0, 0)
        with pytest.raises(NotDivisible):
            integers.exact_div(3, 0)

    def test_kills(self):
        assert GAUSSIAN_MOD_4.kills(4)
        assert not GAUSSIAN_MOD_4.kills(2)

    @given(residues(), residues())
    def test_cayley_tables_match_arithmetic(self, x, y):
        tables = cayley_tables(Z4)
        i, j = tables.index_of(x), tables.index_of(y)
        assert tables.elements[tables.add[i, j]] == x + y
        assert tables.elements[tables.mul[i, j]] == x * y
        assert tables.elements[tables.neg[i]] == -x

    @given(gaussian_residues(), gaussian_residues(), gaussian_residues())
    def test_gaussian_quotient_distributive(self, x, y, z):
        assert x * (y + z) == x * y + x * z


class TestLift:
    def test_declared_lifts(self):
        assert declared_lift(GAUSSIAN_MOD_4) is GAUSSIAN_LIFT
        assert declared_lift(Z4).descriptor.describe() == "Z"

    @given(gaussian_residues())
    def test_reduce_undoes_lift(self, y):
        assert reduce(lift(y, GAUSSIAN_MOD_4), GAUSSIAN_MOD_4) == y

    def test_lambda_fourth_power(self):
        lam = parse_element("1 - zeta", GAUSSIAN_LIFT)
        assert lam == GAUSSIAN_LIFT.one - GAUSSIAN_LIFT.zeta
        assert lam ** 4 == -4

    def test_exact_division_in_lift(self):
        lam = parse_element("1 - zeta", GAUSSIAN_LIFT)
        assert GAUSSIAN_LIFT.exact_div(4 * lam, lam ** 4) == -lam
        with pytest.raises(NotDivisible):
            GAUSSIAN_LIFT.exact_div(GAUSSIAN_LIFT.one, lam)

    def test_p_local_division(self):
        local = make_ring(RingDescriptor.p_local(2))
        assert local.exact_div(1, 3) == Fraction(1, 3)
        with pytest.raises(NotDivisible, match="not 2-integral"):
            local.exact_div(8, 16)

    def test_reduce_rational(self):
        assert reduce(Fraction(1, 3), Z4) == 3

    def test_parse_rejects_unknown_symbols(self):
        with pytest.raises(InvalidDescriptor):
            parse_element("1 + w", GAUSSIAN_LIFT)
        with pytest.raises(InvalidDescriptor):
            parse_element("zeta", Z4)

    @given(gaussian_lift_elements(), gaussian_lift_elements())
    def test_reduce_is_a_ring_homomorphism(self, x, y):
        assert reduce(x + y, GAUSSIAN_MOD_4) == reduce(x, GAUSSIAN_MOD_4) + reduce(y, GAUSSIAN_MOD_4)
        assert reduce(x * y, GAUSSIAN_MOD_4) == reduce(x, GAUSSIAN_MOD_4) * reduce(y, GAUSSIAN_MOD_4)

    @given(integers(-50, 50), integers(-50, 50))
    def test_reduce_integers(self, a, b):
        assert reduce(a * b, Z4) == reduce(a, Z4) * reduce(b, Z4)
        assert reduce(a - b, Z9) == reduce(a, Z9) - reduce(b, Z9)

    @given(gaussian_lift_elements(), gaussian_lift_elements())
    def test_lift_is_p_torsion_free(self, x, y):
        assume(not GAUSSIAN_LIFT.is_zero(x))
        assert not GAUSSIAN_LIFT.is_zero(2 * x)
        assert GAUSSIAN_LIFT.exact_div(2 * x, 2) == x
        assume(not GAUSSIAN_LIFT.is_zero(y))
        assert GAUSSIAN_LIFT.exact_div(x * y, y) == x

    @given(integers(-100, 100).filter(bool))
    def test_integers_are_p_torsion_free(self, n):
        integers_ring = declared_lift(Z4)
        assert integers_ring.exact_div(2 * n, 2) == n
        assert p_local_hull(integers_ring, 2).valuation(4 * n, 2) >= 2

    def test_polynomial_ring_over_p_local(self):
        ring = make_ring(RingDescriptor.polynomial(RingDescriptor.p_local(2), ["lam", "U"]))
        U, lam = ring.gens["U"], ring.gens["lam"]
        assert ring.coerce(U + 1) == U + 1
        assert ring.valuation(4 * U + 2 * lam, 2) == 1
        assert ring.exact_div(2 * U * lam, lam) == 2 * U
        with pytest.raises(NotIntegral):
            ring.coerce(U * Rational(1, 2))
        with pytest.raises(NotDivisible):
            ring.exact_div(U, 2 * lam)


class TestRingLaws:
    @pytest.mark.parametrize("ring", [Z4, Z9, F2, GAUSSIAN_MOD_4])
    @given(data())
    def test_ring_axioms(self, ring, data):
        elements = sampled_from(enumerate_elements(ring))
        x, y, z = data.draw(elements), data.draw(elements), data.draw(elements)
        assert x + y == y + x
        assert (x + y) + z == x + (y + z)
        assert x * y == y * x
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x + ring.zero == x
        assert x * ring.one == x
        assert ring.is_zero(x + (-x))

    @given(gaussian_residues(), gaussian_units())
    def test_division_by_unit_in_quotient(self, x, y):
        assert GAUSSIAN_MOD_4.exact_div(x * y, y) == x

    @given(residues(), sampled_from([1, 3]))
    def test_division_by_unit_mod_4(self, x, u):
        y = Z4.from_int(u)
        assert Z4.exact_div(x * y, y) == x

    def test_three_over_three_mod_nine_is_ambiguous(self):
        with pytest.raises(AmbiguousQuotient, match="3 quotients"):
            Z9.exact_div(3, 3)
        assert Z9.exact_div(4, 2) == 2
