from fractions import Fraction

import pytest
from hypothesis import given

from src.errors import CorruptCache, LengthMismatch, NotIntegral, RingMismatch
from src.exactring import RingDescriptor, make_ring
from src.wittcore import (CACHE_HEADER, GhostVector, StructureCache, WittBatch, WittVector,
                          f_lambda, frobenius, ghost, ghost_invert, minus_one_coords,
                          p_power_teichmuller, scalar_multiple, structure_polynomials, t_a, teich_scale,
                          teichmuller, universal_ring, verschiebung)
from tests.strategies import Q, Z4, rational_witt_vectors, witt_vectors

INTEGERS = make_ring(RingDescriptor.integers())
F2 = make_ring(RingDescriptor.modular(2))
Z9 = make_ring(RingDescriptor.modular(9))


def vector(ring, *coords, p=2):
    return WittVector(p, ring, list(coords))


class TestWittArithmetic:
    def test_sum_carries(self):
        assert vector(Z4, 1, 0) + vector(Z4, 1, 0) == vector(Z4, 2, 3)

    def test_minus_one(self):
        assert minus_one_coords(2, 3) == [-1, -1, -1]
        assert minus_one_coords(3, 3) == [-1, 0, 0]

    @given(witt_vectors(), witt_vectors(), witt_vectors())
    def test_ring_axioms(self, x, y, z):
        assert x + y == y + x
        assert (x + y) + z == x + (y + z)
        assert x * (y + z) == x * y + x * z
        assert x + (-x) == WittVector.zero(2, Z4, 3)
        assert x * WittVector.one(2, Z4, 3) == x

    @given(witt_vectors(p=3, ring=Z9, length=2), witt_vectors(p=3, ring=Z9, length=2))
    def test_odd_prime_commutative(self, x, y):
        assert x * y == y * x
        assert x - y + y == x

    @given(witt_vectors())
    def test_frobenius_after_verschiebung_is_p(self, x):
        assert frobenius(verschiebung(x)) == scalar_multiple(2, x).truncate(2)

    @given(witt_vectors(ring=F2))
    def test_verschiebung_after_frobenius_is_p_over_f2(self, x):
        assert verschiebung(frobenius(x)) == scalar_multiple(2, x).truncate(2)

    def test_verschiebung_after_frobenius_differs_mod_4(self):
        x = vector(Z4, 1, 0, 0)
        assert verschiebung(frobenius(x)) == vector(Z4, 0, 1)
        assert scalar_multiple(2, x).truncate(2) == vector(Z4, 2, 3)

    @given(witt_vectors(), witt_vectors(), witt_vectors())
    def test_t_a_additive(self, a, x, y):
        assert t_a(a, x + y) == t_a(a, x) + t_a(a, y)

    @given(witt_vectors())
    def test_t_a_special_vectors(self, x):
        assert t_a(vector(Z4, 1, 0, 0), x) == x
        assert t_a(vector(Z4, 0, 1, 0), x) == verschiebung(x)
        assert t_a(vector(Z4, 3, 0, 0), x) == teichmuller(3, 3, 2, Z4) * x
        assert t_a(vector(Z4, 3, 0, 0), x) == teich_scale(3, x)

    def test_mismatched_operands(self):
        with pytest.raises(LengthMismatch):
            vector(Z4, 1, 0) + vector(Z4, 1, 0, 0)
        with pytest.raises(RingMismatch):
            vector(Z4, 1) + vector(F2, 1)
        with pytest.raises(LengthMismatch):
            frobenius(vector(Z4, 1))


class TestStructurePolynomials:
    def test_sum(self):
        X = universal_ring("sum").gens
        table = structure_polynomials(2, 2, "sum")
        assert table.polynomials[0] == X["X0"] + X["Y0"]
        assert table.polynomials[1] == X["X1"] + X["Y1"] - X["X0"] * X["Y0"]

    def test_product(self):
        X = universal_ring("product").gens
        table = structure_polynomials(2, 2, "product")
        assert table.polynomials[1] == \
            X["X0"] ** 2 * X["Y1"] + X["X1"] * X["Y0"] ** 2 + 2 * X["X1"] * X["Y1"]

    def test_frobenius(self):
        X = universal_ring("frobenius").gens
        assert structure_polynomials(2, 1, "frobenius").polynomials[0] == X["X0"] ** 2 + 2 * X["X1"]

    @pytest.mark.parametrize("kind", ["sum", "product", "frobenius", "t_a"])
    def test_integral_for_three(self, kind):
        assert structure_polynomials(3, 3, kind).is_integral()

    def test_depth_must_be_positive(self):
        with pytest.raises(LengthMismatch):
            structure_polynomials(2, 0, "sum")


class TestGhost:
    @given(rational_witt_vectors(), rational_witt_vectors())
    def test_ghost_is_a_homomorphism(self, x, y):
        gx, gy = ghost(x).values, ghost(y).values
        assert list(ghost(x + y).values) == [a + b for a, b in zip(gx, gy)]
        assert list(ghost(x * y).values) == [a * b for a, b in zip(gx, gy)]

    @given(rational_witt_vectors())
    def test_ghost_invert(self, x):
        assert ghost_invert(ghost(x)) == x

    def test_non_integral_ghost(self):
        with pytest.raises(NotIntegral):
            ghost_invert(GhostVector(2, INTEGERS, (0, 1)))

    def test_ghost_needs_torsion_free_ring(self):
        with pytest.raises(NotIntegral):
            ghost_invert(GhostVector(2, Z4, (Z4.zero, Z4.one)))

    def test_teichmuller_ghosts(self):
        assert ghost(teichmuller(Fraction(3), 3, 2, Q)).values == (3, 9, 81)


class TestDeformedFrobenius:
    @given(witt_vectors())
    def test_lambda_zero_is_frobenius(self, x):
        assert f_lambda(x, 0) == frobenius(x)

    @given(rational_witt_vectors())
    def test_twisted_ghosts(self, x):
        lam = Fraction(2, 3)
        phi = ghost(x).values
        twisted = ghost(f_lambda(x, lam)).values
        assert list(twisted) == [phi[k + 1] - lam ** (2 ** k) * phi[k] for k in range(2)]


class TestPowerTeichmuller:
    def test_alpha_and_b_for_l1(self):
        powered = p_power_teichmuller(2, 1, 4)
        assert powered.alpha == (1, -1, -8, -160)
        lam = powered.b.ring.gens["lam"]
        assert powered.b.coords == (2 * lam, -lam ** 2, -4 * lam ** 4, -40 * lam ** 8)
        assert all(powered.congruences)

    def test_b_for_l2(self):
        powered = p_power_teichmuller(2, 2, 4)
        lam = powered.b.ring.gens["lam"]
        assert powered.b.coords == (4 * lam, -6 * lam ** 2, -81 * lam ** 4, -11796 * lam ** 8)

    def test_odd_prime(self):
        powered = p_power_teichmuller(3, 1, 3)
        assert powered.alpha[0] == 1
        assert all(powered.congruences)


class TestWittBatch:
    def test_kernels_over_f2(self):
        batch = WittBatch(2, F2, 2)
        assert batch.count == 4
        assert int(batch.kernel_mask(batch.frobenius(batch.columns)).sum()) == 2
        assert int(batch.kernel_mask(batch.f_lambda(batch.columns, F2.one)).sum()) == 4

    def test_batch_agrees_with_vectors(self):
        batch = WittBatch(2, Z4, 2)
        sums = batch.add(batch.columns, batch.columns)
        for row in (0, 5, 11, 15):
            x = batch.vector(row)
            expected = x + x
            assert [batch.tables.elements[c[row]] for c in sums] == list(expected.coords)

    def test_row_keys_are_distinct(self):
        batch = WittBatch(2, Z4, 2)
        assert len(set(batch.row_keys(batch.columns).tolist())) == batch.count


class TestStructureCache:
    def test_round_trip(self):
        cache = StructureCache()
        table = cache.table(2, "sum", 3)
        assert table.is_integral()
        text = cache.dumps()
        assert text.startswith(CACHE_HEADER)
        loaded = StructureCache()
        loaded.loads(text, verify=True)
        assert loaded.table(2, "sum", 3).polynomials == table.polynomials

    def test_alphabets(self):
        cache = StructureCache()
        cache.table(2, "sum", 1)
        cache.table(2, "t_a", 1)
        records = cache.dumps().splitlines()[1:]
        sum_record = next(r for r in records if r.startswith("2\tsum\t0\t"))
        t_a_record = next(r for r in records if r.startswith("2\tt_a\t0\t"))
        assert "X0" in sum_record and "Y0" in sum_record
        assert "a0" in t_a_record and "x0" in t_a_record

    def test_tampered_record(self):
        cache = StructureCache()
        cache.table(2, "sum", 2)
        lines = cache.dumps().splitlines()
        lines = ["2\tsum\t0\t1*X0" if line.startswith("2\tsum\t0\t") else line for line in lines]
        with pytest.raises(CorruptCache):
            StructureCache().loads("\n".join(lines) + "\n", verify=True)

    def test_bad_header(self):
        with pytest.raises(CorruptCache):
            StructureCache().loads("# something else\n")

    def test_malformed_line(self):
        with pytest.raises(CorruptCache):
            StructureCache().loads(CACHE_HEADER + "\n2\tsum\tzero\t1*X0\n")
