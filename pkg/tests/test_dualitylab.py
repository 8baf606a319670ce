import numpy as np
import pytest

from src.ahseries import ep_witt
from src.dualitylab import (FAIL, PASS, SKIP, DualityInstance, SuiteSettings, check_divisibility,
                            diagram_congruences, hopf_report, kernel_sample, lemma1_kernels,
                            lemma2_congruence, nl_hopf, pairing_checks, pairing_phi, psi_polynomial,
                            run_suite, supporting_identity, theorem2_regression, torsion_exponent,
                            verschiebung_frobenius)
from src.errors import AmbiguousQuotient, ConfigError, NotDivisible, NotNilpotent
from src.exactring import parse_element
from src.wittcore import WittVector, f_lambda, t_a
from tests.strategies import FLAGSHIP, modular_instance


class TestInstances:
    def test_flagship(self, flagship):
        assert flagship.q == 4
        assert flagship.ring.cardinality == 16
        assert flagship.lam_lift ** 4 == -4
        assert flagship.ring.is_zero(flagship.mu)
        assert "flagship" in flagship.summary()

    @pytest.mark.parametrize("changes", [
        {"lambda": None},
        {"ring": "modular", "modulus": "6", "lift": "integers"},
        {"ring": "modular", "modulus": "8", "lift": "integers"},
        {"lift": "integers"},
        {"ring": "bogus"},
        {"lambda": "1 + w"},
    ])
    def test_rejected_configs(self, changes):
        cfg = dict(FLAGSHIP)
        for key, value in changes.items():
            if value is None:
                cfg.pop(key)
            else:
                cfg[key] = value
        with pytest.raises(ConfigError):
            DualityInstance.from_mapping(cfg)


class TestDivisibility:
    def test_flagship_a(self, flagship):
        witness = check_divisibility(flagship, 3)
        ring = flagship.ring
        assert witness.a_lift.coords[0] == -flagship.lam_lift
        assert witness.a == WittVector(2, ring, [parse_element("3 + zeta", ring),
                                                 parse_element("zeta", ring), ring.from_int(3)])
        assert len(witness.quotients) == 3

    def test_bad_lambda(self):
        instance = modular_instance(4, 2, 2, "2")
        with pytest.raises(NotDivisible, match="8/16 is not 2-integral"):
            check_divisibility(instance)

    def test_lambda_zero_is_ambiguous(self):
        with pytest.raises(AmbiguousQuotient):
            check_divisibility(modular_instance(4, 2, 2, "0"))

    def test_bad_lambda_suite_fails(self):
        reports = run_suite("lemma1", modular_instance(4, 2, 2, "2"))
        assert [r.outcome for r in reports] == [FAIL]
        assert reports[0].evidence["error"] == "NotDivisible"


class TestPsi:
    def test_flagship_coefficients(self, flagship):
        lift = flagship.lift
        psi = psi_polynomial(flagship)
        expected = [parse_element(t, lift) for t in ("0", "-1 + zeta", "3*zeta", "2 + 2*zeta", "1")]
        assert list(psi.lift_coeffs) == expected
        assert psi.degree == 4

    def test_modular(self):
        psi = psi_polynomial(modular_instance(4, 2, 2, "1"))
        assert [c.value for c in psi.coeffs] == [0, 0, 2, 0, 1]

    def test_lambda_zero(self):
        psi = psi_polynomial(modular_instance(4, 2, 2, "0"))
        assert [c.value for c in psi.coeffs] == [0, 0, 0, 0, 1]

    def test_char_p(self, char_two_l2):
        psi = psi_polynomial(char_two_l2)
        assert [c.value for c in psi.coeffs] == [0, 0, 0, 0, 1]
        assert psi.to_text(char_two_l2.ring) == "X^4"


class TestHopfAlgebra:
    def test_flagship_axioms(self, flagship):
        hopf = nl_hopf(flagship)
        assert all(hopf.axioms().values())
        assert hopf.rank == 4
        assert not hopf.nilpotent

    def test_flagship_report_records_non_nilpotent(self, flagship):
        report = hopf_report(flagship)
        assert report.outcome == PASS
        assert report.evidence["nilpotent"] is False

    def test_char_p_nilpotency(self, char_two_l2):
        hopf = nl_hopf(char_two_l2)
        assert hopf.nilpotency()[0] == 4
        assert all(hopf.axioms().values())

    def test_group_likes_over_f2(self, char_two):
        hopf = nl_hopf(char_two)
        group_likes = hopf.group_likes()
        assert hopf.single.one() in group_likes
        assert len(group_likes) == 2


class TestLemma1:
    def test_flagship_window(self, flagship):
        report = lemma1_kernels(flagship, window=2)
        assert report.outcome == PASS
        assert report.evidence["kernel_f_mu"] == 64
        assert report.evidence["kernel_f_lambda_t_a"] == 512
        assert report.evidence["inclusion"] is True
        assert report.evidence["equal"] is False
        assert "first_extra_kernel_vector" in report.evidence

    def test_char_p_kernels_agree(self, char_two):
        report = lemma1_kernels(char_two, window=1)
        assert report.outcome == PASS
        assert report.evidence["kernel_f_mu"] == 4
        assert report.evidence["kernel_f_lambda_t_a"] == 4
        assert report.evidence["equal"] is True

    def test_char_p_l2(self, char_two_l2):
        report = lemma1_kernels(char_two_l2, window=1)
        assert report.evidence["equal"] is True
        assert check_divisibility(char_two_l2, 2).a.is_zero()


class TestCongruences:
    def test_supporting_identity(self, char_two_l2):
        assert supporting_identity(char_two_l2, 6)["holds"]

    def test_supporting_identity_flagship(self, flagship):
        assert supporting_identity(flagship, 4)["holds"]

    def test_lemma2_small(self, char_two):
        report = lemma2_congruence(char_two, length=2, order=4)
        assert report.outcome == PASS
        assert report.evidence["decomposition"]["holds"]
        assert report.evidence["correction"]["modulus"] == 2
        assert report.evidence["kernel_points"]["points"] > 0

    def test_lemma2_flagship(self, flagship):
        report = lemma2_congruence(flagship, length=3, order=8)
        assert report.outcome == PASS
        assert report.evidence["decomposition"]["holds"]
        assert report.evidence["correction"]["modulus"] == 4
        assert report.evidence["kernel_points"]["holds"]

    def test_congruence_needs_kernel_points(self, flagship):
        ring = flagship.ring
        x = WittVector(2, ring, [ring.one, ring.zero, ring.zero])
        assert not f_lambda(x, flagship.mu).is_zero()
        a = check_divisibility(flagship, 3).a
        psi = psi_polynomial(flagship).series(ring, ("X",), 4, reduced=True)
        lhs = ep_witt(x, flagship.mu, 4).compose({"X": psi})
        diff = lhs.first_difference(ep_witt(t_a(a, x), flagship.lam, 4))
        assert diff is not None
        assert diff[0] == (3,)

    def test_kernel_sample(self, flagship):
        points = kernel_sample(flagship, flagship.mu, 3, 5, np.random.default_rng(7))
        assert len(points) == 5
        assert all(f_lambda(x, flagship.mu).is_zero() for x in points)
        assert all(x.length == 3 for x in points)

    def test_torsion_exponent(self, flagship, char_two_l2):
        assert torsion_exponent(flagship) == 2
        assert torsion_exponent(char_two_l2) == 1

    def test_diagram_small(self, char_two):
        report = diagram_congruences(char_two, length=2, order=4)
        assert report.outcome == PASS
        assert report.evidence["modulus"] == 2

    def test_diagram_flagship(self, flagship):
        report = diagram_congruences(flagship, length=3, order=6)
        assert report.outcome == PASS
        assert report.evidence["modulus"] == 4
        assert report.evidence["cocycle"]["holds"]


class TestPairing:
    def test_flagship_is_not_nilpotent(self, flagship):
        with pytest.raises(NotNilpotent):
            pairing_phi(flagship, WittVector.zero(2, flagship.ring, 3))

    def test_flagship_series_checks(self, flagship):
        reports = pairing_checks(flagship, samples=2, order=4)
        outcomes = {r.check: r.outcome for r in reports}
        assert outcomes == {"pairing-group-like": SKIP, "pairing-multiplicative": PASS,
                            "pairing-well-defined": PASS}

    def test_flagship_coset_constant_on_kernel_pairs(self, flagship):
        reports = pairing_checks(flagship, samples=6, order=8, seed=3)
        well_defined = next(r for r in reports if r.check == "pairing-well-defined")
        assert well_defined.outcome == PASS, well_defined.evidence["failures"]
        assert 0 < well_defined.evidence["samples"] <= 6

    def test_char_p_pairing(self, char_two_l2):
        reports = pairing_checks(char_two_l2, samples=4)
        assert [r.outcome for r in reports] == [PASS, PASS, PASS]

    def test_zero_maps_to_one(self, char_two_l2):
        hopf = nl_hopf(char_two_l2)
        image = pairing_phi(char_two_l2, WittVector.zero(2, char_two_l2.ring, 3))
        assert hopf.single.equal(image, hopf.single.one())


class TestTheorem2:
    @pytest.mark.parametrize("case,count", [((2, 2, 1), 4), ((3, 1, 1), 3), ((2, 1, 0), 1)])
    def test_counts(self, case, count):
        report = theorem2_regression(*case)
        assert report.outcome == PASS
        assert report.evidence["kernel_points"] == count
        assert report.evidence["group_likes"] == count


class TestSuites:
    def test_unknown_suite(self, char_two):
        with pytest.raises(ConfigError):
            run_suite("nothing", char_two)

    def test_settings_defaults(self):
        settings = SuiteSettings()
        assert settings.order_for("lemma2") == 8
        assert settings.order_for("diagram") == 6
        assert settings.order_for("series-identities") == 8
        assert settings.samples_for("pairing") == 12
        assert SuiteSettings(order=3).order_for("lemma2") == 3

    def test_verschiebung_frobenius_in_char_p(self, char_two_l2):
        report = verschiebung_frobenius(char_two_l2, samples=30)
        assert report.outcome == PASS
        assert report.evidence["characteristic_p"] is True
        assert report.evidence["failures"] == []

    def test_verschiebung_frobenius_witness_mod_4(self):
        report = verschiebung_frobenius(modular_instance(4, 2, 2, "1"), samples=50)
        assert report.outcome == PASS
        assert report.evidence["characteristic_p"] is False
        assert report.evidence["witness"] is not None

    def test_witt_axioms_suite_lists_verschiebung_frobenius(self, char_two_l2):
        reports = run_suite("witt-axioms", char_two_l2, SuiteSettings(length=2, samples=10))
        assert "verschiebung-frobenius" in [r.check for r in reports]

    def test_witt_axioms_suite(self, char_two_l2):
        reports = run_suite("witt-axioms", char_two_l2, SuiteSettings(length=2, samples=10))
        assert reports
        assert all(r.outcome == PASS for r in reports)
