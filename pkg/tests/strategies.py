import os
from fractions import Fraction

from hypothesis.strategies import builds, fractions, integers, lists, sampled_from

from src.dualitylab import DualityInstance
from src.exactring import RingDescriptor, make_ring
from src.wittcore import WittVector

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")

FLAGSHIP = {"name": "flagship", "ring": "cyclotomic-quotient", "lift": "cyclotomic-lift",
            "p": "2", "l": "2", "lambda": "1 - zeta"}

Z4 = make_ring(RingDescriptor.modular(4))
Q = make_ring(RingDescriptor.fraction(RingDescriptor.integers()))
GAUSSIAN_MOD_4 = make_ring(RingDescriptor.cyclotomic_quotient(2, 2))
GAUSSIAN_LIFT = make_ring(RingDescriptor.cyclotomic_lift(2, 2))


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def modular_instance(modulus, p, l, lam, name="test"):
    return DualityInstance.from_mapping({"name": name, "ring": "modular", "modulus": str(modulus),
                                         "p": str(p), "l": str(l), "lambda": lam})


def residues(ring=Z4):
    return integers(0, ring.modulus - 1).map(ring.from_int)


def gaussian_residues():
    return builds(lambda a, b: GAUSSIAN_MOD_4.from_coefficients([a, b]),
                  integers(0, 3), integers(0, 3))


def witt_vectors(p=2, ring=Z4, length=3, elements=None):
    elements = elements if elements is not None else residues(ring)
    return lists(elements, min_size=length, max_size=length).map(
        lambda coords: WittVector(p, ring, coords))


def small_rationals():
    return fractions(min_value=-4, max_value=4, max_denominator=5)


def rational_witt_vectors(p=2, length=3):
    return witt_vectors(p, Q, length, small_rationals())


def small_lambdas():
    return sampled_from([Fraction(0), Fraction(1), Fraction(-2), Fraction(1, 3)])


def gaussian_lift_elements(bound=20):
    return builds(lambda a, b: GAUSSIAN_LIFT.from_coefficients([a, b]),
                  integers(-bound, bound), integers(-bound, bound))


def gaussian_units():
    """a + b*zeta in Z[i]/4 with a + b odd."""
    return builds(lambda a, b: GAUSSIAN_MOD_4.from_coefficients([a, 2 * b + (a + 1) % 2]),
                  integers(0, 3), integers(0, 1))
