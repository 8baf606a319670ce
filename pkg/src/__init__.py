"""
wittlab
Witt vectors, deformed Artin-Hasse exponentials and the Cartier dual of
N_l = Ker psi, verified exactly over finite rings and their lifts.
"""

__version__ = "1.0.0"

from .errors import WittlabError
from .exactring import RingDescriptor, make_ring
from .wittcore import WittVector, p_power_teichmuller
from .ahseries import TruncatedPowerSeries, ep_witt, fp_cocycle
from .dualitylab import DualityInstance, SuiteSettings, VerificationReport, run_suite

__all__ = [
    'WittlabError',
    'RingDescriptor',
    'make_ring',
    'WittVector',
    'p_power_teichmuller',
    'TruncatedPowerSeries',
    'ep_witt',
    'fp_cocycle',
    'DualityInstance',
    'SuiteSettings',
    'VerificationReport',
    'run_suite',
]
