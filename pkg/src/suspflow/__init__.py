"""Suspension semiflows over angle-multiplying circle maps.

Numerics for expanding semiflows under trig-polynomial roofs: prime orbit
enumeration and counting, transfer-operator spectra (entropy, complex
resonances), prime-orbit-theorem residuals, cone-transversality diagnostics,
and anisotropic dyadic norms.
"""
from .roof import RoofFunction, constant_roof, roof_digest, standard_roof
from .semiflow import (BackwardBranch, CocycleData, FlowPoint, backward_count,
                       backward_orbit, canonical_point, cocycle, crossing_times,
                       flow)
from .orbits import (PrimeOrbit, count_pi, count_pi_tilde,
                     enumerate_prime_orbits, pi_series)
from .budget import DEFAULT_WORK_BUDGET, WorkBudgetExceeded
from .spectral import (Resonance, ResonanceSet, SearchWindow, build_matrix,
                       constant_roof_resonances, entropy, leading_eigenvalue,
                       pressure_periodic, pressure_root, resonances)
from .exponents import ExponentReport
from .exponents import report as exponent_report
from .transversality import (ConeParams, TransversalityReport,
                             check_generic_condition, exceptional_set_greedy,
                             sum_star, sup_sum_star)
from .asymptotics import (PotSeries, TestFunction, flat_trace_orbit_side,
                          flat_trace_spectral_side, pot_series)
from .norms import PartitionParams, brp_norm, chi_nm, fxnm_decay_check
from .config import RunConfig, config_digest, load_config, save_config

__version__ = "0.1.0"

__all__ = [
    "RoofFunction", "constant_roof", "standard_roof", "roof_digest",
    "FlowPoint", "CocycleData", "BackwardBranch",
    "canonical_point", "flow", "cocycle", "backward_orbit", "backward_count",
    "crossing_times",
    "PrimeOrbit", "enumerate_prime_orbits", "count_pi", "count_pi_tilde",
    "pi_series",
    "DEFAULT_WORK_BUDGET", "WorkBudgetExceeded",
    "SearchWindow", "Resonance", "ResonanceSet", "build_matrix",
    "leading_eigenvalue", "entropy", "pressure_periodic", "pressure_root",
    "resonances", "constant_roof_resonances",
    "ExponentReport", "exponent_report",
    "ConeParams", "TransversalityReport", "sum_star", "sup_sum_star",
    "exceptional_set_greedy", "check_generic_condition",
    "TestFunction", "PotSeries", "pot_series",
    "flat_trace_orbit_side", "flat_trace_spectral_side",
    "PartitionParams", "brp_norm", "chi_nm", "fxnm_decay_check",
    "RunConfig", "load_config", "save_config", "config_digest",
    "__version__",
]
