"""Lyapunov exponents, non-uniformity alpha, and spectral-bound exponents.

chi_max and chi_min are approximated from below/above by extremal Birkhoff
means over prime orbits up to a search depth n_max (ergodic-optimization
surrogate; the depth is recorded in the report). The rigorous sandwich
log ell / y_max <= chi_min <= h <= chi_max <= log ell / y_min is asserted
against the declared class bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .budget import DEFAULT_WORK_BUDGET
from .orbits import orbit_stats
from .roof import RoofFunction


def cycle_mean_extremes(f: RoofFunction, n_max: int,
                        budget: float = DEFAULT_WORK_BUDGET,
                        workers: int = 1) -> tuple[float, float]:
    """(min, max) of f^(n)(x)/n over prime orbits with n <= n_max."""
    stats = orbit_stats(f, list(range(1, n_max + 1)), np.zeros(0),
                        collect_cap=-1.0, budget=budget, workers=workers)
    return float(np.min(stats.min_means)), float(np.max(stats.max_means))


@dataclass(frozen=True)
class ExponentReport:
    chi_min: float
    chi_max: float
    chi_bar_min: float   # log ell / y_max
    chi_bar_max: float   # log ell / y_min
    h: float
    alpha: float
    p_star: int
    rho: dict[int, float]
    rho_bar: dict[int, float]
    predicted_error_exponent: float
    n_used: int

    def check(self, tol: float = 1e-6) -> None:
        """Assert the sandwich and formula identities; raises on violation."""
        chain = (self.chi_bar_min, self.chi_min, self.h, self.chi_max,
                 self.chi_bar_max)
        for a, b in zip(chain, chain[1:]):
            if a > b + tol:
                raise AssertionError(f"exponent chain violated: {chain}")
        if self.alpha < 1.0 - 1e-9:
            raise AssertionError(f"alpha = {self.alpha} < 1")
        if abs(self.rho[1] - self.chi_max / 2.0) > 1e-12:
            raise AssertionError("rho_1 != chi_max / 2")
        bound = (1.0 - 1.0 / (2.0 * self.p_star)) * self.h
        if self.rho[self.p_star] > bound + 1e-9:
            raise AssertionError("rho_{p*} exceeds (1 - 1/(2p*)) h")


def rho_p(p: int, alpha: float, h: float) -> float:
    """Essential-spectral-radius exponent bound for integrability index p."""
    return 0.5 * (1.0 + (max(p, alpha) - 1.0) / p) * h


def report(f: RoofFunction, n_max: int = 12, N: int = 32,
           budget: float = DEFAULT_WORK_BUDGET,
           workers: int = 1) -> ExponentReport:
    min_mean, max_mean = cycle_mean_extremes(f, n_max, budget=budget,
                                             workers=workers)
    log_ell = math.log(f.ell)
    chi_max = log_ell / min_mean
    chi_min = log_ell / max_mean
    h = spectral.entropy(f, N=N)
    alpha = chi_max / h
    p_star = max(1, math.ceil(alpha - 1e-9))
    ps = range(1, max(8, p_star + 2) + 1)
    rho = {p: rho_p(p, alpha, h) for p in ps}
    rho_bar = {p: 0.5 * (rho[p] + h) for p in ps}
    return ExponentReport(
        chi_min=chi_min, chi_max=chi_max,
        chi_bar_min=log_ell / f.y_max, chi_bar_max=log_ell / f.y_min,
        h=h, alpha=alpha, p_star=p_star, rho=rho, rho_bar=rho_bar,
        predicted_error_exponent=(1.0 - 1.0 / (4.0 * p_star)) * h,
        n_used=n_max)
