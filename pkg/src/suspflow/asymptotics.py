"""Prime orbit theorem numerics: leading term, resonance corrections,
residual exponent fits, and the mollified flat-trace identity.

The residual R(T) = pi_tilde(T) - integral_1^T e^{ht}/t dt - corrections
oscillates whenever the nearest resonances are complex, so exponent fits
are taken per sign-stable window of the T grid; slopes from windows that
straddle a sign change are meaningless and are never produced.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .budget import DEFAULT_WORK_BUDGET
from .orbits import _counting_lengths, _guard_counting, orbit_stats, pi_series
from .roof import RoofFunction
from .spectral import ResonanceSet
from .transversality import chi_bump


@dataclass(frozen=True)
class TestFunction:
    """Smooth bump supported on [t0, t1], built from the chi template.

    phi(t) = chi(1 + |2(t - t0)/(t1 - t0) - 1|): equal to 1 at the midpoint,
    identically 0 outside (t0, t1), C-infinity, values in [0, 1].
    quad_points sets the Gauss-Legendre resolution used when integrating
    against exponentials.
    """

    __test__ = False  # not a pytest class despite the name

    t0: float
    t1: float
    quad_points: int = 800

    def __post_init__(self):
        if not 0 < self.t0 < self.t1:
            raise ValueError("need 0 < t0 < t1")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        u = 2.0 * (t - self.t0) / (self.t1 - self.t0) - 1.0
        out = chi_bump(1.0 + np.abs(u))
        if np.ndim(out) == 0:
            return float(out)
        return out


def leading_integral(h: float, T: float) -> float:
    """integral_1^T e^{h t}/t dt, relative error <= 1e-10."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if h < 0:
        raise ValueError("h must be >= 0")
    if T == 1.0:
        return 0.0
    val, _ = quad(lambda t: math.exp(h * t) / t, 1.0, T,
                  epsabs=0.0, epsrel=1e-12, limit=400)
    return float(val)


def _exp_integral(mu: complex, T: float) -> complex:
    if mu.imag == 0.0:
        v, _ = quad(lambda t: math.exp(mu.real * t) / t, 1.0, T,
                    epsabs=0.0, epsrel=1e-12, limit=800)
        return complex(v, 0.0)
    # QAWO handles the oscillation; a plain rule hits roundoff warnings here
    re, _ = quad(lambda t: math.exp(mu.real * t) / t, 1.0, T,
                 weight="cos", wvar=mu.imag, epsabs=0.0, epsrel=1e-12,
                 limit=800)
    im, _ = quad(lambda t: math.exp(mu.real * t) / t, 1.0, T,
                 weight="sin", wvar=mu.imag, epsabs=0.0, epsrel=1e-12,
                 limit=800)
    return complex(re, im)


def correction_sum(res: ResonanceSet, cutoff: float, T: float) -> float:
    """Re sum over cutoff < Re mu < h of integral_1^T e^{mu t}/t dt.

    The leading real resonance at h is excluded (it is the leading term,
    not a correction). Conjugate pairs combine to a real contribution; only
    upper-half representatives are integrated, with weight 2.
    """
    if cutoff >= res.h:
        raise ValueError("cutoff must lie below h")
    if T < 1:
        raise ValueError("T must be >= 1")
    upper = res.h - 1e-9  # keep the leading root out even with Newton jitter
    sel = [r.mu for r in res.entries
           if cutoff < r.mu.real < upper and r.mu.imag >= 0.0]
    all_mus = [r.mu for r in res.entries]
    for mu in sel:
        if mu.imag > 0 and not any(abs(m - mu.conjugate()) < 1e-12 for m in all_mus):
            warnings.warn(f"conjugate of {mu} missing from the resonance set; "
                          "window boundary truncated a pair", stacklevel=2)
    terms = []
    for mu in sel:
        v = _exp_integral(mu, T)
        terms.append(v.real if mu.imag == 0.0 else 2.0 * v.real)
    return math.fsum(terms)


@dataclass(frozen=True)
class FitWindow:
    T_start: float
    T_end: float
    slope: float
    n_points: int


@dataclass(frozen=True)
class PotSeries:
    """Orbit counts vs spectral prediction, with the residual exponent fit.

    windows carry per-window least-squares slopes; over a span shorter than
    an oscillation period those describe lobe shape, not growth, so the
    headline fitted_exponent pools every sign-stable point (sign changes
    and the log|R| dips next to them excluded) into one regression.
    """

    T: np.ndarray
    pi: np.ndarray
    pi_tilde: np.ndarray
    leading: np.ndarray
    correction: np.ndarray
    residual: np.ndarray
    windows: tuple[FitWindow, ...]
    fitted_exponent: float  # pooled sign-stable regression; nan if underdetermined


def _sign_stable_windows(idx0: int, residual: np.ndarray,
                         trim: int, min_points: int):
    """Maximal runs of constant sign over residual[idx0:], trimmed at the
    run ends that border a sign change."""
    n = len(residual)
    runs = []
    i = idx0
    while i < n:
        s = np.sign(residual[i])
        j = i
        while j + 1 < n and np.sign(residual[j + 1]) == s and s != 0:
            j += 1
        if s != 0:
            lo = i + (trim if i > idx0 else 0)
            hi = j - (trim if j < n - 1 else 0)
            if hi - lo + 1 >= min_points:
                runs.append((lo, hi))
        i = j + 1
    return runs


def pot_series(f: RoofFunction, T_grid, res: ResonanceSet, cutoff: float,
               budget: float = DEFAULT_WORK_BUDGET, workers: int = 1,
               min_window_points: int = 4, trim: int = 1) -> PotSeries:
    """Orbit counts against the spectral prediction on an ascending T grid.

    residual = pi_tilde - leading - correction columnwise; the exponent fit
    is the least-squares slope of log|residual| vs T per sign-stable window
    of the top half of the grid, and fitted_exponent is the largest such
    slope (the binding one for upper-bound checks).
    """
    T = np.asarray(T_grid, dtype=float)
    if T.ndim != 1 or len(T) < 2 or np.any(np.diff(T) <= 0):
        raise ValueError("T_grid must be ascending with at least 2 points")
    pi, pit = pi_series(f, T, budget=budget, workers=workers)
    leading = np.array([leading_integral(res.h, t) for t in T])
    corr = np.array([correction_sum(res, cutoff, t) for t in T])
    residual = pit - leading - corr
    windows = []
    pooled: list[int] = []
    for lo, hi in _sign_stable_windows(len(T) // 2, residual,
                                       trim, min_window_points):
        ts = T[lo:hi + 1]
        ys = np.log(np.abs(residual[lo:hi + 1]))
        slope = float(np.polyfit(ts, ys, 1)[0])
        windows.append(FitWindow(T_start=float(ts[0]), T_end=float(ts[-1]),
                                 slope=slope, n_points=len(ts)))
        pooled.extend(range(lo, hi + 1))
    if len(pooled) >= max(8, 2 * min_window_points):
        fitted = float(np.polyfit(T[pooled],
                                  np.log(np.abs(residual[pooled])), 1)[0])
    else:
        fitted = math.nan
    return PotSeries(T=T, pi=pi, pi_tilde=pit, leading=leading,
                     correction=corr, residual=residual,
                     windows=tuple(windows), fitted_exponent=fitted)


def flat_trace_orbit_side(f: RoofFunction, phi,
                          budget: float = DEFAULT_WORK_BUDGET,
                          workers: int = 1) -> float:
    """Sum over prime orbits and repetitions of |g| phi(n |g|)/(1 - E^{-n}).

    phi can be any object with t0/t1 attributes and a pointwise call; the
    sum truncates exactly at the support end t1.
    """
    t1 = float(phi.t1)
    _guard_counting(f, t1, budget)
    lengths = _counting_lengths(f, t1)
    stats = orbit_stats(f, lengths, np.zeros(0), collect_cap=t1,
                        budget=budget, workers=workers)
    terms = []
    inv_ell = 1.0 / f.ell
    for nw, period in zip(stats.coll_n, stats.coll_period):
        nw = int(nw)
        period = float(period)
        r = 1
        while r * period <= t1:
            w = phi(r * period)
            if w != 0.0:
                terms.append(period * w / (1.0 - inv_ell ** (r * nw)))
            r += 1
    return math.fsum(terms)


@functools.lru_cache(maxsize=8)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def flat_trace_spectral_side(res: ResonanceSet, phi, cutoff: float) -> float:
    """Re sum over Re mu > cutoff of integral phi(t) e^{mu t} dt.

    Gauss-Legendre on the support of phi; phi.quad_points nodes (default
    resolution resolves oscillations up to |Im mu| ~ 2 pi * 40 on unit-width
    supports with room to spare).
    """
    mus = [r.mu for r in res.entries if r.mu.real > cutoff]
    if not mus:
        return 0.0
    nq = getattr(phi, "quad_points", 800)
    x, w = _leggauss(nq)
    a, b = float(phi.t0), float(phi.t1)
    ts = 0.5 * (b - a) * x + 0.5 * (b + a)
    base = 0.5 * (b - a) * w * phi(ts)
    vals = np.exp(np.outer(mus, ts)) @ base
    return math.fsum(v.real for v in vals)
