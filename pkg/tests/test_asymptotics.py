import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad, trapezoid

from suspflow.asymptotics import (FitWindow, TestFunction, correction_sum,
                                  flat_trace_orbit_side,
                                  flat_trace_spectral_side, leading_integral,
                                  pot_series, _sign_stable_windows)
from suspflow.orbits import count_pi_tilde, enumerate_prime_orbits, pi_series
from suspflow.roof import constant_roof, standard_roof
from suspflow.spectral import (Resonance, ResonanceSet, SearchWindow,
                               constant_roof_resonances)


def test_bump_support_and_profile():
    phi = TestFunction(8.0, 10.0)
    assert phi(7.999) == 0.0 and phi(10.001) == 0.0
    assert phi(9.0) == 1.0            # center of the plateau argument
    assert 0 < phi(8.4) < 1
    assert phi(8.5) == phi(9.5)       # symmetric about the midpoint
    with pytest.raises(ValueError):
        TestFunction(3.0, 2.0)
    with pytest.raises(ValueError):
        TestFunction(0.0, 2.0)


def test_leading_integral_quadrature_oracle():
    h, T = 0.7, 12.0
    # trapezoid refinement oracle for int_1^T e^{h t}/t dt
    for n in (1 << 14, 1 << 16):
        ts = np.linspace(1.0, T, n + 1)
        tr = trapezoid(np.exp(h * ts) / ts, ts)
    assert leading_integral(h, T) == pytest.approx(tr, rel=1e-7)
    assert leading_integral(h, 1.0) == 0.0
    with pytest.raises(ValueError):
        leading_integral(h, 0.5)


def test_correction_sum_realness_and_weighting():
    h = math.log(2)
    # synthetic set: one real subleading and one conjugate pair
    entries = (Resonance(mu=0.5, residual=0.0, N_used=0),
               Resonance(mu=0.4 + 3.0j, residual=0.0, N_used=0),
               Resonance(mu=0.4 - 3.0j, residual=0.0, N_used=0))
    res = ResonanceSet(entries=entries, h=h,
                       window=SearchWindow(0.2, h + 0.05, 5.0), failed=())
    T = 9.0
    got = correction_sum(res, 0.3, T)
    def ei(mu):
        re = quad(lambda t: (cmath.exp(mu * t) / t).real, 1.0, T, limit=400)[0]
        im = quad(lambda t: (cmath.exp(mu * t) / t).imag, 1.0, T, limit=400)[0]
        return complex(re, im)
    want = ei(0.5) + 2.0 * ei(0.4 + 3.0j).real
    assert got == pytest.approx(want, rel=1e-9)
    # cutoff excludes the pair
    got2 = correction_sum(res, 0.45, T)
    assert got2 == pytest.approx(ei(0.5), rel=1e-9)


def test_correction_sum_excludes_leading(const2):
    res = constant_roof_resonances(2, 1.0, 3)
    # every entry sits at Re = h, so nothing is below h and the sum is 0
    assert correction_sum(res, 0.2, 8.0) == 0.0


def test_correction_sum_warns_on_missing_conjugate():
    h = math.log(2)
    entries = (Resonance(mu=0.4 + 3.0j, residual=0.0, N_used=0),)
    res = ResonanceSet(entries=entries, h=h,
                       window=SearchWindow(0.2, h + 0.05, 5.0), failed=())
    with pytest.warns(UserWarning, match="conjugate"):
        correction_sum(res, 0.3, 6.0)


def test_flat_trace_constant_closed_form(const2):
    # Orbit side: sum over j >= 1 of phi(j) * 2^j, by the necklace identity
    # sum_{d | j} d L(d) = 2^j - 1 plus the removed length-1 fixed word.
    phi = TestFunction(2.5, 3.5)
    got = flat_trace_orbit_side(const2, phi)
    assert got == pytest.approx(phi(3.0) * 8.0, rel=1e-12)
    # hand enumeration: two period-3 primes plus the third repetition of
    # the single period-1 orbit, all with multiplier 2^3
    want = phi(3.0) * (2 * 3 / (1 - 0.125) + 1 / (1 - 0.125))
    assert got == pytest.approx(want, rel=1e-12)


def test_flat_trace_constant_spectral_matches(const2):
    phi = TestFunction(8.0, 10.0)
    orbit = flat_trace_orbit_side(const2, phi)
    res = constant_roof_resonances(2, 1.0, 41)
    spec = flat_trace_spectral_side(res, phi, cutoff=0.0)
    assert abs(orbit - spec) < 1e-6
    # orbit side is exactly sum phi(j) 2^j here
    want = math.fsum(phi(float(j)) * 2.0 ** j for j in range(1, 11))
    assert orbit == pytest.approx(want, rel=1e-12)


def test_flat_trace_orbit_side_linearity(const2):
    # duck-typed test function: sum of two bumps
    a = TestFunction(2.5, 3.5)
    b = TestFunction(4.5, 5.5)
    class Two:
        t0, t1 = a.t0, b.t1
        def __call__(self, t):
            return a(t) + b(t)
    got = flat_trace_orbit_side(const2, Two())
    assert got == pytest.approx(flat_trace_orbit_side(const2, a)
                                + flat_trace_orbit_side(const2, b), rel=1e-12)


def test_flat_trace_spectral_quadrature_converges():
    res = constant_roof_resonances(2, 1.0, 25)
    phi = TestFunction(8.0, 10.0)
    coarse = flat_trace_spectral_side(res, phi, 0.0)
    fine = flat_trace_spectral_side(
        res, TestFunction(8.0, 10.0, quad_points=1600), 0.0)
    assert coarse == pytest.approx(fine, rel=1e-10)


def test_repetitions_enter_orbit_side(std):
    # a bump spanning twice the shortest period sees the r = 2 term
    orbs = [o for o in enumerate_prime_orbits(std, 2)]
    p0 = min(o.period for o in orbs)
    lo, hi = 2 * p0 - 0.05, 2 * p0 + 0.05
    phi = TestFunction(lo, hi)
    got = flat_trace_orbit_side(std, phi)
    terms = []
    for o in enumerate_prime_orbits(std, 12):
        r = 1
        while r * o.period <= hi:
            v = phi(r * o.period)
            if v:
                terms.append(o.period * v / (1.0 - o.multiplier ** float(-r)))
            r += 1
    assert got == pytest.approx(math.fsum(terms), rel=1e-12)


def test_sign_stable_windows_extraction():
    # synthetic residual: ++++ ---- ++ with trim 1 at sign-change borders
    resid = np.array([1, 1, 1, 1, -1, -1, -1, -1, 1, 1], dtype=float)
    wins = _sign_stable_windows(0, resid, trim=1, min_points=2)
    # first run keeps its untrimmed left edge, the middle run loses both
    # borders, the final 2-point run trims to a single point and drops
    assert wins == [(0, 2), (5, 6)]
    late = _sign_stable_windows(4, resid, trim=0, min_points=2)
    assert late == [(4, 7), (8, 9)]


def test_pot_series_zero_resonances_residual(std):
    # with no corrections the residual is exactly pi_tilde - leading
    res = ResonanceSet(entries=(), h=0.6976930659539942,
                       window=SearchWindow(0.3, 0.75, 1.0), failed=())
    grid = np.arange(10.0, 12.0 + 1e-9, 0.25)
    series = pot_series(std, grid, res, cutoff=0.3)
    pis, tildes = pi_series(std, grid)
    for i in range(len(grid)):
        lead = leading_integral(res.h, float(grid[i]))
        assert series.correction[i] == 0.0
        assert series.pi_tilde[i] == pytest.approx(tildes[i], rel=1e-12)
        assert series.residual[i] == pytest.approx(tildes[i] - lead, rel=1e-9)


def test_pot_series_validates_grid(std):
    res = ResonanceSet(entries=(), h=0.7,
                       window=SearchWindow(0.3, 0.75, 1.0), failed=())
    with pytest.raises(ValueError):
        pot_series(std, np.array([12.0, 11.0]), res, cutoff=0.3)
    with pytest.raises(ValueError):
        pot_series(std, np.array([11.0, 12.0]), res, cutoff=0.9)  # >= h
