import math

import numpy as np
import pytest

from suspflow.budget import WorkBudgetExceeded
from suspflow.semiflow import (FlowPoint, backward_count, backward_orbit,
                               canonical_point, cocycle, crossing_times, flow,
                               forward_errors)


def test_canonical_point_wraps_into_fiber(std):
    z = canonical_point(std, 1.3, 0.0)
    assert 0.0 <= z.x < 1.0 and 0.0 <= z.y < std(z.x)
    z2 = canonical_point(std, 0.25, std(0.25) + 0.1)   # one crossing up
    assert z2.x == pytest.approx((0.25 * 2) % 1.0)


def test_flow_additivity(std, rng):
    for _ in range(30):
        z = canonical_point(std, float(rng.random()),
                            float(rng.random()) * 0.5)
        s, t = float(rng.uniform(0, 4)), float(rng.uniform(0, 4))
        a = flow(std, flow(std, z, s), t)
        b = flow(std, z, s + t)
        assert a.x == pytest.approx(b.x, abs=1e-9)
        assert a.y == pytest.approx(b.y, abs=1e-9)


def test_flow_zero_is_identity(std):
    z = canonical_point(std, 0.77, 0.3)
    w = flow(std, z, 0.0)
    assert (w.x, w.y) == (z.x, z.y)


def test_cocycle_E_is_exact_power(std, rng):
    for _ in range(20):
        z = canonical_point(std, float(rng.random()), 0.1)
        t = float(rng.uniform(0, 10))
        c = cocycle(std, z, t)
        k = std.hitting_count(z.x, t + z.y)
        assert c.E == std.ell ** k
        assert isinstance(c.E, int)


def test_cocycle_chain_rule(std, rng):
    # E multiplies; F_{s+t}(z) = F_s(T^t z) E_t(z) + F_t(z)
    for _ in range(50):
        z = canonical_point(std, float(rng.random()),
                            float(rng.random()) * 0.5)
        s, t = float(rng.uniform(0.2, 5)), float(rng.uniform(0.2, 5))
        ct = cocycle(std, z, t)
        cs = cocycle(std, flow(std, z, t), s)
        both = cocycle(std, z, s + t)
        assert both.E == cs.E * ct.E
        assert both.F == pytest.approx(cs.F * ct.E + ct.F, rel=0, abs=1e-9)


def test_backward_branches_forward_flow(std, rng):
    for _ in range(25):
        z = canonical_point(std, float(rng.random()),
                            float(rng.random()) * 0.5)
        t = float(rng.uniform(2.0, 8.0))
        branches = backward_orbit(std, z, t)
        errs = forward_errors(std, z, t, branches)
        assert np.max(errs) < 1e-9
        ks = np.array([w.k for w in branches])
        assert ks.min() >= math.floor(t / std.y_max)
        assert ks.max() <= math.ceil(t / std.y_min)


def test_backward_complete_vs_brute_force(const2):
    # unit roof: preimages at depth d are exactly the 2^d digit paths
    z = canonical_point(const2, 0.3, 0.25)
    t = 3.0    # y + t = 3.25 -> k = 3 crossings for every branch
    branches = backward_orbit(const2, z, t)
    assert len(branches) == 8
    assert sorted(w.j for w in branches) == list(range(8))
    for w in branches:
        assert w.k == 3
        assert w.w.x == pytest.approx((z.x + w.j) / 8)
        assert w.w.y == pytest.approx(0.25)   # height preserved mod 1


def test_backward_k0_branch_iff_y_at_least_t(std):
    z = canonical_point(std, 0.4, 0.6)
    bs = backward_orbit(std, z, 0.5)
    assert [w.k for w in bs] == [0]
    assert bs[0].w.y == pytest.approx(0.1)
    bs2 = backward_orbit(std, z, 0.7)
    assert all(w.k >= 1 for w in bs2)


def test_backward_canonical_order(std):
    z = canonical_point(std, 0.123, 0.2)
    bs = backward_orbit(std, z, 4.0)
    key = [(w.k, w.j) for w in bs]
    assert key == sorted(key)
    assert len(set(key)) == len(key)


def test_crossing_times_structure(std):
    z = canonical_point(std, 0.37, 0.4)
    t = 3.7
    for w in backward_orbit(std, z, t):
        ts = crossing_times(std, z, w, t)
        assert len(ts) == w.k
        if w.k:
            assert ts[0] == pytest.approx(t - z.y, abs=1e-12)
            assert all(a > b for a, b in zip(ts, ts[1:]))
            assert ts[-1] > -1e-12


def test_backward_count_matches_enumeration(std):
    z = canonical_point(std, 0.61, 0.15)
    for t in (1.0, 2.5, 4.0):
        assert backward_count(std, z, t) == len(backward_orbit(std, z, t))


def test_backward_budget_guard(std):
    z = canonical_point(std, 0.5, 0.0)
    with pytest.raises(WorkBudgetExceeded):
        backward_orbit(std, z, 14.0, budget=100.0)


def test_cocycle_F_sign_and_shear(const2):
    # constant roof: f' = 0, so F = 0 and S = 0 along every branch
    z = canonical_point(const2, 0.3, 0.25)
    for w in backward_orbit(const2, z, 4.0):
        assert w.cocycle.F == 0.0
        assert w.cocycle.S == 0.0
