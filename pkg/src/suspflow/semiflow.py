"""Suspension semiflow over the angle-multiplying base map.

Points live in X_f = {(x, y): 0 <= y < f(x)}; the flow moves up at unit
speed and drops through the roof via x -> ell*x mod 1. Backward orbits are
enumerated exhaustively by first-passage depth-first search over preimage
digits; branch identity is the exact integer digit path (j, k), so the
preimage point can always be recomputed as ((x + j) / ell^k) in one step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .budget import DEFAULT_WORK_BUDGET
from .roof import RoofFunction

# Single source of truth for membership of (T^t)^{-1}(z): absolute circle
# distance plus height mismatch.
FORWARD_TOL = 1e-10


@dataclass(frozen=True)
class FlowPoint:
    x: float
    y: float


@dataclass(frozen=True)
class CocycleData:
    """Derivative data of T^t along an orbit segment.

    E is the accumulated base expansion (an exact integer power of ell),
    F the derivative of the corresponding Birkhoff sum, and S = -F/E the
    shear of the time coordinate under the transpose-inverse action.
    """

    E: int
    F: float
    S: float


@dataclass(frozen=True)
class BackwardBranch:
    """One element w of (T^t)^{-1}(z).

    k is the number of base crossings, j the integer digit path (so the
    base coordinate of w is (x + j) / ell^k), crossing_times are the
    forward times 0 < s_k < ... < s_1 <= t at which the branch orbit
    touches the base, stored descending.
    """

    w: FlowPoint
    k: int
    j: int
    crossing_times: tuple[float, ...]
    cocycle: CocycleData


def canonical_point(f: RoofFunction, x: float, y: float) -> FlowPoint:
    """Project (x, y) with y >= 0 into X_f by dropping through the roof."""
    if y < 0:
        raise ValueError("height must be >= 0")
    x = float(x) % 1.0
    n = f.hitting_count(x, y)
    if n == 0:
        return FlowPoint(x, y)
    y = y - f.birkhoff_sum(x, n)
    for _ in range(n):
        x = (f.ell * x) % 1.0
    return FlowPoint(x, max(0.0, y))


def flow(f: RoofFunction, z: FlowPoint, t: float) -> FlowPoint:
    """T^t(z) for t >= 0."""
    if t < 0:
        raise ValueError("semiflow: t must be >= 0")
    return canonical_point(f, z.x, z.y + t)


def cocycle(f: RoofFunction, z: FlowPoint, t: float) -> CocycleData:
    """(E, F, S) of DT^t at z; boundary ties resolved by the hit count itself."""
    if t < 0:
        raise ValueError("semiflow: t must be >= 0")
    n = f.hitting_count(z.x, z.y + t)
    E = f.ell ** n
    F = f.birkhoff_derivative(z.x, n)
    return CocycleData(E=E, F=F, S=-F / E)


def _roof_arrays(f: RoofFunction):
    return (float(f.c0), np.asarray(f.cos_coeffs, dtype=float),
            np.asarray(f.sin_coeffs, dtype=float))


def backward_orbit(f: RoofFunction, z: FlowPoint, t: float,
                   budget: float = DEFAULT_WORK_BUDGET) -> list[BackwardBranch]:
    """Complete enumeration of (T^t)^{-1}(z), sorted by (k, j).

    Each backward digit path is followed until the first depth k at which
    the remaining time is exhausted (y + f^(k) - t >= 0); that depth emits
    exactly one branch. The budget caps visited tree nodes.
    """
    if t <= 0:
        raise ValueError("backward_orbit needs t > 0")
    if z.y >= t:
        w = FlowPoint(z.x, z.y - t)
        return [BackwardBranch(w=w, k=0, j=0, crossing_times=(),
                               cocycle=CocycleData(E=1, F=0.0, S=0.0))]
    c0, ca, sb = _roof_arrays(f)
    k, j, yw, shear, times = _kernels.backward_branches(
        f.ell, c0, ca, sb, z.x, z.y, t, budget)
    offsets = np.concatenate(([0], np.cumsum(k)))
    order = np.lexsort((j, k))
    out = []
    for idx in order:
        ki = int(k[idx])
        ji = int(j[idx])
        E = f.ell ** ki
        S = float(shear[idx])
        F = -S * E
        xw = (z.x + ji) / f.ell ** ki
        ct = tuple(float(v) for v in times[offsets[idx]:offsets[idx] + ki])
        out.append(BackwardBranch(
            w=FlowPoint(xw, float(yw[idx])), k=ki, j=ji,
            crossing_times=ct, cocycle=CocycleData(E=E, F=F, S=S)))
    return out


def backward_count(f: RoofFunction, z: FlowPoint, t: float,
                   budget: float = DEFAULT_WORK_BUDGET) -> int:
    """Number of backward branches, without materializing them."""
    if t <= 0:
        raise ValueError("backward_count needs t > 0")
    if z.y >= t:
        return 1
    c0, ca, sb = _roof_arrays(f)
    return int(_kernels.backward_count(f.ell, c0, ca, sb, z.x, z.y, t, budget))


def crossing_times(f: RoofFunction, z: FlowPoint, branch: BackwardBranch,
                   t: float) -> list[float]:
    """Times s_1 > ... > s_k at which the branch orbit crosses the base.

    s_j = t - y - (partial Birkhoff sum of the first j-1 preimage steps
    seen from z). Rejects branches that do not forward-flow to z.
    """
    end = flow(f, branch.w, t)
    err = max(_circle_dist(end.x, z.x), abs(end.y - z.y))
    if err > FORWARD_TOL or f.hitting_count(branch.w.x, branch.w.y + t) != branch.k:
        raise ValueError("branch does not belong to (z, t)")
    out = []
    partial = 0.0
    comp = 0.0
    for d in range(1, branch.k + 1):
        out.append(t - z.y - partial)
        xd = (z.x + branch.j % f.ell ** d) / f.ell ** d
        term = f.eval(xd) - comp
        tmp = partial + term
        comp = (tmp - partial) - term
        partial = tmp
    return out


def _circle_dist(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


def forward_errors(f: RoofFunction, z: FlowPoint, t: float,
                   branches: list[BackwardBranch]) -> np.ndarray:
    """Vectorized forward check: max of circle and height error per branch.

    Verifies the crossing count as part of the check: the accumulated roof
    sum along the declared k steps must bracket y_w + t.
    """
    if not branches:
        return np.zeros(0)
    k = np.array([b.k for b in branches])
    xw = np.array([b.w.x for b in branches])
    yw = np.array([b.w.y for b in branches])
    xs = xw.copy()  # after the loop: tau^k(x_w) per branch
    total = np.zeros_like(xs)
    comp = np.zeros_like(xs)
    for i in range(int(k.max()) if len(k) else 0):
        active = i < k
        term = np.where(active, np.atleast_1d(f.eval(xs)), 0.0) - comp
        tmp = total + term
        comp = np.where(active, (tmp - total) - term, comp)
        total = np.where(active, tmp, total)
        xs = np.where(active, (f.ell * xs) % 1.0, xs)
    height = yw + t - total
    dx = np.abs(xs - z.x) % 1.0
    dx = np.minimum(dx, 1.0 - dx)
    err = np.maximum(dx, np.abs(height - z.y))
    # hitting-count confirmation: 0 <= height < f(tau^k x_w) up to tolerance
    bad = (height < -FORWARD_TOL) | (height > np.atleast_1d(f.eval(xs)) + FORWARD_TOL)
    return np.where(bad, np.inf, err)
