"""Transversality diagnostics for tuples of backward branches.

The weight W^r takes the value 1 exactly on the invariant cone slice and
grows like |xi - S eta|^r off it, so the tuple sums quantify how much the
backward shears S(w) pile up near any single direction. The exceptional
set construction greedily removes the depth-n preimage points responsible
for the heaviest tuple mass.

Two printed conventions are normalized here: the angle bracket is evaluated
at |s| (so <s> = |s| holds for negative s too), and all tuple sums fix
eta = 2 (any |eta| >= 2 gives the same classification by ray constancy).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .budget import DEFAULT_WORK_BUDGET, WorkBudgetExceeded
from .roof import RoofFunction
from .semiflow import BackwardBranch, FlowPoint, backward_orbit

ETA = 2.0

XI_GRID_POINTS = 512
XI_REFINE_POINTS = 64


def sigma(u):
    """exp(-1/u) for u > 0, extended by 0; the C-infinity cutoff seed."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    if out.ndim == 0:
        return float(out)
    return out


def chi_bump(t):
    """Smooth transition: 1 for t <= 1, 0 for t >= 2, strictly monotone between."""
    t = np.asarray(t, dtype=float)
    a = sigma(2.0 - t)
    b = sigma(t - 1.0)
    out = np.where(t <= 1.0, 1.0, np.where(t >= 2.0, 0.0, a / (a + b + 1e-300)))
    if out.ndim == 0:
        return float(out)
    return out


def angle_bracket(s):
    """<s> = chi(|s|) + (1 - chi(|s|)) |s|; equals 1 for |s| <= 1, |s| for |s| >= 2."""
    a = np.abs(np.asarray(s, dtype=float))
    c = chi_bump(a)
    out = c + (1.0 - c) * a
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ConeParams:
    gamma0: float
    theta0: float
    r: float

    def __post_init__(self):
        if self.theta0 <= 0 or self.r <= 0:
            raise ValueError("cone parameters must be positive")

    @classmethod
    def for_roof(cls, f: RoofFunction, gamma0: float | None = None,
                 r: float | None = None) -> "ConeParams":
        """theta0 = kappa_0/(gamma0 ell - 1); r must exceed y_max/y_min."""
        if gamma0 is None:
            gamma0 = 0.5 * (1.0 / f.ell + 1.0)
        if not 1.0 / f.ell < gamma0 < 1.0:
            raise ValueError(f"gamma0 must lie in (1/{f.ell}, 1)")
        if r is None:
            r = 2.0 * f.y_max / f.y_min
        if r <= f.y_max / f.y_min:
            raise ValueError("regularity exponent r must exceed y_max/y_min")
        return cls(gamma0=gamma0, theta0=f.kappa0 / (gamma0 * f.ell - 1.0), r=r)


def W_r(S, E, cone: ConeParams, xi, eta):
    """Cone weight <E |xi - S eta| / (theta0 <eta>)>^r, >= 1 everywhere.

    Far off the cone the power overflows to inf; callers rely on 1/W -> 0.
    """
    S = np.asarray(S, dtype=float)
    E = np.asarray(E, dtype=float)
    arg = E * np.abs(np.asarray(xi) - S * eta) / (cone.theta0 * angle_bracket(eta))
    with np.errstate(over="ignore"):
        out = np.power(np.asarray(angle_bracket(arg), dtype=float), cone.r)
    if out.ndim == 0:
        return float(out)
    return out


def tuple_SE(branches: list[BackwardBranch], indices) -> tuple[float, float]:
    """S adds, 1/E adds: (sum_i S_i, 1 / sum_i 1/E_i)."""
    S = math.fsum(branches[i].cocycle.S for i in indices)
    inv = math.fsum(1.0 / branches[i].cocycle.E for i in indices)
    return S, 1.0 / inv


def filter_B(f: RoofFunction, z: FlowPoint, t: float, J: tuple[float, float],
             budget: float = DEFAULT_WORK_BUDGET) -> list[BackwardBranch]:
    """Branches of (T^t)^{-1}(z) with e^{at} <= E <= e^{bt}, J = (a, b)."""
    a, b = J
    if not 0 < a < b:
        raise ValueError("need 0 < a < b")
    lo, hi = math.exp(a * t), math.exp(b * t)
    return [w for w in backward_orbit(f, z, t, budget=budget)
            if lo <= w.cocycle.E <= hi]


def depth_prefix(w: BackwardBranch, ell: int, n: int) -> int | None:
    """Digit path of the depth-n base point on w's forward orbit, if any.

    The orbit of w passes through a depth-n preimage of the target fiber
    exactly when it crosses the base at least n+1 times; the point is then
    (x + (j mod ell^n)) / ell^n.
    """
    if w.k < n + 1:
        return None
    return w.j % ell ** n


def _xi_grid(p: int, cone: ConeParams, points: int) -> np.ndarray:
    # every tuple shear satisfies |S| <= p gamma0 theta0 < p theta0
    half = cone.theta0 * (p if p > 1 else 1.0)
    return np.linspace(-half, half, points)


def _tuple_sums(branches: list[BackwardBranch], p: int, cone: ConeParams,
                xis: np.ndarray, excluded: frozenset[int], ell: int, n: int,
                budget: float) -> np.ndarray:
    """sum_star evaluated on a whole xi grid at once; one row sum per tuple.

    Deterministic: head tuples run in lexicographic index order, the last
    component is a fixed-shape numpy reduction, rows accumulate in order.
    """
    kept = [w for w in branches
            if depth_prefix(w, ell, n) not in excluded]
    m = len(kept)
    if m == 0:
        return np.zeros_like(xis)
    if float(m) ** p > budget:
        raise WorkBudgetExceeded(float(m) ** p, budget, "tuple sum")
    S1 = np.array([w.cocycle.S for w in kept])
    invE1 = np.array([1.0 / w.cocycle.E for w in kept])
    total = np.zeros_like(xis)
    if p == 1:
        with np.errstate(over="ignore"):
            W = W_r(S1[:, None], 1.0 / invE1[:, None], cone, xis[None, :], ETA)
        return np.sum(1.0 / W, axis=0)
    for head in itertools.product(range(m), repeat=p - 1):
        S = math.fsum(S1[i] for i in head) + S1
        E = 1.0 / (math.fsum(invE1[i] for i in head) + invE1)
        with np.errstate(over="ignore"):
            W = W_r(S[:, None], E[:, None], cone, xis[None, :], ETA)
        total += np.sum(1.0 / W, axis=0)
    return total


def sum_star(f: RoofFunction, z: FlowPoint, t: float, J: tuple[float, float],
             p: int, cone: ConeParams, xi: float,
             excluded: frozenset[int] = frozenset(), n: int = 1,
             budget: float = DEFAULT_WORK_BUDGET) -> float:
    """Sum over admissible p-tuples of 1/W^r at (xi, eta=2).

    A tuple is admissible when none of its components passes through an
    excluded depth-n preimage point (components with fewer than n+1 base
    crossings never do).
    """
    B = filter_B(f, z, t, J, budget=budget)
    return float(_tuple_sums(B, p, cone, np.array([float(xi)]),
                             frozenset(excluded), f.ell, n, budget)[0])


def sup_sum_star(f: RoofFunction, z: FlowPoint, t: float,
                 J: tuple[float, float], p: int, cone: ConeParams,
                 excluded: frozenset[int] = frozenset(), n: int = 1,
                 grid_points: int = XI_GRID_POINTS,
                 budget: float = DEFAULT_WORK_BUDGET) -> tuple[float, float]:
    """(sup, argmax xi) of sum_star over the xi grid plus one refinement pass."""
    B = filter_B(f, z, t, J, budget=budget)
    xis = _xi_grid(p, cone, grid_points)
    vals = _tuple_sums(B, p, cone, xis, frozenset(excluded), f.ell, n, budget)
    i = int(np.argmax(vals))
    lo = xis[max(i - 1, 0)]
    hi = xis[min(i + 1, len(xis) - 1)]
    fine = np.linspace(lo, hi, XI_REFINE_POINTS)
    fvals = _tuple_sums(B, p, cone, fine, frozenset(excluded), f.ell, n, budget)
    j = int(np.argmax(fvals))
    if fvals[j] > vals[i]:
        return float(fvals[j]), float(fine[j])
    return float(vals[i]), float(xis[i])


def default_birkhoff_cap(t: float, n: int, ell: int, a: float) -> float:
    """(m+1) n log(ell) / a with m = floor(a t / (n log ell))."""
    m = math.floor(a * t / (n * math.log(ell)))
    return (m + 1) * n * math.log(ell) / a


def exceptional_set_greedy(f: RoofFunction, z: FlowPoint, t: float,
                           J: tuple[float, float], p: int, q: int, n: int,
                           cone: ConeParams,
                           birkhoff_cap: float | None = None,
                           budget: float = DEFAULT_WORK_BUDGET) -> frozenset[int]:
    """Greedy exceptional subset of the depth-n preimage points.

    Tuple scores Delta*(x) aggregate the 1/W^r mass (at the worst xi of the
    unrestricted sum) of all branch tuples refining the prefix tuple x,
    restricted to branches whose Birkhoff sum stays under the cap. Scores
    sort descending with canonical tuple order breaking ties; component
    points accumulate into Y_k and the result is the largest Y_k with
    #Y_k <= p*q.
    """
    a = J[0]
    if birkhoff_cap is None:
        birkhoff_cap = default_birkhoff_cap(t, n, f.ell, a)
    B = filter_B(f, z, t, J, budget=budget)
    _, xi_star = sup_sum_star(f, z, t, J, p, cone, n=n, budget=budget)

    groups: dict[int, list[BackwardBranch]] = {}
    for w in B:
        pref = depth_prefix(w, f.ell, n)
        if pref is None:
            continue
        # Birkhoff sum along the branch, seen from the target point
        if t - z.y + w.w.y > birkhoff_cap:
            continue
        groups.setdefault(pref, []).append(w)
    prefixes = sorted(groups)
    work = float(sum(len(g) for g in groups.values())) ** p
    if work > budget:
        raise WorkBudgetExceeded(work, budget, "greedy tuple scores")

    scores: list[tuple[float, tuple[int, ...]]] = []
    for combo in itertools.product(prefixes, repeat=p):
        val = 0.0
        for tup in itertools.product(*(groups[c] for c in combo)):
            S = math.fsum(w.cocycle.S for w in tup)
            invE = math.fsum(1.0 / w.cocycle.E for w in tup)
            val += 1.0 / W_r(S, 1.0 / invE, cone, xi_star, ETA)
        scores.append((val, combo))
    scores.sort(key=lambda sc: (-sc[0], sc[1]))

    chosen: set[int] = set()
    for _, combo in scores:
        grown = chosen | set(combo)
        if len(grown) > p * q:
            break
        chosen = grown
    return frozenset(chosen)


def per_delta_member(ell: int, n: int, delta: float, x: float) -> bool:
    """Is x within circle distance delta of a tau-periodic point of period <= n?"""
    if delta <= 0:
        raise ValueError("delta must be positive")
    x = x % 1.0
    for k in range(1, n + 1):
        M = ell ** k - 1
        d = abs(x * M - round(x * M)) / M
        if d < delta:
            return True
    return False


@dataclass(frozen=True)
class TransversalityReport:
    z: FlowPoint
    t: float
    J: tuple[float, float]
    p: int
    epsilon: float
    n: int
    n_branches: int
    exceptional: tuple[int, ...]
    sup_value: float
    xi_at_sup: float
    threshold: float
    passed: bool
    skipped: str | None = None


def generic_threshold(h: float, J: tuple[float, float], p: int,
                      epsilon: float, t: float) -> float:
    a, b = J
    return math.exp((max(p * h - a, 0.0) + p * (b - a) + epsilon) * t)


def check_generic_condition(f: RoofFunction, z_samples, t: float,
                            J: tuple[float, float], p: int, epsilon: float,
                            n: int, cone: ConeParams,
                            delta: float = 1e-8,
                            budget: float = DEFAULT_WORK_BUDGET,
                            N: int = 32) -> list[TransversalityReport]:
    """Per-sample exceptional set, grid sup of sum_star, threshold comparison.

    Samples too close to low-period points of the base map (within delta)
    are reported as skipped rather than evaluated.
    """
    from . import spectral

    if not 0 < epsilon < min(J[0], 1.0):
        raise ValueError("need 0 < epsilon < min(a, 1)")
    h = spectral.entropy(f, N=N)
    q = math.ceil(10.0 * J[0] / epsilon)
    thresh = generic_threshold(h, J, p, epsilon, t)
    reports = []
    for z in z_samples:
        if per_delta_member(f.ell, n, delta, z.x):
            reports.append(TransversalityReport(
                z=z, t=t, J=J, p=p, epsilon=epsilon, n=n, n_branches=0,
                exceptional=(), sup_value=math.nan, xi_at_sup=math.nan,
                threshold=thresh, passed=False,
                skipped=f"x within {delta} of a periodic point of period <= {n}"))
            continue
        exc = exceptional_set_greedy(f, z, t, J, p, q, n, cone, budget=budget)
        sup, xi = sup_sum_star(f, z, t, J, p, cone, excluded=exc, n=n,
                               budget=budget)
        reports.append(TransversalityReport(
            z=z, t=t, J=J, p=p, epsilon=epsilon, n=n,
            n_branches=len(filter_B(f, z, t, J, budget=budget)),
            exceptional=tuple(sorted(exc)), sup_value=sup, xi_at_sup=xi,
            threshold=thresh, passed=bool(sup <= thresh), skipped=None))
    return reports
