"""Prime periodic orbits of the semiflow.

Closed orbits correspond to aperiodic necklaces of the base map: the orbit
through x = j/(ell^n - 1) closes after n base steps, and Lyndon words of
length n index these orbits uniquely. The length-1 word (ell-1) is dropped
because x = 1 is the fixed point x = 0 again. Orbit periods are Birkhoff
sums evaluated along the exact integer orbit of j.
"""
from __future__ import annotations

import math
import multiprocessing
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _kernels
from .budget import DEFAULT_WORK_BUDGET, WorkBudgetExceeded
from .roof import RoofFunction, roof_digest
from .words import lyndon_words, word_value

CACHE_FORMAT = "suspflow-orbits v1"


@dataclass(frozen=True)
class PrimeOrbit:
    n: int                      # word length = number of base crossings
    word: tuple[int, ...]       # Lyndon representative
    j: int                      # word value in base ell
    x_base: Fraction            # exact base point j/(ell^n - 1)
    period: float               # Birkhoff sum of the roof over the orbit
    multiplier: int             # linearized return coefficient ell^n


def orbit_period(f: RoofFunction, j: int, n: int) -> float:
    """Compensated Birkhoff sum along the exact integer orbit of j."""
    M = f.ell ** n - 1
    jj = j % M if M > 1 else 0
    total = 0.0
    comp = 0.0
    for _ in range(n):
        term = f.eval(jj / M) - comp
        tmp = total + term
        comp = (tmp - total) - term
        total = tmp
        jj = (jj * f.ell) % M
    return total


def enumerate_prime_orbits(f: RoofFunction, n_max: int,
                           budget: float = DEFAULT_WORK_BUDGET) -> Iterator[PrimeOrbit]:
    """Every prime orbit with word length <= n_max, in (n, lex-word) order."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    work = sum(float(f.ell) ** n for n in range(1, n_max + 1))
    if work > budget:
        raise WorkBudgetExceeded(work, budget, "orbit enumeration")

    def stream():
        for n in range(1, n_max + 1):
            M = f.ell ** n - 1
            for word in lyndon_words(f.ell, n):
                if n == 1 and word[0] == f.ell - 1:
                    continue
                j = word_value(word, f.ell)
                yield PrimeOrbit(n=n, word=word, j=j, x_base=Fraction(j, M),
                                 period=orbit_period(f, j, n),
                                 multiplier=f.ell ** n)

    return stream()


class OrbitStats(NamedTuple):
    lengths: list[int]
    counts: np.ndarray      # (L, G) int64; orbits of length i with period <= T_g
    min_means: np.ndarray
    max_means: np.ndarray
    coll_n: np.ndarray
    coll_j: np.ndarray
    coll_period: np.ndarray


def _stats_task(args):
    ell, c0, ca, sb, n, thresholds, collect_cap = args
    return _kernels.orbit_counts(ell, c0, ca, sb, [n], thresholds,
                                 collect_cap, math.inf)


def orbit_stats(f: RoofFunction, lengths: list[int], thresholds,
                collect_cap: float = 0.0, budget: float = DEFAULT_WORK_BUDGET,
                workers: int = 1) -> OrbitStats:
    """Bulk per-length orbit statistics, deterministic for any worker count."""
    lengths = sorted(int(n) for n in lengths)
    thresholds = np.asarray(thresholds, dtype=float)
    work = sum(float(f.ell) ** n for n in lengths)
    if work > budget:
        raise WorkBudgetExceeded(work, budget, "orbit enumeration")
    c0 = float(f.c0)
    ca = np.asarray(f.cos_coeffs)
    sb = np.asarray(f.sin_coeffs)
    if workers <= 1 or len(lengths) <= 1:
        res = _kernels.orbit_counts(f.ell, c0, ca, sb, lengths, thresholds,
                                    collect_cap, math.inf)
        counts, mn, mx, cn, cj, cp = res
        return OrbitStats(lengths, counts, mn, mx, cn, cj, cp)
    # one task per length, longest first for balance; results reduced in
    # ascending length order so output is independent of scheduling
    tasks = [(f.ell, c0, ca, sb, n, thresholds, collect_cap)
             for n in sorted(lengths, reverse=True)]
    with multiprocessing.Pool(workers) as pool:
        results = pool.map(_stats_task, tasks)
    by_n = {t[4]: r for t, r in zip(tasks, results)}
    counts = np.vstack([by_n[n][0] for n in lengths])
    mn = np.concatenate([by_n[n][1] for n in lengths])
    mx = np.concatenate([by_n[n][2] for n in lengths])
    cn = np.concatenate([by_n[n][3] for n in lengths])
    cj = np.concatenate([by_n[n][4] for n in lengths])
    cp = np.concatenate([by_n[n][5] for n in lengths])
    return OrbitStats(lengths, counts, mn, mx, cn, cj, cp)


def _counting_lengths(f: RoofFunction, T: float) -> list[int]:
    if not f.y_min > 0:
        raise ValueError("counting needs a positive declared y_min")
    n_cap = math.ceil(T / f.y_min)
    return [n for n in range(1, n_cap + 1) if n * f.grid_min <= T]


def _guard_counting(f: RoofFunction, T: float, budget: float):
    if not f.y_min > 0:
        raise ValueError("counting needs a positive declared y_min")
    predicted = float(f.ell) ** math.ceil(T / f.y_min)
    if predicted > budget:
        raise WorkBudgetExceeded(predicted, budget, f"orbit counting to T={T}")


def count_pi(f: RoofFunction, T: float, budget: float = DEFAULT_WORK_BUDGET,
             workers: int = 1) -> int:
    """Number of prime orbits with period <= T."""
    if T <= 0:
        raise ValueError("T must be > 0")
    _guard_counting(f, T, budget)
    lengths = _counting_lengths(f, T)
    if not lengths:
        return 0
    stats = orbit_stats(f, lengths, [T], budget=budget, workers=workers)
    return int(stats.counts.sum(axis=0)[0])


def pi_series(f: RoofFunction, T_grid, budget: float = DEFAULT_WORK_BUDGET,
              workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(pi(T), pi_tilde(T)) on an ascending grid, in one enumeration pass.

    pi_tilde adds, for every orbit, the repetition terms (1/n)/(1 - E^{-n});
    the n = 1 terms depend only on per-length counts because E is constant
    across a word length, so only orbits with period <= max(T)/2 need to be
    materialized.
    """
    T_grid = np.asarray(T_grid, dtype=float)
    if np.any(np.diff(T_grid) <= 0) or T_grid[0] <= 0:
        raise ValueError("T_grid must be positive and strictly increasing")
    T_max = float(T_grid[-1])
    _guard_counting(f, T_max, budget)
    lengths = _counting_lengths(f, T_max)
    if not lengths:
        return np.zeros(len(T_grid), dtype=np.int64), np.zeros(len(T_grid))
    stats = orbit_stats(f, lengths, T_grid, collect_cap=T_max / 2.0,
                        budget=budget, workers=workers)
    pi = stats.counts.sum(axis=0)
    # n = 1 repetition weights: counts[i,g] orbits share E = ell^n
    pi_tilde = np.zeros(len(T_grid))
    for i, n in enumerate(stats.lengths):
        w = 1.0 / (1.0 - float(f.ell) ** (-n))
        pi_tilde += stats.counts[i] * w
    # higher repetitions from the materialized short orbits
    for n_orb, period in zip(stats.coll_n, stats.coll_period):
        for g, T in enumerate(T_grid):
            reps = int(T / period)
            for r in range(2, reps + 1):
                pi_tilde[g] += (1.0 / r) / (1.0 - float(f.ell) ** (-r * int(n_orb)))
    return pi.astype(np.int64), pi_tilde


def count_pi_tilde(f: RoofFunction, T: float, budget: float = DEFAULT_WORK_BUDGET,
                   workers: int = 1) -> float:
    """Repetition-weighted orbit count (the counting series' natural variable)."""
    if T <= 0:
        raise ValueError("T must be > 0")
    return float(pi_series(f, [T], budget=budget, workers=workers)[1][0])


# -- cache ---------------------------------------------------------------


def write_cache(path, f: RoofFunction, n_max: int,
                orbits: Iterable[PrimeOrbit] | None = None) -> int:
    """Write the orbit cache; returns the number of rows."""
    if f.ell > 10:
        raise ValueError("cache words use one digit per symbol; need ell <= 10")
    if orbits is None:
        orbits = enumerate_prime_orbits(f, n_max)
    rows = 0
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{CACHE_FORMAT} ell={f.ell} roof={roof_digest(f)} n_max={n_max}\n")
        fh.write("n,word,period\n")
        for orb in orbits:
            word = "".join(str(d) for d in orb.word)
            fh.write(f"{orb.n},{word},{orb.period:.17g}\n")
            rows += 1
    return rows


class CachedOrbits(NamedTuple):
    n_max: int
    n: np.ndarray
    j: np.ndarray
    period: np.ndarray


def read_cache(path, f: RoofFunction) -> CachedOrbits:
    """Read and validate an orbit cache; refuses stale or mismatched files."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if parts[:2] != CACHE_FORMAT.split() or len(parts) != 5:
            raise ValueError(f"unrecognized cache header: {header!r}")
        meta = dict(p.split("=", 1) for p in parts[2:])
        if int(meta["ell"]) != f.ell:
            raise ValueError("cache written for a different base ell")
        if meta["roof"] != roof_digest(f):
            raise ValueError("cache roof digest mismatch; rebuild explicitly")
        if fh.readline().strip() != "n,word,period":
            raise ValueError("missing cache column header")
        ns, js, ps = [], [], []
        for line in fh:
            n_str, word, p_str = line.strip().split(",")
            ns.append(int(n_str))
            js.append(word_value(tuple(int(c) for c in word), f.ell))
            ps.append(float(p_str))
    return CachedOrbits(int(meta["n_max"]), np.array(ns, dtype=np.int32),
                        np.array(js, dtype=np.int64), np.array(ps))
