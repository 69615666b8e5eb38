"""Pure-Python/NumPy kernel fallback.

Same contracts as the compiled extension: per-length prime-orbit counts and
first-passage backward enumeration. Orbit bases are exact integers j with
x = j/(ell^n - 1); the digit shift is j -> ell*j mod (ell^n - 1). Periods use
compensated summation so the two backends agree to ~1e-13 at depth ~30.
"""
from __future__ import annotations

import math

import numpy as np

from ..budget import WorkBudgetExceeded
from ..words import lyndon_words, word_value

TWO_PI = 2.0 * math.pi

# above this many periodic points per length, stream words instead of
# materializing numpy arrays
_VECTOR_LIMIT = 2 ** 22


def _make_eval(c0, ca, sb):
    terms = [(k, a, b) for k, (a, b) in enumerate(zip(ca, sb), start=1)
             if a != 0.0 or b != 0.0]
    cos, sin = math.cos, math.sin

    def fval(x: float) -> float:
        v = c0
        for k, a, b in terms:
            w = TWO_PI * k * x
            if a != 0.0:
                v += a * cos(w)
            if b != 0.0:
                v += b * sin(w)
        return v

    return fval


def _make_deriv(c0, ca, sb):
    terms = [(k, a, b) for k, (a, b) in enumerate(zip(ca, sb), start=1)
             if a != 0.0 or b != 0.0]
    cos, sin = math.cos, math.sin

    def fderiv(x: float) -> float:
        v = 0.0
        for k, a, b in terms:
            w = TWO_PI * k * x
            if a != 0.0:
                v -= TWO_PI * k * a * sin(w)
            if b != 0.0:
                v += TWO_PI * k * b * cos(w)
        return v

    return fderiv


def _eval_array(c0, ca, sb, x: np.ndarray) -> np.ndarray:
    v = np.full(x.shape, c0)
    for k, (a, b) in enumerate(zip(ca, sb), start=1):
        w = TWO_PI * k * x
        if a != 0.0:
            v += a * np.cos(w)
        if b != 0.0:
            v += b * np.sin(w)
    return v


def _length_orbits_vector(ell, c0, ca, sb, n):
    """All orbits of word length n via rotation-minimal representatives."""
    M = ell ** n - 1
    j = np.arange(M, dtype=np.int64)
    rot = j.copy()
    minrot = j.copy()
    aperiodic = np.ones(M, dtype=bool)
    for _ in range(n - 1):
        rot = (rot * ell) % M
        np.minimum(minrot, rot, out=minrot)
        aperiodic &= rot != j
    reps = j[(minrot == j) & aperiodic]

    cur = reps.copy()
    total = np.zeros(len(reps))
    comp = np.zeros(len(reps))
    for _ in range(n):
        term = _eval_array(c0, ca, sb, cur / M) - comp
        tmp = total + term
        comp = (tmp - total) - term
        total = tmp
        cur = (cur * ell) % M
    return reps, total


def _length_orbits_stream(ell, c0, ca, sb, n):
    fval = _make_eval(c0, ca, sb)
    M = ell ** n - 1
    reps = []
    periods = []
    for word in lyndon_words(ell, n):
        if n == 1 and word[0] == ell - 1:
            continue  # same orbit as the fixed point x = 0
        j = word_value(word, ell)
        jj = j
        total = 0.0
        comp = 0.0
        for _ in range(n):
            term = fval(jj / M) - comp
            tmp = total + term
            comp = (tmp - total) - term
            total = tmp
            jj = (jj * ell) % M
        reps.append(j)
        periods.append(total)
    return np.array(reps, dtype=np.int64), np.array(periods)


def orbit_counts(ell, c0, ca, sb, lengths, thresholds, collect_cap, budget):
    """Per-length orbit statistics.

    Returns (counts[L,G], min_means[L], max_means[L], coll_n, coll_j,
    coll_period); counts[i,g] is the number of prime orbits of word length
    lengths[i] with period <= thresholds[g]; collected arrays hold every
    orbit with period <= collect_cap, in (length asc, j asc) order.
    """
    lengths = [int(n) for n in lengths]
    thresholds = np.asarray(thresholds, dtype=float)
    work = sum(float(ell) ** n for n in lengths)
    if work > budget:
        raise WorkBudgetExceeded(work, budget, "orbit enumeration")

    counts = np.zeros((len(lengths), len(thresholds)), dtype=np.int64)
    min_means = np.full(len(lengths), np.inf)
    max_means = np.full(len(lengths), -np.inf)
    coll_n, coll_j, coll_period = [], [], []
    for i, n in enumerate(lengths):
        if ell ** n <= _VECTOR_LIMIT:
            reps, periods = _length_orbits_vector(ell, c0, ca, sb, n)
        else:
            reps, periods = _length_orbits_stream(ell, c0, ca, sb, n)
        counts[i] = np.searchsorted(np.sort(periods), thresholds, side="right")
        if len(periods):
            means = periods / n
            min_means[i] = means.min()
            max_means[i] = means.max()
        if collect_cap > 0:
            sel = periods <= collect_cap
            order = np.argsort(reps[sel], kind="stable")
            coll_n.extend([n] * int(sel.sum()))
            coll_j.extend(reps[sel][order])
            coll_period.extend(periods[sel][order])
    return (counts, min_means, max_means,
            np.array(coll_n, dtype=np.int32), np.array(coll_j, dtype=np.int64),
            np.array(coll_period, dtype=float))


def _max_depth(ell: int) -> int:
    # (x + j) must keep x's full float precision, so j stays below 2^52
    return int(52 / math.log2(ell))


def backward_branches(ell, c0, ca, sb, x, y, t, budget):
    """First-passage DFS over preimage digits; emission order is DFS order.

    Returns (k, j, y_w, shear, times_flat) where times_flat concatenates the
    descending crossing times of each branch in emission order.
    """
    fval = _make_eval(c0, ca, sb)
    fderiv = _make_deriv(c0, ca, sb)
    limit = _max_depth(ell)
    ks, js, ys, sh = [], [], [], []
    times = []
    partial = [0.0] * (limit + 2)  # partial[d] = roof sum along first d steps
    nodes = 0

    def expand(d, j, total, comp, shear):
        nonlocal nodes
        scale = float(ell) ** (d + 1)
        for digit in range(ell):
            nodes += 1
            if nodes > budget:
                raise WorkBudgetExceeded(nodes, budget, "backward enumeration")
            jc = j + digit * ell ** d
            xc = (x + jc) / scale
            term = fval(xc) - comp
            tmp = total + term
            sc = shear - fderiv(xc) / scale
            partial[d + 1] = tmp
            if y + tmp - t >= 0.0:
                ks.append(d + 1)
                js.append(jc)
                ys.append(y + tmp - t)
                sh.append(sc)
                times.extend(t - y - partial[m] for m in range(d + 1))
            else:
                if d + 1 >= limit:
                    raise OverflowError("backward depth exceeds exact int64 digit paths")
                expand(d + 1, jc, tmp, (tmp - total) - term, sc)

    expand(0, 0, 0.0, 0.0, 0.0)
    return (np.array(ks, dtype=np.int32), np.array(js, dtype=np.int64),
            np.array(ys), np.array(sh), np.array(times))


def backward_count(ell, c0, ca, sb, x, y, t, budget):
    fval = _make_eval(c0, ca, sb)
    limit = _max_depth(ell)
    nodes = 0
    count = 0

    def expand(d, j, total, comp):
        nonlocal nodes, count
        scale = float(ell) ** (d + 1)
        for digit in range(ell):
            nodes += 1
            if nodes > budget:
                raise WorkBudgetExceeded(nodes, budget, "backward enumeration")
            jc = j + digit * ell ** d
            term = fval((x + jc) / scale) - comp
            tmp = total + term
            if y + tmp - t >= 0.0:
                count += 1
            else:
                if d + 1 >= limit:
                    raise OverflowError("backward depth exceeds exact int64 digit paths")
                expand(d + 1, jc, tmp, (tmp - total) - term)

    expand(0, 0, 0.0, 0.0)
    return count
