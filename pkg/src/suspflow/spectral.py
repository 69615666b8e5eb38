"""Weighted transfer operators in the Fourier basis.

L_s u(x) = sum over tau(y) = x of exp(-s f(y)) u(y), truncated to modes
-N..N. exp(mu t) is an eigenvalue of the semiflow operator family exactly
when L_mu has eigenvalue 1, so the topological entropy is the real root of
lambda_max(s) = 1 and complex resonances are located the same way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .budget import DEFAULT_WORK_BUDGET, WorkBudgetExceeded
from .roof import RoofFunction


class EigenConvergenceError(RuntimeError):
    def __init__(self, s, N, detail):
        super().__init__(f"eigensolver failed at s={s} (N={N}): {detail}")
        self.s = s
        self.N = N


@dataclass(frozen=True)
class TransferMatrix:
    s: complex
    N: int
    Q: int
    entries: np.ndarray  # (2N+1, 2N+1) complex, index order (m, k), modes -N..N

    def mode_index(self, m: int) -> int:
        if abs(m) > self.N:
            raise IndexError(f"mode {m} outside truncation {self.N}")
        return m + self.N


def quadrature_size(N: int, K: int) -> int:
    # 8x oversampling pushes aliasing of analytic data below roundoff
    return max(256, 8 * (N + K))


def build_matrix(f: RoofFunction, s: complex, N: int) -> TransferMatrix:
    """Entry (m, k): m-th Fourier coefficient of the image of mode k.

    The image of e_k under L_s is x -> sum_i exp(-s f((x+i)/ell))
    exp(2 pi i k (x+i)/ell); one size-Q DFT per column recovers all rows.
    """
    if N < 4:
        raise ValueError("Fourier truncation N must be >= 4")
    ell = f.ell
    K = max(len(f.cos_coeffs), len(f.sin_coeffs))
    Q = quadrature_size(N, K)
    x = np.arange(Q) / Q
    ks = np.arange(-N, N + 1)
    # phase of mode k along branch i, sampled on the grid: exp(2pi i k (x+i)/ell)
    base = np.exp(2j * np.pi * np.outer(x, ks) / ell)
    g = np.zeros((Q, 2 * N + 1), dtype=complex)
    for i in range(ell):
        w = np.exp(-s * f.eval((x + i) / ell))
        g += (w[:, None] * base) * np.exp(2j * np.pi * i * ks / ell)
    coeffs = np.fft.fft(g, axis=0) / Q
    rows = np.mod(ks, Q)
    return TransferMatrix(s=complex(s), N=N, Q=Q, entries=coeffs[rows, :])


def _eig(mat: TransferMatrix):
    try:
        return np.linalg.eig(mat.entries)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenConvergenceError(mat.s, mat.N, str(exc)) from exc


def leading_eigenvalue(f: RoofFunction, s: float, N: int) -> float:
    """Spectral radius of the truncated L_s, s real."""
    mat = build_matrix(f, float(s), N)
    try:
        vals = np.linalg.eigvals(mat.entries)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigenConvergenceError(s, N, str(exc)) from exc
    return float(np.max(np.abs(vals)))


class BracketError(ValueError):
    """The entropy bracket [log ell/y_max, log ell/y_min] failed to straddle 1."""


def entropy(f: RoofFunction, N: int = 32, tol: float = 1e-12) -> float:
    """Unique real root of lambda_max(s) = 1.

    Bracketing bisection inside [log ell / y_max, log ell / y_min] followed
    by a secant polish down to |lambda - 1| <= tol. The bracket endpoints
    come from the declared class bounds, so a failure here means the roof
    does not actually satisfy them.
    """
    lo = math.log(f.ell) / f.y_max
    hi = math.log(f.ell) / f.y_min
    g = lambda s: leading_eigenvalue(f, s, N) - 1.0
    if hi - lo < 1e-15:
        v = g(lo)
        if abs(v) > max(tol, 1e-10):
            raise BracketError(f"degenerate bracket but lambda-1 = {v:.3e}")
        return lo
    glo, ghi = g(lo), g(hi)
    if glo < -tol or ghi > tol:
        raise BracketError(
            f"lambda-1 at bracket: [{glo:.3e}, {ghi:.3e}]; roof outside class?")
    a, b, ga, gb = lo, hi, glo, ghi
    while b - a > 1e-6:
        mid = 0.5 * (a + b)
        gm = g(mid)
        if gm >= 0.0:
            a, ga = mid, gm
        else:
            b, gb = mid, gm
    s0, s1, g0, g1 = a, b, ga, gb
    for _ in range(60):
        if abs(g1) <= tol:
            return s1
        if g1 == g0:
            break
        s2 = s1 - g1 * (s1 - s0) / (g1 - g0)
        s2 = min(max(s2, lo), hi)
        s0, g0, s1 = s1, g1, s2
        g1 = g(s1)
    if abs(g1) <= tol:
        return s1
    raise EigenConvergenceError(s1, N, f"secant stalled at |lambda-1|={abs(g1):.3e}")


def pressure_periodic(f: RoofFunction, s: float, n: int,
                      budget: float = DEFAULT_WORK_BUDGET) -> float:
    """(1/n) log sum over all ell^n - 1 period-n points of exp(-s f^(n)).

    Full orbit sum (not primes only); the fixed points of tau^n are exactly
    x = j/(ell^n - 1).
    """
    work = float(f.ell) ** n
    if work > budget:
        raise WorkBudgetExceeded(work, budget, "periodic-point pressure")
    M = f.ell ** n - 1
    jj = np.arange(M, dtype=np.int64)
    total = np.zeros(M)
    comp = np.zeros(M)
    for _ in range(n):
        term = f.eval(jj / M) - comp
        tmp = total + term
        comp = (tmp - total) - term
        total = tmp
        jj = (jj * f.ell) % M
    return float(logsumexp(-float(s) * total)) / n


def pressure_root(f: RoofFunction, n: int,
                  budget: float = DEFAULT_WORK_BUDGET) -> float:
    """Real root in s of pressure_periodic(f, s, n) = 0, same bracket as entropy."""
    from scipy.optimize import brentq
    lo = math.log(f.ell) / f.y_max
    hi = math.log(f.ell) / f.y_min
    if hi - lo < 1e-15:
        return lo
    return float(brentq(lambda s: pressure_periodic(f, s, n, budget), lo, hi,
                        xtol=1e-12, rtol=8.9e-16))


# ---------------------------------------------------------------------------
# resonances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchWindow:
    """Rectangle [sigma_min, sigma_max] x [-im_max, im_max] in the s plane."""

    sigma_min: float
    sigma_max: float
    im_max: float

    def __post_init__(self):
        if self.sigma_min > self.sigma_max or self.im_max < 0:
            raise ValueError("empty search window")

    def contains(self, s: complex, pad: float = 0.0) -> bool:
        return (self.sigma_min - pad <= s.real <= self.sigma_max + pad
                and abs(s.imag) <= self.im_max + pad)


@dataclass(frozen=True)
class Resonance:
    mu: complex
    residual: float
    N_used: int


@dataclass(frozen=True)
class FailedSeed:
    seed: complex
    reason: str


@dataclass(frozen=True)
class ResonanceSet:
    entries: tuple[Resonance, ...]
    h: float
    window: SearchWindow
    failed: tuple[FailedSeed, ...] = field(default_factory=tuple)

    def mus(self) -> np.ndarray:
        return np.array([r.mu for r in self.entries], dtype=complex)


def constant_roof_resonances(ell: int, c: float, k_max: int) -> ResonanceSet:
    """Closed-form reference set for f = c: mu_k = (log ell + 2 pi i k)/c."""
    h = math.log(ell) / c
    entries = [Resonance(mu=complex(h, 2.0 * math.pi * k / c), residual=0.0,
                         N_used=0)
               for k in range(-k_max, k_max + 1)]
    entries.sort(key=lambda r: (-r.mu.real, r.mu.imag))
    window = SearchWindow(sigma_min=min(0.0, h), sigma_max=h,
                          im_max=2.0 * math.pi * k_max / c + 1.0)
    return ResonanceSet(entries=tuple(entries), h=h, window=window)


def _tracked_eig(f, s, N, v_ref):
    """Eigenpair of L_s whose eigenvector has the largest overlap with v_ref."""
    mat = build_matrix(f, s, N)
    vals, vecs = _eig(mat)
    overlaps = np.abs(v_ref.conj() @ vecs)
    idx = int(np.argmax(overlaps))
    v = vecs[:, idx]
    defect = float(np.linalg.norm(mat.entries @ v - vals[idx] * v))
    return complex(vals[idx]), v / np.linalg.norm(v), defect


def _newton_polish(f, seed, v0, N, tol, max_iter=40):
    """Newton iteration on lambda_j(s) - 1 = 0 with overlap-tracked lambda_j.

    Returns (mu, residual, None) or (None, None, reason).
    """
    s = complex(seed)
    v = v0
    for _ in range(max_iter):
        lam, v, defect = _tracked_eig(f, s, N, v)
        if abs(lam - 1.0) <= tol:
            return s, abs(lam - 1.0) + defect, None
        step = 1e-6 * (1.0 + abs(s))
        lam_p, _, _ = _tracked_eig(f, s + step, N, v)
        lam_m, _, _ = _tracked_eig(f, s - step, N, v)
        dlam = (lam_p - lam_m) / (2.0 * step)
        if abs(dlam) < 1e-9:
            return None, None, "degenerate (lambda' ~ 0, possible Jordan block)"
        ds = (lam - 1.0) / dlam
        s = s - ds
        if abs(ds) < 1e-15 and abs(lam - 1.0) > tol:
            return None, None, f"stagnated at |lambda-1|={abs(lam - 1.0):.2e}"
    return None, None, f"no convergence in {max_iter} iterations"


def resonances(f: RoofFunction, window: SearchWindow, N: int = 32,
               tol: float = 1e-10, grid_re: int | None = None,
               grid_im: int | None = None) -> ResonanceSet:
    """All s in the window where some eigenvalue of the truncated L_s is 1.

    Coarse grid scan over the closed upper half of the window (the family
    is real, so roots come in conjugate pairs and only Im s >= 0 needs
    scanning), eigenvalues within 0.5 of 1 seed a Newton iteration with
    eigenvector-overlap tracking. Converged roots are deduplicated within
    10*tol, reflected to the lower half plane, and sorted by
    (Re mu descending, Im mu ascending). Seeds that fail to converge are
    reported in .failed, never dropped silently.
    """
    h = entropy(f, N=N, tol=min(tol, 1e-12))
    if window.sigma_max > h + 0.1 + 1e-12:
        raise ValueError("window must satisfy Re s <= h + 0.1")
    n_re = grid_re or max(6, int(math.ceil((window.sigma_max - window.sigma_min) / 0.1)) + 1)
    # an eigenvalue's phase turns at rate ~ roof mean per unit Im s; keep
    # grid steps small enough that |lambda - 1| < 0.5 is seen near each root
    n_im = grid_im or max(2, int(math.ceil(window.im_max * f.y_max / 0.35)) + 1)
    sigmas = np.linspace(window.sigma_min, window.sigma_max, n_re)
    imags = np.linspace(0.0, window.im_max, n_im)

    seeds = []
    for sig in sigmas:
        for im in imags:
            s = complex(sig, im)
            mat = build_matrix(f, s, N)
            vals, vecs = _eig(mat)
            for idx in np.nonzero(np.abs(vals - 1.0) < 0.5)[0]:
                seeds.append((s, vecs[:, int(idx)]))

    found: list[Resonance] = []
    failed: list[FailedSeed] = []
    for seed, v0 in seeds:
        mu, res, reason = _newton_polish(f, seed, v0, N, tol)
        if mu is None:
            failed.append(FailedSeed(seed=seed, reason=reason))
            continue
        if mu.imag < 0:
            mu = mu.conjugate()  # canonical upper-half representative
        if not window.contains(mu, pad=100 * tol):
            failed.append(FailedSeed(seed=seed, reason=f"converged outside window to {mu:.6f}"))
            continue
        if mu.real > h + 1e-9:
            failed.append(FailedSeed(seed=seed, reason=f"spurious root right of h at {mu:.6f}"))
            continue
        for i, r in enumerate(found):
            if abs(r.mu - mu) <= 10 * tol:
                if res < r.residual:
                    found[i] = Resonance(mu=mu, residual=res, N_used=N)
                break
        else:
            found.append(Resonance(mu=mu, residual=res, N_used=N))

    closed: list[Resonance] = []
    for r in found:
        if abs(r.mu.imag) <= 10 * tol:
            closed.append(Resonance(mu=complex(r.mu.real, 0.0), residual=r.residual,
                                    N_used=N))
        else:
            closed.append(r)
            closed.append(Resonance(mu=r.mu.conjugate(), residual=r.residual,
                                    N_used=N))
    closed.sort(key=lambda r: (-r.mu.real, r.mu.imag))
    return ResonanceSet(entries=tuple(closed), h=h, window=window,
                        failed=tuple(failed))
