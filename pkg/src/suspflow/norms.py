"""Anisotropic Littlewood-Paley partitions and the B^{r,p} norm on grids.

The frequency plane is cut into cells chi_{n,m}(xi, eta) =
rho_n(eta) chi_m(theta0^{-1} <n>^{-2} xi): dyadic in xi with a width that
grows like <n>^2, and quadratically spaced in eta. The norm weights each
cell's band-pass component by 2^{rm} and takes an l^{2p} sum of L^{2p}
norms. Everything here works on a large periodic box; functions must be
band-limited well inside the grid Nyquist frequency.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .transversality import angle_bracket, chi_bump


def lp_chi_m(m: int, t):
    """Littlewood-Paley piece: chi(|t|) at m=0, dyadic shell difference after."""
    if m < 0:
        raise ValueError("m must be >= 0")
    t = np.abs(np.asarray(t, dtype=float))
    if m == 0:
        return chi_bump(t)
    return chi_bump(t / 2.0 ** m) - chi_bump(t / 2.0 ** (m - 1))


def rho_n(n: int, x):
    """Quadratically spaced partition piece on the eta axis, support I_n."""
    x = np.asarray(x, dtype=float)
    u = np.sign(x) * np.sqrt(np.abs(x))
    if n == 0:
        return chi_bump(np.sqrt(np.abs(x)) + 1.0)
    if n >= 1:
        return chi_bump(u - n + 1.0) - chi_bump(u - n + 2.0)
    return chi_bump(u + (-n) + 1.0) - chi_bump(u + (-n) + 2.0)


def support_interval(n: int) -> tuple[float, float]:
    """I_n: the closed interval containing the support of rho_n."""
    if n == 0:
        return (-1.0, 1.0)
    if n >= 1:
        return ((n - 1.0) ** 2, (n + 1.0) ** 2)
    return (-((-n) + 1.0) ** 2, -((-n) - 1.0) ** 2)


def chi_nm(n: int, m: int, xi, eta, theta0: float):
    """rho_n(eta) * chi_m(theta0^{-1} <n>^{-2} xi)."""
    scale = 1.0 / (theta0 * angle_bracket(n) ** 2)
    return rho_n(n, eta) * lp_chi_m(m, scale * np.asarray(xi, dtype=float))


def chi_nm_SE(n: int, m: int, S: float, E: float, xi, eta, theta0: float):
    """Frame variant: chi_{n,m} composed with (A_{S,E}^dagger)^{-1}.

    (A^dagger)^{-1}(xi, eta) = (E (xi + S eta), eta), so the cell follows
    the sheared and expanded coordinates of the branch frame.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return chi_nm(n, m, E * (xi + S * eta), eta, theta0)


@dataclass(frozen=True)
class PartitionParams:
    """theta0/r/p as in the cone and norm definitions; periodic grid geometry.

    extent is the spatial box side L; points the sample count per axis. The
    frequency lattice is then 2 pi k / L for |k| < points/2.
    """

    theta0: float
    r: float
    p: int
    extent: float = 64.0
    points: int = 256

    def __post_init__(self):
        if self.theta0 <= 0 or self.p < 1 or self.extent <= 0:
            raise ValueError("invalid partition parameters")
        if self.points < 16 or self.points % 2:
            raise ValueError("points must be an even integer >= 16")

    @property
    def nyquist(self) -> float:
        return math.pi * self.points / self.extent

    def frequencies(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.points, d=self.extent / self.points)

    def covered_cells(self) -> list[tuple[int, int]]:
        """(n, m) cells whose support meets the grid frequency square,
        in deterministic (n, m) order."""
        out = []
        ny = self.nyquist
        n_max = int(math.floor(math.sqrt(ny))) + 1
        for n in range(-n_max, n_max + 1):
            lo, hi = support_interval(n)
            if lo > ny or hi < -ny:
                continue
            width = self.theta0 * angle_bracket(n) ** 2
            m = 0
            while True:
                if m > 0 and 2.0 ** (m - 1) * width > ny:
                    break
                out.append((n, m))
                m += 1
        return out


def _check_nyquist_margin(params: PartitionParams, spec: np.ndarray) -> None:
    freqs = params.frequencies()
    fx = np.abs(freqs)[:, None]
    fy = np.abs(freqs)[None, :]
    near = np.maximum(fx, fy) >= 0.9 * params.nyquist
    total = float(np.sum(np.abs(spec) ** 2))
    if total > 0 and float(np.sum(np.abs(spec[near]) ** 2)) > 1e-12 * total:
        warnings.warn("spectral mass within 10% of the Nyquist boundary; "
                      "the norm value is unreliable", stacklevel=3)


def brp_norm(u: np.ndarray, params: PartitionParams,
             S: float = 0.0, E: float = 1.0) -> float:
    """(sum_{n,m} (2^{rm} ||band-pass of u||_{2p})^{2p})^{1/2p} on the grid.

    S, E select the frame-variant cells chi_{n,m,S,E}; the default is the
    plain partition. L^{2p} norms are Riemann sums with the grid cell area.
    """
    u = np.asarray(u)
    if u.shape != (params.points, params.points):
        raise ValueError(f"expected {(params.points, params.points)} samples")
    spec = np.fft.fft2(u)
    _check_nyquist_margin(params, spec)
    freqs = params.frequencies()
    xi = freqs[:, None]
    eta = freqs[None, :]
    h = params.extent / params.points
    area = h * h
    tp = 2 * params.p
    terms = []
    for n, m in params.covered_cells():
        mask = chi_nm_SE(n, m, S, E, xi, eta, params.theta0)
        if not np.any(mask):
            continue
        piece = np.fft.ifft2(mask * spec)
        cell = (np.sum(np.abs(piece) ** tp) * area) ** (1.0 / tp)
        terms.append((2.0 ** (params.r * m) * cell) ** tp)
    return math.fsum(terms) ** (1.0 / tp)


@dataclass(frozen=True)
class FxnmReport:
    n: int
    m: int
    nu: float
    l1: float           # discrete L1 norm of the cell kernel
    envelope_C: float   # smallest admissible envelope constant
    grid_points: int


def cell_kernel(n: int, m: int, grid_points: int = 256,
                theta0: float = 1.0):
    """Continuum inverse transform of chi_{n,m} on a cell-adapted dual grid.

    Returns (x, y, K) with K[j, k] ~ (2 pi)^{-2} integral of
    chi_{n,m}(xi, eta) e^{i(x_j xi + y_k eta)}. The frequency window is four
    times the support box, so the Riemann sum aliases only the far tails.
    """
    an = angle_bracket(n)
    xi_ext = 4.0 * 2.0 ** m * an ** 2 * theta0
    lo, hi = support_interval(n)
    eta_ext = 2.0 * max(abs(lo), abs(hi)) + 2.0
    N = grid_points
    dxi = 2.0 * xi_ext / N
    deta = 2.0 * eta_ext / N
    xi = (np.arange(N) - N // 2) * dxi
    eta = (np.arange(N) - N // 2) * deta
    sym = chi_nm(n, m, xi[:, None], eta[None, :], theta0)
    # Riemann sum == scaled FFT; output index j maps to x_j = 2 pi j/(N dxi),
    # recentered by fftshift, with a (-1)^{j+k} phase from the centered
    # frequency grid.
    ker = np.fft.fftshift(np.fft.ifft2(sym))
    jj = np.arange(N) - N // 2
    ker *= ((-1.0) ** jj)[:, None] * ((-1.0) ** jj)[None, :]
    ker *= (dxi * deta * N * N) / (4.0 * math.pi ** 2)
    x = 2.0 * math.pi * jj / (N * dxi)
    y = 2.0 * math.pi * jj / (N * deta)
    return x, y, ker


def fxnm_decay_check(n: int, m: int, nu: float = 2.0,
                     grid_points: int = 256) -> FxnmReport:
    """Inverse transform of one cell against the stated decay envelope.

    Compares |kernel| pointwise with
    (2^m <n>^3) <2^m <n>^2 |x|>^{-nu} <<n> |y|>^{-nu}; envelope_C is the
    max ratio, l1 the Riemann L1 norm. Scales are in units of theta0 = 1.
    """
    an = angle_bracket(n)
    x, y, ker = cell_kernel(n, m, grid_points)
    mag = np.abs(ker)
    dx = x[1] - x[0]
    dy = y[1] - y[0]
    l1 = float(np.sum(mag) * dx * dy)
    env = ((2.0 ** m * an ** 3)
           * angle_bracket(2.0 ** m * an ** 2 * np.abs(x))[:, None] ** (-nu)
           * angle_bracket(an * np.abs(y))[None, :] ** (-nu))
    C = float(np.max(mag / env))
    return FxnmReport(n=n, m=m, nu=nu, l1=l1, envelope_C=C,
                      grid_points=grid_points)
