"""Roof functions on the circle.

A roof is a finite trigonometric polynomial

    f(x) = c0 + sum_k (a_k cos(2 pi k x) + b_k sin(2 pi k x)),

kept strictly positive, together with declared bounds (y_min, y_max, kappa0)
meaning y_min < f < y_max, |f'| < kappa0, |f''| < kappa0. The base map is
x -> ell*x mod 1. Evaluation is exact trig-polynomial arithmetic; nothing is
interpolated.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * math.pi

# Points per unit frequency for class validation; the certificate below
# closes the gap between grid samples.
_GRID_DENSITY = 1024


@dataclass(frozen=True)
class ClassCheck:
    name: str
    ok: bool
    margin: float  # worst certified slack; negative means violated
    x_worst: float


@dataclass(frozen=True)
class ClassReport:
    checks: tuple[ClassCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> ClassCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class RoofFunction:
    """Trig-polynomial roof with declared class bounds, immutable."""

    ell: int
    c0: float
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    y_min: float = 0.0
    y_max: float = math.inf
    kappa0: float = math.inf

    def __post_init__(self):
        if not (isinstance(self.ell, int) and self.ell >= 2):
            raise ValueError("ell must be an integer >= 2")
        object.__setattr__(self, "cos_coeffs", tuple(float(a) for a in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(b) for b in self.sin_coeffs))
        if len(self.cos_coeffs) != len(self.sin_coeffs):
            # pad the shorter list so k always indexes both
            K = max(len(self.cos_coeffs), len(self.sin_coeffs))
            pad = lambda t: t + (0.0,) * (K - len(t))
            object.__setattr__(self, "cos_coeffs", pad(self.cos_coeffs))
            object.__setattr__(self, "sin_coeffs", pad(self.sin_coeffs))
        if not (0.0 <= self.y_min < self.y_max):
            raise ValueError("need 0 <= y_min < y_max")
        if not self.kappa0 > 0.0:
            raise ValueError("kappa0 must be positive")

    # -- pointwise evaluation ------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.cos_coeffs)

    def eval(self, x):
        """f(x); accepts scalars or arrays, x in circle coordinates."""
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.c0)
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = TWO_PI * k * x
            if a != 0.0:
                out += a * np.cos(w)
            if b != 0.0:
                out += b * np.sin(w)
        return float(out) if out.ndim == 0 else out

    __call__ = eval

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = TWO_PI * k * x
            if a != 0.0:
                out -= TWO_PI * k * a * np.sin(w)
            if b != 0.0:
                out += TWO_PI * k * b * np.cos(w)
        return float(out) if out.ndim == 0 else out

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = TWO_PI * k * x
            s = (TWO_PI * k) ** 2
            if a != 0.0:
                out -= s * a * np.cos(w)
            if b != 0.0:
                out -= s * b * np.sin(w)
        return float(out) if out.ndim == 0 else out

    # -- orbitwise quantities ------------------------------------------------

    def birkhoff_sum(self, x: float, n: int) -> float:
        """f(x) + f(tau x) + ... + f(tau^{n-1} x), compensated summation."""
        if n < 0:
            raise ValueError("n must be >= 0")
        total = 0.0
        comp = 0.0
        xi = float(x) % 1.0
        for _ in range(n):
            term = self.eval(xi) - comp
            tmp = total + term
            comp = (tmp - total) - term
            total = tmp
            xi = (self.ell * xi) % 1.0
        return total

    def birkhoff_derivative(self, x: float, n: int) -> float:
        """d/dx of the n-term Birkhoff sum: sum ell^i f'(tau^i x)."""
        if n < 0:
            raise ValueError("n must be >= 0")
        total = 0.0
        comp = 0.0
        xi = float(x) % 1.0
        power = 1.0
        for _ in range(n):
            term = power * self.derivative(xi) - comp
            tmp = total + term
            comp = (tmp - total) - term
            total = tmp
            xi = (self.ell * xi) % 1.0
            power *= self.ell
        return total

    def hitting_count(self, x: float, t: float) -> int:
        """Largest n with birkhoff_sum(x, n) <= t. Ties count as hits."""
        if t < 0:
            raise ValueError("t must be >= 0")
        total = 0.0
        comp = 0.0
        xi = float(x) % 1.0
        n = 0
        while True:
            term = self.eval(xi) - comp
            tmp = total + term
            if tmp > t:
                return n
            comp = (tmp - total) - term
            total = tmp
            xi = (self.ell * xi) % 1.0
            n += 1

    # -- class membership ----------------------------------------------------

    @cached_property
    def _grid(self) -> np.ndarray:
        npts = math.ceil(_GRID_DENSITY * (self.degree + 1))
        return np.arange(npts) / npts

    @cached_property
    def grid_values(self) -> np.ndarray:
        return np.atleast_1d(self.eval(self._grid))

    @property
    def grid_min(self) -> float:
        return float(self.grid_values.min())

    @property
    def grid_max(self) -> float:
        return float(self.grid_values.max())

    def _coeff_bound(self, order: int) -> float:
        """sup bound for the order-th derivative from the coefficients."""
        return sum(
            (TWO_PI * k) ** order * (abs(a) + abs(b))
            for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1)
        )

    def validate_class(self) -> ClassReport:
        """Check y_min < f < y_max, |f'| < kappa0, |f''| < kappa0.

        Each inequality is tested on a dense grid and certified between grid
        points by a Lipschitz bound on the relevant derivative (the smaller of
        kappa0 and the coefficient bound, where applicable). Reported margins
        are grid margin minus the certificate slack.
        """
        x = self._grid
        half = 0.5 / len(x)  # max distance from a grid point
        fv = self.grid_values
        d1 = np.atleast_1d(self.derivative(x))
        d2 = np.atleast_1d(self.second_derivative(x))

        lip_f = min(self.kappa0, self._coeff_bound(1))
        lip_d1 = min(self.kappa0, self._coeff_bound(2))
        lip_d2 = self._coeff_bound(3)

        def check(name, values, slack):
            i = int(np.argmin(values))
            return ClassCheck(name, bool(values[i] - slack > 0.0),
                              float(values[i] - slack), float(x[i]))

        checks = (
            check("positive", fv, lip_f * half),
            check("lower", fv - self.y_min, lip_f * half),
            check("upper", self.y_max - fv, lip_f * half),
            check("slope", self.kappa0 - np.abs(d1), lip_d1 * half),
            check("curvature", self.kappa0 - np.abs(d2), lip_d2 * half),
        )
        return ClassReport(checks)


def roof_digest(f: RoofFunction) -> str:
    """Hash of the roof geometry (base and coefficients, not class bounds)."""
    text = f"ell={f.ell};c0={f.c0!r};cos={f.cos_coeffs!r};sin={f.sin_coeffs!r}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def constant_roof(ell: int, c: float, margin: float = 0.5) -> RoofFunction:
    """Constant roof with generous declared bounds."""
    return RoofFunction(ell=ell, c0=c, y_min=c * (1.0 - margin),
                        y_max=c * (1.0 + margin), kappa0=1.0)


def standard_roof(ell: int = 2) -> RoofFunction:
    """The roof 1 + 0.2 cos(2 pi x) used throughout the test battery."""
    return RoofFunction(ell=ell, c0=1.0, cos_coeffs=(0.2,), sin_coeffs=(0.0,),
                        y_min=0.75, y_max=1.25, kappa0=8.0)
