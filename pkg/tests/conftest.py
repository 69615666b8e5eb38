import numpy as np
import pytest

from suspflow.roof import RoofFunction, constant_roof, standard_roof


@pytest.fixture
def const2():
    return constant_roof(2, 1.0)


@pytest.fixture
def std():
    return standard_roof()


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


def random_class_roof(rng, ell=None) -> RoofFunction:
    """A random roof with a valid class certificate, for property tests."""
    if ell is None:
        ell = int(rng.integers(2, 4))
    deg = int(rng.integers(1, 3))
    scale = 0.25 / deg
    ca = rng.uniform(-scale, scale, deg)
    sb = rng.uniform(-scale, scale, deg)
    reach = float(np.sum(np.abs(ca) + np.abs(sb)))
    deriv = float(sum(2 * np.pi * (k + 1) * (abs(ca[k]) + abs(sb[k]))
                      for k in range(deg)))
    curv = float(sum((2 * np.pi * (k + 1)) ** 2 * (abs(ca[k]) + abs(sb[k]))
                     for k in range(deg)))
    # declared bounds leave room for the grid certificate's Lipschitz slack
    return RoofFunction(ell=ell, c0=1.0, cos_coeffs=tuple(ca),
                        sin_coeffs=tuple(sb),
                        y_min=1.0 - reach - 0.01, y_max=1.0 + reach + 0.01,
                        kappa0=max(deriv, curv) + 0.1)
