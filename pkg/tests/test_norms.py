import math

import numpy as np
import pytest

from suspflow.norms import (PartitionParams, brp_norm, cell_kernel, chi_nm,
                            chi_nm_SE, fxnm_decay_check, lp_chi_m, rho_n,
                            support_interval)

L32 = 32.0 * math.pi

# plateau modes: frequency lattice k/16 on the 32 pi box, each landing on
# the flat part of exactly one cell (theta0 = 1)
PLATEAU_MODES = [
    (0.5, 0.0, (0, 0)),
    (4.0, 1.0, (1, 2)),
    (8.0, 4.0, (2, 1)),
    (-8.0, -4.0, (-2, 1)),
    (2.0, -1.0, (-1, 1)),
    (4.0, 9.0, (3, 0)),
    (1.0, 4.0, (2, 0)),
    (-0.5, -9.0, (-3, 0)),
]


def plateau_params(r=0.0, p=1):
    return PartitionParams(theta0=1.0, r=r, p=p, extent=L32, points=512)


def grid(params):
    ax = np.arange(params.points) * (params.extent / params.points)
    return ax[:, None], ax[None, :]


def test_partition_of_unity_eta():
    xs = np.linspace(-100.0, 100.0, 2001)
    total = sum(rho_n(n, xs) for n in range(-12, 13))
    assert np.max(np.abs(total - 1.0)) < 1e-12
    assert all(np.all(rho_n(n, xs) >= -1e-15) for n in range(-12, 13))


def test_partition_of_unity_xi():
    ts = np.linspace(-50.0, 50.0, 1501)
    total = sum(lp_chi_m(m, ts) for m in range(7))   # 2^6 = 64 > 50
    assert np.max(np.abs(total - 1.0)) < 1e-12
    with pytest.raises(ValueError):
        lp_chi_m(-1, 0.5)


def test_partition_of_unity_2d_covered():
    params = PartitionParams(theta0=0.7, r=1.0, p=1, extent=64.0, points=128)
    f = params.frequencies()
    xi, eta = f[:, None], f[None, :]
    total = np.zeros((128, 128))
    for n, m in params.covered_cells():
        total += chi_nm(n, m, xi, eta, params.theta0)
    assert np.max(np.abs(total - 1.0)) < 1e-12


def test_rho_plateaus_and_supports():
    assert rho_n(0, 0.0) == 1.0
    for n in range(1, 7):
        assert rho_n(n, float(n * n)) == 1.0
        assert rho_n(-n, -float(n * n)) == 1.0
    # support check: vanishes outside I_n, positive somewhere inside
    xs = np.linspace(-60.0, 60.0, 4001)
    for n in range(-7, 8):
        lo, hi = support_interval(n)
        vals = rho_n(n, xs)
        outside = (xs < lo - 1e-9) | (xs > hi + 1e-9)
        assert np.all(vals[outside] == 0.0)
        assert np.max(vals) == pytest.approx(1.0)


def test_chi_m_support_boxes():
    ts = np.linspace(-80.0, 80.0, 4001)
    for m in (1, 2, 3, 4):
        vals = lp_chi_m(m, ts)
        inside = (np.abs(ts) >= 2.0 ** (m - 1)) & (np.abs(ts) <= 2.0 ** (m + 1))
        assert np.all(vals[~inside] == 0.0)
        assert lp_chi_m(m, 2.0 ** m) == 1.0


def test_cell_support_box():
    theta0 = 0.7
    n, m = 2, 2
    w = theta0 * 4.0   # <2>^2 theta0
    xi = np.linspace(-20.0, 20.0, 801)
    eta = np.linspace(-20.0, 20.0, 801)
    vals = chi_nm(n, m, xi[:, None], eta[None, :], theta0)
    lo, hi = support_interval(n)
    in_xi = (np.abs(xi) >= 2.0 ** (m - 1) * w) & (np.abs(xi) <= 2.0 ** (m + 1) * w)
    in_eta = (eta >= lo) & (eta <= hi)
    box = in_xi[:, None] & in_eta[None, :]
    assert np.all(vals[~box] == 0.0)
    assert np.any(vals > 0.5)


def test_partition_params_validation():
    with pytest.raises(ValueError):
        PartitionParams(theta0=0.0, r=1.0, p=1)
    with pytest.raises(ValueError):
        PartitionParams(theta0=1.0, r=1.0, p=0)
    with pytest.raises(ValueError):
        PartitionParams(theta0=1.0, r=1.0, p=1, points=255)
    with pytest.raises(ValueError):
        PartitionParams(theta0=1.0, r=1.0, p=1, points=8)
    params = PartitionParams(theta0=1.0, r=1.0, p=1, extent=64.0, points=256)
    assert params.nyquist == pytest.approx(math.pi * 256 / 64.0)
    cells = params.covered_cells()
    assert cells == params.covered_cells()       # deterministic
    assert (0, 0) in cells and len(set(cells)) == len(cells)
    assert all(m == 0 or (n, m - 1) in cells for n, m in cells)


def test_brp_norm_shape_guard():
    params = plateau_params()
    with pytest.raises(ValueError, match="expected"):
        brp_norm(np.zeros((8, 8)), params)


def test_single_mode_single_cell_value():
    # one plateau mode: the norm is 2^{rm} |c| L^{1/p} exactly
    c = 0.8 - 0.3j
    X, Y = grid(plateau_params())
    for p in (1, 2):
        params = plateau_params(r=0.7, p=p)
        for xi0, eta0, (n, m) in PLATEAU_MODES[:4]:
            u = c * np.exp(1j * (xi0 * X + eta0 * Y))
            want = 2.0 ** (0.7 * m) * abs(c) * L32 ** (1.0 / p)
            assert brp_norm(u, params) == pytest.approx(want, rel=1e-10)


def test_plateau_plancherel():
    # r = 0, p = 1: the norm collapses to the L2 norm when every mode sits
    # on a single-cell plateau (no partition overlap)
    params = plateau_params(r=0.0, p=1)
    X, Y = grid(params)
    rng = np.random.default_rng(7)
    coeffs = rng.normal(size=len(PLATEAU_MODES)) + 1j * rng.normal(
        size=len(PLATEAU_MODES))
    u = np.zeros((512, 512), dtype=complex)
    for c, (xi0, eta0, _) in zip(coeffs, PLATEAU_MODES):
        u += c * np.exp(1j * (xi0 * X + eta0 * Y))
    area = (params.extent / params.points) ** 2
    l2 = math.sqrt(float(np.sum(np.abs(u) ** 2)) * area)
    assert brp_norm(u, params) == pytest.approx(l2, rel=1e-9)
    # and the mode set really covers 8 distinct cells
    assert len({cell for _, _, cell in PLATEAU_MODES}) == 8


def test_norm_homogeneity():
    params = PartitionParams(theta0=0.8, r=1.3, p=2, extent=64.0, points=128)
    rng = np.random.default_rng(11)
    spec = np.zeros((128, 128), dtype=complex)
    k = 10
    spec[:k, :k] = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    u = np.fft.ifft2(spec).real
    base = brp_norm(u, params)
    assert brp_norm(2.37 * u, params) == pytest.approx(2.37 * base, rel=1e-13)
    assert brp_norm(-u, params) == pytest.approx(base, rel=1e-13)


def test_frame_norm_reduces_to_plain():
    params = PartitionParams(theta0=0.8, r=1.3, p=1, extent=64.0, points=128)
    rng = np.random.default_rng(3)
    spec = np.zeros((128, 128), dtype=complex)
    spec[:8, :8] = rng.normal(size=(8, 8))
    u = np.fft.ifft2(spec).real
    assert brp_norm(u, params, S=0.0, E=1.0) == brp_norm(u, params)


def packet(x, y, x0=24.0, y0=28.0, xi0=2.0, eta0=1.5, sig=2.0):
    g = np.exp(-(((x - x0) ** 2) + ((y - y0) ** 2)) / (2 * sig ** 2))
    return g * np.exp(1j * (xi0 * x + eta0 * y))


@pytest.mark.parametrize("p", [1, 2])
def test_frame_consistency_on_packets(p):
    # || u ||_{r,p,S,E} = E^{1/2p} || u compose A_{S,E} ||_{r,p} with
    # A_{S,E}(x, y) = (E x, y + S E x); needs compact support so the box
    # composition below is the plane composition
    S, E = 0.5, 2.0
    params = PartitionParams(theta0=1.0, r=0.8, p=p, extent=64.0, points=256)
    X, Y = grid(params)
    u = packet(X, Y)
    v = packet(E * X, Y + S * E * X)
    lhs = brp_norm(u, params, S=S, E=E)
    rhs = E ** (1.0 / (2 * p)) * brp_norm(v, params)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_nyquist_margin_warning():
    params = PartitionParams(theta0=1.0, r=0.5, p=1, extent=64.0, points=64)
    X, Y = grid(params)
    f = params.frequencies()
    hot = f[int(0.48 * 64)]            # within 10% of the Nyquist edge
    u = np.exp(1j * hot * X) * np.exp(1j * 0.0 * Y)
    with pytest.warns(UserWarning, match="Nyquist"):
        brp_norm(u, params)


def test_origin_cell_kernel_real_even():
    x, y, ker = cell_kernel(0, 0, grid_points=128)
    scale = float(np.max(np.abs(ker)))
    assert float(np.max(np.abs(ker.imag))) < 1e-13 * scale
    K = ker.real
    # centered at index N//2; row/col 0 has no mirror partner
    assert np.allclose(K[1:, :], K[1:, :][::-1, :], atol=1e-13 * scale)
    assert np.allclose(K[:, 1:], K[:, 1:][:, ::-1], atol=1e-13 * scale)


def test_fxnm_decay_uniform_bounds():
    l1s, cs = [], []
    for n in range(-8, 9):
        for m in range(0, 7):
            rep = fxnm_decay_check(n, m, nu=2.0, grid_points=128)
            assert rep.l1 > 0 and rep.envelope_C > 0
            l1s.append(rep.l1)
            cs.append(rep.envelope_C)
    # uniform over the swept cells within a factor of 10, and small in
    # absolute terms
    assert max(l1s) < 10.0 and max(cs) < 10.0
    assert max(l1s) / min(l1s) < 10.0
    assert max(cs) / min(cs) < 10.0
