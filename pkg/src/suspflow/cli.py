"""Command-line frontend.

Every subcommand reads one TOML config (--roof; a built-in constant-roof
config is used when omitted), applies flag overrides, and writes rows to
stdout in the configured format. Each row carries the digest of the
effective config, so identical config + seed reproduce byte-identical
output regardless of --workers.

Exit codes: 0 success, 1 validation failure, 2 budget refusal, 64 usage.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import asymptotics, exponents, norms, orbits, semiflow, spectral
from . import transversality as tv
from .budget import WorkBudgetExceeded
from .config import RunConfig, config_digest, load_config, with_overrides
from .roof import constant_roof

_SUBCOMMANDS = ("orbits", "count", "entropy", "resonances", "exponents",
                "pot-check", "flat-trace", "backward", "transversality",
                "norm-check")


class _Parser(argparse.ArgumentParser):
    # usage problems exit 64, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    s = str(v)
    if "," in s or "\n" in s:
        raise ValueError(f"value not representable in csv: {s!r}")
    return s


class RowWriter:
    def __init__(self, columns: tuple[str, ...], fmt: str, digest: str,
                 stream=None):
        self.columns = columns
        self.fmt = fmt
        self.digest = digest
        self.stream = stream if stream is not None else sys.stdout
        if fmt == "csv":
            self.stream.write(",".join(columns + ("config",)) + "\n")

    def row(self, *vals) -> None:
        if len(vals) != len(self.columns):
            raise ValueError("row/column mismatch")
        if self.fmt == "csv":
            self.stream.write(",".join(_cell(v) for v in vals)
                              + f",{self.digest}\n")
        else:
            rec = dict(zip(self.columns, vals))
            rec["config"] = self.digest
            self.stream.write(json.dumps(rec) + "\n")


def _load(args) -> tuple[RunConfig, str]:
    if args.roof is not None:
        cfg = load_config(args.roof)
    else:
        cfg = RunConfig(roof=constant_roof(2, 1.0))
    cfg = with_overrides(cfg,
                         seed=getattr(args, "seed", None),
                         output_format=getattr(args, "format", None))
    return cfg, config_digest(cfg)


def _cone(cfg: RunConfig) -> tv.ConeParams:
    return tv.ConeParams.for_roof(cfg.roof, gamma0=cfg.gamma0, r=cfg.cone_r)


# ---------------------------------------------------------------- commands

def _cmd_orbits(args) -> int:
    cfg, digest = _load(args)
    if args.cache is not None:
        cached = orbits.read_cache(args.cache, cfg.roof)
        out = RowWriter(("n", "j", "period"), cfg.output_format, digest)
        for n, j, period in zip(cached.n, cached.j, cached.period):
            out.row(int(n), int(j), float(period))
        return 0
    orbs = orbits.enumerate_prime_orbits(cfg.roof, args.n_max,
                                         budget=cfg.max_words)
    if args.write_cache is not None:
        rows = orbits.write_cache(args.write_cache, cfg.roof, args.n_max,
                                  orbits=orbs)
        out = RowWriter(("n_max", "rows", "path"), cfg.output_format, digest)
        out.row(args.n_max, rows, args.write_cache)
        return 0
    out = RowWriter(("n", "word", "j", "x_base", "period", "multiplier"),
                    cfg.output_format, digest)
    for orb in orbs:
        out.row(orb.n, "".join(str(d) for d in orb.word), orb.j,
                str(orb.x_base), orb.period, orb.multiplier)
    return 0


def _cmd_count(args) -> int:
    cfg, digest = _load(args)
    budget = args.budget if args.budget is not None else cfg.max_words
    n = orbits.count_pi(cfg.roof, args.T, budget=budget, workers=args.workers)
    out = RowWriter(("T", "pi"), cfg.output_format, digest)
    out.row(args.T, n)
    return 0


def _cmd_entropy(args) -> int:
    cfg, digest = _load(args)
    h = spectral.entropy(cfg.roof, N=args.N)
    out = RowWriter(("ell", "N", "h"), cfg.output_format, digest)
    out.row(cfg.roof.ell, args.N, h)
    return 0


def _cmd_resonances(args) -> int:
    cfg, digest = _load(args)
    h = spectral.entropy(cfg.roof, N=args.N)
    sigma_max = args.sigma_max if args.sigma_max is not None else h + 0.05
    window = spectral.SearchWindow(args.sigma_min, sigma_max, args.im_max)
    res = spectral.resonances(cfg.roof, window, N=args.N, tol=args.tol)
    for fs in res.failed:
        print(f"seed {fs.seed.real:.6f}{fs.seed.imag:+.6f}i: {fs.reason}",
              file=sys.stderr)
    out = RowWriter(("re", "im", "residual", "N"), cfg.output_format, digest)
    for entry in res.entries:
        out.row(entry.mu.real, entry.mu.imag, entry.residual, entry.N_used)
    return 0


def _cmd_exponents(args) -> int:
    cfg, digest = _load(args)
    rep = exponents.report(cfg.roof, n_max=args.n_max, N=args.N,
                           budget=cfg.max_words, workers=args.workers)
    rep.check()
    out = RowWriter(("chi_bar_min", "chi_min", "h", "chi_max", "chi_bar_max",
                     "alpha", "p_star", "rho_1", "rho_p_star",
                     "rho_bar_p_star", "predicted_error_exponent", "n_used"),
                    cfg.output_format, digest)
    out.row(rep.chi_bar_min, rep.chi_min, rep.h, rep.chi_max, rep.chi_bar_max,
            rep.alpha, rep.p_star, rep.rho[1], rep.rho[rep.p_star],
            rep.rho_bar[rep.p_star], rep.predicted_error_exponent, rep.n_used)
    return 0


def _resonance_set(cfg, N, sigma_min, im_max):
    f = cfg.roof
    if not any(f.cos_coeffs) and not any(f.sin_coeffs):
        k_max = math.ceil(im_max * f.c0 / (2.0 * math.pi) + 1e-9)
        return spectral.constant_roof_resonances(f.ell, f.c0, k_max)
    h = spectral.entropy(f, N=N)
    window = spectral.SearchWindow(sigma_min, h + 0.05, im_max)
    return spectral.resonances(f, window, N=N)


def _cmd_pot_check(args) -> int:
    cfg, digest = _load(args)
    res = _resonance_set(cfg, args.N, args.sigma_min, args.im_max)
    n_steps = int(round((args.T_max - args.T_min) / args.T_step))
    grid = args.T_min + args.T_step * np.arange(n_steps + 1)
    series = asymptotics.pot_series(cfg.roof, grid, res, args.cutoff,
                                    budget=cfg.max_words,
                                    workers=args.workers)
    if args.summary:
        out = RowWriter(("T_start", "T_end", "slope", "n_points", "pooled"),
                        cfg.output_format, digest)
        for w in series.windows:
            out.row(w.T_start, w.T_end, w.slope, w.n_points, False)
        out.row(float(grid[0]), float(grid[-1]), series.fitted_exponent,
                len(series.T), True)
        return 0
    out = RowWriter(("T", "pi_tilde", "leading", "correction", "residual"),
                    cfg.output_format, digest)
    for i in range(len(series.T)):
        out.row(float(series.T[i]), float(series.pi_tilde[i]),
                float(series.leading[i]), float(series.correction[i]),
                float(series.residual[i]))
    return 0


def _cmd_flat_trace(args) -> int:
    cfg, digest = _load(args)
    phi = asymptotics.TestFunction(args.t0, args.t1)
    res = _resonance_set(cfg, args.N, args.sigma_min, args.im_max)
    orbit_side = asymptotics.flat_trace_orbit_side(cfg.roof, phi,
                                                   budget=cfg.max_words,
                                                   workers=args.workers)
    spectral_side = asymptotics.flat_trace_spectral_side(res, phi,
                                                         args.cutoff)
    out = RowWriter(("t0", "t1", "orbit_side", "spectral_side", "abs_diff",
                     "n_resonances"), cfg.output_format, digest)
    out.row(args.t0, args.t1, orbit_side, spectral_side,
            abs(orbit_side - spectral_side), len(res.entries))
    return 0


def _cmd_backward(args) -> int:
    cfg, digest = _load(args)
    z = semiflow.canonical_point(cfg.roof, args.x, args.y)
    branches = semiflow.backward_orbit(cfg.roof, z, args.t,
                                       budget=cfg.max_words)
    out = RowWriter(("k", "j", "x", "y", "E", "F", "S"),
                    cfg.output_format, digest)
    for w in branches:
        out.row(w.k, w.j, w.w.x, w.w.y, w.cocycle.E, w.cocycle.F,
                w.cocycle.S)
    return 0


def _cmd_transversality(args) -> int:
    cfg, digest = _load(args)
    cone = _cone(cfg)
    if args.samples > 0:
        rng = np.random.default_rng(cfg.seed)
        zs = []
        while len(zs) < args.samples:
            x = float(rng.random())
            y = float(rng.random()) * cfg.roof(x)
            zs.append(semiflow.FlowPoint(x, y))
    else:
        zs = [semiflow.canonical_point(cfg.roof, args.x, args.y)]
    reports = tv.check_generic_condition(
        cfg.roof, zs, args.t, (args.a, args.b), args.p, args.epsilon,
        args.n, cone, delta=args.delta, budget=cfg.max_tuples, N=args.N)
    out = RowWriter(("x", "y", "t", "p", "n_branches", "n_excluded",
                     "sup_value", "threshold", "passed", "skipped"),
                    cfg.output_format, digest)
    for r in reports:
        out.row(r.z.x, r.z.y, r.t, r.p, r.n_branches, len(r.exceptional),
                r.sup_value, r.threshold, r.passed,
                r.skipped if r.skipped else "")
    return 0


def _cmd_norm_check(args) -> int:
    cfg, digest = _load(args)
    params = norms.PartitionParams(theta0=args.theta0, r=args.r, p=args.p,
                                   extent=args.extent, points=args.points)
    rng = np.random.default_rng(cfg.seed)
    Np = params.points
    g = np.arange(Np) * (params.extent / Np)
    X, Y = np.meshgrid(g, g, indexing="ij")
    u = np.zeros((Np, Np), dtype=complex)
    k_lim = max(1, Np // 6)
    for _ in range(12):
        kx = int(rng.integers(-k_lim, k_lim + 1))
        ky = int(rng.integers(-k_lim, k_lim + 1))
        c = complex(rng.normal(), rng.normal())
        u += c * np.exp(2j * math.pi * (kx * X + ky * Y) / params.extent)
    spec = np.fft.fft2(u)
    freqs = params.frequencies()
    xi = freqs[:, None]
    eta = freqs[None, :]
    area = (params.extent / Np) ** 2
    tp = 2 * params.p
    out = RowWriter(("kind", "n", "m", "value"), cfg.output_format, digest)
    for n, m in params.covered_cells():
        mask = norms.chi_nm(n, m, xi, eta, params.theta0)
        piece = np.fft.ifft2(mask * spec)
        cell = float((np.sum(np.abs(piece) ** tp) * area) ** (1.0 / tp))
        out.row("cell", n, m, cell)
    out.row("total", 0, 0, norms.brp_norm(u, params))
    return 0


# ---------------------------------------------------------------- wiring

def _add_common(sp, workers=False):
    sp.add_argument("--roof", metavar="CONFIG",
                    help="TOML config file (defaults to constant roof, ell=2)")
    sp.add_argument("--format", choices=("json", "csv"), default=None,
                    help="override the configured output format")
    sp.add_argument("--seed", type=int, default=None,
                    help="override the configured seed")
    if workers:
        sp.add_argument("--workers", type=int, default=1,
                        help="worker processes (output is identical)")


def build_parser() -> _Parser:
    top = _Parser(prog="suspflow",
                  description="suspension-semiflow numerics toolbox")
    sub = top.add_subparsers(dest="command", metavar="COMMAND")

    sp = sub.add_parser("orbits", help="enumerate prime orbits")
    _add_common(sp)
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--write-cache", metavar="PATH")
    sp.add_argument("--cache", metavar="PATH",
                    help="read a previously written cache instead")
    sp.set_defaults(fn=_cmd_orbits)

    sp = sub.add_parser("count", help="count orbits with period <= T")
    _add_common(sp, workers=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--budget", type=float, default=None)
    sp.set_defaults(fn=_cmd_count)

    sp = sub.add_parser("entropy", help="topological entropy")
    _add_common(sp)
    sp.add_argument("--N", type=int, default=32)
    sp.set_defaults(fn=_cmd_entropy)

    sp = sub.add_parser("resonances", help="resonance search in a window")
    _add_common(sp)
    sp.add_argument("--N", type=int, default=32)
    sp.add_argument("--sigma-min", type=float, default=0.3)
    sp.add_argument("--sigma-max", type=float, default=None)
    sp.add_argument("--im-max", type=float, default=12.0)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(fn=_cmd_resonances)

    sp = sub.add_parser("exponents", help="Lyapunov/entropy exponent report")
    _add_common(sp, workers=True)
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--N", type=int, default=32)
    sp.set_defaults(fn=_cmd_exponents)

    sp = sub.add_parser("pot-check", help="orbit-count residual series")
    _add_common(sp, workers=True)
    sp.add_argument("--T-min", type=float, required=True)
    sp.add_argument("--T-max", type=float, required=True)
    sp.add_argument("--T-step", type=float, default=0.05)
    sp.add_argument("--cutoff", type=float, required=True,
                    help="resonance cutoff for the correction sum")
    sp.add_argument("--N", type=int, default=24)
    sp.add_argument("--sigma-min", type=float, default=0.3)
    sp.add_argument("--im-max", type=float, default=26.0)
    sp.add_argument("--summary", action="store_true",
                    help="emit fit windows and the pooled exponent instead")
    sp.set_defaults(fn=_cmd_pot_check)

    sp = sub.add_parser("flat-trace", help="orbit vs spectral trace of a bump")
    _add_common(sp, workers=True)
    sp.add_argument("--t0", type=float, required=True)
    sp.add_argument("--t1", type=float, required=True)
    sp.add_argument("--cutoff", type=float, default=0.0)
    sp.add_argument("--N", type=int, default=24)
    sp.add_argument("--sigma-min", type=float, default=0.3)
    sp.add_argument("--im-max", type=float, default=40.0)
    sp.set_defaults(fn=_cmd_flat_trace)

    sp = sub.add_parser("backward", help="backward branches through a point")
    _add_common(sp)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--y", type=float, default=0.0)
    sp.add_argument("--t", type=float, required=True)
    sp.set_defaults(fn=_cmd_backward)

    sp = sub.add_parser("transversality", help="generic-condition check")
    _add_common(sp, workers=True)
    sp.add_argument("--x", type=float, default=None)
    sp.add_argument("--y", type=float, default=0.0)
    sp.add_argument("--samples", type=int, default=0,
                    help="draw this many seeded sample points instead of --x")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--a", type=float, default=0.3)
    sp.add_argument("--b", type=float, default=1.0)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--delta", type=float, default=1e-8)
    sp.add_argument("--N", type=int, default=32)
    sp.set_defaults(fn=_cmd_transversality)

    sp = sub.add_parser("norm-check", help="per-cell anisotropic norms")
    _add_common(sp)
    sp.add_argument("--theta0", type=float, default=1.0)
    sp.add_argument("--r", type=float, default=0.0)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--extent", type=float, default=64.0)
    sp.add_argument("--points", type=int, default=256)
    sp.set_defaults(fn=_cmd_norm_check)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 64
    if getattr(args, "samples", None) == 0 and args.command == "transversality" \
            and args.x is None:
        print("transversality: need --x or --samples", file=sys.stderr)
        return 64
    try:
        return args.fn(args)
    except WorkBudgetExceeded as exc:
        print(f"budget refused: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, spectral.EigenConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
