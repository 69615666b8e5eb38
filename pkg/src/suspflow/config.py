"""Run configuration: one TOML file drives every subcommand.

A config holds the roof, cone parameters, budgets, the run seed, and output
options. Serialization is deterministic (fixed key order, repr floats), so
the sha256 digest of the canonical text identifies a run; every output row
carries it. parse_text(to_text(cfg)) == cfg exactly.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, replace

try:
    import tomllib as _toml
except ModuleNotFoundError:        # Python < 3.11
    import tomli as _toml

from .budget import DEFAULT_WORK_BUDGET
from .roof import RoofFunction

DEFAULT_TUPLE_BUDGET = 2 ** 24


@dataclass(frozen=True)
class RunConfig:
    roof: RoofFunction
    gamma0: float | None = None     # cone base slope; None = roof default
    cone_r: float | None = None     # cone exponent; None = roof default
    max_words: int = DEFAULT_WORK_BUDGET
    max_tuples: int = DEFAULT_TUPLE_BUDGET
    seed: int = 0
    output_dir: str = "."
    output_format: str = "json"

    def __post_init__(self):
        if self.output_format not in ("json", "csv"):
            raise ValueError("output format must be json or csv")
        if self.max_words < 1 or self.max_tuples < 1:
            raise ValueError("budgets must be positive")

    def resolved_output_dir(self) -> str:
        # the only environment override we honor
        return os.environ.get("SUSPFLOW_OUTPUT_DIR", self.output_dir)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        r = repr(v)
        # TOML floats need a . or exponent marker
        return r if ("." in r or "e" in r or "n" in r) else r + ".0"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(float(x)) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)!r}")


def to_text(cfg: RunConfig) -> str:
    f = cfg.roof
    lines = ["[roof]"]
    for key, val in (("ell", f.ell), ("c0", f.c0),
                     ("cos", list(f.cos_coeffs)), ("sin", list(f.sin_coeffs)),
                     ("y_min", f.y_min), ("y_max", f.y_max),
                     ("kappa0", f.kappa0)):
        lines.append(f"{key} = {_fmt(val)}")
    lines.append("")
    lines.append("[cone]")
    if cfg.gamma0 is not None:
        lines.append(f"gamma0 = {_fmt(cfg.gamma0)}")
    if cfg.cone_r is not None:
        lines.append(f"r = {_fmt(cfg.cone_r)}")
    lines.append("")
    lines.append("[budget]")
    lines.append(f"max_words = {cfg.max_words}")
    lines.append(f"max_tuples = {cfg.max_tuples}")
    lines.append("")
    lines.append("[run]")
    lines.append(f"seed = {cfg.seed}")
    lines.append(f"output_dir = {_fmt(cfg.output_dir)}")
    lines.append(f"format = {_fmt(cfg.output_format)}")
    lines.append("")
    return "\n".join(lines)


def from_dict(data: dict) -> RunConfig:
    try:
        roof_tab = data["roof"]
    except KeyError:
        raise ValueError("config needs a [roof] section") from None
    extra = set(roof_tab) - {"ell", "c0", "cos", "sin", "y_min", "y_max", "kappa0"}
    if extra:
        raise ValueError(f"unknown roof keys: {sorted(extra)}")
    roof = RoofFunction(
        ell=int(roof_tab["ell"]),
        c0=float(roof_tab["c0"]),
        cos_coeffs=tuple(float(a) for a in roof_tab.get("cos", ())),
        sin_coeffs=tuple(float(b) for b in roof_tab.get("sin", ())),
        y_min=float(roof_tab.get("y_min", 0.0)),
        y_max=float(roof_tab.get("y_max", float("inf"))),
        kappa0=float(roof_tab.get("kappa0", float("inf"))),
    )
    cone = data.get("cone", {})
    budget = data.get("budget", {})
    run = data.get("run", {})
    return RunConfig(
        roof=roof,
        gamma0=float(cone["gamma0"]) if "gamma0" in cone else None,
        cone_r=float(cone["r"]) if "r" in cone else None,
        max_words=int(budget.get("max_words", DEFAULT_WORK_BUDGET)),
        max_tuples=int(budget.get("max_tuples", DEFAULT_TUPLE_BUDGET)),
        seed=int(run.get("seed", 0)),
        output_dir=str(run.get("output_dir", ".")),
        output_format=str(run.get("format", "json")),
    )


def parse_text(text: str) -> RunConfig:
    return from_dict(_toml.loads(text))


def load_config(path: str) -> RunConfig:
    with open(path, "rb") as fh:
        return from_dict(_toml.load(fh))


def save_config(cfg: RunConfig, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(to_text(cfg))


def config_digest(cfg: RunConfig) -> str:
    return hashlib.sha256(to_text(cfg).encode()).hexdigest()[:12]


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(cfg, **kw) if kw else cfg
