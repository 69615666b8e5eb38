import math
from pathlib import Path

import pytest

from suspflow.config import (RunConfig, config_digest, from_dict, load_config,
                             parse_text, save_config, to_text, with_overrides)
from suspflow.roof import RoofFunction, constant_roof, standard_roof


def cfg_std():
    return RunConfig(roof=standard_roof(), gamma0=0.75, cone_r=10.0 / 3.0,
                     max_words=2 ** 20, max_tuples=2 ** 16, seed=41,
                     output_dir="out", output_format="csv")


def test_text_round_trip_exact():
    for cfg in (cfg_std(),
                RunConfig(roof=constant_roof(2, 1.0)),
                RunConfig(roof=RoofFunction(ell=3, c0=2.0,
                                            cos_coeffs=(0.1, -0.05),
                                            sin_coeffs=(0.0, 0.2),
                                            y_min=1.5, y_max=2.5,
                                            kappa0=17.3))):
        assert parse_text(to_text(cfg)) == cfg


def test_round_trip_with_inf_bounds():
    # unset bounds serialize as inf and must survive the round trip
    roof = RoofFunction(ell=2, c0=1.0, y_min=0.0, y_max=math.inf,
                        kappa0=math.inf)
    cfg = RunConfig(roof=roof)
    assert "inf" in to_text(cfg)
    assert parse_text(to_text(cfg)) == cfg


def test_digest_stability_and_distinctness():
    a = cfg_std()
    assert config_digest(a) == config_digest(cfg_std())
    assert len(config_digest(a)) == 12
    b = with_overrides(a, seed=42)
    assert config_digest(b) != config_digest(a)
    c = RunConfig(roof=constant_roof(2, 1.0))
    assert config_digest(c) != config_digest(a)


def test_from_dict_rejects_unknown_roof_keys():
    with pytest.raises(ValueError, match="unknown roof keys"):
        from_dict({"roof": {"ell": 2, "c0": 1.0, "slope": 3.0}})
    with pytest.raises(ValueError, match="roof"):
        from_dict({"run": {"seed": 1}})


def test_from_dict_defaults():
    cfg = from_dict({"roof": {"ell": 2, "c0": 1.0}})
    assert cfg.roof.y_min == 0.0 and math.isinf(cfg.roof.y_max)
    assert cfg.gamma0 is None and cfg.cone_r is None
    assert cfg.seed == 0 and cfg.output_format == "json"


def test_output_format_validation():
    with pytest.raises(ValueError, match="json or csv"):
        RunConfig(roof=standard_roof(), output_format="yaml")
    with pytest.raises(ValueError, match="budgets"):
        RunConfig(roof=standard_roof(), max_words=0)


def test_output_dir_env_override(monkeypatch):
    cfg = cfg_std()
    monkeypatch.delenv("SUSPFLOW_OUTPUT_DIR", raising=False)
    assert cfg.resolved_output_dir() == "out"
    monkeypatch.setenv("SUSPFLOW_OUTPUT_DIR", "/tmp/elsewhere")
    assert cfg.resolved_output_dir() == "/tmp/elsewhere"


def test_with_overrides_skips_none():
    cfg = cfg_std()
    assert with_overrides(cfg) is cfg
    assert with_overrides(cfg, seed=None, output_format=None) is cfg
    out = with_overrides(cfg, seed=7, output_format="json")
    assert out.seed == 7 and out.output_format == "json"
    assert cfg.seed == 41                      # original untouched


def test_save_load_round_trip(tmp_path):
    cfg = cfg_std()
    path = tmp_path / "run.toml"
    save_config(cfg, str(path))
    assert load_config(str(path)) == cfg


def test_checked_in_configs_parse():
    configs = Path(__file__).resolve().parents[1] / "configs"
    const = load_config(str(configs / "const.toml"))
    assert const.roof.ell == 2 and const.roof.c0 == 1.0
    assert const.output_format == "csv"
    std = load_config(str(configs / "standard.toml"))
    assert std.roof.cos_coeffs == (0.2,)
    assert std.gamma0 == 0.75
    assert config_digest(const) != config_digest(std)
