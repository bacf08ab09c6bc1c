"""
Scenario configuration files.

A config is a YAML mapping. Every key is optional except that the file must
parse to a mapping; missing keys take the defaults below and each applied
default is logged at INFO level on the ``nullcsi.config`` logger. Unknown
keys anywhere are rejected.

::

    master_seed: 0            # integer in [0, 2**64)
    n_rx: 2
    n_tx: 2
    rician_k: 3.0
    threshold: 0.1
    threshold_mode: relative  # or absolute
    bits_per_trial: 500
    trials: 2000
    perturbation:
      family: gaussian        # gaussian | uniform | none
      scale: 0.1
    budget:
      e_p: 10.0
      e_s: 3000.0
      n_0: 1.0
      path:
        distance: 2.0
        attenuation_exponent: 3.0
    sweep:                    # optional
      axis: distance          # distance | su_power | error_scale | threshold
      values: [1, 2, 3]
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .bounds import LinkBudget
from .channels import PERTURBATION_FAMILIES, PathLossParams, PerturbationSpec
from .linksim import SWEEP_AXES

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid or unreadable scenario configuration."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple


@dataclass(frozen=True)
class ScenarioConfig:
    master_seed: int = 0
    n_rx: int = 2
    n_tx: int = 2
    rician_k: float = 3.0
    threshold: float = 0.1
    threshold_mode: str = "relative"
    bits_per_trial: int = 500
    trials: int = 2000
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    budget: LinkBudget = field(default_factory=LinkBudget)
    sweep: SweepSpec = None


_TOP = {
    "master_seed": 0,
    "n_rx": 2,
    "n_tx": 2,
    "rician_k": 3.0,
    "threshold": 0.1,
    "threshold_mode": "relative",
    "bits_per_trial": 500,
    "trials": 2000,
}
_PERT = {"family": "gaussian", "scale": 0.1}
_BUDGET = {"e_p": 10.0, "e_s": 3000.0, "n_0": 1.0}
_PATH = {"distance": 2.0, "attenuation_exponent": 3.0}
_SECTIONS = ("perturbation", "budget", "sweep")


def _mapping(raw, where):
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(raw).__name__}")
    return raw


def _reject_unknown(raw, allowed, where):
    extra = sorted(set(raw) - set(allowed))
    if extra:
        prefix = f"{where}." if where else ""
        raise ConfigError(f"unknown config key {prefix}{extra[0]}")


def _take(raw, defaults, where):
    out = {}
    for key, default in defaults.items():
        name = f"{where}.{key}" if where else key
        if key in raw:
            out[key] = raw[key]
        else:
            log.info("config default applied: %s = %r", name, default)
            out[key] = default
    return out


def _count(v, name):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{name}: expected an integer, got {v!r}")
    if v < 1:
        raise ConfigError(f"{name}: must be >= 1, got {v}")
    return v


def _real(v, name, lo=None, strict=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {v!r}")
    v = float(v)
    if v != v or v in (float("inf"), float("-inf")):
        raise ConfigError(f"{name}: must be finite, got {v}")
    if lo is not None and (v <= lo if strict else v < lo):
        op = ">" if strict else ">="
        raise ConfigError(f"{name}: must be {op} {lo}, got {v}")
    return v


def config_from_dict(raw):
    """Validate a parsed mapping and build a `ScenarioConfig`.

    Raises
    ------
    ConfigError
        Unknown key, wrong type or out-of-range value; the message names
        the offending field.
    """
    raw = _mapping(raw, "config")
    _reject_unknown(raw, list(_TOP) + list(_SECTIONS), "")
    top = _take(raw, _TOP, "")

    seed = top["master_seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"master_seed: expected an integer in [0, 2**64), got {seed!r}")
    mode = top["threshold_mode"]
    if mode not in ("absolute", "relative"):
        raise ConfigError(f"threshold_mode: expected 'absolute' or 'relative', got {mode!r}")

    p_raw = _mapping(raw.get("perturbation"), "perturbation")
    _reject_unknown(p_raw, _PERT, "perturbation")
    p = _take(p_raw, _PERT, "perturbation")
    if p["family"] not in PERTURBATION_FAMILIES:
        raise ConfigError(f"perturbation.family: expected one of {PERTURBATION_FAMILIES}, got {p['family']!r}")
    pert = PerturbationSpec(p["family"], _real(p["scale"], "perturbation.scale", 0))

    b_raw = _mapping(raw.get("budget"), "budget")
    _reject_unknown(b_raw, list(_BUDGET) + ["path"], "budget")
    b = _take(b_raw, _BUDGET, "budget")
    path_raw = _mapping(b_raw.get("path"), "budget.path")
    _reject_unknown(path_raw, _PATH, "budget.path")
    pa = _take(path_raw, _PATH, "budget.path")
    path = PathLossParams(
        _real(pa["distance"], "budget.path.distance", 0, strict=True),
        _real(pa["attenuation_exponent"], "budget.path.attenuation_exponent", 0, strict=True),
    )
    budget = LinkBudget(
        e_p=_real(b["e_p"], "budget.e_p", 0, strict=True),
        e_s=_real(b["e_s"], "budget.e_s", 0),
        n_0=_real(b["n_0"], "budget.n_0", 0, strict=True),
        path=path,
    )

    sweep = None
    if raw.get("sweep") is not None:
        s_raw = _mapping(raw["sweep"], "sweep")
        _reject_unknown(s_raw, ("axis", "values"), "sweep")
        if s_raw.get("axis") not in SWEEP_AXES:
            raise ConfigError(f"sweep.axis: expected one of {SWEEP_AXES}, got {s_raw.get('axis')!r}")
        vals = s_raw.get("values")
        if not isinstance(vals, list) or not vals:
            raise ConfigError("sweep.values: expected a non-empty list of numbers")
        sweep = SweepSpec(s_raw["axis"], tuple(_real(v, "sweep.values") for v in vals))

    return ScenarioConfig(
        master_seed=seed,
        n_rx=_count(top["n_rx"], "n_rx"),
        n_tx=_count(top["n_tx"], "n_tx"),
        rician_k=_real(top["rician_k"], "rician_k", 0),
        threshold=_real(top["threshold"], "threshold", 0),
        threshold_mode=mode,
        bits_per_trial=_count(top["bits_per_trial"], "bits_per_trial"),
        trials=_count(top["trials"], "trials"),
        perturbation=pert,
        budget=budget,
        sweep=sweep,
    )


def parse_config(path):
    """Read and validate a YAML scenario file.

    Raises
    ------
    ConfigError
        If the file is missing, malformed or fails validation.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return config_from_dict(raw)


def config_to_dict(cfg):
    """Plain mapping that `config_from_dict` turns back into `cfg`."""
    b = cfg.budget
    out = {
        "master_seed": cfg.master_seed,
        "n_rx": cfg.n_rx,
        "n_tx": cfg.n_tx,
        "rician_k": cfg.rician_k,
        "threshold": cfg.threshold,
        "threshold_mode": cfg.threshold_mode,
        "bits_per_trial": cfg.bits_per_trial,
        "trials": cfg.trials,
        "perturbation": {"family": cfg.perturbation.family, "scale": cfg.perturbation.scale},
        "budget": {
            "e_p": b.e_p,
            "e_s": b.e_s,
            "n_0": b.n_0,
            "path": {"distance": b.path.distance, "attenuation_exponent": b.path.attenuation_exponent},
        },
    }
    if cfg.sweep is not None:
        out["sweep"] = {"axis": cfg.sweep.axis, "values": list(cfg.sweep.values)}
    return out


def dump_config(cfg):
    """Serialize `cfg` as YAML text."""
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
