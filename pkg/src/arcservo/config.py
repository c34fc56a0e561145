"""Flat key=value run configuration.

One key per line, '#' starts a comment, 3-vectors are comma-separated.
Unknown keys are rejected so a typo cannot silently fall back to a
default; duplicate keys keep the last value.  serialize_config() emits
text that parses back to an equal config (floats via repr).
"""

from dataclasses import dataclass, field, fields

import numpy as np

from .csvio import fmt
from .errors import InputError


@dataclass
class RunConfig:
    """Everything a fit / jacobian-check / servo run needs."""

    seed: int = 0
    fixed_point: np.ndarray = field(
        default_factory=lambda: np.zeros(3))
    rod_length: float = 0.5
    init_sweep: float = 2.5
    init_radial_dir: np.ndarray = field(
        default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    init_normal: np.ndarray = field(
        default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    init_euler: np.ndarray = field(
        default_factory=lambda: np.array([0.4, 1.1, -0.3]))
    target_d_position: np.ndarray = field(
        default_factory=lambda: np.array([-0.03, 0.03, 0.03]))
    target_d_euler: np.ndarray = field(
        default_factory=lambda: np.array([0.2, -0.15, 0.12]))
    gain: float = 0.5
    dt: float = 0.1
    max_steps: int = 500
    tol_e_norm: float = 0.0
    plateau_window: int = 0
    limit_angular: float = 0.5
    limit_linear: float = 0.2
    noise_sigma: float = 0.002
    cloud_points: int = 200
    radial_bias: float = 0.0
    estimator: bool = False
    downsample_factor: int = 1
    denoise_k: int = 8
    denoise_sigma: float = 2.0
    delta: float = 0.2
    plant_mode: str = "rod_geometry"
    coupled_jacobian: bool = True
    check_states: int = 100
    fd_step: float = 1e-6
    traj_steps: int = 50


_VEC3_KEYS = frozenset({
    "fixed_point", "init_radial_dir", "init_normal", "init_euler",
    "target_d_position", "target_d_euler",
})
_BOOL_KEYS = frozenset({"estimator", "coupled_jacobian"})
_INT_KEYS = frozenset({
    "seed", "max_steps", "plateau_window", "cloud_points",
    "downsample_factor", "denoise_k", "check_states", "traj_steps",
})
_STR_KEYS = frozenset({"plant_mode"})
_ALL_KEYS = frozenset(f.name for f in fields(RunConfig))


def _parse_value(key, raw):
    try:
        if key in _VEC3_KEYS:
            parts = [float(t) for t in raw.split(",")]
            if len(parts) != 3:
                raise ValueError(f"expected 3 components, got {len(parts)}")
            return np.array(parts)
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if key in _INT_KEYS:
            return int(raw)
        if key in _STR_KEYS:
            return raw
        return float(raw)
    except ValueError as exc:
        raise InputError(f"config key {key!r}: {exc}") from exc


def parse_config(text):
    """RunConfig from key=value text; unknown keys raise InputError."""
    cfg = RunConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise InputError(f"config line {lineno}: expected key=value, "
                             f"got {line!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in _ALL_KEYS:
            raise InputError(f"config line {lineno}: unknown key {key!r}")
        setattr(cfg, key, _parse_value(key, raw))
    return cfg


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc


def serialize_config(cfg):
    """key=value text that parses back to an equal RunConfig."""
    lines = []
    for f in fields(RunConfig):
        val = getattr(cfg, f.name)
        if f.name in _VEC3_KEYS:
            text = ",".join(fmt(x) for x in np.asarray(val, dtype=float))
        elif f.name in _BOOL_KEYS:
            text = "true" if val else "false"
        elif f.name in _INT_KEYS:
            text = str(int(val))
        elif f.name in _STR_KEYS:
            text = str(val)
        else:
            text = fmt(float(val))
        lines.append(f"{f.name}={text}")
    return "\n".join(lines) + "\n"
