"""Global configuration: built-in defaults < JSON config file < explicit overrides.

The config file path comes from an explicit argument or, failing that, the
``MOTIONTOK_CONFIG`` environment variable.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

from .compression import DEFAULT_H, DEFAULT_K, DEFAULT_S, DEFAULT_T, DEFAULT_W
from .dataset.builder import DEFAULT_TASK_WEIGHTS, normalize_weights
from .dataset.filters import FilterConfig
from .dataset.templates import RenderConfig
from .errors import FormatError, ValidationError
from .position_codec import DEFAULT_H_RES, DEFAULT_W_RES, DEFAULT_Z

CONFIG_ENV_VAR = "MOTIONTOK_CONFIG"

_SCALARS = ("T", "K", "s", "h", "w", "Z", "W_res", "H_res", "seed")


@dataclass
class GlobalConfig:
    T: int = DEFAULT_T
    K: int = DEFAULT_K
    s: int = DEFAULT_S
    h: int = DEFAULT_H
    w: int = DEFAULT_W
    Z: int = DEFAULT_Z
    W_res: int = DEFAULT_W_RES
    H_res: int = DEFAULT_H_RES
    seed: int = 0
    filter: FilterConfig = field(default_factory=FilterConfig)
    task_weights: dict = field(default_factory=lambda: {t.value: v for t, v in DEFAULT_TASK_WEIGHTS.items()})
    render: dict = field(default_factory=dict)
    emit_all_tasks: bool = False

    def render_config(self) -> RenderConfig:
        opts = dict(self.render)
        opts.setdefault("Z", self.Z)
        opts.setdefault("W_res", self.W_res)
        opts.setdefault("H_res", self.H_res)
        return RenderConfig.from_dict(opts)

    def validate(self):
        for name in _SCALARS:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ValidationError(f"config {name} must be an integer, got {v!r}")
        if min(self.T, self.h, self.w, self.s, self.Z, self.W_res, self.H_res) < 1:
            raise ValidationError("T, h, w, s, Z, W_res and H_res must be positive")
        if not 0 <= self.K <= self.T:
            raise ValidationError(f"K must lie in [0, T], got {self.K}")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        normalize_weights(self.task_weights)
        self.render_config()
        return self

    def to_dict(self):
        d = {name: getattr(self, name) for name in _SCALARS}
        d["filter"] = self.filter.to_dict()
        d["task_weights"] = dict(self.task_weights)
        d["render"] = dict(self.render)
        d["emit_all_tasks"] = self.emit_all_tasks
        return d


def merge(cfg: GlobalConfig, data: dict) -> GlobalConfig:
    """Return a copy of ``cfg`` with the keys of ``data`` applied on top."""
    known = {f.name for f in dataclasses.fields(GlobalConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    updates = {}
    for key, value in data.items():
        if value is None:
            continue
        if key == "filter":
            base = cfg.filter.to_dict()
            base.update(value)
            value = FilterConfig.from_dict(base)
        elif key in ("task_weights", "render"):
            value = {**getattr(cfg, key), **value}
        updates[key] = value
    return dataclasses.replace(cfg, **updates).validate()


def load_config(path=None, overrides=None, environ=None) -> GlobalConfig:
    """Defaults, then the config file (if any), then non-``None`` overrides."""
    environ = os.environ if environ is None else environ
    cfg = GlobalConfig()
    path = path or environ.get(CONFIG_ENV_VAR)
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as e:
                raise FormatError(f"{path}: invalid JSON config: {e}") from None
        if not isinstance(data, dict):
            raise ValidationError(f"{path}: config must be a JSON object")
        cfg = merge(cfg, data)
    if overrides:
        cfg = merge(cfg, {k: v for k, v in overrides.items() if v is not None})
    return cfg
