"""Relative position tokens for timestamps and pixel coordinates.

A timestamp ``t`` in a video of ``D`` seconds maps to ``z = round(t / D * Z)``
and back to ``z / Z * D``. Coordinates use the same mapping per axis with the
frame extent and a spatial resolution. Values are plain integers rendered as
decimal text, so no tokenizer changes are involved.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

from .errors import RangeError, ValidationError

DEFAULT_Z = 300
DEFAULT_W_RES = 1000
DEFAULT_H_RES = 1000


def round_half_away(x: float) -> int:
    """Round to nearest integer, with exact halves going away from zero."""
    if not math.isfinite(x):
        raise ValidationError(f"cannot round {x}")
    if x < 0:
        return -round_half_away(-x)
    base = math.floor(x)
    # x - floor(x) is exact in binary floating point
    return int(base + 1) if x - base >= 0.5 else int(base)


def _check_resolution(name, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ValidationError(f"{name} must be a positive integer, got {value!r}")


def _check_extent(name, value):
    if not (isinstance(value, numbers.Real) and math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class QuantizedTime:
    z: int
    Z: int = DEFAULT_Z

    def __post_init__(self):
        _check_resolution("Z", self.Z)
        if isinstance(self.z, bool) or not isinstance(self.z, numbers.Integral) or not 0 <= self.z <= self.Z:
            raise ValidationError(f"z must be an integer in [0, {self.Z}], got {self.z!r}")


@dataclass(frozen=True)
class QuantizedBox:
    x1: int
    y1: int
    x2: int
    y2: int
    W_res: int = DEFAULT_W_RES
    H_res: int = DEFAULT_H_RES

    def __post_init__(self):
        _check_resolution("W_res", self.W_res)
        _check_resolution("H_res", self.H_res)
        for name in ("x1", "y1", "x2", "y2"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, numbers.Integral):
                raise ValidationError(f"{name} must be an integer, got {v!r}")
        if not 0 <= self.x1 <= self.x2 <= self.W_res:
            raise ValidationError(f"0 <= x1 <= x2 <= {self.W_res} violated: {self.x1}, {self.x2}")
        if not 0 <= self.y1 <= self.y2 <= self.H_res:
            raise ValidationError(f"0 <= y1 <= y2 <= {self.H_res} violated: {self.y1}, {self.y2}")

    def as_tuple(self):
        return (self.x1, self.y1, self.x2, self.y2)


def _quantize(value, extent, resolution, label):
    _check_resolution("resolution", resolution)
    if not math.isfinite(value) or not 0 <= value <= extent:
        raise RangeError(f"{label}={value} outside [0, {extent}]")
    return round_half_away(value / extent * resolution)


def quantize_time(t: float, D: float, Z: int = DEFAULT_Z) -> QuantizedTime:
    """Map a timestamp in ``[0, D]`` to its relative token ``z`` in ``[0, Z]``."""
    _check_extent("D", D)
    return QuantizedTime(_quantize(t, D, Z, "t"), Z)


def dequantize_time(q: QuantizedTime, D: float) -> float:
    if not isinstance(q, QuantizedTime):
        raise ValidationError(f"expected QuantizedTime, got {type(q).__name__}")
    _check_extent("D", D)
    return q.z / q.Z * D


def quantize_coord(x: float, W: float, W_res: int = DEFAULT_W_RES) -> int:
    """Map a pixel coordinate in ``[0, W]`` to an integer in ``[0, W_res]``."""
    _check_extent("extent", W)
    return _quantize(x, W, W_res, "x")


def dequantize_coord(q: int, W: float, W_res: int = DEFAULT_W_RES) -> float:
    _check_extent("extent", W)
    _check_resolution("resolution", W_res)
    if isinstance(q, bool) or not isinstance(q, numbers.Integral) or not 0 <= q <= W_res:
        raise ValidationError(f"quantized coordinate must be an integer in [0, {W_res}], got {q!r}")
    return q / W_res * W


def quantize_box(box, W: float, H: float, W_res: int = DEFAULT_W_RES, H_res: int = DEFAULT_H_RES) -> QuantizedBox:
    """Quantize an ``(x1, y1, x2, y2)`` pixel box corner by corner."""
    x1, y1, x2, y2 = box
    out = []
    for name, value, extent, res in (
        ("x1", x1, W, W_res), ("y1", y1, H, H_res), ("x2", x2, W, W_res), ("y2", y2, H, H_res),
    ):
        try:
            out.append(quantize_coord(value, extent, res))
        except RangeError as e:
            raise RangeError(f"corner {name}: {e}") from None
    return QuantizedBox(*out, W_res=W_res, H_res=H_res)


def dequantize_box(qb: QuantizedBox, W: float, H: float):
    if not isinstance(qb, QuantizedBox):
        raise ValidationError(f"expected QuantizedBox, got {type(qb).__name__}")
    return (
        dequantize_coord(qb.x1, W, qb.W_res),
        dequantize_coord(qb.y1, H, qb.H_res),
        dequantize_coord(qb.x2, W, qb.W_res),
        dequantize_coord(qb.y2, H, qb.H_res),
    )


def render_position_text(value: int) -> str:
    """Canonical decimal text of a non-negative position value."""
    return str(int(value))
