"""Deterministic synthetic videos for tests and demos."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .features_io import VideoFeatures

PATTERNS = ("constant", "two-block", "random")


def gen_fixture(pattern: str, T: int = 6, h: int = 2, w: int = 2, d: int = 4, *,
                seed: int = 0, duration_s: float = None, video_id: str = None) -> VideoFeatures:
    """Build a synthetic :class:`VideoFeatures`.

    ``constant``: every frame all ones, so adjacent similarity is 1.
    ``two-block``: the first ``ceil(T/2)`` frames share one map and the rest
    share a second map orthogonal to it.
    ``random``: i.i.d. standard normal values from ``seed``.

    Frames sit at ``i * duration_s / T``; ``duration_s`` defaults to ``T``.
    """
    if pattern not in PATTERNS:
        raise ValidationError(f"unknown fixture pattern {pattern!r}; choose from {', '.join(PATTERNS)}")
    if min(T, h, w, d) < 1:
        raise ValidationError("T, h, w and d must be positive")
    shape = (h, w, d)
    if pattern == "constant":
        data = np.ones((T,) + shape, dtype=np.float32)
    elif pattern == "two-block":
        if h * w * d < 2:
            raise ValidationError("two-block needs at least 2 feature entries per frame")
        a = np.zeros(h * w * d, dtype=np.float32)
        b = np.zeros(h * w * d, dtype=np.float32)
        a[0::2] = 1.0
        b[1::2] = 1.0
        split = (T + 1) // 2
        data = np.stack([a if i < split else b for i in range(T)]).reshape((T,) + shape)
    else:
        rng = np.random.default_rng(seed)
        data = rng.standard_normal((T,) + shape).astype(np.float32)
    duration_s = float(T) if duration_s is None else float(duration_s)
    timestamps = [i * duration_s / T for i in range(T)]
    return VideoFeatures.from_array(video_id or f"{pattern}-{T}", data, timestamps, duration_s)
