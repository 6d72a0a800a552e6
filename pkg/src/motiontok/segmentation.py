"""Adaptive event segmentation from inter-frame feature similarity.

Adjacent frames are compared by cosine similarity of their flattened feature
maps. The absolute change of that similarity marks candidate boundaries, and
the ``K - 1`` largest changes split the video into ``K`` events.

Frame indices in this module are 1-based, so the similarity ``values[0]`` is
between frames 1 and 2 and the first change rate is evaluated at frame 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFeatureError,
    InfeasibleKError,
    TooFewFramesError,
    ValidationError,
)
from .features_io import FrameFeatureMap, VideoFeatures

NORM_EPS = 1e-12


@dataclass(frozen=True)
class SimilaritySeries:
    """``values[i]`` is the similarity between frames ``i + 1`` and ``i + 2``."""

    values: tuple

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class ChangeRateSeries:
    """Change rates ``d_2 .. d_{T-1}``; ``values[j]`` belongs to frame ``j + 2``."""

    values: tuple

    def __len__(self):
        return len(self.values)

    @property
    def frame_indices(self):
        return tuple(range(2, len(self.values) + 2))

    def at(self, frame: int) -> float:
        """Change rate evaluated at 1-based ``frame``."""
        if not 2 <= frame <= len(self.values) + 1:
            raise IndexError(f"no change rate at frame {frame}")
        return self.values[frame - 2]


@dataclass(frozen=True)
class EventSegmentation:
    """A partition of frames ``1..T`` into contiguous events.

    ``event_starts`` holds the 1-based first frame of every event. The change
    rate series is kept for inspection; it is empty when ``T < 3`` or ``K = 1``
    was requested on a video too short to have one.
    """

    event_starts: tuple
    num_frames: int
    change_rates: ChangeRateSeries = ChangeRateSeries(())

    def __post_init__(self):
        starts = tuple(int(s) for s in self.event_starts)
        object.__setattr__(self, "event_starts", starts)
        if not starts or starts[0] != 1:
            raise ValidationError("event_starts must begin with frame 1")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValidationError("event_starts must be strictly increasing")
        if starts[-1] > self.num_frames:
            raise ValidationError("event start beyond the last frame")

    @property
    def num_events(self) -> int:
        return len(self.event_starts)

    @property
    def events(self):
        """Inclusive 1-based ``(first, last)`` frame ranges, one per event."""
        ends = [s - 1 for s in self.event_starts[1:]] + [self.num_frames]
        return tuple(zip(self.event_starts, ends))

    def to_json(self):
        return {
            "event_starts": list(self.event_starts),
            "events": [list(e) for e in self.events],
        }


def _flat64(x) -> np.ndarray:
    if isinstance(x, FrameFeatureMap):
        x = x.data
    return np.asarray(x, dtype=np.float64).reshape(-1)


def cosine_similarity(a, b) -> float:
    """Cosine similarity of two feature maps over their flattened entries.

    Accepts :class:`FrameFeatureMap` instances or plain arrays. The result is
    clamped to ``[-1, 1]``.

    Raises:
        ValidationError: the maps differ in shape.
        DegenerateFeatureError: either map has norm below ``1e-12``.
    """
    sa = a.shape if isinstance(a, FrameFeatureMap) else np.shape(a)
    sb = b.shape if isinstance(b, FrameFeatureMap) else np.shape(b)
    if tuple(sa) != tuple(sb):
        raise ValidationError(f"shape mismatch: {tuple(sa)} vs {tuple(sb)}")
    x, y = _flat64(a), _flat64(b)
    nx = np.sqrt(np.sum(x * x))
    ny = np.sqrt(np.sum(y * y))
    if nx <= NORM_EPS or ny <= NORM_EPS:
        raise DegenerateFeatureError("feature map has zero norm")
    s = np.sum(x * y) / (nx * ny)
    return float(min(1.0, max(-1.0, s)))


def similarity_series(v: VideoFeatures) -> SimilaritySeries:
    """Cosine similarity of every pair of adjacent frames."""
    T = v.num_frames
    if T < 2:
        raise TooFewFramesError(f"similarity needs at least 2 frames, got {T}")
    flat = v.stack().reshape(T, -1).astype(np.float64)
    norms = np.sqrt(np.sum(flat * flat, axis=1))
    bad = np.flatnonzero(norms <= NORM_EPS)
    if bad.size:
        i = int(bad[0])
        raise DegenerateFeatureError(f"frame {i + 1} has zero norm", frame_index=i + 1)
    dots = np.sum(flat[:-1] * flat[1:], axis=1)
    sims = np.clip(dots / (norms[:-1] * norms[1:]), -1.0, 1.0)
    return SimilaritySeries(tuple(float(s) for s in sims))


def change_rate_series(s) -> ChangeRateSeries:
    """Absolute change between consecutive similarities."""
    values = np.asarray(s.values if isinstance(s, SimilaritySeries) else s, dtype=np.float64)
    if values.size < 2:
        raise TooFewFramesError(
            f"change rates need at least 2 similarities (T >= 3), got {values.size}"
        )
    return ChangeRateSeries(tuple(float(d) for d in np.abs(np.diff(values))))


def max_feasible_k(T: int) -> int:
    """Largest event count :func:`segment_events` accepts for ``T`` frames."""
    return max(1, T - 1)


def select_boundaries(d: ChangeRateSeries, n: int):
    """1-based frames of the ``n`` largest change rates, in ascending order.

    Ties go to the earlier frame.
    """
    vals = np.asarray(d.values, dtype=np.float64)
    frames = np.arange(2, vals.size + 2)
    # lexsort keys: last is primary -> value descending, then frame ascending
    order = np.lexsort((frames, -vals))
    return tuple(sorted(int(f) for f in frames[order[:n]]))


def segment_events(v: VideoFeatures, K: int) -> EventSegmentation:
    """Split ``v`` into ``K`` events at the ``K - 1`` largest similarity changes.

    A selected frame ``i`` opens a new event at ``i``.

    Raises:
        ValidationError: ``K < 1``.
        InfeasibleKError: ``K > T - 1`` (for ``K > 1``) or ``K > T``.
    """
    if isinstance(K, bool) or not isinstance(K, (int, np.integer)) or K < 1:
        raise ValidationError(f"K must be a positive integer, got {K!r}")
    K = int(K)
    T = v.num_frames
    if K == 1:
        if T >= 3:
            d = change_rate_series(similarity_series(v))
        else:
            d = ChangeRateSeries(())
        return EventSegmentation((1,), T, d)
    limit = max_feasible_k(T)
    if K > limit:
        raise InfeasibleKError(
            f"K={K} is infeasible for T={T} frames; max feasible K is {limit}", limit
        )
    d = change_rate_series(similarity_series(v))
    starts = (1,) + select_boundaries(d, K - 1)
    return EventSegmentation(starts, T, d)
