"""Annotation filter chain and pluggable text-region similarity scorers.

The real pipeline scores regions with an image-text model. Here the scorer is
an interface; the mocks below make the thresholds and control flow testable
without any model.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Protocol, runtime_checkable

from ..errors import PipelineError, ValidationError
from ..features_io import TrajectoryRecord

DEFAULT_STATIC_CATEGORIES = frozenset({"cloud", "sky", "road", "room"})

TOO_LARGE = "too_large"
LOW_SIMILARITY = "low_similarity"
AREA_DRIFT = "area_drift"
STATIC_CATEGORY = "static_category"
SCORER_ERROR = "scorer_error"


class RegionRef(NamedTuple):
    """Where a box lives: enough for a scorer to crop it from the source video."""

    video_id: str
    timestamp: float
    box: tuple
    frame_size: tuple


@runtime_checkable
class SimilarityScorer(Protocol):
    def score(self, region: RegionRef, text: str) -> float:
        """Similarity in ``[-1, 1]``; must be deterministic for fixed inputs."""
        ...


@dataclass(frozen=True)
class FilterConfig:
    """Filter thresholds.

    No published thresholds exist for these gates; the defaults here are our own
    choices and are meant to be overridden from a config file.
    """

    static_category_denylist: frozenset = DEFAULT_STATIC_CATEGORIES
    max_bbox_area_ratio: float = 0.9
    min_similarity: float = 0.2
    max_trajectory_area_drift: float = 4.0

    def __post_init__(self):
        object.__setattr__(
            self, "static_category_denylist",
            frozenset(str(c).lower() for c in self.static_category_denylist),
        )
        if not 0 < self.max_bbox_area_ratio <= 1:
            raise ValidationError(f"max_bbox_area_ratio must lie in (0, 1], got {self.max_bbox_area_ratio}")
        if not -1 <= self.min_similarity <= 1:
            raise ValidationError(f"min_similarity must lie in [-1, 1], got {self.min_similarity}")
        if not (math.isfinite(self.max_trajectory_area_drift) and self.max_trajectory_area_drift > 0):
            raise ValidationError(f"max_trajectory_area_drift must be positive, got {self.max_trajectory_area_drift}")

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown filter option(s): {', '.join(sorted(unknown))}")
        return cls(**d)

    def to_dict(self):
        return {
            "static_category_denylist": sorted(self.static_category_denylist),
            "max_bbox_area_ratio": self.max_bbox_area_ratio,
            "min_similarity": self.min_similarity,
            "max_trajectory_area_drift": self.max_trajectory_area_drift,
        }


@dataclass(frozen=True)
class FilterResult:
    accepted: bool
    reason: Optional[str] = None

    def __bool__(self):
        return self.accepted


ACCEPT = FilterResult(True)


def reject(reason: str) -> FilterResult:
    return FilterResult(False, reason)


# -- mock scorers -----------------------------------------------------------


@dataclass(frozen=True)
class ConstantScorer:
    value: float = 1.0

    def score(self, region, text):
        return self.value


@dataclass
class LookupScorer:
    """Scores from a table keyed by ``(video_id, text)`` or by ``text`` alone."""

    table: dict = field(default_factory=dict)
    default: float = 0.0

    def score(self, region, text):
        if (region.video_id, text) in self.table:
            return self.table[(region.video_id, text)]
        return self.table.get(text, self.default)


@dataclass(frozen=True)
class SeededRandomScorer:
    """Pseudo-random but reproducible scores, uniform in ``[low, high)``.

    The score is a hash of the seed, region and text, so it does not depend on
    call order or on which thread asks.
    """

    seed: int = 0
    low: float = -1.0
    high: float = 1.0

    def score(self, region, text):
        key = repr((self.seed, region.video_id, float(region.timestamp),
                    tuple(float(v) for v in region.box), text)).encode("utf-8")
        (u64,) = struct.unpack("<Q", hashlib.sha256(key).digest()[:8])
        return self.low + (self.high - self.low) * (u64 / 2.0**64)


# -- filters ----------------------------------------------------------------


def _score(scorer, region, text):
    try:
        value = scorer.score(region, text)
    except Exception as e:
        raise PipelineError(
            f"scorer {type(scorer).__name__} failed: {e}",
            {"scorer": type(scorer).__name__, "region": region, "text": text, "error": repr(e)},
        ) from e
    try:
        value = float(value)
    except (TypeError, ValueError):
        value = math.nan
    if not (math.isfinite(value) and -1.0 <= value <= 1.0):
        raise PipelineError(
            f"scorer {type(scorer).__name__} returned {value!r}, outside [-1, 1]",
            {"scorer": type(scorer).__name__, "region": region, "text": text, "value": value},
        )
    return value


def box_area(box) -> float:
    x1, y1, x2, y2 = box
    return max(0.0, x2 - x1) * max(0.0, y2 - y1)


def filter_categories(tags, cfg: FilterConfig):
    """Drop static categories (case-insensitive exact match), keeping order."""
    deny = cfg.static_category_denylist
    return [t for t in tags if t.lower() not in deny]


def filter_bbox(box, frame, category, scorer, cfg: FilterConfig, *, video_id="", timestamp=0.0) -> FilterResult:
    """Reject boxes that cover too much of the frame or do not match ``category``.

    The size gate runs first, so an oversized box never reaches the scorer.
    """
    W, H = frame
    if box_area(box) / (W * H) > cfg.max_bbox_area_ratio:
        return reject(TOO_LARGE)
    region = RegionRef(video_id, timestamp, tuple(box), (W, H))
    if _score(scorer, region, category) < cfg.min_similarity:
        return reject(LOW_SIMILARITY)
    return ACCEPT


def filter_trajectory(r: TrajectoryRecord, scorer, cfg: FilterConfig) -> FilterResult:
    """Reject trajectories whose box area drifts too far or that stop matching
    their category at either end. A score equal to ``min_similarity`` passes."""
    a1, a2 = box_area(r.bbox1), box_area(r.bbox2)
    if min(a1, a2) <= 0:
        raise ValidationError("trajectory boxes must have positive area")
    if max(a1, a2) / min(a1, a2) > cfg.max_trajectory_area_drift:
        return reject(AREA_DRIFT)
    frame = (r.frame_width, r.frame_height)
    s1 = _score(scorer, RegionRef(r.video_id, r.t1, r.bbox1, frame), r.category)
    s2 = _score(scorer, RegionRef(r.video_id, r.t2, r.bbox2, frame), r.category)
    if min(s1, s2) < cfg.min_similarity:
        return reject(LOW_SIMILARITY)
    return ACCEPT


def screen_record(r: TrajectoryRecord, scorer, cfg: FilterConfig) -> FilterResult:
    """Run the full chain on one record: category, initial box, trajectory."""
    if not filter_categories([r.category], cfg):
        return reject(STATIC_CATEGORY)
    result = filter_bbox(
        r.bbox1, (r.frame_width, r.frame_height), r.category, scorer, cfg,
        video_id=r.video_id, timestamp=r.t1,
    )
    if not result:
        return result
    return filter_trajectory(r, scorer, cfg)
