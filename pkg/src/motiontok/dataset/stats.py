"""Duration and interval histograms for trajectory collections."""

from __future__ import annotations

import math
from collections import Counter

from ..errors import ValidationError
from .templates import TaskKind


def histogram(values, bin_width: float):
    """Fixed-width bins from 0 up to the bin holding the largest value.

    Bin ``k`` is ``[k * bin_width, (k + 1) * bin_width)``. Empty bins in
    between are kept so the list is contiguous.
    """
    counts = Counter(int(math.floor(v / bin_width)) for v in values)
    if not counts:
        return []
    return [
        {"start": k * bin_width, "end": (k + 1) * bin_width, "count": counts.get(k, 0)}
        for k in range(max(counts) + 1)
    ]


def _summary(values, bin_width):
    return {
        "count": len(values),
        "mean": sum(values) / len(values) if values else 0.0,
        "bins": histogram(values, bin_width),
    }


def dataset_stats(records, bin_width_s: float, samples=None):
    """Histogram report over trajectory records.

    ``duration`` bins each record's video duration and ``interval`` bins
    ``t2 - t1``. Instruction samples carry no timing, so per-task totals come
    from the optional ``samples`` argument.
    """
    if not (isinstance(bin_width_s, (int, float)) and math.isfinite(bin_width_s) and bin_width_s > 0):
        raise ValidationError(f"bin width must be positive, got {bin_width_s!r}")
    records = list(records)
    durations = [r.duration_s for r in records]
    intervals = [r.t2 - r.t1 for r in records]
    per_task = Counter(TaskKind(s.task) for s in samples or ())
    return {
        "bin_width_s": bin_width_s,
        "num_records": len(records),
        "num_videos": len({r.video_id for r in records}),
        "duration": _summary(durations, bin_width_s),
        "interval": _summary(intervals, bin_width_s),
        "per_task": {t.value: per_task.get(t, 0) for t in TaskKind},
    }
