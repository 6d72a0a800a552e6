"""Seeded construction of the instruction dataset from trajectory records.

Each record ordinal ``n`` (0-based position in the input stream, counting
rejected records too) gets its own generator::

    rng = numpy.random.Generator(numpy.random.PCG64(SeedSequence([seed, n])))
    u = rng.random()                 # task draw
    template_id = rng.integers(1, 9)  # one draw per emitted task, in TaskKind order

The task is the first ``k`` with ``u * sum(weights) < weights[0] + ... + weights[k]``.
PCG64 and SeedSequence are platform independent, so the assignment is too.
"""

from __future__ import annotations

import json
import logging
import threading
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import PipelineError, ValidationError
from ..features_io import _atomic_write_bytes
from .filters import SCORER_ERROR, FilterConfig, screen_record
from .templates import InstructionSample, RenderConfig, TaskKind, build_sample

logger = logging.getLogger(__name__)

# object counts per task in the published dataset
DEFAULT_TASK_WEIGHTS = {
    TaskKind.SPATIAL_GROUNDING: 51992,
    TaskKind.TEMPORAL_GROUNDING: 21328,
    TaskKind.INSTANCE_DYNAMIC_CAPTIONING: 41385,
}


def normalize_weights(weights):
    if weights is None:
        weights = DEFAULT_TASK_WEIGHTS
    out = {TaskKind(k): float(v) for k, v in weights.items()}
    missing = [t.value for t in TaskKind if t not in out]
    if missing:
        raise ValidationError(f"task weights missing for: {', '.join(missing)}")
    if any(not np.isfinite(v) or v < 0 for v in out.values()) or sum(out.values()) <= 0:
        raise ValidationError("task weights must be non-negative with a positive sum")
    return [out[t] for t in TaskKind]


def record_rng(seed: int, ordinal: int) -> np.random.Generator:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValidationError(f"seed must be a non-negative integer, got {seed!r}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(ordinal)])))


def draw_assignment(seed: int, ordinal: int, weights, emit_all_tasks: bool = False):
    """``[(task, template_id), ...]`` for one record ordinal."""
    w = normalize_weights(weights) if isinstance(weights, dict) or weights is None else list(weights)
    rng = record_rng(seed, ordinal)
    u = rng.random()
    if emit_all_tasks:
        return [(task, int(rng.integers(1, 9))) for task in TaskKind]
    target = u * sum(w)
    acc = 0.0
    chosen = None
    for task, wk in zip(TaskKind, w):
        acc += wk
        if target < acc:
            chosen = task
            break
    if chosen is None:
        # u * total rounded up to total; take the last task with weight
        chosen = [t for t, wk in zip(TaskKind, w) if wk > 0][-1]
    return [(chosen, int(rng.integers(1, 9)))]


@dataclass
class BuildReport:
    """Accept/reject tallies. Increments are lock-protected."""

    inputs: int = 0
    accepted: int = 0
    rejected: int = 0
    reject_reasons: Counter = field(default_factory=Counter)
    per_task: Counter = field(default_factory=Counter)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def record_accept(self, tasks):
        with self._lock:
            self.inputs += 1
            self.accepted += 1
            for t in tasks:
                self.per_task[TaskKind(t)] += 1

    def record_reject(self, reason):
        with self._lock:
            self.inputs += 1
            self.rejected += 1
            self.reject_reasons[reason] += 1

    def to_json(self):
        return {
            "inputs": self.inputs,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "reject_reasons": dict(sorted(self.reject_reasons.items())),
            "per_task": {t.value: self.per_task.get(t, 0) for t in TaskKind},
        }


def build_dataset(
    records,
    cfg: FilterConfig = None,
    scorer=None,
    seed: int = 0,
    *,
    task_weights=None,
    render: RenderConfig = None,
    emit_all_tasks: bool = False,
    workers: int = 1,
):
    """Filter ``records`` and turn every accepted one into instruction samples.

    Returns ``(samples, report)``. Output order follows input order whatever
    ``workers`` is. A scorer failure rejects that record with reason
    ``"scorer_error"`` and the build carries on.
    """
    if scorer is None:
        raise ValidationError("a SimilarityScorer is required")
    cfg = cfg or FilterConfig()
    render = render or RenderConfig()
    weights = normalize_weights(task_weights)
    record_rng(seed, 0)  # validates the seed up front
    report = BuildReport()

    def process(item):
        ordinal, r = item
        try:
            verdict = screen_record(r, scorer, cfg)
        except PipelineError as e:
            logger.warning("record %d (%s): %s", ordinal, r.video_id, e)
            report.record_reject(SCORER_ERROR)
            return []
        if not verdict:
            report.record_reject(verdict.reason)
            return []
        assignment = draw_assignment(seed, ordinal, weights, emit_all_tasks)
        samples = [build_sample(r, task, tid, render) for task, tid in assignment]
        report.record_accept([s.task for s in samples])
        return samples

    items = enumerate(records)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(process, items))
    else:
        chunks = [process(item) for item in items]
    samples = [s for chunk in chunks for s in chunk]
    return samples, report


def samples_to_jsonl(samples) -> str:
    return "".join(json.dumps(s.to_dict(), ensure_ascii=False) + "\n" for s in samples)


def write_samples(samples, path) -> None:
    _atomic_write_bytes(path, samples_to_jsonl(samples).encode("utf-8"))


def read_samples(path):
    with open(path, "r", encoding="utf-8") as fh:
        return [InstructionSample.from_dict(json.loads(line)) for line in fh if line.strip()]
