"""Slow, independent reference implementations used as test oracles.

Nothing here imports the code paths it checks.
"""

import math

import numpy as np


def naive_cosine(a, b):
    xs = [float(v) for v in np.asarray(a).ravel()]
    ys = [float(v) for v in np.asarray(b).ravel()]
    dot = 0.0
    nx = 0.0
    ny = 0.0
    for x, y in zip(xs, ys):
        dot += x * y
        nx += x * x
        ny += y * y
    return max(-1.0, min(1.0, dot / (math.sqrt(nx) * math.sqrt(ny))))


def naive_similarities(frames):
    return [naive_cosine(frames[i], frames[i + 1]) for i in range(len(frames) - 1)]


def naive_change_rates(sims):
    return [abs(sims[i] - sims[i - 1]) for i in range(1, len(sims))]


def brute_force_event_starts(frames, K):
    """Enumerate every change rate, stable-sort by (value desc, frame asc), take K-1."""
    if K == 1:
        return [1]
    d = naive_change_rates(naive_similarities(frames))
    candidates = [(d[j], j + 2) for j in range(len(d))]
    candidates.sort(key=lambda c: (-c[0], c[1]))
    return [1] + sorted(frame for _, frame in candidates[: K - 1])


def naive_pool(arr, s):
    arr = np.asarray(arr, dtype=np.float64)
    h, w, d = arr.shape
    out = np.zeros((h // s, w // s, d))
    for i in range(h // s):
        for j in range(w // s):
            for c in range(d):
                total = 0.0
                for di in range(s):
                    for dj in range(s):
                        total += arr[i * s + di, j * s + dj, c]
                out[i, j, c] = total / (s * s)
    return out


def scripted_filter_reason(rec, scorer_fn, denylist, max_area_ratio, min_sim, max_drift):
    """Straight-line restatement of the filter chain; returns None or a reason."""
    if rec["category"].lower() in denylist:
        return "static_category"
    x1, y1, x2, y2 = rec["bbox1"]
    a1 = (x2 - x1) * (y2 - y1)
    if a1 / (rec["frame_width"] * rec["frame_height"]) > max_area_ratio:
        return "too_large"
    if scorer_fn(rec, rec["t1"], rec["bbox1"]) < min_sim:
        return "low_similarity"
    x1, y1, x2, y2 = rec["bbox2"]
    a2 = (x2 - x1) * (y2 - y1)
    if max(a1, a2) / min(a1, a2) > max_drift:
        return "area_drift"
    s1 = scorer_fn(rec, rec["t1"], rec["bbox1"])
    s2 = scorer_fn(rec, rec["t2"], rec["bbox2"])
    if s1 < min_sim or s2 < min_sim:
        return "low_similarity"
    return None


def prng_task_trace(seed, ordinal, weights):
    """Task index and template id from the documented PCG64 stream."""
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, ordinal])))
    u = gen.random()
    probs = np.asarray(weights, dtype=np.float64) / float(np.sum(weights))
    task = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    template = int(gen.integers(1, 9))
    return task, template
