"""From tracked instances to instruction samples.

Scores normally come from an image-text model; here a seeded mock stands in so
the filter chain can run anywhere.
"""

import json

from motiontok import TrajectoryRecord
from motiontok.dataset import (
    FilterConfig,
    SeededRandomScorer,
    TaskKind,
    build_dataset,
    build_sample,
    dataset_stats,
)

rec = TrajectoryRecord(
    video_id="park_017", duration_s=109.0, frame_width=1280, frame_height=720,
    category="dog", static_caption="a small brown dog with a red collar",
    dynamic_caption="the small brown dog sprints to the right and jumps over a bench",
    t1=21.8, t2=43.6, bbox1=(120, 400, 360, 620), bbox2=(780, 360, 1040, 600),
)

for task in TaskKind:
    s = build_sample(rec, task, template_id=1)
    print(f"[{task.value}]\n  prompt:   {s.prompt}\n  response: {s.response}\n")

# A small batch including a static category and an oversized box.
records = [rec]
records.append(TrajectoryRecord(**{**rec.__dict__, "video_id": "park_018", "category": "sky"}))
records.append(TrajectoryRecord(**{**rec.__dict__, "video_id": "park_019", "bbox1": (0, 0, 1280, 700)}))
records.append(TrajectoryRecord(**{**rec.__dict__, "video_id": "park_020", "bbox2": (780, 360, 800, 380)}))

samples, report = build_dataset(records, FilterConfig(), SeededRandomScorer(0, low=0.3, high=1.0), seed=42)
print("build report:", json.dumps(report.to_json(), indent=2))
print("stats:", json.dumps(dataset_stats(records, 30.0, samples)["duration"], indent=2))
