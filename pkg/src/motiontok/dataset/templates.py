"""Instruction templates and single-sample construction."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

from ..errors import ValidationError
from ..features_io import TrajectoryRecord
from ..position_codec import (
    DEFAULT_H_RES,
    DEFAULT_W_RES,
    DEFAULT_Z,
    quantize_box,
    quantize_time,
    render_position_text,
)

TEMPLATE_RESOURCE = "templates_v1.json"
PLACEHOLDERS = ("<dynamic caption>", "<t1>", "<t2>", "<bbox1>", "<bbox2>")
PLACEHOLDER_RE = re.compile("|".join(re.escape(p) for p in PLACEHOLDERS))
_KEY = {"<dynamic caption>": "caption", "<t1>": "t1", "<t2>": "t2", "<bbox1>": "bbox1", "<bbox2>": "bbox2"}


class TaskKind(str, Enum):
    SPATIAL_GROUNDING = "SpatialGrounding"
    TEMPORAL_GROUNDING = "TemporalGrounding"
    INSTANCE_DYNAMIC_CAPTIONING = "InstanceDynamicCaptioning"


@lru_cache(maxsize=None)
def load_template_pack():
    """The bundled template pack as ``{TaskKind: {template_id: text}}``."""
    raw = json.loads(resources.files("motiontok.data").joinpath(TEMPLATE_RESOURCE).read_text(encoding="utf-8"))
    if raw.get("version") != 1:
        raise ValidationError(f"unsupported template pack version {raw.get('version')!r}")
    pack = {}
    for task in TaskKind:
        entries = raw["templates"][task.value]
        pack[task] = {int(k): v for k, v in entries.items()}
        if sorted(pack[task]) != list(range(1, 9)):
            raise ValidationError(f"template pack must hold ids 1-8 for {task.value}")
    return pack


def get_template(task: TaskKind, template_id: int) -> str:
    task = TaskKind(task)
    if isinstance(template_id, bool) or not isinstance(template_id, int) or not 1 <= template_id <= 8:
        raise ValidationError(f"template_id must be an integer in 1-8, got {template_id!r}")
    return load_template_pack()[task][template_id]


@dataclass(frozen=True)
class RenderConfig:
    """How positions and targets are written into prompt and response text.

    ``time_format`` is ``"quantized"`` (relative tokens in ``[0, Z]``) or
    ``"seconds"`` (raw timestamps with ``seconds_precision`` decimals).
    """

    Z: int = DEFAULT_Z
    W_res: int = DEFAULT_W_RES
    H_res: int = DEFAULT_H_RES
    time_format: str = "quantized"
    seconds_precision: int = 1
    box_format: str = "[{x1}, {y1}, {x2}, {y2}]"
    spatial_response: str = "{bbox1}, {bbox2}"
    temporal_response: str = "{t1} to {t2}"

    def __post_init__(self):
        if self.time_format not in ("quantized", "seconds"):
            raise ValidationError(f"time_format must be 'quantized' or 'seconds', got {self.time_format!r}")

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown render option(s): {', '.join(sorted(unknown))}")
        return cls(**d)


@dataclass(frozen=True)
class InstructionSample:
    video_id: str
    task: TaskKind
    template_id: int
    prompt: str
    response: str

    def __post_init__(self):
        object.__setattr__(self, "task", TaskKind(self.task))
        m = PLACEHOLDER_RE.search(self.prompt)
        if m:
            raise ValidationError(f"prompt contains residual placeholder {m.group(0)!r}")
        if not self.response:
            raise ValidationError("response must be non-empty")

    def to_dict(self):
        return {
            "video_id": self.video_id,
            "task": self.task.value,
            "template_id": self.template_id,
            "prompt": self.prompt,
            "response": self.response,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["video_id"], TaskKind(d["task"]), int(d["template_id"]), d["prompt"], d["response"])


def render_values(r: TrajectoryRecord, render: RenderConfig = RenderConfig()):
    """Text for every placeholder of ``r``, keyed ``caption, t1, t2, bbox1, bbox2``."""
    if render.time_format == "quantized":
        t1 = render_position_text(quantize_time(r.t1, r.duration_s, render.Z).z)
        t2 = render_position_text(quantize_time(r.t2, r.duration_s, render.Z).z)
    else:
        t1 = f"{r.t1:.{render.seconds_precision}f}"
        t2 = f"{r.t2:.{render.seconds_precision}f}"
    boxes = []
    for box in (r.bbox1, r.bbox2):
        qb = quantize_box(box, r.frame_width, r.frame_height, render.W_res, render.H_res)
        boxes.append(render.box_format.format(
            x1=render_position_text(qb.x1), y1=render_position_text(qb.y1),
            x2=render_position_text(qb.x2), y2=render_position_text(qb.y2),
        ))
    return {"caption": r.dynamic_caption, "t1": t1, "t2": t2, "bbox1": boxes[0], "bbox2": boxes[1]}


def fill_template(template: str, values) -> str:
    """Substitute all placeholders in a single pass.

    Inserted text is never rescanned, so a caption may not smuggle in a
    placeholder that later gets expanded.
    """
    return PLACEHOLDER_RE.sub(lambda m: values[_KEY[m.group(0)]], template)


def build_sample(r: TrajectoryRecord, task: TaskKind, template_id: int, render: RenderConfig = RenderConfig()) -> InstructionSample:
    """Turn one accepted trajectory into a prompt/response pair for ``task``."""
    task = TaskKind(task)
    template = get_template(task, template_id)
    values = render_values(r, render)
    prompt = fill_template(template, values)
    if task is TaskKind.SPATIAL_GROUNDING:
        response = render.spatial_response.format(bbox1=values["bbox1"], bbox2=values["bbox2"])
    elif task is TaskKind.TEMPORAL_GROUNDING:
        response = render.temporal_response.format(t1=values["t1"], t2=values["t2"])
    else:
        response = values["caption"]
    return InstructionSample(r.video_id, task, template_id, prompt, response)
