"""Instruction-sample construction, annotation filtering and dataset statistics."""

from .builder import (
    DEFAULT_TASK_WEIGHTS,
    BuildReport,
    build_dataset,
    draw_assignment,
    read_samples,
    samples_to_jsonl,
    write_samples,
)
from .filters import (
    ACCEPT,
    ConstantScorer,
    FilterConfig,
    FilterResult,
    LookupScorer,
    RegionRef,
    SeededRandomScorer,
    SimilarityScorer,
    filter_bbox,
    filter_categories,
    filter_trajectory,
    reject,
    screen_record,
)
from .stats import dataset_stats, histogram
from .templates import (
    PLACEHOLDERS,
    InstructionSample,
    RenderConfig,
    TaskKind,
    build_sample,
    get_template,
    load_template_pack,
)
