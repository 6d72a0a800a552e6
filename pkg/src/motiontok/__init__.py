"""Event-aware video token compression, relative position tokens and
instruction-dataset tooling for fine-grained instance motion tasks."""

__version__ = "0.1.0"

from .compression import (
    CompressedVideoTokens,
    FrameKind,
    PooledFrame,
    compress_video,
    pool_frame,
    read_compressed_dump,
    token_budget,
    write_compressed_dump,
)
from .errors import (
    DegenerateFeatureError,
    FormatError,
    InfeasibleKError,
    MotionTokError,
    PipelineError,
    PoolingShapeError,
    RangeError,
    TooFewFramesError,
    TruncatedFileError,
    ValidationError,
)
from .features_io import (
    FrameFeatureMap,
    TrajectoryRecord,
    VideoFeatures,
    read_feature_dump,
    read_trajectories,
    write_feature_dump,
    write_trajectories,
)
from .fixtures import gen_fixture
from .position_codec import (
    QuantizedBox,
    QuantizedTime,
    dequantize_box,
    dequantize_coord,
    dequantize_time,
    quantize_box,
    quantize_coord,
    quantize_time,
    render_position_text,
)
from .segmentation import (
    ChangeRateSeries,
    EventSegmentation,
    SimilaritySeries,
    change_rate_series,
    cosine_similarity,
    segment_events,
    similarity_series,
)
