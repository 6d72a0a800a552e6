"""Frame-feature data model and the on-disk formats for feature dumps and
trajectory annotations.

IMVF layout (all little-endian)::

    offset  size  field
    0       4     magic b"IMVF"
    4       4     u32 format version (= 1)
    8       16    u32 T, h, w, d
    24      8     f64 duration_s
    32      32    reserved, zero
    64      8*T   f64 timestamps
    ...     4*T*h*w*d  f32 values, (frame, row, column, channel) order

Trajectory annotations are JSON Lines, one :class:`TrajectoryRecord` per line.
"""

from __future__ import annotations

import json
import logging
import math
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import FormatError, TruncatedFileError, ValidationError

logger = logging.getLogger(__name__)

IMVF_MAGIC = b"IMVF"
IMVF_VERSION = 1
_HEADER = struct.Struct("<4sIIIIId32s")
HEADER_SIZE = _HEADER.size  # 64
assert HEADER_SIZE == 64

_F32 = np.dtype("<f4")
_F64 = np.dtype("<f8")

TRAJECTORY_KEYS = (
    "video_id", "duration_s", "frame_width", "frame_height", "category",
    "static_caption", "dynamic_caption", "t1", "t2", "bbox1", "bbox2",
)


@dataclass(frozen=True, eq=False)
class FrameFeatureMap:
    """One frame's projected feature map of shape ``(h, w, d)``.

    ``frame_index`` is 0-based. Integer input is promoted to float64; float32
    and float64 arrays are kept as given. The stored array is read-only.
    """

    frame_index: int
    timestamp: float
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float64)
        arr = arr.view()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "timestamp", float(self.timestamp))
        if self.frame_index < 0:
            raise ValidationError(f"frame_index must be >= 0, got {self.frame_index}")
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ValidationError(f"feature map must have shape (h, w, d) with h, w, d >= 1, got {arr.shape}")
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise ValidationError(f"frame {self.frame_index}: timestamp must be finite and >= 0, got {self.timestamp}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"frame {self.frame_index}: feature map contains non-finite values")

    @property
    def shape(self):
        return self.data.shape

    def __eq__(self, other):
        if not isinstance(other, FrameFeatureMap):
            return NotImplemented
        return (
            self.frame_index == other.frame_index
            and self.timestamp == other.timestamp
            and self.data.shape == other.data.shape
            and np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True, eq=False)
class VideoFeatures:
    """An ordered sequence of ``T`` frame feature maps sharing one shape."""

    video_id: str
    duration_s: float
    frames: tuple

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "duration_s", float(self.duration_s))
        if not math.isfinite(self.duration_s) or self.duration_s <= 0:
            raise ValidationError(f"duration_s must be positive and finite, got {self.duration_s}")
        if not self.frames:
            raise ValidationError("a video needs at least one frame")
        shape = self.frames[0].shape
        prev = -math.inf
        for i, f in enumerate(self.frames):
            if not isinstance(f, FrameFeatureMap):
                raise ValidationError(f"frame {i} is not a FrameFeatureMap")
            if f.shape != shape:
                raise ValidationError(f"frame {i} has shape {f.shape}, expected {shape}")
            if f.timestamp <= prev:
                raise ValidationError(f"frame {i}: timestamps must be strictly increasing")
            prev = f.timestamp
        if prev > self.duration_s:
            raise ValidationError(
                f"last timestamp {prev} exceeds duration {self.duration_s}"
            )

    @classmethod
    def from_array(cls, video_id, array, timestamps, duration_s):
        """Build from a ``(T, h, w, d)`` array and ``T`` timestamps."""
        array = np.asarray(array)
        if array.ndim != 4:
            raise ValidationError(f"expected a (T, h, w, d) array, got shape {array.shape}")
        if len(timestamps) != array.shape[0]:
            raise ValidationError(
                f"{len(timestamps)} timestamps for {array.shape[0]} frames"
            )
        frames = [FrameFeatureMap(i, t, array[i]) for i, t in enumerate(timestamps)]
        return cls(video_id, duration_s, frames)

    @property
    def num_frames(self) -> int:
        return len(self.frames)

    @property
    def frame_shape(self):
        return self.frames[0].shape

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([f.timestamp for f in self.frames], dtype=np.float64)

    def stack(self) -> np.ndarray:
        """All frames as one ``(T, h, w, d)`` array."""
        return np.stack([f.data for f in self.frames])

    def __eq__(self, other):
        if not isinstance(other, VideoFeatures):
            return NotImplemented
        return (
            self.video_id == other.video_id
            and self.duration_s == other.duration_s
            and self.frames == other.frames
        )


def _check_box(name, box, width, height):
    if not isinstance(box, (list, tuple)) or len(box) != 4:
        raise ValidationError(f"{name} must be a 4-element [x1, y1, x2, y2] array")
    try:
        x1, y1, x2, y2 = (float(v) for v in box)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must contain numbers") from None
    if not all(math.isfinite(v) for v in (x1, y1, x2, y2)):
        raise ValidationError(f"{name} contains non-finite coordinates")
    if not 0 <= x1 < x2 <= width:
        raise ValidationError(f"{name}: 0 <= x1 < x2 <= frame_width violated")
    if not 0 <= y1 < y2 <= height:
        raise ValidationError(f"{name}: 0 <= y1 < y2 <= frame_height violated")
    return (x1, y1, x2, y2)


@dataclass(frozen=True)
class TrajectoryRecord:
    """One tracked instance: category, captions, interval and start/end boxes.

    Boxes are ``(x1, y1, x2, y2)`` in pixels; ``bbox1`` is at ``t1`` and
    ``bbox2`` at ``t2``.
    """

    video_id: str
    duration_s: float
    frame_width: float
    frame_height: float
    category: str
    static_caption: str
    dynamic_caption: str
    t1: float
    t2: float
    bbox1: tuple
    bbox2: tuple

    def __post_init__(self):
        for name in ("duration_s", "frame_width", "frame_height", "t1", "t2"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"{name} must be a number")
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite")
            object.__setattr__(self, name, float(value))
        for name in ("video_id", "category", "static_caption", "dynamic_caption"):
            if not isinstance(getattr(self, name), str):
                raise ValidationError(f"{name} must be a string")
        if self.duration_s <= 0:
            raise ValidationError("duration_s > 0 violated")
        if self.frame_width <= 0 or self.frame_height <= 0:
            raise ValidationError("frame_width and frame_height must be positive")
        if not self.t1 < self.t2:
            raise ValidationError("t1 < t2 violated")
        if self.t1 < 0:
            raise ValidationError("t1 >= 0 violated")
        if self.t2 > self.duration_s:
            raise ValidationError("t2 <= duration_s violated")
        object.__setattr__(self, "bbox1", _check_box("bbox1", self.bbox1, self.frame_width, self.frame_height))
        object.__setattr__(self, "bbox2", _check_box("bbox2", self.bbox2, self.frame_width, self.frame_height))

    @classmethod
    def from_dict(cls, obj):
        if not isinstance(obj, dict):
            raise ValidationError("record must be a JSON object")
        missing = [k for k in TRAJECTORY_KEYS if k not in obj]
        if missing:
            raise ValidationError(f"missing field(s): {', '.join(missing)}")
        return cls(**{k: obj[k] for k in TRAJECTORY_KEYS})

    def to_dict(self):
        d = {k: getattr(self, k) for k in TRAJECTORY_KEYS}
        d["bbox1"] = list(self.bbox1)
        d["bbox2"] = list(self.bbox2)
        return d


# ---------------------------------------------------------------------------
# IMVF feature dumps
# ---------------------------------------------------------------------------


def _atomic_write_bytes(path, payload: bytes):
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    except OSError as e:
        raise OSError(e.errno, f"cannot write {path}: {e.strerror}") from e
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError as e:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise OSError(e.errno, f"cannot write {path}: {e.strerror}") from e


def encode_feature_dump(v: VideoFeatures) -> bytes:
    """Serialize ``v`` to IMVF bytes."""
    stacked = v.stack()
    with np.errstate(over="ignore"):
        values = stacked.astype(_F32)
    if not np.all(np.isfinite(values)):
        raise ValidationError("feature values are not representable as finite float32")
    ts = v.timestamps
    if not np.all(np.isfinite(ts)):
        raise ValidationError("timestamps must be finite")
    h, w, d = v.frame_shape
    header = _HEADER.pack(IMVF_MAGIC, IMVF_VERSION, v.num_frames, h, w, d, v.duration_s, b"\0" * 32)
    return header + ts.astype(_F64).tobytes() + values.tobytes()


def write_feature_dump(v: VideoFeatures, path) -> None:
    """Write ``v`` to ``path`` in IMVF format.

    Validation happens before anything touches the filesystem, and the file is
    replaced atomically.
    """
    _atomic_write_bytes(path, encode_feature_dump(v))


def decode_feature_dump(buf: bytes, video_id: str) -> VideoFeatures:
    if len(buf) < HEADER_SIZE:
        raise TruncatedFileError(f"file is {len(buf)} bytes, shorter than the {HEADER_SIZE}-byte header")
    magic, version, T, h, w, d, duration, reserved = _HEADER.unpack_from(buf)
    if magic != IMVF_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {IMVF_MAGIC!r}")
    if version != IMVF_VERSION:
        raise FormatError(f"unsupported IMVF version {version}")
    if reserved != b"\0" * 32:
        raise FormatError("reserved header bytes must be zero")
    if T < 1 or min(h, w, d) < 1:
        raise ValidationError(f"invalid dimensions T={T} h={h} w={w} d={d}")
    n_values = T * h * w * d
    expected = HEADER_SIZE + 8 * T + 4 * n_values
    if len(buf) < expected:
        raise TruncatedFileError(
            f"file is {len(buf)} bytes but header declares T={T}, {h}x{w}x{d} ({expected} bytes)"
        )
    if len(buf) > expected:
        raise FormatError(f"{len(buf) - expected} trailing bytes after payload")
    ts = np.frombuffer(buf, dtype=_F64, count=T, offset=HEADER_SIZE)
    values = np.frombuffer(buf, dtype=_F32, count=n_values, offset=HEADER_SIZE + 8 * T)
    values = values.astype(np.float32).reshape(T, h, w, d)
    return VideoFeatures.from_array(video_id, values, ts.tolist(), duration)


def read_feature_dump(path, video_id: Optional[str] = None) -> VideoFeatures:
    """Read an IMVF file.

    The format has no field for the video id, so it defaults to the file stem.

    Raises:
        FormatError: bad magic, version, reserved bytes or trailing data.
        TruncatedFileError: the payload is shorter than the header declares.
        ValidationError: shapes, timestamps or values violate the data model.
    """
    path = Path(path)
    buf = path.read_bytes()
    return decode_feature_dump(buf, video_id if video_id is not None else path.stem)


# ---------------------------------------------------------------------------
# Trajectory JSONL
# ---------------------------------------------------------------------------


class TrajectoryLineError(ValidationError):
    """A trajectory line failed to parse or validate."""

    def __init__(self, message, lineno):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class TrajectoryParseError(TrajectoryLineError, FormatError):
    """A trajectory line is not valid JSON."""


def read_trajectories(path, strict: bool = True, rejects: Optional[list] = None) -> Iterator[TrajectoryRecord]:
    """Yield :class:`TrajectoryRecord` objects from a JSONL file in line order.

    With ``strict=True`` the first bad line raises. Otherwise bad lines are
    skipped, appended to ``rejects`` as ``(lineno, message)`` and summarized in
    one warning once the file is exhausted. Blank lines are ignored.
    """
    n_bad = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as e:
                    raise TrajectoryParseError(f"malformed JSON: {e.msg}", lineno) from None
                try:
                    record = TrajectoryRecord.from_dict(obj)
                except TrajectoryLineError:
                    raise
                except ValidationError as e:
                    raise TrajectoryLineError(str(e), lineno) from None
            except TrajectoryLineError as e:
                if strict:
                    raise
                n_bad += 1
                if rejects is not None:
                    rejects.append((lineno, str(e)))
                continue
            yield record
    if n_bad:
        logger.warning("%s: skipped %d invalid trajectory line(s)", path, n_bad)


def write_trajectories(records: Sequence[TrajectoryRecord], path) -> None:
    payload = "".join(json.dumps(r.to_dict()) + "\n" for r in records)
    _atomic_write_bytes(path, payload.encode("utf-8"))
