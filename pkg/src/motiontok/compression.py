"""Event-aware token compression.

The first frame of every event keeps its full ``h x w`` token grid. The other
frames are average-pooled with stride ``s`` down to ``(h/s) x (w/s)`` tokens.
Every frame is followed by one relative temporal token.

Budget with ``K`` events over ``T`` frames::

    K*h*w + (T - K)*(h/s)*(w/s)          visual tokens
    + T                                  temporal tokens, when counted

IMVC layout (little-endian)::

    offset  size  field
    0       4     magic b"IMVC"
    4       4     u32 format version (= 1)
    8       16    u32 T, h, w, d
    24      8     f64 duration_s
    32      12    u32 s, K, Z
    44      20    reserved, zero
    64      ...   T frame records: u8 kind (0 spatial, 1 temporal),
                  u32 temporal token, f32 payload (rows, columns, channels)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import FormatError, PoolingShapeError, TruncatedFileError, ValidationError
from .features_io import FrameFeatureMap, VideoFeatures, _atomic_write_bytes
from .position_codec import DEFAULT_Z, QuantizedTime, quantize_time
from .segmentation import EventSegmentation, segment_events

DEFAULT_T = 96
DEFAULT_K = 24
DEFAULT_S = 2
DEFAULT_H = 8
DEFAULT_W = 8

IMVC_MAGIC = b"IMVC"
IMVC_VERSION = 1
_IMVC_HEADER = struct.Struct("<4sIIIIIdIII20s")
_FRAME_HEAD = struct.Struct("<BI")
assert _IMVC_HEADER.size == 64


class FrameKind(str, Enum):
    SPATIAL = "spatial_rep"
    TEMPORAL = "temporal_rep"


def _check_stride(h, w, s):
    if isinstance(s, bool) or not isinstance(s, (int, np.integer)) or s < 1:
        raise PoolingShapeError(f"stride must be a positive integer, got {s!r}")
    if h % s or w % s:
        raise PoolingShapeError(f"stride s={s} does not divide h={h} and w={w}")


def pool_frame(f, s: int) -> np.ndarray:
    """Average-pool a ``(h, w, d)`` map over non-overlapping ``s x s`` blocks.

    Accepts a :class:`FrameFeatureMap` or an array; accumulates in float64 and
    leaves the channel axis alone.
    """
    data = f.data if isinstance(f, FrameFeatureMap) else np.asarray(f)
    if data.ndim != 3:
        raise ValidationError(f"expected an (h, w, d) map, got shape {data.shape}")
    h, w, d = data.shape
    _check_stride(h, w, s)
    blocks = data.astype(np.float64).reshape(h // s, s, w // s, s, d)
    return blocks.mean(axis=(1, 3))


def token_budget(T: int, h: int, w: int, K: int, s: int, include_time_tokens: bool = False) -> int:
    """Visual token count after compression, optionally plus one time token per frame.

    ``K = 0`` pools every frame.

    >>> token_budget(96, 8, 8, 24, 2)
    2688
    """
    for name, value in (("T", T), ("h", h), ("w", w)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
            raise ValidationError(f"{name} must be a positive integer, got {value!r}")
    if isinstance(K, bool) or not isinstance(K, (int, np.integer)) or not 0 <= K <= T:
        raise ValidationError(f"K must be an integer in [0, T={T}], got {K!r}")
    _check_stride(h, w, s)
    total = K * h * w + (T - K) * (h // s) * (w // s)
    if include_time_tokens:
        total += T
    return int(total)


@dataclass(frozen=True, eq=False)
class PooledFrame:
    """One frame in the compressed layout.

    ``frame_index`` is 1-based. ``data`` is the full map for spatial frames
    and the pooled map for temporal ones.
    """

    frame_index: int
    kind: FrameKind
    data: np.ndarray
    temporal_token: QuantizedTime

    @property
    def visual_token_count(self) -> int:
        return int(self.data.shape[0] * self.data.shape[1])

    def token_count(self, include_time_token: bool = False) -> int:
        return self.visual_token_count + (1 if include_time_token else 0)


@dataclass(frozen=True, eq=False)
class CompressedVideoTokens:
    video_id: str
    duration_s: float
    frame_shape: tuple
    stride: int
    frames: tuple
    segmentation: Optional[EventSegmentation]
    Z: int = DEFAULT_Z
    visual_token_count: int = field(init=False)
    total_token_count_with_time: int = field(init=False)

    def __post_init__(self):
        visual = sum(f.visual_token_count for f in self.frames)
        object.__setattr__(self, "visual_token_count", visual)
        object.__setattr__(self, "total_token_count_with_time", visual + len(self.frames))

    @property
    def num_events(self) -> int:
        return 0 if self.segmentation is None else self.segmentation.num_events

    def sequence(self):
        """Yield the interleaved layout in order.

        Each frame contributes ``("visual", frame_index, tokens)`` with
        ``tokens`` shaped ``(n, d)``, followed by ``("time", frame_index, z)``.
        """
        for f in self.frames:
            yield "visual", f.frame_index, f.data.reshape(-1, f.data.shape[-1])
            yield "time", f.frame_index, f.temporal_token.z

    def budget_json(self):
        h, w, d = self.frame_shape
        return {
            "video_id": self.video_id,
            "T": len(self.frames),
            "h": h,
            "w": w,
            "d": d,
            "K": self.num_events,
            "s": self.stride,
            "visual_token_count": self.visual_token_count,
            "total_token_count_with_time": self.total_token_count_with_time,
        }


def compress_video(v: VideoFeatures, K: int = DEFAULT_K, s: int = DEFAULT_S, Z: int = DEFAULT_Z) -> CompressedVideoTokens:
    """Segment ``v`` into ``K`` events and build the compressed token layout.

    ``K = 0`` skips segmentation and pools every frame.
    """
    h, w, _ = v.frame_shape
    _check_stride(h, w, s)
    if isinstance(K, (int, np.integer)) and not isinstance(K, bool) and K == 0:
        seg = None
        heads = frozenset()
    else:
        seg = segment_events(v, K)
        heads = frozenset(seg.event_starts)
    frames = []
    for i, f in enumerate(v.frames, start=1):
        token = quantize_time(f.timestamp, v.duration_s, Z)
        if i in heads:
            frames.append(PooledFrame(i, FrameKind.SPATIAL, f.data, token))
        else:
            frames.append(PooledFrame(i, FrameKind.TEMPORAL, pool_frame(f, s), token))
    return CompressedVideoTokens(v.video_id, v.duration_s, v.frame_shape, int(s), tuple(frames), seg, Z)


def encode_compressed(c: CompressedVideoTokens) -> bytes:
    h, w, d = c.frame_shape
    parts = [
        _IMVC_HEADER.pack(
            IMVC_MAGIC, IMVC_VERSION, len(c.frames), h, w, d, c.duration_s,
            c.stride, c.num_events, c.Z, b"\0" * 20,
        )
    ]
    for f in c.frames:
        kind = 0 if f.kind is FrameKind.SPATIAL else 1
        parts.append(_FRAME_HEAD.pack(kind, f.temporal_token.z))
        parts.append(np.ascontiguousarray(f.data, dtype="<f4").tobytes())
    return b"".join(parts)


def write_compressed_dump(c: CompressedVideoTokens, path) -> None:
    _atomic_write_bytes(path, encode_compressed(c))


def read_compressed_dump(path):
    """Read an IMVC file back into a dict of header fields and frame records.

    The event segmentation is not stored, so the result is a plain dict rather
    than a :class:`CompressedVideoTokens`.
    """
    buf = Path(path).read_bytes()
    if len(buf) < _IMVC_HEADER.size:
        raise TruncatedFileError("file shorter than the IMVC header")
    magic, version, T, h, w, d, duration, s, K, Z, reserved = _IMVC_HEADER.unpack_from(buf)
    if magic != IMVC_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {IMVC_MAGIC!r}")
    if version != IMVC_VERSION:
        raise FormatError(f"unsupported IMVC version {version}")
    if reserved != b"\0" * 20:
        raise FormatError("reserved header bytes must be zero")
    _check_stride(h, w, s)
    offset = _IMVC_HEADER.size
    frames = []
    for i in range(1, T + 1):
        if offset + _FRAME_HEAD.size > len(buf):
            raise TruncatedFileError(f"frame {i}: record header missing")
        kind, z = _FRAME_HEAD.unpack_from(buf, offset)
        offset += _FRAME_HEAD.size
        if kind == 0:
            shape = (h, w, d)
        elif kind == 1:
            shape = (h // s, w // s, d)
        else:
            raise FormatError(f"frame {i}: unknown kind byte {kind}")
        n = shape[0] * shape[1] * shape[2]
        if offset + 4 * n > len(buf):
            raise TruncatedFileError(f"frame {i}: payload truncated")
        data = np.frombuffer(buf, dtype="<f4", count=n, offset=offset).reshape(shape).astype(np.float32)
        offset += 4 * n
        frames.append({
            "frame_index": i,
            "kind": FrameKind.SPATIAL if kind == 0 else FrameKind.TEMPORAL,
            "temporal_token": z,
            "data": data,
        })
    if offset != len(buf):
        raise FormatError(f"{len(buf) - offset} trailing bytes after payload")
    return {"T": T, "h": h, "w": w, "d": d, "duration_s": duration, "s": s, "K": K, "Z": Z, "frames": frames}
