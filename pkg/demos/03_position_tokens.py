"""Relative time and box tokens, and how much precision they lose."""

import numpy as np

from motiontok import dequantize_box, dequantize_time, quantize_box, quantize_time

D = 109.0  # seconds
for t in (0.0, 12.34, 54.5, 108.99, 109.0):
    q = quantize_time(t, D)  # Z = 300
    print(f"t={t:7.2f}s -> z={q.z:3d} -> {dequantize_time(q, D):7.3f}s")

print(f"worst-case time error for a {D:.0f}s video: {D / 600:.3f}s")

box = (321.7, 180.2, 958.9, 541.0)
qb = quantize_box(box, 1280, 720)  # 1000 x 1000 grid
print("box", box, "->", qb.as_tuple(), "->", tuple(round(v, 2) for v in dequantize_box(qb, 1280, 720)))

# Error over many random timestamps stays within half a quantization step.
rng = np.random.default_rng(0)
ts = rng.uniform(0, D, 10_000)
err = max(abs(dequantize_time(quantize_time(t, D), D) - t) for t in ts)
print(f"max observed error over 10k timestamps: {err:.4f}s")
