"""Splitting a video into events from feature similarity.

We build a toy video whose content changes twice, look at the similarity and
change-rate curves, and see which frames open new events.
"""

import numpy as np

from motiontok import VideoFeatures, change_rate_series, segment_events, similarity_series

rng = np.random.default_rng(0)

# Three "scenes" of 5, 4 and 6 frames; each scene jitters around its own base map.
bases = [rng.standard_normal((4, 4, 16)) for _ in range(3)]
frames = []
for base, length in zip(bases, (5, 4, 6)):
    for _ in range(length):
        frames.append(base + 0.05 * rng.standard_normal(base.shape))
video = VideoFeatures.from_array("toy", np.stack(frames), [float(i) for i in range(15)], 15.0)

sims = similarity_series(video)
print("adjacent similarity:", np.round(sims.values, 3))

rates = change_rate_series(sims)
for frame, d in zip(rates.frame_indices, rates.values):
    print(f"  frame {frame:2d}: change rate {d:.3f}")

# Scenes start at frames 6 and 10. A cut at frame c raises the change rate at
# both c - 1 and c, so boundaries come in pairs and K=5 leaves one-frame events
# at 5 and 9.
for K in (1, 2, 3, 5):
    seg = segment_events(video, K)
    print(f"K={K}: events {seg.events}")
