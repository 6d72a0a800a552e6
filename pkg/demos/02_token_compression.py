"""How many tokens does a video cost after event-aware compression?

Event heads keep the full 8x8 grid; every other frame is average-pooled.
"""

from motiontok import FrameKind, compress_video, gen_fixture, token_budget

print("T=96, h=w=8")
print(f"{'K':>4} {'s':>3} {'visual':>7} {'with time':>10}")
for K, s in [(24, 2), (0, 2), (12, 2), (48, 2), (96, 2), (24, 1), (24, 4), (24, 8)]:
    print(f"{K:>4} {s:>3} {token_budget(96, 8, 8, K, s):>7} {token_budget(96, 8, 8, K, s, True):>10}")

# The budget depends only on the layout, so a random video gives the same count.
video = gen_fixture("random", T=96, h=8, w=8, d=32, seed=1, duration_s=109.0)
compressed = compress_video(video, K=24, s=2)
print("\ncompressed:", compressed.budget_json())

heads = [f.frame_index for f in compressed.frames if f.kind is FrameKind.SPATIAL]
print("full-resolution frames:", heads)

# The interleaved sequence a language model would see: visual tokens, then a
# relative time token, per frame.
for kind, frame, payload in list(compressed.sequence())[:6]:
    desc = f"{payload.shape[0]} visual tokens" if kind == "visual" else f"time token {payload}"
    print(f"  frame {frame}: {desc}")
