import numpy as np
import pytest

from motiontok import TrajectoryRecord, VideoFeatures

ACCEPTANCE_RESULTS = []


def random_video(rng, T, h, w, d, scale=1.0, video_id="rand"):
    data = rng.standard_normal((T, h, w, d)) * scale
    return VideoFeatures.from_array(video_id, data, [float(i) for i in range(T)], float(T))


def make_record(**overrides):
    base = dict(
        video_id="vid0", duration_s=120.0, frame_width=1280, frame_height=720,
        category="dog", static_caption="a brown dog",
        dynamic_caption="a brown dog runs across the lawn",
        t1=30.0, t2=60.0, bbox1=[320, 180, 960, 540], bbox2=[400, 200, 1000, 560],
    )
    base.update(overrides)
    return TrajectoryRecord.from_dict(base)


def synthetic_record_dicts(n, seed):
    """A mix of records that exercises every filter branch."""
    rng = np.random.default_rng(seed)
    cats = ["dog", "person", "car", "sky", "Road", "ball", "bicycle", "room"]
    out = []
    for i in range(n):
        W, H = (1280, 720) if i % 2 else (640, 480)
        dur = float(rng.uniform(5, 300))
        t1 = float(rng.uniform(0, dur * 0.8))
        t2 = float(rng.uniform(t1 + 1e-3, dur))
        def box(max_frac):
            bw = float(rng.uniform(0.05, max_frac)) * W
            bh = float(rng.uniform(0.05, max_frac)) * H
            x1 = float(rng.uniform(0, W - bw))
            y1 = float(rng.uniform(0, H - bh))
            return [x1, y1, x1 + bw, y1 + bh]
        b1 = box(1.0)
        b2 = box(0.6) if rng.random() < 0.7 else box(1.0)
        out.append(dict(
            video_id=f"v{i % 37}", duration_s=dur, frame_width=W, frame_height=H,
            category=cats[int(rng.integers(len(cats)))], static_caption=f"object {i}",
            dynamic_caption=f"object {i} moves to the {'left' if i % 3 else 'right'}",
            t1=t1, t2=t2, bbox1=b1, bbox2=b2,
        ))
    return out


@pytest.fixture
def record():
    return make_record()


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion's outcome for the terminal summary."""
    state = {}

    def declare(name):
        state["name"] = name

    yield declare
    rep = getattr(request.node, "rep_call", None)
    if "name" in state:
        ok = rep is not None and rep.passed
        ACCEPTANCE_RESULTS.append((state["name"], ok))


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
