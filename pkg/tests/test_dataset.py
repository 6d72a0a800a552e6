import json
import re

import numpy as np
import pytest

from motiontok import PipelineError, TrajectoryRecord, ValidationError
from motiontok.dataset import (
    PLACEHOLDERS,
    ConstantScorer,
    FilterConfig,
    InstructionSample,
    LookupScorer,
    RenderConfig,
    SeededRandomScorer,
    TaskKind,
    build_dataset,
    build_sample,
    dataset_stats,
    draw_assignment,
    filter_bbox,
    filter_categories,
    filter_trajectory,
    get_template,
    load_template_pack,
    read_samples,
    samples_to_jsonl,
    write_samples,
)
from motiontok.dataset.builder import DEFAULT_TASK_WEIGHTS
from motiontok.dataset.filters import RegionRef

from conftest import make_record, synthetic_record_dicts
from oracles import prng_task_trace

DENY = {"sky", "cloud", "road", "room"}


# -- templates -------------------------------------------------------------


def test_template_pack_shape():
    pack = load_template_pack()
    assert set(pack) == set(TaskKind)
    assert all(sorted(v) == list(range(1, 9)) for v in pack.values())


def test_template_spot_checks():
    assert get_template(TaskKind.SPATIAL_GROUNDING, 1) == (
        "Please give the bounding box coordinates variation of the object depicted as "
        "<dynamic caption> during the time interval from <t1> to <t2>. Output only the "
        "bounding box coordinates for the start and end times."
    )
    assert get_template(TaskKind.TEMPORAL_GROUNDING, 1) == (
        "Please give the time interval when the object described as <dynamic caption> "
        "transitions from the bounding box coordinates <bbox1> to <bbox2>."
    )
    assert get_template(TaskKind.INSTANCE_DYNAMIC_CAPTIONING, 8) == (
        "Could you portray the object from <t1> to <t2>, with bounding box coordinates that "
        "commence at <bbox1> and finish at <bbox2>, and include its appearance, changes, and behavior?"
    )
    with pytest.raises(ValidationError):
        get_template(TaskKind.SPATIAL_GROUNDING, 9)


def test_temporal_grounding_prompt(record):
    s = build_sample(record, TaskKind.TEMPORAL_GROUNDING, 1)
    assert s.prompt.startswith(
        "Please give the time interval when the object described as a brown dog runs across the lawn"
    )
    assert "[250, 250, 750, 750]" in s.prompt
    assert s.response == "75 to 150"


def test_spatial_grounding_endpoints():
    r = make_record(t1=0.0, t2=120.0)
    s = build_sample(r, TaskKind.SPATIAL_GROUNDING, 1)
    assert "from 0 to 300." in s.prompt
    assert s.response == "[250, 250, 750, 750], [313, 278, 781, 778]"


def test_captioning_response(record):
    s = build_sample(record, TaskKind.INSTANCE_DYNAMIC_CAPTIONING, 3)
    assert s.response == record.dynamic_caption
    assert "from 75 to 150" in s.prompt


def test_seconds_render_mode(record):
    s = build_sample(record, TaskKind.TEMPORAL_GROUNDING, 2, RenderConfig(time_format="seconds"))
    assert s.response == "30.0 to 60.0"
    with pytest.raises(ValidationError):
        RenderConfig(time_format="frames")


def test_caption_with_placeholder_text_is_rejected():
    r = make_record(dynamic_caption="moves from <t1> onward")
    with pytest.raises(ValidationError, match="residual placeholder"):
        build_sample(r, TaskKind.SPATIAL_GROUNDING, 1)


def test_empty_caption_rejected_for_captioning():
    r = make_record(dynamic_caption="")
    with pytest.raises(ValidationError, match="non-empty"):
        build_sample(r, TaskKind.INSTANCE_DYNAMIC_CAPTIONING, 1)


def test_no_placeholder_survives_any_template():
    pattern = re.compile("|".join(re.escape(p) for p in PLACEHOLDERS))
    records = [make_record(), make_record(t1=0.0, t2=120.0, dynamic_caption="x")]
    for r in records:
        for task in TaskKind:
            for tid in range(1, 9):
                assert not pattern.search(build_sample(r, task, tid).prompt)


def test_sample_json_roundtrip(tmp_path, record):
    samples = [build_sample(record, t, 2) for t in TaskKind]
    p = tmp_path / "s.jsonl"
    write_samples(samples, p)
    assert read_samples(p) == samples
    first = json.loads(p.read_text().splitlines()[0])
    assert list(first) == ["video_id", "task", "template_id", "prompt", "response"]


# -- filters ---------------------------------------------------------------


def test_filter_categories():
    cfg = FilterConfig(static_category_denylist=DENY)
    assert filter_categories(["dog", "sky", "cat"], cfg) == ["dog", "cat"]
    assert filter_categories([], cfg) == []
    assert filter_categories(["Sky"], FilterConfig(static_category_denylist={"sky"})) == []


def test_filter_bbox_gates():
    cfg = FilterConfig(max_bbox_area_ratio=0.9, min_similarity=0.2)
    full = filter_bbox((0, 0, 100, 100), (100, 100), "dog", ConstantScorer(1.0), cfg)
    assert not full and full.reason == "too_large"
    tiny = filter_bbox((0, 0, 1, 1), (100, 100), "dog", ConstantScorer(1.0), cfg)
    assert tiny.accepted
    low = filter_bbox((0, 0, 1, 1), (100, 100), "dog", ConstantScorer(cfg.min_similarity - 0.01), cfg)
    assert low.reason == "low_similarity"


def test_filter_bbox_size_checked_before_scorer():
    class Boom:
        def score(self, region, text):
            raise RuntimeError("model offline")

    cfg = FilterConfig()
    assert filter_bbox((0, 0, 100, 100), (100, 100), "dog", Boom(), cfg).reason == "too_large"
    with pytest.raises(PipelineError) as exc:
        filter_bbox((0, 0, 1, 1), (100, 100), "dog", Boom(), cfg)
    assert "model offline" in exc.value.diagnostics["error"]


def test_scorer_out_of_range_is_pipeline_error():
    with pytest.raises(PipelineError):
        filter_bbox((0, 0, 1, 1), (100, 100), "dog", ConstantScorer(1.5), FilterConfig())


def test_filter_trajectory():
    cfg = FilterConfig(max_trajectory_area_drift=4.0, min_similarity=0.2)
    same = make_record(bbox2=[320, 180, 960, 540])
    assert filter_trajectory(same, ConstantScorer(1.0), cfg).accepted
    drift = make_record(bbox1=[0, 0, 10, 10], bbox2=[0, 0, 100, 10])
    assert filter_trajectory(drift, ConstantScorer(1.0), cfg).reason == "area_drift"
    assert filter_trajectory(same, ConstantScorer(0.2), cfg).accepted
    assert filter_trajectory(same, ConstantScorer(0.19), cfg).reason == "low_similarity"


def test_filter_trajectory_uses_worse_end():
    r = make_record()
    end_region = RegionRef(r.video_id, r.t2, r.bbox2, (r.frame_width, r.frame_height))

    class EndsLow:
        def score(self, region, text):
            return 0.0 if region == end_region else 1.0

    assert filter_trajectory(r, EndsLow(), FilterConfig()).reason == "low_similarity"


def test_filter_config_validation():
    with pytest.raises(ValidationError):
        FilterConfig(max_bbox_area_ratio=0.0)
    with pytest.raises(ValidationError):
        FilterConfig(min_similarity=1.5)
    with pytest.raises(ValidationError):
        FilterConfig.from_dict({"bogus": 1})


def test_mock_scorers():
    region = RegionRef("v", 1.0, (0, 0, 1, 1), (10, 10))
    lookup = LookupScorer({"dog": 0.7, ("v", "cat"): 0.1}, default=-0.5)
    assert lookup.score(region, "dog") == 0.7
    assert lookup.score(region, "cat") == 0.1
    assert lookup.score(region, "eel") == -0.5
    rnd = SeededRandomScorer(3)
    assert rnd.score(region, "dog") == rnd.score(region, "dog")
    assert rnd.score(region, "dog") != SeededRandomScorer(4).score(region, "dog")
    assert -1.0 <= rnd.score(region, "dog") < 1.0


# -- builder ---------------------------------------------------------------


def _records(n, seed=0):
    return [TrajectoryRecord.from_dict(d) for d in synthetic_record_dicts(n, seed)]


def test_build_is_deterministic(tmp_path):
    recs = _records(200)
    scorer = SeededRandomScorer(1, low=-0.3, high=1.0)
    a, ra = build_dataset(recs, FilterConfig(), scorer, 7)
    b, rb = build_dataset(recs, FilterConfig(), scorer, 7)
    assert samples_to_jsonl(a) == samples_to_jsonl(b)
    assert ra.to_json() == rb.to_json()
    c, _ = build_dataset(recs, FilterConfig(), scorer, 8)
    assert samples_to_jsonl(a) != samples_to_jsonl(c)


def test_parallel_build_preserves_order():
    recs = _records(150)
    scorer = SeededRandomScorer(2, low=-0.3, high=1.0)
    serial, r1 = build_dataset(recs, FilterConfig(), scorer, 3)
    threaded, r2 = build_dataset(recs, FilterConfig(), scorer, 3, workers=4)
    assert serial == threaded
    assert r1.to_json() == r2.to_json()


def test_all_rejected():
    recs = _records(30)
    samples, report = build_dataset(recs, FilterConfig(), ConstantScorer(-1.0), 0)
    assert samples == []
    assert report.inputs == report.rejected == 30
    assert report.accepted == 0


def test_scorer_errors_do_not_stop_the_build():
    class Flaky:
        def score(self, region, text):
            if region.video_id == "v0":
                raise RuntimeError("timeout")
            return 1.0

    recs = _records(60)
    samples, report = build_dataset(recs, FilterConfig(), Flaky(), 0)
    assert report.reject_reasons["scorer_error"] > 0
    assert report.accepted + report.rejected == 60


def test_task_draw_matches_prng_trace():
    recs = [make_record(video_id=f"v{i}") for i in range(100)]
    samples, report = build_dataset(recs, FilterConfig(), ConstantScorer(1.0), 11)
    weights = [DEFAULT_TASK_WEIGHTS[t] for t in TaskKind]
    expected = [prng_task_trace(11, n, weights) for n in range(100)]
    tasks = list(TaskKind)
    assert [(tasks.index(s.task), s.template_id) for s in samples] == expected
    counts = {t: sum(1 for e in expected if e[0] == i) for i, t in enumerate(tasks)}
    assert dict(report.per_task) == {t: c for t, c in counts.items() if c}


def test_emit_all_tasks():
    recs = [make_record(video_id=f"v{i}") for i in range(5)]
    samples, report = build_dataset(recs, FilterConfig(), ConstantScorer(1.0), 0, emit_all_tasks=True)
    assert len(samples) == 15
    assert [s.task for s in samples[:3]] == list(TaskKind)
    assert report.accepted == 5


def test_zero_weight_task_never_drawn():
    w = {TaskKind.SPATIAL_GROUNDING: 0, TaskKind.TEMPORAL_GROUNDING: 1, TaskKind.INSTANCE_DYNAMIC_CAPTIONING: 0}
    for n in range(50):
        assert draw_assignment(5, n, w)[0][0] is TaskKind.TEMPORAL_GROUNDING


def test_bad_weights_and_seed():
    with pytest.raises(ValidationError):
        build_dataset([], FilterConfig(), ConstantScorer(), 0, task_weights={"SpatialGrounding": 1})
    with pytest.raises(ValidationError):
        build_dataset([], FilterConfig(), ConstantScorer(), -1)


def test_response_sanity():
    recs = _records(300, seed=4)
    samples, _ = build_dataset(recs, FilterConfig(), ConstantScorer(1.0), 2, emit_all_tasks=True)
    for s in samples:
        if s.task is TaskKind.TEMPORAL_GROUNDING:
            a, b = (int(x) for x in s.response.split(" to "))
            assert 0 <= a <= b <= 300
        elif s.task is TaskKind.SPATIAL_GROUNDING:
            nums = [int(x) for x in re.findall(r"\d+", s.response)]
            for x1, y1, x2, y2 in (nums[:4], nums[4:]):
                assert 0 <= x1 <= x2 <= 1000 and 0 <= y1 <= y2 <= 1000


# -- stats -----------------------------------------------------------------


def test_stats_single_record_bin():
    rep = dataset_stats([make_record(duration_s=109.0, t2=100.0)], 10)
    bins = [b for b in rep["duration"]["bins"] if b["count"]]
    assert bins == [{"start": 100, "end": 110, "count": 1}]
    assert rep["duration"]["mean"] == 109.0


def test_stats_empty():
    rep = dataset_stats([], 10)
    assert rep["num_records"] == 0
    assert rep["duration"] == {"count": 0, "mean": 0.0, "bins": []}
    assert rep["interval"] == {"count": 0, "mean": 0.0, "bins": []}
    assert set(rep["per_task"].values()) == {0}


def test_stats_conservation_and_tasks():
    recs = _records(50, seed=9)
    samples, _ = build_dataset(recs, FilterConfig(), ConstantScorer(1.0), 0)
    rep = dataset_stats(recs, 7.5, samples)
    assert sum(b["count"] for b in rep["duration"]["bins"]) == 50
    assert sum(b["count"] for b in rep["interval"]["bins"]) == 50
    assert sum(rep["per_task"].values()) == len(samples)
    np.testing.assert_allclose(rep["interval"]["mean"], np.mean([r.t2 - r.t1 for r in recs]))


def test_stats_bad_bin():
    with pytest.raises(ValidationError):
        dataset_stats([], 0)
