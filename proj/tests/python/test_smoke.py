"""Smoke tests for the python bindings."""

import math

import pytest

import sistream as s


def test_hoeffding_bound_value():
    assert abs(s.hoeffding_bound(1.0, 0.05, 1000) - 0.038707) < 1e-5
    assert s.hoeffding_bound(1.0, 0.05, 4000) == pytest.approx(
        s.hoeffding_bound(1.0, 0.05, 1000) / 2.0
    )


def test_running_scaler():
    sc = s.RunningScaler()
    sc.update([2.0])
    sc.update([4.0])
    assert sc.mean(0) == pytest.approx(3.0)
    assert sc.variance(0) == pytest.approx(1.0)
    assert sc.transform([3.0])[0] == pytest.approx(0.0)


def test_distances():
    assert s.spatial_distance([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0)
    assert s.time_distance(100, 90, 200) == pytest.approx(0.05)
    a = s.Instance(120, [0.0, 0.0], 0)
    b = s.Instance(100, [3.0, 4.0], 1)
    assert s.spatio_temporal_distance(a, b, 200) == pytest.approx(5.1)


def test_kappa():
    assert s.kappa([[40, 10], [20, 30]]) == pytest.approx(0.40)
    assert s.kappa([[50, 0], [0, 50]]) == 1.0


def test_synthetic_stream_determinism():
    cfg = s.GaussianConfig()
    cfg.phases = [s.GaussianPhase(200)]
    cfg.seed = 7
    a = s.synth_gaussian_stream(cfg)
    b = s.synth_gaussian_stream(cfg)
    assert [x.features for x in a] == [x.features for x in b]
    assert [x.label for x in a] == [x.label for x in b]


def test_prequential_run_with_sis():
    cfg = s.GaussianConfig()
    cfg.run_length = 25
    cfg.phases = [s.GaussianPhase(2000)]
    cfg.seed = 3
    stream = s.synth_gaussian_stream(cfg)

    hat = s.HoeffdingAdaptiveTree()
    report = s.prequential_run(stream, hat, s.SisConfig())
    assert report.instances() == 2000
    assert report.accuracy_pct > 90.0
    assert len(report.windowed) == 2000
    assert not report.aborted
    assert report.cost_ram_hours >= 0.0


def test_learner_contract():
    tree = s.HoeffdingTree()
    assert tree.predict_one(s.Instance(0, [1.0], None)) == 0
    tree.learn_one(s.Instance(0, [1.0], 2))
    assert tree.predict_one(s.Instance(1, [5.0], None)) == 2
    tree.reset()
    assert tree.predict_one(s.Instance(2, [1.0], None)) == 0
    assert tree.size_bytes() > 0


def test_adwin_detects_shift():
    import random

    rng = random.Random(5)
    adwin = s.Adwin()
    detected_at = None
    for t in range(2000):
        p = 0.2 if t < 1000 else 0.8
        if adwin.update(1.0 if rng.random() < p else 0.0) and t >= 1000:
            detected_at = detected_at or t
    assert detected_at is not None and detected_at < 1300


def test_feature_drop():
    stream = [s.Instance(t, [1.0, 2.0, 3.0], 0) for t in range(10)]
    out = s.apply_feature_drop(stream, 5, [1])
    assert out[4].dim() == 3
    assert out[5].dim() == 2
    assert out[5].features == [1.0, 3.0]
