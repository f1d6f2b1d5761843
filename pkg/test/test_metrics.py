import json
from pathlib import Path

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from services.errors import DegenerateConfiguration, LengthMismatch, TooShort, ZeroPathLength
from services.io.documents import read_sequence
from services.metrics.alignment import SimilarityTransform, translation_align, umeyama, yaw_align
from services.metrics.metrics import (
    JointSeq, MetricReport, erve, evaluate, mpjpe, pa_mpjpe, path_length, pve, rte, segments, w_mpjpe_100,
    wa_mpjpe_100,
)

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def _random_similarity(rng) -> SimilarityTransform:
    return SimilarityTransform(Rotation.random(random_state=rng).as_matrix(), rng.normal(size=3),
                               float(rng.uniform(0.5, 2.0)))


def _yaw(angle: float) -> np.ndarray:
    return Rotation.from_euler("y", angle).as_matrix()


def _walk(rng, frames: int, joints: int = 24, step=(0.0, 0.0, 0.01)) -> np.ndarray:
    shape = rng.normal(0.0, 0.3, (joints, 3))
    return shape[None] + np.arange(frames)[:, None, None] * np.asarray(step)


# Umeyama
def test_umeyama_identity():
    pts = np.random.default_rng(0).normal(size=(24, 3))
    tf = umeyama(pts, pts)
    np.testing.assert_allclose(tf.rotation, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(tf.translation, 0.0, atol=1e-12)
    assert tf.scale == pytest.approx(1.0, abs=1e-12)


def test_umeyama_recovers_similarity():
    rng = np.random.default_rng(1)
    for _ in range(500):
        src = rng.normal(size=(24, 3))
        R = Rotation.random(random_state=rng).as_matrix()
        t = rng.normal(size=3)
        tf = umeyama(src, 2.0 * src @ R.T + t)
        assert tf.scale == pytest.approx(2.0, abs=1e-9)
        np.testing.assert_allclose(tf.rotation, R, atol=1e-9)
        np.testing.assert_allclose(tf.translation, t, atol=1e-9)
        assert np.linalg.det(tf.rotation) == pytest.approx(1.0, abs=1e-10)


def test_umeyama_beats_nearby_transforms():
    rng = np.random.default_rng(2)
    src = rng.normal(size=(24, 3))
    dst = 1.3 * src @ _yaw(0.4).T + 0.05 * rng.normal(size=(24, 3))
    best = umeyama(src, dst)
    best_residual = np.sum((best.apply(src) - dst) ** 2)
    for _ in range(1000):
        rot = Rotation.from_rotvec(rng.normal(0.0, 0.05, 3)).as_matrix() @ best.rotation
        other = SimilarityTransform(rot, best.translation + rng.normal(0.0, 0.05, 3),
                                    best.scale * float(rng.uniform(0.95, 1.05)))
        assert np.sum((other.apply(src) - dst) ** 2) >= best_residual


def test_umeyama_excludes_reflections():
    rng = np.random.default_rng(3)
    src = rng.normal(size=(24, 3))
    mirrored = src * [-1.0, 1.0, 1.0]
    tf = umeyama(src, mirrored)
    assert np.linalg.det(tf.rotation) == pytest.approx(1.0, abs=1e-10)
    assert tf.scale > 0


def test_umeyama_rigid_keeps_unit_scale():
    src = np.random.default_rng(4).normal(size=(10, 3))
    assert umeyama(src, 3.0 * src, with_scale=False).scale == 1.0


@pytest.mark.parametrize("src", [
    np.zeros((2, 3)),
    np.outer(np.arange(5.0), [1.0, 2.0, 3.0]),
])
def test_umeyama_degenerate(src):
    with pytest.raises(DegenerateConfiguration):
        umeyama(src, src)


def test_yaw_align_recovers_heading():
    rng = np.random.default_rng(5)
    src = rng.normal(size=(50, 3))
    dst = src @ _yaw(0.7).T + [1.0, 0.0, -2.0]
    tf = yaw_align(src, dst)
    np.testing.assert_allclose(tf.apply(src), dst, atol=1e-10)


def test_yaw_align_is_anchored_at_the_first_point():
    rng = np.random.default_rng(17)
    src = rng.normal(size=(30, 3))
    dst = src @ _yaw(-0.4).T + rng.normal(0.0, 0.05, (30, 3))
    tf = yaw_align(src, dst)
    np.testing.assert_allclose(tf.apply(src)[0], dst[0], atol=1e-12)
    np.testing.assert_allclose(tf.rotation[1], [0.0, 1.0, 0.0], atol=1e-15)


def test_translation_align_anchors_first_point():
    src = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    dst = np.array([[0.0, 0.0, 0.0], [3.0, 3.0, 3.0]])
    np.testing.assert_allclose(translation_align(src, dst).apply(src), [[0, 0, 0], [3, 3, 3]])


# Local metrics
def test_mpjpe_single_joint_offset():
    gt = np.random.default_rng(6).normal(size=(24, 3))
    pred = gt.copy()
    pred[7] += [0.003, 0.004, 0.0]
    assert mpjpe(gt, gt) == 0.0
    assert mpjpe(pred, gt) == pytest.approx(5.0 / 24.0, abs=1e-9)


def test_mpjpe_ignores_global_translation():
    gt = np.random.default_rng(7).normal(size=(24, 3))
    assert mpjpe(gt + [3.0, -1.0, 8.0], gt) == pytest.approx(0.0, abs=1e-9)


def test_mpjpe_shape_mismatch():
    with pytest.raises(LengthMismatch):
        mpjpe(np.zeros((24, 3)), np.zeros((17, 3)))


def test_pa_mpjpe_removes_similarity():
    rng = np.random.default_rng(8)
    for _ in range(500):
        gt = rng.normal(size=(24, 3))
        assert pa_mpjpe(_random_similarity(rng).apply(gt), gt) == pytest.approx(0.0, abs=1e-9)


def test_pa_mpjpe_matches_independent_oracle():
    rng = np.random.default_rng(9)
    for _ in range(20):
        pred, gt = rng.normal(size=(24, 3)), rng.normal(size=(24, 3))
        p, g = pred - pred.mean(axis=0), gt - gt.mean(axis=0)
        rot, _ = Rotation.align_vectors(g, p)
        rp = rot.apply(p)
        s = np.sum(g * rp) / np.sum(p * p)
        expected = np.linalg.norm(s * rp - g, axis=1).mean() * 1000.0
        assert pa_mpjpe(pred, gt) == pytest.approx(expected, abs=1e-8)


def test_pa_mpjpe_never_exceeds_mpjpe():
    rng = np.random.default_rng(10)
    for _ in range(500):
        pred, gt = rng.normal(size=(24, 3)), rng.normal(size=(24, 3))
        assert pa_mpjpe(pred, gt) <= mpjpe(pred, gt)
    for _ in range(500):
        gt = rng.normal(0.0, 0.3, (24, 3))
        pred = _random_similarity(rng).apply(gt) + rng.normal(0.0, 0.02, (24, 3))
        assert pa_mpjpe(pred, gt) <= mpjpe(pred, gt)


def test_pa_mpjpe_single_joint_offset():
    rng = np.random.default_rng(16)
    for _ in range(500):
        gt = rng.normal(size=(24, 3))
        pred = gt.copy()
        pred[7] += [0.003, 0.004, 0.0]
        assert pa_mpjpe(pred, gt) <= mpjpe(pred, gt) == pytest.approx(5.0 / 24.0, abs=1e-9)


def test_pve_examples():
    rng = np.random.default_rng(11)
    gt = rng.normal(size=(445, 3))
    assert pve(gt, gt) == 0.0
    assert pve(gt + 0.01, gt) == pytest.approx(0.0, abs=1e-9)
    pred = gt.copy()
    pred[100, 0] += 0.01
    assert pve(pred, gt, np.zeros(3), np.zeros(3)) == pytest.approx(10.0 / 445.0, abs=1e-9)


# Segments
@pytest.mark.parametrize("frames, expected", [
    (1, [(0, 1)]),
    (50, [(0, 50)]),
    (100, [(0, 100)]),
    (101, [(0, 100)]),
    (102, [(0, 100), (100, 102)]),
    (250, [(0, 100), (100, 200), (200, 250)]),
])
def test_segments(frames, expected):
    assert segments(frames) == expected


# World metrics
def test_world_metrics_zero_for_per_segment_rigid_motion():
    rng = np.random.default_rng(12)
    gt = _walk(rng, 250)
    pred = gt.copy()
    for start, stop in segments(250):
        R = Rotation.random(random_state=rng).as_matrix()
        pred[start:stop] = gt[start:stop] @ R.T + rng.normal(size=3)
    assert wa_mpjpe_100(JointSeq(pred), JointSeq(gt)) == pytest.approx(0.0, abs=1e-9)
    assert w_mpjpe_100(JointSeq(pred), JointSeq(gt)) == pytest.approx(0.0, abs=1e-9)


def test_rte_zero_under_heading_and_offset():
    rng = np.random.default_rng(13)
    gt = np.cumsum(rng.normal(0.0, 0.02, (200, 3)), axis=0)
    pred = gt @ _yaw(1.1).T + [2.0, 0.3, -1.0]
    assert rte(pred, gt) == pytest.approx(0.0, abs=1e-9)
    assert rte(gt + [0.5, 0.0, 0.5], gt, "translation") == pytest.approx(0.0, abs=1e-9)


def test_rte_linear_lateral_drift():
    # straight 10 m walk, prediction drifts sideways to 10 cm at the end
    t = np.linspace(0.0, 1.0, 101)
    gt = np.column_stack([np.zeros(101), np.zeros(101), 10.0 * t])
    pred = gt + np.column_stack([0.1 * t, np.zeros(101), np.zeros(101)])
    # mean drift 5 cm over a 10 m path
    assert rte(pred, gt, "translation") == pytest.approx(0.5, abs=1e-9)
    # the anchored yaw turns the drifting line onto the true one; what is left is
    # the length excess 10 t (sqrt(1 + 0.01^2) - 1), averaged over t and taken over 10 m
    expected = 50.0 * (np.sqrt(1.0001) - 1.0)
    assert rte(pred, gt) == pytest.approx(expected, abs=1e-9)
    assert rte(pred, gt, "yaw") == rte(pred, gt)


def test_rte_rejects_static_ground_truth():
    gt = np.zeros((10, 3))
    with pytest.raises(ZeroPathLength):
        rte(gt, gt)


def test_rte_unknown_alignment():
    gt = np.column_stack([np.arange(5.0), np.zeros(5), np.zeros(5)])
    with pytest.raises(ValueError):
        rte(gt, gt, "affine")


def test_path_length():
    pts = np.array([[0.0, 0.0, 0.0], [3.0, 4.0, 0.0], [3.0, 4.0, 2.0]])
    assert path_length(pts) == 7.0


def test_w_mpjpe_heading_error_grows_with_distance():
    # prediction walks 10 degrees off the true heading from an identical first frame
    rng = np.random.default_rng(14)
    shape = rng.normal(0.0, 0.3, (24, 3))
    k = np.arange(100)[:, None, None]
    step = 0.01
    gt = shape[None] + k * step * np.array([1.0, 0.0, 0.0])
    heading = np.array([np.cos(np.radians(10)), 0.0, -np.sin(np.radians(10))])
    pred = shape[None] + k * step * heading
    expected = step * 2 * np.sin(np.radians(5)) * 49.5 * 1000.0
    assert w_mpjpe_100(JointSeq(pred), JointSeq(gt)) == pytest.approx(expected, rel=1e-9)


def test_w_mpjpe_not_below_wa_mpjpe():
    rng = np.random.default_rng(15)
    for _ in range(100):
        gt = _walk(rng, 150, joints=8)
        pred = gt + np.cumsum(rng.normal(0.0, 0.003, (150, 1, 3)), axis=0) + rng.normal(0.0, 0.01, (150, 8, 3))
        assert w_mpjpe_100(JointSeq(pred), JointSeq(gt)) >= wa_mpjpe_100(JointSeq(pred), JointSeq(gt))


def test_w_mpjpe_not_below_wa_mpjpe_with_one_offset_joint():
    rng = np.random.default_rng(18)
    for frames in (100, 150):
        for _ in range(100):
            gt = _walk(rng, frames)
            pred = gt.copy()
            pred[:, 7] += [0.003, 0.004, 0.0]
            pred_seq, gt_seq = JointSeq(pred), JointSeq(gt)
            assert w_mpjpe_100(pred_seq, gt_seq) >= wa_mpjpe_100(pred_seq, gt_seq)


def test_erve_examples():
    rng = np.random.default_rng(16)
    gt = np.cumsum(rng.normal(0.0, 0.02, (60, 3)), axis=0)
    assert erve(gt, gt) == 0.0
    assert erve(gt + [0.1, 0.2, 0.3], gt) == pytest.approx(0.0, abs=1e-9)
    jitter = np.where(np.arange(60) % 2 == 0, 0.001, -0.001)
    pred = gt + np.column_stack([np.zeros(60), np.zeros(60), jitter])
    assert erve(pred, gt) == pytest.approx(2.0, abs=1e-9)


def test_erve_needs_two_frames():
    with pytest.raises(TooShort):
        erve(np.zeros((1, 3)), np.zeros((1, 3)))


def test_sequences_must_match():
    rng = np.random.default_rng(17)
    with pytest.raises(LengthMismatch):
        wa_mpjpe_100(JointSeq(_walk(rng, 100)), JointSeq(_walk(rng, 99)))


def test_joint_seq_validation():
    with pytest.raises(LengthMismatch):
        JointSeq(np.zeros((0, 24, 3)))
    with pytest.raises(LengthMismatch):
        JointSeq(np.zeros((5, 24, 2)))
    with pytest.raises(LengthMismatch):
        JointSeq(np.zeros((5, 24, 3)), valid=np.ones(4, dtype=bool))


# Full report
def test_drift_fixture_matches_hand_derived_values():
    pred = read_sequence(FIXTURES / "drift_pred.json")
    gt = read_sequence(FIXTURES / "drift_gt.json")
    expected = json.loads((FIXTURES / "drift_expected.json").read_text())
    report = evaluate(pred, gt)
    for name, value in report.items():
        if expected[name] is None:
            assert value is None
        else:
            assert value == pytest.approx(expected[name], abs=1e-6), name


def test_evaluate_identical_sequences():
    gt = JointSeq(_walk(np.random.default_rng(18), 120))
    report = evaluate(gt, gt)
    for name, value in report.items():
        if name != "pve":
            assert value == pytest.approx(0.0, abs=1e-9), name


def test_evaluate_skips_invalid_frames():
    rng = np.random.default_rng(19)
    gt = _walk(rng, 20)
    pred = gt.copy()
    pred[3] += rng.normal(0.0, 0.5, (24, 3))
    valid = np.ones(20, dtype=bool)
    valid[3] = False
    report = evaluate(JointSeq(pred, valid=valid), JointSeq(gt), world=False)
    assert report.mpjpe == pytest.approx(0.0, abs=1e-9)
    assert report.wa_mpjpe_100 is None


def test_evaluate_local_only():
    gt = JointSeq(_walk(np.random.default_rng(20), 10))
    report = evaluate(gt, gt, world=False)
    assert report.rte is None and report.wa_mpjpe_100 is None
    assert report.mpjpe is not None


def test_report_table_lists_computed_metrics():
    table = MetricReport(mpjpe=1.5, rte=0.25).as_table()
    lines = table.splitlines()
    assert len(lines) == 2
    assert lines[0].split() == ["mpjpe", "1.5000", "mm"]
    assert lines[1].split() == ["rte", "0.2500", "%"]
    assert MetricReport().as_table() == "(no metrics computed)"
