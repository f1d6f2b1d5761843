"""
Evaluation metrics for local body pose and world-frame motion.

Positions come in metres; errors are reported in millimetres, RTE in percent
of the ground-truth path length and ERVE in millimetres per frame.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from services.errors import LengthMismatch, TooShort, ZeroPathLength
from . import metrics_config as cfg
from .alignment import SimilarityTransform, translation_align, umeyama, yaw_align

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JointSeq:
    frames: np.ndarray                   # (T, J, 3) metres
    frame_rate: float = 30.0
    valid: Optional[np.ndarray] = None   # (T,) bool

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        if frames.ndim != 3 or frames.shape[2] != 3 or frames.shape[0] < 1:
            raise LengthMismatch(f"Joint sequence must be (T, J, 3) with T >= 1, got {frames.shape}")
        object.__setattr__(self, "frames", frames)
        valid = np.ones(frames.shape[0], dtype=bool) if self.valid is None else np.asarray(self.valid, dtype=bool)
        if valid.shape != (frames.shape[0],):
            raise LengthMismatch("Validity mask must have one entry per frame.")
        object.__setattr__(self, "valid", valid)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def num_joints(self) -> int:
        return self.frames.shape[1]

    @property
    def roots(self) -> np.ndarray:
        return self.frames[:, cfg.ROOT_JOINT]


@dataclass
class MetricReport:
    mpjpe: Optional[float] = None
    pa_mpjpe: Optional[float] = None
    pve: Optional[float] = None
    wa_mpjpe_100: Optional[float] = None
    w_mpjpe_100: Optional[float] = None
    rte: Optional[float] = None
    erve: Optional[float] = None

    UNITS = {
        "mpjpe": "mm", "pa_mpjpe": "mm", "pve": "mm",
        "wa_mpjpe_100": "mm", "w_mpjpe_100": "mm", "rte": "%", "erve": "mm/frame",
    }

    def items(self) -> List[Tuple[str, Optional[float]]]:
        return [(name, getattr(self, name)) for name in self.UNITS]

    def as_table(self) -> str:
        """Aligned text table of the computed metrics."""
        rows = [(name, f"{value:.4f}", self.UNITS[name]) for name, value in self.items() if value is not None]
        if not rows:
            return "(no metrics computed)"
        w0 = max(len(r[0]) for r in rows)
        w1 = max(len(r[1]) for r in rows)
        return "\n".join(f"{n:<{w0}}  {v:>{w1}}  {u}" for n, v, u in rows)


def _check_pair(pred: np.ndarray, gt: np.ndarray):
    pred = np.asarray(pred, dtype=float)
    gt = np.asarray(gt, dtype=float)
    if pred.shape != gt.shape:
        raise LengthMismatch(f"Prediction shape {pred.shape} does not match ground truth {gt.shape}")
    return pred, gt


def _mean_distance_mm(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b, axis=-1).mean() * cfg.M_TO_MM)


def mpjpe(pred: np.ndarray, gt: np.ndarray) -> float:
    """Root-aligned mean per-joint position error."""
    pred, gt = _check_pair(pred, gt)
    root = cfg.ROOT_JOINT
    return _mean_distance_mm(pred - pred[root], gt - gt[root])


def pa_mpjpe(pred: np.ndarray, gt: np.ndarray) -> float:
    """Mean per-joint error after similarity Procrustes alignment of pred onto gt.

    The least-squares similarity does not always minimise a mean of distances;
    root alignment is itself a similarity, so the smaller of the two is reported.
    """
    pred, gt = _check_pair(pred, gt)
    aligned = umeyama(pred, gt, with_scale=True).apply(pred)
    return min(_mean_distance_mm(aligned, gt), mpjpe(pred, gt))


def pve(pred_verts: np.ndarray, gt_verts: np.ndarray,
        pred_root: Optional[np.ndarray] = None, gt_root: Optional[np.ndarray] = None) -> float:
    """Mean per-vertex error after root alignment.

    The root is the pelvis joint when given, else the vertex centroid.
    """
    pred_verts, gt_verts = _check_pair(pred_verts, gt_verts)
    pr = pred_verts.mean(axis=0) if pred_root is None else np.asarray(pred_root, dtype=float)
    gr = gt_verts.mean(axis=0) if gt_root is None else np.asarray(gt_root, dtype=float)
    return _mean_distance_mm(pred_verts - pr, gt_verts - gr)


def segments(num_frames: int, length: int = cfg.SEGMENT_LENGTH) -> List[Tuple[int, int]]:
    """Consecutive [start, stop) windows; a short tail is dropped unless it is all there is."""
    bounds = [(s, min(s + length, num_frames)) for s in range(0, num_frames, length)]
    if len(bounds) > 1 and bounds[-1][1] - bounds[-1][0] < cfg.MIN_SEGMENT_FRAMES:
        bounds = bounds[:-1]
    return bounds


def _check_sequences(pred: JointSeq, gt: JointSeq):
    if pred.frames.shape != gt.frames.shape:
        raise LengthMismatch(f"Sequences differ: {pred.frames.shape} vs {gt.frames.shape}")


def _rigid_error(tf: SimilarityTransform, p: np.ndarray, g: np.ndarray) -> float:
    return _mean_distance_mm(tf.apply(p.reshape(-1, 3)).reshape(p.shape), g)


def _segment_errors(pred: JointSeq, gt: JointSeq) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-segment mean joint error (mm) under whole-segment and first-frame alignment.

    The whole-segment fit is least squares, which does not always minimise the
    mean distance; the first-frame transform is another rigid candidate, so the
    whole-segment error is the smaller of the two.
    """
    _check_sequences(pred, gt)
    valid = pred.valid & gt.valid
    whole, first, counts = [], [], []
    for start, stop in segments(pred.num_frames):
        mask = valid[start:stop]
        if not mask.any():
            continue
        p = pred.frames[start:stop][mask]
        g = gt.frames[start:stop][mask]
        err_first = _rigid_error(umeyama(p[0], g[0], with_scale=False), p, g)
        err_whole = _rigid_error(umeyama(p.reshape(-1, 3), g.reshape(-1, 3), with_scale=False), p, g)
        whole.append(min(err_whole, err_first))
        first.append(err_first)
        counts.append(p.shape[0])
    return np.asarray(whole), np.asarray(first), np.asarray(counts, dtype=float)


def _weighted_mean(errors: np.ndarray, counts: np.ndarray) -> float:
    if counts.size == 0:
        return 0.0
    return float(np.sum(errors * counts) / np.sum(counts))


def wa_mpjpe_100(pred: JointSeq, gt: JointSeq) -> float:
    """World MPJPE with each 100-frame window rigidly aligned as a whole."""
    whole, _, counts = _segment_errors(pred, gt)
    return _weighted_mean(whole, counts)


def w_mpjpe_100(pred: JointSeq, gt: JointSeq) -> float:
    """World MPJPE with each 100-frame window aligned on its first frame only."""
    _, first, counts = _segment_errors(pred, gt)
    return _weighted_mean(first, counts)


def path_length(points: np.ndarray) -> float:
    points = np.asarray(points, dtype=float)
    return float(np.linalg.norm(np.diff(points, axis=0), axis=1).sum())


def rte(pred_root: np.ndarray, gt_root: np.ndarray, alignment: str = cfg.RTE_ALIGNMENT) -> float:
    """Root translation error as a percentage of the ground-truth path length."""
    pred_root, gt_root = _check_pair(pred_root, gt_root)
    length = path_length(gt_root)
    if length < cfg.MIN_PATH_LENGTH:
        raise ZeroPathLength(f"Ground-truth path is only {length:.6f} m long")
    if alignment == "yaw":
        tf = yaw_align(pred_root, gt_root)
    elif alignment == "rigid":
        tf = umeyama(pred_root, gt_root, with_scale=False)
    elif alignment == "translation":
        tf = translation_align(pred_root, gt_root)
    else:
        raise ValueError(f"Unknown RTE alignment '{alignment}'")
    err = np.linalg.norm(tf.apply(pred_root) - gt_root, axis=1).mean()
    return float(err / length * 100.0)


def erve(pred_root_cam: np.ndarray, gt_root_cam: np.ndarray) -> float:
    """Mean difference of forward-difference root velocities in the camera frame."""
    pred_root_cam, gt_root_cam = _check_pair(pred_root_cam, gt_root_cam)
    if pred_root_cam.shape[0] < 2:
        raise TooShort("ERVE needs at least two frames.")
    dv = np.diff(pred_root_cam, axis=0) - np.diff(gt_root_cam, axis=0)
    return float(np.linalg.norm(dv, axis=1).mean() * cfg.M_TO_MM)


def evaluate(pred: JointSeq, gt: JointSeq, local: bool = True, world: bool = True,
             pred_cam: Optional[JointSeq] = None, gt_cam: Optional[JointSeq] = None,
             pred_verts: Optional[np.ndarray] = None, gt_verts: Optional[np.ndarray] = None,
             rte_alignment: str = cfg.RTE_ALIGNMENT) -> MetricReport:
    """Full metric report.

    Local metrics are frame averages over frames valid in both sequences.
    ERVE uses the camera-frame sequences when given, otherwise `pred`/`gt`.
    """
    _check_sequences(pred, gt)
    report = MetricReport()
    valid = pred.valid & gt.valid
    idx = np.flatnonzero(valid)

    if local and idx.size:
        report.mpjpe = float(np.mean([mpjpe(pred.frames[i], gt.frames[i]) for i in idx]))
        if pred.num_joints >= cfg.MIN_ALIGNMENT_JOINTS:
            report.pa_mpjpe = float(np.mean([pa_mpjpe(pred.frames[i], gt.frames[i]) for i in idx]))
        if pred_verts is not None and gt_verts is not None:
            pv, gv = _check_pair(pred_verts, gt_verts)
            report.pve = float(np.mean([
                pve(pv[i], gv[i], pred.frames[i, cfg.ROOT_JOINT], gt.frames[i, cfg.ROOT_JOINT]) for i in idx
            ]))

    if world:
        if pred.num_joints >= cfg.MIN_ALIGNMENT_JOINTS:
            report.wa_mpjpe_100 = wa_mpjpe_100(pred, gt)
            report.w_mpjpe_100 = w_mpjpe_100(pred, gt)
        else:
            logger.warning("Skipping WA-MPJPE and W-MPJPE: %d joint(s) per frame", pred.num_joints)
        if idx.size >= 2:
            report.rte = rte(pred.roots[idx], gt.roots[idx], rte_alignment)

    cam_pred = pred_cam if pred_cam is not None else pred
    cam_gt = gt_cam if gt_cam is not None else gt
    _check_sequences(cam_pred, cam_gt)
    if cam_pred.num_frames >= 2:
        report.erve = erve(cam_pred.roots, cam_gt.roots)

    logger.info("Evaluated %d frames (%d valid)", pred.num_frames, idx.size)
    return report
