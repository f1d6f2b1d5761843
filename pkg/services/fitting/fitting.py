"""
Body fitting against 2D keypoints with mimic and measurement terms.

The cost is the squared norm of a stacked residual vector. Every term is
scaled by the square root of its weight so the cost reads as
    w_2d * sum(conf^2 * |proj - target|^2)
  + w_mimic_pose * |(theta, root) - reference|^2
  + w_mimic_shape * |beta - reference|^2
  + w_measure * (height - target_height)^2
Terms with zero weight or without a target are left out of the vector.
2D residuals are raw pixels.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from services.body.body_model import (
    BodyParams, SkeletonTemplate, height, pose_joints, uniform_scale_beta_tangent, stature_beta,
)
from services.body import body_config
from services.camera.camera import Intrinsics, project_points
from services.errors import InitializationError, LengthMismatch, NonPositiveDepth
from . import fit_config as cfg
from .solver import SolverConfig, levenberg_marquardt, numerical_jacobian

logger = logging.getLogger(__name__)

TERM_NAMES = ("kp2d", "mimic_pose", "mimic_shape", "measure")


@dataclass(frozen=True)
class LossWeights:
    w_2d: float = cfg.W_2D
    w_mimic_pose: float = cfg.W_MIMIC_POSE
    w_mimic_shape: float = cfg.W_MIMIC_SHAPE
    w_measure: float = cfg.W_MEASURE

    def __post_init__(self):
        values = (self.w_2d, self.w_mimic_pose, self.w_mimic_shape, self.w_measure)
        if any(v < 0 or not np.isfinite(v) for v in values):
            raise ValueError("Loss weights must be finite and non-negative.")
        if not any(v > 0 for v in values):
            raise ValueError("At least one loss weight must be positive.")

    @classmethod
    def for_sweep(cls) -> "LossWeights":
        return cls(w_mimic_shape=cfg.SWEEP_W_MIMIC_SHAPE)


@dataclass(frozen=True)
class FitProblem:
    target_kp2d: np.ndarray       # (24, 2) pixels
    confidence: np.ndarray        # (24,) in [0, 1]
    K: Intrinsics
    template: SkeletonTemplate
    reference_params: Optional[BodyParams] = None
    target_height: Optional[float] = None

    def __post_init__(self):
        kp = np.asarray(self.target_kp2d, dtype=float)
        conf = np.asarray(self.confidence, dtype=float).reshape(-1)
        n = self.template.num_joints
        if kp.shape != (n, 2):
            raise LengthMismatch(f"Expected {n} keypoints, got array of shape {kp.shape}")
        if conf.shape != (n,):
            raise LengthMismatch(f"Expected {n} confidences, got {conf.size}")
        if np.any(conf < 0) or np.any(conf > 1):
            raise ValueError("Keypoint confidences must lie in [0, 1].")
        if self.target_height is not None and not self.target_height > 0:
            raise ValueError("target_height must be positive")
        object.__setattr__(self, "target_kp2d", kp)
        object.__setattr__(self, "confidence", conf)

    def with_height(self, target_height: Optional[float]) -> "FitProblem":
        return FitProblem(self.target_kp2d, self.confidence, self.K, self.template,
                          self.reference_params, target_height)


@dataclass
class FitResult:
    params: BodyParams
    final_cost: float
    mean_kp2d_error: float
    iterations: int
    converged: bool
    breakdown: Dict[str, float]
    joints: np.ndarray
    achieved_height: float
    cost_history: List[float] = field(default_factory=list)

    @property
    def depth(self) -> float:
        return float(self.params.transl[2])


def residual_terms(params: BodyParams, prob: FitProblem, w: LossWeights) -> Dict[str, np.ndarray]:
    """Weighted residual blocks by term name; absent terms are omitted."""
    terms = {}
    if w.w_2d > 0:
        proj = project_points(pose_joints(prob.template, params), prob.K)
        terms["kp2d"] = (np.sqrt(w.w_2d) * prob.confidence[:, None] * (proj - prob.target_kp2d)).reshape(-1)
    ref = prob.reference_params
    if ref is not None and w.w_mimic_pose > 0:
        pose = np.concatenate([params.theta, params.root_orient])
        ref_pose = np.concatenate([ref.theta, ref.root_orient])
        terms["mimic_pose"] = np.sqrt(w.w_mimic_pose) * (pose - ref_pose)
    if ref is not None and w.w_mimic_shape > 0:
        terms["mimic_shape"] = np.sqrt(w.w_mimic_shape) * (params.beta - ref.beta)
    if prob.target_height is not None and w.w_measure > 0:
        terms["measure"] = np.sqrt(w.w_measure) * np.array([height(prob.template, params.beta) - prob.target_height])
    return terms


def residuals(params: BodyParams, prob: FitProblem, w: LossWeights) -> np.ndarray:
    terms = residual_terms(params, prob, w)
    if not terms:
        return np.zeros(0)
    return np.concatenate([terms[name] for name in TERM_NAMES if name in terms])


def cost_breakdown(params: BodyParams, prob: FitProblem, w: LossWeights) -> Dict[str, float]:
    return {name: float(r @ r) for name, r in residual_terms(params, prob, w).items()}


def _vector_residuals(prob: FitProblem, w: LossWeights):
    return lambda x: residuals(BodyParams.from_vector(x), prob, w)


def jacobian(params: BodyParams, prob: FitProblem, w: LossWeights, step: float = cfg.JACOBIAN_STEP) -> np.ndarray:
    """Central-difference Jacobian of `residuals` over the 85-vector (theta, beta, root, transl)."""
    return numerical_jacobian(_vector_residuals(prob, w), params.to_vector(), step)


def mean_kp2d_error(params: BodyParams, prob: FitProblem) -> float:
    """Mean pixel distance over joints with non-zero confidence."""
    visible = prob.confidence > 0
    if not visible.any():
        return 0.0
    proj = project_points(pose_joints(prob.template, params), prob.K)
    return float(np.linalg.norm(proj[visible] - prob.target_kp2d[visible], axis=1).mean())


def scale_depth_direction(params: BodyParams) -> np.ndarray:
    """Tangent of the exact scale-depth family at `params`.

    Moving along it rescales the body about the pelvis and the translation
    by the same factor, which leaves every projected joint in place.
    """
    return np.concatenate([
        np.zeros(params.theta.size),
        uniform_scale_beta_tangent(params.beta),
        np.zeros(3),
        params.transl,
    ])


def initial_guess(prob: FitProblem) -> BodyParams:
    """Similar-triangles start: depth = f * metric extent / pixel extent.

    Pose and shape come from the reference when there is one, otherwise a
    neutral upright body. The stature is moved to the target height if given.
    """
    if prob.reference_params is not None:
        params = prob.reference_params.replace(transl=np.zeros(3))
    else:
        params = BodyParams.zeros().replace(root_orient=np.array([np.pi, 0.0, 0.0]))
    if prob.target_height is not None:
        factor = prob.target_height / height(prob.template, params.beta)
        params = params.replace(beta=stature_beta(params.beta, factor))

    joints = pose_joints(prob.template, params)
    visible = prob.confidence > 0
    depth = cfg.INIT_FALLBACK_DEPTH
    if visible.sum() >= 2:
        metric = np.ptp(joints[visible, :2], axis=0)
        pixels = np.ptp(prob.target_kp2d[visible], axis=0)
        axis = int(np.argmax(metric))
        if pixels[axis] > 0:
            focal = prob.K.fx if axis == 0 else prob.K.fy
            depth = focal * metric[axis] / pixels[axis]

    # place the joint centroid on the ray through the keypoint centroid
    mask = visible if visible.any() else np.ones_like(visible)
    u, v = prob.target_kp2d[mask].mean(axis=0)
    ray = np.array([(u - prob.K.cx) / prob.K.fx, (v - prob.K.cy) / prob.K.fy, 1.0])
    transl = depth * ray - joints[mask].mean(axis=0)
    logger.debug("Initial depth %.3f m", depth)
    return params.replace(transl=transl)


def fit(prob: FitProblem, w: LossWeights = LossWeights(), init: Optional[BodyParams] = None,
        config: SolverConfig = SolverConfig()) -> FitResult:
    """Levenberg-Marquardt over (theta, beta, root, transl)."""
    if init is None:
        init = initial_guess(prob)
    fun = _vector_residuals(prob, w)
    try:
        fun(init.to_vector())
    except NonPositiveDepth as exc:
        raise InitializationError(f"Initialization puts a joint outside the visual cone: {exc}") from exc

    # an axis-angle stepping past 2*pi makes BodyParams raise ValueError
    result = levenberg_marquardt(fun, init.to_vector(), config, rejected=(NonPositiveDepth, ValueError))
    params = BodyParams.from_vector(result.x)
    fit_result = FitResult(
        params=params,
        final_cost=result.cost,
        mean_kp2d_error=mean_kp2d_error(params, prob),
        iterations=result.iterations,
        converged=result.converged,
        breakdown=cost_breakdown(params, prob, w),
        joints=pose_joints(prob.template, params),
        achieved_height=height(prob.template, params.beta),
        cost_history=result.cost_history,
    )
    logger.info("Fit finished after %d iterations: cost %.3e, 2D error %.4f px",
                fit_result.iterations, fit_result.final_cost, fit_result.mean_kp2d_error)
    return fit_result


def synthesize_problem(tpl: SkeletonTemplate, params: BodyParams, K: Intrinsics,
                       target_height: Optional[float] = None, with_reference: bool = True) -> FitProblem:
    """Problem whose keypoints are the exact projection of `params`."""
    kp = project_points(pose_joints(tpl, params), K)
    return FitProblem(
        target_kp2d=kp,
        confidence=np.ones(body_config.NUM_JOINTS),
        K=K,
        template=tpl,
        reference_params=params if with_reference else None,
        target_height=target_height,
    )
