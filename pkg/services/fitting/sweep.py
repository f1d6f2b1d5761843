"""
Height sweep: refit one set of keypoints at several target statures.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from services.body.body_model import BodyParams, pose_joints, uniform_scale_beta
from services.errors import ToolkitError, UsageError
from services.metrics.metrics import pa_mpjpe
from .fitting import FitProblem, FitResult, LossWeights, fit, initial_guess
from .solver import SolverConfig

logger = logging.getLogger(__name__)


@dataclass
class HeightSweepResult:
    heights: List[float]
    fits: List[Optional[FitResult]]
    pa_mpjpe_matrix: np.ndarray        # (n, n) mm, NaN where a fit failed
    max_pairwise_pa_mpjpe: float
    failures: List[Optional[str]] = field(default_factory=list)
    # PA-MPJPE of every solution against the reference pose, when the problem has one
    reference_pa_mpjpe: List[Optional[float]] = field(default_factory=list)


def _warm_start(previous: FitResult, target_height: float) -> BodyParams:
    # slide along the scale-depth family so the start already has the new height
    factor = target_height / previous.achieved_height
    params = previous.params
    return params.replace(beta=uniform_scale_beta(params.beta, factor), transl=factor * params.transl)


def pairwise_pa_mpjpe(joint_sets: Sequence[Optional[np.ndarray]]) -> np.ndarray:
    n = len(joint_sets)
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if joint_sets[i] is None or joint_sets[j] is None:
                value = np.nan
            else:
                value = pa_mpjpe(joint_sets[i], joint_sets[j])
            matrix[i, j] = matrix[j, i] = value
        if joint_sets[i] is None:
            matrix[i, i] = np.nan
    return matrix


def height_sweep(prob: FitProblem, heights: Sequence[float], w: LossWeights = LossWeights.for_sweep(),
                 init: Optional[BodyParams] = None, config: SolverConfig = SolverConfig()) -> HeightSweepResult:
    """One fit per height, warm-started from the previous solution."""
    heights = [float(h) for h in heights]
    if not heights:
        raise UsageError("The sweep needs at least one height.")
    if len(set(heights)) != len(heights):
        raise UsageError("Sweep heights must be distinct.")
    if any(h <= 0 for h in heights):
        raise UsageError("Sweep heights must be positive.")

    fits: List[Optional[FitResult]] = []
    failures: List[Optional[str]] = []
    previous: Optional[FitResult] = None
    for h in heights:
        problem = prob.with_height(h)
        start = _warm_start(previous, h) if previous is not None else (init or initial_guess(problem))
        try:
            result = fit(problem, w, start, config)
        except ToolkitError as exc:
            logger.warning("Fit at height %.3f m failed: %s", h, exc)
            fits.append(None)
            failures.append(str(exc))
            continue
        logger.info("height %.3f m: depth %.3f m, 2D error %.4f px", h, result.depth, result.mean_kp2d_error)
        fits.append(result)
        failures.append(None)
        previous = result

    matrix = pairwise_pa_mpjpe([f.joints if f is not None else None for f in fits])
    off_diagonal = matrix[~np.eye(len(fits), dtype=bool)]
    finite = off_diagonal[np.isfinite(off_diagonal)]
    max_pairwise = float(finite.max()) if finite.size else 0.0

    reference = []
    if prob.reference_params is not None:
        ref_joints = pose_joints(prob.template, prob.reference_params)
        reference = [pa_mpjpe(f.joints, ref_joints) if f is not None else None for f in fits]

    return HeightSweepResult(heights, fits, matrix, max_pairwise, failures, reference)
