"""
Damped least squares (Levenberg-Marquardt) over a flat parameter vector.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple, Type

import numpy as np

from services.errors import DivergedError, NonPositiveDepth
from . import fit_config as cfg

logger = logging.getLogger(__name__)

ResidualFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = cfg.MAX_ITERS
    initial_damping: float = cfg.INITIAL_DAMPING
    damping_up: float = cfg.DAMPING_UP
    damping_down: float = cfg.DAMPING_DOWN
    convergence_tol: float = cfg.CONVERGENCE_TOL
    jacobian_step: float = cfg.JACOBIAN_STEP

    def __post_init__(self):
        if self.max_iters <= 0:
            raise ValueError("max_iters must be positive")
        if self.initial_damping <= 0 or self.convergence_tol <= 0 or self.jacobian_step <= 0:
            raise ValueError("damping, tolerance and Jacobian step must be positive")
        if not self.damping_up > 1.0 > self.damping_down > 0.0:
            raise ValueError("Need damping_up > 1 > damping_down > 0")


@dataclass
class SolverResult:
    x: np.ndarray
    cost: float
    iterations: int
    converged: bool
    cost_history: List[float] = field(default_factory=list)


def numerical_jacobian(fun: ResidualFn, x: np.ndarray, step: float) -> np.ndarray:
    """Central differences, one column per parameter."""
    x = np.asarray(x, dtype=float)
    columns = []
    for i in range(x.size):
        dx = np.zeros_like(x)
        dx[i] = step
        columns.append((fun(x + dx) - fun(x - dx)) / (2.0 * step))
    return np.stack(columns, axis=1)


def _cost(r: np.ndarray) -> float:
    return float(r @ r)


def levenberg_marquardt(fun: ResidualFn, x0: np.ndarray, config: SolverConfig = SolverConfig(),
                        rejected: Tuple[Type[Exception], ...] = (NonPositiveDepth,)) -> SolverResult:
    """Minimise ||fun(x)||^2 starting from x0.

    Steps whose evaluation raises one of `rejected` (by default a joint pushed
    behind the camera) are refused like any step that does not lower the cost.
    Accepted costs never increase.
    """
    x = np.asarray(x0, dtype=float).copy()
    r = fun(x)
    cost = _cost(r)
    if not np.isfinite(cost):
        raise DivergedError("Initial cost is not finite.")
    history = [cost]
    damping = config.initial_damping

    if cost <= cfg.ABSOLUTE_COST_TOL:
        return SolverResult(x, cost, 0, True, history)

    converged = False
    iterations = 0
    J = numerical_jacobian(fun, x, config.jacobian_step)
    while iterations < config.max_iters:
        iterations += 1
        A = J.T @ J
        g = J.T @ r
        diag = np.maximum(np.diag(A), 1e-12)

        accepted = False
        while damping <= cfg.MAX_DAMPING:
            step, *_ = np.linalg.lstsq(A + damping * np.diag(diag), -g, rcond=None)
            try:
                r_new = fun(x + step)
            except rejected:
                damping *= config.damping_up
                continue
            cost_new = _cost(r_new)
            if not np.isfinite(cost_new):
                raise DivergedError(f"Cost became non-finite at iteration {iterations}")
            if cost_new < cost:
                accepted = True
                break
            damping *= config.damping_up

        if not accepted:
            # no damping level lowers the cost: stationary to machine precision
            converged = True
            break

        x = x + step
        r = r_new
        rel_change = (cost - cost_new) / max(cost, 1e-300)
        small_step = np.linalg.norm(step) <= cfg.STEP_TOL * (np.linalg.norm(x) + cfg.STEP_TOL)
        cost = cost_new
        history.append(cost)
        damping = max(damping * config.damping_down, 1e-15)
        logger.debug("iter %d cost %.6e damping %.1e", iterations, cost, damping)

        if rel_change < config.convergence_tol or cost <= cfg.ABSOLUTE_COST_TOL or small_step:
            converged = True
            break
        J = numerical_jacobian(fun, x, config.jacobian_step)

    return SolverResult(x, cost, iterations, converged, history)
