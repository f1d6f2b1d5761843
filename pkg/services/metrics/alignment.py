"""
Closed-form point-set alignment (Umeyama / Horn).
"""
from dataclasses import dataclass

import numpy as np

from services.errors import DegenerateConfiguration
from .metrics_config import COLLINEAR_TOL, GRAVITY_AXIS


@dataclass(frozen=True)
class SimilarityTransform:
    """x -> scale * rotation @ x + translation"""
    rotation: np.ndarray
    translation: np.ndarray
    scale: float = 1.0

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return self.scale * points @ self.rotation.T + self.translation

    @classmethod
    def identity(cls) -> "SimilarityTransform":
        return cls(np.eye(3), np.zeros(3), 1.0)


def umeyama(src: np.ndarray, dst: np.ndarray, with_scale: bool = True) -> SimilarityTransform:
    """Least-squares similarity (or rigid) transform taking `src` onto `dst`."""
    src = np.asarray(src, dtype=float).reshape(-1, 3)
    dst = np.asarray(dst, dtype=float).reshape(-1, 3)
    if src.shape != dst.shape:
        raise DegenerateConfiguration(f"Point sets differ in shape: {src.shape} vs {dst.shape}")
    n = src.shape[0]
    if n < 3:
        raise DegenerateConfiguration(f"Alignment needs at least 3 points, got {n}")

    mu_src = src.mean(axis=0)
    mu_dst = dst.mean(axis=0)
    src_c = src - mu_src
    dst_c = dst - mu_dst

    sv = np.linalg.svd(src_c, compute_uv=False)
    if sv[0] == 0 or sv[1] <= COLLINEAR_TOL * sv[0]:
        raise DegenerateConfiguration("Source points are collinear.")

    cov = dst_c.T @ src_c / n
    U, D, Vt = np.linalg.svd(cov)
    S = np.eye(3)
    if np.linalg.det(U) * np.linalg.det(Vt) < 0:
        S[2, 2] = -1.0
    R = U @ S @ Vt

    if with_scale:
        var_src = (src_c ** 2).sum() / n
        scale = float(np.trace(np.diag(D) @ S) / var_src)
    else:
        scale = 1.0
    t = mu_dst - scale * R @ mu_src
    return SimilarityTransform(R, t, scale)


def yaw_align(src: np.ndarray, dst: np.ndarray, axis: int = GRAVITY_AXIS) -> SimilarityTransform:
    """Rotation about the gravity axis through the first point, then the shift matching the first points.

    The angle is the least-squares fit of the offsets from the first point.
    """
    src = np.asarray(src, dtype=float).reshape(-1, 3)
    dst = np.asarray(dst, dtype=float).reshape(-1, 3)
    a, b = [i for i in range(3) if i != axis]
    src_c = src - src[0]
    dst_c = dst - dst[0]
    # rotation in the (b, a) plane; maximises sum of dst . R src
    cos_term = np.sum(dst_c[:, a] * src_c[:, a] + dst_c[:, b] * src_c[:, b])
    sin_term = np.sum(dst_c[:, a] * src_c[:, b] - dst_c[:, b] * src_c[:, a])
    psi = np.arctan2(sin_term, cos_term)
    R = np.eye(3)
    R[a, a] = np.cos(psi)
    R[a, b] = np.sin(psi)
    R[b, a] = -np.sin(psi)
    R[b, b] = np.cos(psi)
    t = dst[0] - R @ src[0]
    return SimilarityTransform(R, t, 1.0)


def translation_align(src: np.ndarray, dst: np.ndarray) -> SimilarityTransform:
    """Translate so the first points coincide."""
    src = np.asarray(src, dtype=float).reshape(-1, 3)
    dst = np.asarray(dst, dtype=float).reshape(-1, 3)
    return SimilarityTransform(np.eye(3), dst[0] - src[0], 1.0)
