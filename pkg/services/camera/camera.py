"""
Pinhole perspective camera: projection, ray unprojection, crop intrinsics,
ray maps and the CLIFF bounding-box encoding.

All values are immutable; every function is pure.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from services.errors import NonPositiveDepth
from .camera_config import DEFAULT_NORMALIZE, F_CLIFF, F_FIXED, F_TRACE


class FocalConvention(str, Enum):
    """Focal-length conventions used by HMR methods for the full image."""
    fixed5000 = "fixed5000"
    diag_full = "diag_full"
    mean_wh = "mean_wh"
    trace_const = "trace_const"


@dataclass(frozen=True)
class ImageSize:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Image size must be positive, got {self.width}x{self.height}")


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole intrinsics in pixels. The principal point may be anywhere."""
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError("Focal lengths must be positive.")
        if not (np.isfinite(self.cx) and np.isfinite(self.cy)):
            raise ValueError("Principal point must be finite.")

    @property
    def K(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    @property
    def K_inv(self) -> np.ndarray:
        return np.array([
            [1.0 / self.fx, 0.0, -self.cx / self.fx],
            [0.0, 1.0 / self.fy, -self.cy / self.fy],
            [0.0, 0.0, 1.0],
        ])

    @classmethod
    def from_focal(cls, focal: float, size: ImageSize) -> "Intrinsics":
        """Square pixels with the principal point at the image centre."""
        return cls(focal, focal, size.width / 2.0, size.height / 2.0)


@dataclass(frozen=True)
class Pixel:
    u: float
    v: float


@dataclass(frozen=True)
class Ray:
    direction: Tuple[float, float, float]
    normalized: bool

    def as_array(self) -> np.ndarray:
        return np.asarray(self.direction, dtype=float)


@dataclass(frozen=True)
class BBox:
    """Square crop window. `scale` is source side over output side."""
    u0: float
    v0: float
    side: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.side > 0 and self.scale > 0):
            raise ValueError("BBox side and scale must be positive.")

    @property
    def center(self) -> Tuple[float, float]:
        return self.u0 + self.side / 2.0, self.v0 + self.side / 2.0

    @property
    def output_size(self) -> int:
        """Resolution of the crop the box is resampled to."""
        return int(round(self.side / self.scale))

    def contains(self, points: np.ndarray) -> bool:
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        return bool(np.all(
            (points[:, 0] >= self.u0) & (points[:, 0] <= self.u0 + self.side)
            & (points[:, 1] >= self.v0) & (points[:, 1] <= self.v0 + self.side)
        ))


@dataclass(frozen=True)
class RayMap:
    """Row-major grid of ray directions, shape (height, width, 3)."""
    width: int
    height: int
    rays: np.ndarray
    normalized: bool

    def __post_init__(self):
        if self.rays.shape != (self.height, self.width, 3):
            raise ValueError(f"Ray grid shape {self.rays.shape} does not match {self.height}x{self.width}")


@dataclass(frozen=True)
class CliffEncoding:
    values: Tuple[float, float, float]
    f_cliff: float = F_CLIFF


def focal_from_convention(convention: FocalConvention, size: ImageSize) -> float:
    convention = FocalConvention(convention)
    if convention is FocalConvention.fixed5000:
        return F_FIXED
    if convention is FocalConvention.diag_full:
        return float(np.hypot(size.width, size.height))
    if convention is FocalConvention.mean_wh:
        return (size.width + size.height) / 2.0
    return F_TRACE


def focal_zolly(scale: float, crop_height: float, depth: float) -> float:
    """Crop focal recovered from the human depth: f_crop = s*h*z/2."""
    return scale * crop_height * depth / 2.0


def project(point, K: Intrinsics) -> Pixel:
    x, y, z = (float(c) for c in point)
    if z <= 0:
        raise NonPositiveDepth(f"Point depth must be positive, got z={z}")
    return Pixel(K.fx * x / z + K.cx, K.fy * y / z + K.cy)


def project_points(points: np.ndarray, K: Intrinsics) -> np.ndarray:
    """Vectorised `project` over an (N, 3) array; returns (N, 2)."""
    points = np.asarray(points, dtype=float)
    z = points[..., 2]
    if np.any(z <= 0):
        bad = int(np.argmin(z))
        raise NonPositiveDepth(f"Point {bad} has non-positive depth z={z.flat[bad]}")
    u = K.fx * points[..., 0] / z + K.cx
    v = K.fy * points[..., 1] / z + K.cy
    return np.stack([u, v], axis=-1)


def project_weak(point, scale: float, trans2) -> Pixel:
    """Scaled orthographic projection; the depth coordinate is ignored."""
    x, y = float(point[0]), float(point[1])
    return Pixel(scale * x + float(trans2[0]), scale * y + float(trans2[1]))


def unproject_ray(p: Pixel, K: Intrinsics, normalize: bool = DEFAULT_NORMALIZE) -> Ray:
    d = np.array([(p.u - K.cx) / K.fx, (p.v - K.cy) / K.fy, 1.0])
    if normalize:
        d = d / np.linalg.norm(d)
    return Ray(tuple(float(c) for c in d), bool(normalize))


def crop_intrinsics(K: Intrinsics, box: BBox) -> Intrinsics:
    """Intrinsics of the resampled crop.

    Crop pixel (u', v') sees the same ray as full pixel
    (u0 + s*u', v0 + s*v'), so the bbox offset moves the principal point.
    """
    s = box.scale
    return Intrinsics(K.fx / s, K.fy / s, (K.cx - box.u0) / s, (K.cy - box.v0) / s)


def ray_map(K: Intrinsics, width: int, height: int, normalize: bool = DEFAULT_NORMALIZE) -> RayMap:
    if width < 1 or height < 1:
        raise ValueError("Ray map needs at least one pixel.")
    # pixel (j, i) is sampled at its centre
    u = np.arange(width, dtype=float) + 0.5
    v = np.arange(height, dtype=float) + 0.5
    uu, vv = np.meshgrid(u, v)
    rays = np.stack([(uu - K.cx) / K.fx, (vv - K.cy) / K.fy, np.ones_like(uu)], axis=-1)
    if normalize:
        rays = rays / np.linalg.norm(rays, axis=-1, keepdims=True)
    return RayMap(width, height, rays, bool(normalize))


def crop_ray_map(K: Intrinsics, box: BBox, normalize: bool = DEFAULT_NORMALIZE) -> RayMap:
    """Ray bundle of the bbox visual cone at the crop's output resolution."""
    n = box.output_size
    return ray_map(crop_intrinsics(K, box), n, n, normalize)


def crop_invariance_error(K: Intrinsics, box: BBox, normalize: bool = DEFAULT_NORMALIZE) -> float:
    """Largest relative deviation between crop rays and the full-image rays they stand for."""
    crop = crop_ray_map(K, box, normalize)
    n = crop.width
    idx = np.arange(n, dtype=float) + 0.5
    uu, vv = np.meshgrid(box.u0 + box.scale * idx, box.v0 + box.scale * idx)
    full = np.stack([(uu - K.cx) / K.fx, (vv - K.cy) / K.fy, np.ones_like(uu)], axis=-1)
    if normalize:
        full = full / np.linalg.norm(full, axis=-1, keepdims=True)
    dev = np.linalg.norm(crop.rays - full, axis=-1) / np.linalg.norm(full, axis=-1)
    return float(dev.max())


def squarify(u_min: float, v_min: float, u_max: float, v_max: float,
             margin: float = 0.0, output_size: int = None) -> BBox:
    """Square box around a rectangle: max side, enlarged by `margin`, centre kept."""
    side = max(u_max - u_min, v_max - v_min) * (1.0 + margin)
    if side <= 0:
        side = 1.0
    cu, cv = (u_min + u_max) / 2.0, (v_min + v_max) / 2.0
    scale = side / output_size if output_size else 1.0
    return BBox(cu - side / 2.0, cv - side / 2.0, side, scale)


def cliff_encoding(box: BBox, size: ImageSize) -> CliffEncoding:
    cu, cv = box.center
    cx_rel = cu - size.width / 2.0
    cy_rel = cv - size.height / 2.0
    return CliffEncoding((cx_rel / F_CLIFF, cy_rel / F_CLIFF, box.side / F_CLIFF))
