"""
Synthetic metric scenes: bodies at known camera-frame positions, their
projected keypoints and crops, and the camera/world coordinate changes.

Extrinsics map world to camera: x_cam = R x_world + t.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from services.body.body_model import BodyParams, SkeletonTemplate, pose_joints, stature_beta, uniform_scale_beta
from services.camera.camera import BBox, ImageSize, Intrinsics, project_points, squarify
from services.camera.camera_config import CROP_RESOLUTION
from services.errors import BehindCamera
from . import synth_config as cfg

logger = logging.getLogger(__name__)

Seed = Union[None, int, np.random.SeedSequence]


@dataclass(frozen=True)
class Extrinsics:
    rotation: np.ndarray      # (3, 3) world to camera
    translation: np.ndarray   # (3,) metres

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float).reshape(-1)
        if R.shape != (3, 3) or t.shape != (3,):
            raise ValueError("Extrinsics need a 3x3 rotation and a 3-vector translation.")
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-10) or abs(np.linalg.det(R) - 1.0) > 1e-10:
            raise ValueError("Extrinsic rotation must be orthonormal with det +1.")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "Extrinsics":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def look_at(cls, eye, target, up=(0.0, 1.0, 0.0)) -> "Extrinsics":
        """Camera at `eye` looking at `target`; image y points away from `up`."""
        eye = np.asarray(eye, dtype=float)
        z = np.asarray(target, dtype=float) - eye
        z /= np.linalg.norm(z)
        up = np.asarray(up, dtype=float)
        y = -(up - (up @ z) * z)
        y /= np.linalg.norm(y)
        x = np.cross(y, z)
        R = np.stack([x, y, z])
        return cls(R, -R @ eye)

    @property
    def center(self) -> np.ndarray:
        return -self.rotation.T @ self.translation

    def as_matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.rotation
        T[:3, 3] = self.translation
        return T


@dataclass(frozen=True)
class SceneSample:
    params: BodyParams         # camera frame
    kp2d: np.ndarray           # (24, 2) pixels
    confidence: np.ndarray     # (24,)
    bbox: BBox
    K: Intrinsics
    extrinsics: Extrinsics
    world_joints: np.ndarray   # (24, 3)
    cam_joints: np.ndarray     # (24, 3)
    image_size: ImageSize


def camera_to_world(joints_cam: np.ndarray, extr: Extrinsics) -> np.ndarray:
    joints_cam = np.asarray(joints_cam, dtype=float)
    return (joints_cam - extr.translation) @ extr.rotation


def world_to_camera(joints_world: np.ndarray, extr: Extrinsics) -> np.ndarray:
    joints_world = np.asarray(joints_world, dtype=float)
    return joints_world @ extr.rotation.T + extr.translation


def render_sample(tpl: SkeletonTemplate, params: BodyParams, K: Intrinsics,
                  extr: Extrinsics = Extrinsics.identity(), sigma_kp: float = 0.0, seed: Seed = None,
                  image_size: Optional[ImageSize] = None) -> SceneSample:
    """Project a camera-frame body and crop it the way a detector would."""
    if sigma_kp < 0:
        raise ValueError("Keypoint noise must be non-negative.")
    if image_size is None:
        image_size = ImageSize(int(round(2 * K.cx)), int(round(2 * K.cy)))

    joints = pose_joints(tpl, params)
    if np.any(joints[:, 2] <= 0):
        raise BehindCamera(f"{int(np.sum(joints[:, 2] <= 0))} joints are behind the camera")
    kp2d = project_points(joints, K)
    if sigma_kp > 0:
        rng = np.random.default_rng(seed)
        kp2d = kp2d + rng.normal(0.0, sigma_kp, size=kp2d.shape)

    inside = ((kp2d[:, 0] >= 0) & (kp2d[:, 0] < image_size.width)
              & (kp2d[:, 1] >= 0) & (kp2d[:, 1] < image_size.height))
    lo = kp2d.min(axis=0)
    hi = kp2d.max(axis=0)
    bbox = squarify(lo[0], lo[1], hi[0], hi[1], margin=cfg.BBOX_MARGIN, output_size=CROP_RESOLUTION)

    return SceneSample(
        params=params,
        kp2d=kp2d,
        confidence=inside.astype(float),
        bbox=bbox,
        K=K,
        extrinsics=extr,
        world_joints=camera_to_world(joints, extr),
        cam_joints=joints,
        image_size=image_size,
    )


def ambiguity_pair(tpl: SkeletonTemplate, base_params: BodyParams, K: Intrinsics, alpha: float,
                   mode: str = "height", image_size: Optional[ImageSize] = None) -> Tuple[SceneSample, SceneSample]:
    """Two bodies that project (nearly) to the same keypoints.

    Sample B scales the body by `alpha` and pushes it `alpha` times further away.
    mode "uniform" rescales every shape offset so the match is exact; mode
    "height" changes only the stature coefficient, as a real height change
    would, and matches up to the body's proportion change.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if mode == "uniform":
        beta_b = uniform_scale_beta(base_params.beta, alpha)
    elif mode == "height":
        beta_b = stature_beta(base_params.beta, alpha)
    else:
        raise ValueError(f"Unknown ambiguity mode '{mode}'")
    params_b = base_params.replace(beta=beta_b, transl=alpha * base_params.transl)
    return (render_sample(tpl, base_params, K, image_size=image_size),
            render_sample(tpl, params_b, K, image_size=image_size))


def kp2d_rms(a: SceneSample, b: SceneSample) -> float:
    return float(np.sqrt(np.mean(np.sum((a.kp2d - b.kp2d) ** 2, axis=1))))
