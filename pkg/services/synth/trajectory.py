"""
Walking sequences along simple ground paths, seen by a static or orbiting camera.

The world frame is y-up with the ground at y = 0. The body walks at
constant speed, facing along the path tangent.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from services.body.body_model import BodyParams, SkeletonTemplate, shape_blend
from services.body import body_config
from services.camera.camera import ImageSize, Intrinsics
from services.metrics.metrics import JointSeq
from . import synth_config as cfg
from .synth import Extrinsics, SceneSample, render_sample

logger = logging.getLogger(__name__)


class PathKind(str, Enum):
    line = "line"
    circle = "circle"
    figure_eight = "figure-eight"


class CameraMode(str, Enum):
    static = "static"
    orbiting = "orbiting"


@dataclass(frozen=True)
class TrajectorySpec:
    path: PathKind = PathKind.line
    length: float = cfg.PATH_LENGTH
    frames: int = cfg.NUM_FRAMES
    fps: float = cfg.FPS
    camera: CameraMode = CameraMode.static
    noise: float = 0.0
    seed: int = cfg.SEED
    image_size: ImageSize = field(default_factory=lambda: ImageSize(cfg.IMAGE_WIDTH, cfg.IMAGE_HEIGHT))
    focal: float = cfg.FOCAL

    def __post_init__(self):
        object.__setattr__(self, "path", PathKind(self.path))
        object.__setattr__(self, "camera", CameraMode(self.camera))
        if self.frames < 2:
            raise ValueError("A trajectory needs at least 2 frames.")
        if not self.length > 0 or not self.fps > 0 or not self.focal > 0:
            raise ValueError("length, fps and focal must be positive")
        if self.noise < 0:
            raise ValueError("Keypoint noise must be non-negative.")

    @property
    def intrinsics(self) -> Intrinsics:
        return Intrinsics.from_focal(self.focal, self.image_size)


def sample_path(kind: PathKind, length: float, frames: int) -> Tuple[np.ndarray, np.ndarray]:
    """Ground positions (frames, 2) as (x, z) and unit tangents at equal arc-length steps.

    Every path starts at the origin heading along +x. The circle has
    circumference `length`; the figure-eight is two tangent circles of half
    that circumference, the second one run the other way round.
    """
    s = length * np.arange(frames) / (frames - 1)
    kind = PathKind(kind)
    if kind is PathKind.line:
        pos = np.stack([s - length / 2.0, np.zeros_like(s)], axis=1)
        tangent = np.tile([1.0, 0.0], (frames, 1))
        return pos, tangent

    if kind is PathKind.circle:
        r = length / (2.0 * np.pi)
        phi = s / r
        sign = np.ones_like(s)
    else:
        r = length / (4.0 * np.pi)
        half = length / 2.0
        second = s > half
        phi = np.where(second, s - half, s) / r
        sign = np.where(second, -1.0, 1.0)
    pos = np.stack([r * np.sin(phi), sign * r * (1.0 - np.cos(phi))], axis=1)
    tangent = np.stack([np.cos(phi), sign * np.sin(phi)], axis=1)
    return pos, tangent


def gait_pose(distance: float) -> np.ndarray:
    """Hip, knee and arm swing after walking `distance` metres; (69,) axis-angles."""
    phase = 2.0 * np.pi * distance / cfg.STRIDE_LENGTH
    theta = np.zeros(3 * body_config.NUM_POSE_JOINTS)

    def set_axis(joint: int, axis: int, angle: float):
        theta[3 * (joint - 1) + axis] = angle

    set_axis(1, 0, cfg.HIP_SWING * np.sin(phase))       # left_hip
    set_axis(2, 0, -cfg.HIP_SWING * np.sin(phase))      # right_hip
    set_axis(4, 0, cfg.KNEE_BEND * 0.5 * (1.0 - np.cos(phase)))
    set_axis(5, 0, cfg.KNEE_BEND * 0.5 * (1.0 + np.cos(phase)))
    set_axis(16, 1, cfg.ARM_SWING * np.sin(phase))      # left_shoulder
    set_axis(17, 1, cfg.ARM_SWING * np.sin(phase))
    return theta


def pelvis_height(tpl: SkeletonTemplate, beta=None) -> float:
    """Height of the pelvis above the soles at rest."""
    beta = np.zeros(body_config.NUM_BETAS) if beta is None else beta
    vertices, _ = shape_blend(tpl, beta)
    return float(-vertices[:, body_config.UP_AXIS].min())


def camera_path(spec: TrajectorySpec, roots: np.ndarray) -> List[Extrinsics]:
    """Per-frame extrinsics: a fixed camera, or one circling the path centroid once."""
    centroid = roots.mean(axis=0)
    extent = float(np.max(np.linalg.norm((roots - centroid)[:, [0, 2]], axis=1)))
    radius = extent + cfg.CAMERA_STANDOFF
    target = centroid
    if spec.camera is CameraMode.static:
        eye = np.array([centroid[0], cfg.CAMERA_EYE_HEIGHT, centroid[2] - radius])
        return [Extrinsics.look_at(eye, target)] * spec.frames

    cameras = []
    for k in range(spec.frames):
        angle = 2.0 * np.pi * k / spec.frames
        eye = np.array([
            centroid[0] + radius * np.sin(angle),
            cfg.CAMERA_EYE_HEIGHT,
            centroid[2] - radius * np.cos(angle),
        ])
        cameras.append(Extrinsics.look_at(eye, target))
    return cameras


def make_trajectory(spec: TrajectorySpec, tpl: SkeletonTemplate) -> Tuple[JointSeq, List[SceneSample]]:
    """Ground-truth world joints and one rendered sample per frame."""
    ground, tangent = sample_path(spec.path, spec.length, spec.frames)
    arc = spec.length * np.arange(spec.frames) / (spec.frames - 1)
    root_y = pelvis_height(tpl)
    roots = np.stack([ground[:, 0], np.full(spec.frames, root_y), ground[:, 1]], axis=1)
    yaw = np.arctan2(tangent[:, 0], tangent[:, 1])
    cameras = camera_path(spec, roots)
    K = spec.intrinsics

    seeds = np.random.SeedSequence(spec.seed).spawn(spec.frames)
    samples = []
    for k in range(spec.frames):
        extr = cameras[k]
        body_rot = Rotation.from_rotvec([0.0, yaw[k], 0.0]).as_matrix()
        params = BodyParams(
            theta=gait_pose(arc[k]),
            beta=np.zeros(body_config.NUM_BETAS),
            root_orient=Rotation.from_matrix(extr.rotation @ body_rot).as_rotvec(),
            transl=extr.rotation @ roots[k] + extr.translation,
        )
        samples.append(render_sample(tpl, params, K, extr, spec.noise, seeds[k], spec.image_size))

    gt = JointSeq(np.stack([s.world_joints for s in samples]), frame_rate=spec.fps)
    logger.info("Generated %d frames along a %s path (%.2f m), %s camera",
                spec.frames, spec.path.value, spec.length, spec.camera.value)
    return gt, samples


def camera_sequence(samples: List[SceneSample], fps: float = cfg.FPS) -> JointSeq:
    """Camera-frame joints of the samples, for ERVE."""
    return JointSeq(np.stack([s.cam_joints for s in samples]), frame_rate=fps)
