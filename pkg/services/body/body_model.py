"""
Procedural SMPL-shaped body model.

The template keeps SMPL's parameter interface (69 pose, 10 shape, 3 root
rotation, 3 translation) and its 24-joint kinematic tree. Geometry is
generated from a fixed seed: capsule surfaces per bone, a three-vertex ring
around every joint for the joint regressor, skinning weights from the two
nearest bones, an isotropic stature direction and horizontal girth fields.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.spatial.transform import Rotation

from services.errors import TooFewVertices
from . import body_config as cfg

logger = logging.getLogger(__name__)

# Relative size change per unit of beta[0]
STATURE_RATE = cfg.HEIGHT_PER_BETA0 / cfg.TEMPLATE_HEIGHT


@dataclass(frozen=True)
class SkeletonTemplate:
    parents: np.ndarray            # (24,) root has -1
    template_vertices: np.ndarray  # (V, 3)
    skin_weights: np.ndarray       # (V, 24)
    joint_regressor: np.ndarray    # (24, V)
    shape_dirs: np.ndarray         # (V, 3, 10)
    joint_names: List[str] = field(default_factory=lambda: list(cfg.JOINT_NAMES))

    @property
    def num_vertices(self) -> int:
        return self.template_vertices.shape[0]

    @property
    def num_joints(self) -> int:
        return self.parents.shape[0]

    @property
    def rest_offsets(self) -> np.ndarray:
        """Per-joint offset from the parent joint at beta = 0 (root: absolute)."""
        joints = self.joint_regressor @ self.template_vertices
        offsets = joints.copy()
        offsets[1:] -= joints[self.parents[1:]]
        return offsets


@dataclass(frozen=True)
class BodyParams:
    theta: np.ndarray         # (69,) axis-angle of joints 1..23
    beta: np.ndarray          # (10,)
    root_orient: np.ndarray   # (3,) axis-angle
    transl: np.ndarray        # (3,) metres, camera frame

    def __post_init__(self):
        for name, size in (("theta", 69), ("beta", 10), ("root_orient", 3), ("transl", 3)):
            arr = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if arr.shape != (size,):
                raise ValueError(f"{name} must have {size} values, got {arr.size}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, arr)
        angles = np.linalg.norm(self.full_pose, axis=1)
        if np.any(angles >= 2 * np.pi):
            raise ValueError("Every axis-angle rotation must be shorter than 2*pi.")

    @property
    def full_pose(self) -> np.ndarray:
        """(24, 3) axis-angles, root first."""
        return np.vstack([self.root_orient.reshape(1, 3), self.theta.reshape(-1, 3)])

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.theta, self.beta, self.root_orient, self.transl])

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "BodyParams":
        x = np.asarray(x, dtype=float)
        return cls(x[:69], x[69:79], x[79:82], x[82:85])

    @classmethod
    def zeros(cls) -> "BodyParams":
        return cls(np.zeros(69), np.zeros(10), np.zeros(3), np.zeros(3))

    def replace(self, **changes) -> "BodyParams":
        values = dict(theta=self.theta, beta=self.beta, root_orient=self.root_orient, transl=self.transl)
        values.update(changes)
        return BodyParams(**values)


@dataclass(frozen=True)
class BodyState:
    joints: np.ndarray    # (24, 3) kinematic joints
    vertices: np.ndarray  # (V, 3) skinned vertices


def _point_segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray):
    ab = b - a
    denom = float(ab @ ab)
    t = np.zeros(len(points)) if denom == 0 else np.clip((points - a) @ ab / denom, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return np.linalg.norm(points - closest, axis=1), closest


def _orthonormal_pair(axis: np.ndarray):
    axis = axis / np.linalg.norm(axis)
    helper = np.array([0.0, 0.0, 1.0]) if abs(axis[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return e1, e2


def _segments(joints: np.ndarray):
    """Capsules as (start, end, radius, skinning joint)."""
    segs = []
    for j in range(1, cfg.NUM_JOINTS):
        p = cfg.PARENTS[j]
        segs.append((joints[p], joints[j], cfg.BONE_RADII[j], p))
    for j, tip, radius in cfg.LEAF_CAPS:
        segs.append((joints[j], joints[j] + np.asarray(tip), radius, j))
    return segs


def _sample_capsules(segs, count: int, rng: np.random.Generator):
    lengths = np.array([np.linalg.norm(b - a) + 2 * r for a, b, r, _ in segs])
    areas = lengths * np.array([r for _, _, r, _ in segs])
    seg_idx = rng.choice(len(segs), size=count, p=areas / areas.sum())
    seg_idx.sort()
    points = np.zeros((count, 3))
    for i, s in enumerate(seg_idx):
        a, b, r, _ = segs[s]
        axis = b - a
        length = np.linalg.norm(axis)
        e1, e2 = _orthonormal_pair(axis)
        # position along the capsule including both hemispherical ends
        t = rng.uniform(-r, length + r)
        phi = rng.uniform(0.0, 2 * np.pi)
        overhang = max(-t, t - length, 0.0)
        rad = np.sqrt(max(r * r - overhang * overhang, 0.0))
        along = a + axis / length * t
        points[i] = along + rad * (np.cos(phi) * e1 + np.sin(phi) * e2)
    return points, seg_idx


def default_template(num_vertices: int = cfg.DEFAULT_NUM_VERTICES, seed: int = cfg.TEMPLATE_SEED) -> SkeletonTemplate:
    if num_vertices < cfg.MIN_VERTICES:
        raise TooFewVertices(f"Template needs at least {cfg.MIN_VERTICES} vertices, got {num_vertices}")
    rng = np.random.default_rng(seed)

    joints = np.asarray(cfg.REST_JOINTS, dtype=float)
    joints = joints - joints[0]

    # three ring vertices per joint whose offsets sum to exactly zero
    r = cfg.JOINT_RING_RADIUS
    h = r * np.sqrt(3.0) / 2.0
    ring = np.array([[r, 0.0, 0.0], [-r / 2.0, 0.0, h], [-r / 2.0, 0.0, -h]])
    ring_vertices = (joints[:, None, :] + ring[None, :, :]).reshape(-1, 3)

    segs = _segments(joints)
    surface, seg_idx = _sample_capsules(segs, num_vertices - cfg.MIN_VERTICES, rng)
    vertices = np.vstack([ring_vertices, surface])

    # uniform rescale about the pelvis to the target stature
    k = cfg.TEMPLATE_HEIGHT / np.ptp(vertices[:, cfg.UP_AXIS])
    vertices = vertices * k
    joints = joints * k
    segs = _segments(joints)

    n_ring = cfg.MIN_VERTICES
    regressor = np.zeros((cfg.NUM_JOINTS, num_vertices))
    for j in range(cfg.NUM_JOINTS):
        regressor[j, 3 * j:3 * j + 3] = 1.0 / 3.0

    # skin weights from the two nearest bones, inverse-distance blended
    dists = np.stack([_point_segment_distance(vertices, a, b)[0] for a, b, _, _ in segs], axis=1)
    order = np.argsort(dists, axis=1, kind="stable")[:, :2]
    weights = np.zeros((num_vertices, cfg.NUM_JOINTS))
    for v in range(num_vertices):
        s1, s2 = order[v]
        d1, d2 = dists[v, s1], dists[v, s2]
        w1 = 0.5 if d1 + d2 == 0 else d2 / (d1 + d2)
        weights[v, segs[s1][3]] += w1
        weights[v, segs[s2][3]] += 1.0 - w1

    y = vertices[:, cfg.UP_AXIS]
    proportion = np.zeros((num_vertices, 3))
    # soles and crown both drop by the same amount, so stature is unchanged
    proportion[:, cfg.UP_AXIS] = np.where(
        y < 0, -cfg.PROPORTION_PER_BETA * y / y.min(), -cfg.PROPORTION_PER_BETA * y / y.max())

    shape_dirs = np.zeros((num_vertices, 3, cfg.NUM_BETAS))
    shape_dirs[:, :, 0] = vertices * STATURE_RATE + proportion
    shape_dirs[:, :, cfg.PROPORTION_DIR] = proportion

    # girth fields: horizontal push away from the owning bone axis, surface only
    y_hat = (y - y.min()) / np.ptp(y)
    profiles = [
        np.ones_like(y_hat),
        np.cos(np.pi * y_hat), np.sin(np.pi * y_hat),
        np.cos(2 * np.pi * y_hat), np.sin(2 * np.pi * y_hat),
        np.cos(3 * np.pi * y_hat), np.sin(3 * np.pi * y_hat),
        np.cos(4 * np.pi * y_hat),
    ]
    radial = np.zeros((num_vertices, 3))
    for i, s in enumerate(seg_idx):
        a, b, _, _ = segs[s]
        _, closest = _point_segment_distance(vertices[n_ring + i:n_ring + i + 1], a, b)
        rho = vertices[n_ring + i] - closest[0]
        rho[cfg.UP_AXIS] = 0.0
        norm = np.linalg.norm(rho)
        if norm > 1e-9:
            radial[n_ring + i] = rho / norm
    for k_dir, profile in enumerate(profiles, start=1):
        shape_dirs[:, :, k_dir] = cfg.GIRTH_PER_BETA * profile[:, None] * radial

    logger.debug("Built template with %d vertices (scale %.6f)", num_vertices, k)
    return SkeletonTemplate(
        parents=np.asarray(cfg.PARENTS),
        template_vertices=vertices,
        skin_weights=weights,
        joint_regressor=regressor,
        shape_dirs=shape_dirs,
    )


def shape_blend(tpl: SkeletonTemplate, beta):
    """Rest vertices and rest joints for shape `beta`."""
    beta = np.asarray(beta, dtype=float).reshape(-1)
    vertices = tpl.template_vertices + np.einsum("vdk,k->vd", tpl.shape_dirs, beta)
    joints = tpl.joint_regressor @ vertices
    return vertices, joints


def _global_transforms(tpl: SkeletonTemplate, full_pose: np.ndarray, rest_joints: np.ndarray):
    local = Rotation.from_rotvec(full_pose).as_matrix()
    rots = np.zeros_like(local)
    trans = np.zeros_like(rest_joints)
    rots[0] = local[0]
    trans[0] = rest_joints[0]
    for j in range(1, tpl.num_joints):
        p = tpl.parents[j]
        rots[j] = rots[p] @ local[j]
        trans[j] = rots[p] @ (rest_joints[j] - rest_joints[p]) + trans[p]
    return rots, trans


def pose_joints(tpl: SkeletonTemplate, params: BodyParams) -> np.ndarray:
    """Kinematic joints only; skips skinning."""
    rest_joints = tpl.joint_regressor @ (
        tpl.template_vertices + np.einsum("vdk,k->vd", tpl.shape_dirs, params.beta))
    _, trans = _global_transforms(tpl, params.full_pose, rest_joints)
    return trans + params.transl


def forward(tpl: SkeletonTemplate, params: BodyParams) -> BodyState:
    rest_vertices, rest_joints = shape_blend(tpl, params.beta)
    rots, trans = _global_transforms(tpl, params.full_pose, rest_joints)

    # linear blend skinning with transforms relative to the rest joints
    rel_t = trans - np.einsum("jab,jb->ja", rots, rest_joints)
    blend_r = np.einsum("vj,jab->vab", tpl.skin_weights, rots)
    blend_t = tpl.skin_weights @ rel_t
    vertices = np.einsum("vab,vb->va", blend_r, rest_vertices) + blend_t

    return BodyState(joints=trans + params.transl, vertices=vertices + params.transl)


def height(tpl: SkeletonTemplate, beta) -> float:
    """Stature: extent of the shape-blended rest vertices along the up axis."""
    beta = np.asarray(beta, dtype=float).reshape(-1)
    up = tpl.template_vertices[:, cfg.UP_AXIS] + tpl.shape_dirs[:, cfg.UP_AXIS, :] @ beta
    return float(up.max() - up.min())


def uniform_scale_beta(beta, factor: float) -> np.ndarray:
    """Shape whose rest geometry is exactly `factor` times that of `beta`.

    Stature is isotropic scaling plus the proportion field, which beta[9]
    also spans, so the combination below rescales every shape offset.
    """
    beta = np.asarray(beta, dtype=float).reshape(-1)
    k = cfg.PROPORTION_DIR
    scaled = factor * beta
    scaled[0] = (factor * (1.0 + STATURE_RATE * beta[0]) - 1.0) / STATURE_RATE
    scaled[k] = factor * (beta[0] + beta[k]) - scaled[0]
    return scaled


def uniform_scale_beta_tangent(beta) -> np.ndarray:
    """d/dfactor of `uniform_scale_beta` at factor = 1."""
    beta = np.asarray(beta, dtype=float).reshape(-1)
    k = cfg.PROPORTION_DIR
    tangent = beta.copy()
    tangent[0] = (1.0 + STATURE_RATE * beta[0]) / STATURE_RATE
    tangent[k] = beta[0] + beta[k] - tangent[0]
    return tangent


def stature_beta(beta, factor: float) -> np.ndarray:
    """Change only beta[0] so that height is multiplied by `factor`."""
    beta = np.asarray(beta, dtype=float).reshape(-1).copy()
    beta[0] = (factor * (1.0 + STATURE_RATE * beta[0]) - 1.0) / STATURE_RATE
    return beta


def rest_bone_lengths(tpl: SkeletonTemplate, beta: Optional[np.ndarray] = None) -> np.ndarray:
    """Length of the bone ending at each non-root joint."""
    beta = np.zeros(cfg.NUM_BETAS) if beta is None else beta
    _, joints = shape_blend(tpl, beta)
    return np.linalg.norm(joints[1:] - joints[tpl.parents[1:]], axis=1)


def bone_lengths(joints: np.ndarray, parents) -> np.ndarray:
    parents = np.asarray(parents)
    return np.linalg.norm(joints[1:] - joints[parents[1:]], axis=1)
