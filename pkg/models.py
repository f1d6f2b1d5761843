"""
Models module for the metric camera toolkit.
Defines the Pydantic documents read and written by the CLI and the HTTP API,
and their conversion to the numpy-backed types of `services/`.
"""
from enum import Enum
from typing import Annotated, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from services.body import body_config
from services.body.body_model import BodyParams, SkeletonTemplate
from services.camera.camera import BBox, FocalConvention, ImageSize, Intrinsics, RayMap
from services.fitting import fit_config
from services.fitting.fitting import FitProblem, FitResult, LossWeights
from services.fitting.solver import SolverConfig
from services.fitting.sweep import HeightSweepResult
from services.metrics import metrics_config
from services.metrics.metrics import JointSeq, MetricReport
from services.synth import synth_config
from services.synth.synth import Extrinsics, SceneSample
from services.synth.trajectory import CameraMode, PathKind, TrajectorySpec

Vec2 = Annotated[List[float], Field(min_length=2, max_length=2)]
Vec3 = Annotated[List[float], Field(min_length=3, max_length=3)]
Keypoint = Annotated[List[float], Field(min_length=3, max_length=3)]  # [u, v, confidence]


def _floats(a) -> List:
    return np.asarray(a, dtype=float).tolist()


class Camera(BaseModel):
    """Pinhole camera with the size of the image it belongs to."""
    fx: float = Field(..., gt=0)
    fy: float = Field(..., gt=0)
    cx: float
    cy: float
    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)

    def to_domain(self) -> Tuple[Intrinsics, ImageSize]:
        return Intrinsics(self.fx, self.fy, self.cx, self.cy), ImageSize(self.width, self.height)

    @classmethod
    def from_domain(cls, K: Intrinsics, size: ImageSize) -> "Camera":
        return cls(fx=K.fx, fy=K.fy, cx=K.cx, cy=K.cy, width=size.width, height=size.height)


class BoundingBox(BaseModel):
    """Square crop window; scale is source side over crop side."""
    u0: float
    v0: float
    side: float = Field(..., gt=0)
    scale: float = Field(1.0, gt=0)

    def to_domain(self) -> BBox:
        return BBox(self.u0, self.v0, self.side, self.scale)

    @classmethod
    def from_domain(cls, box: BBox) -> "BoundingBox":
        return cls(u0=box.u0, v0=box.v0, side=box.side, scale=box.scale)


class Body(BaseModel):
    """SMPL-style parameters: 23 joint rotations, 10 shape coefficients, root rotation, translation."""
    theta: List[float] = Field(default_factory=lambda: [0.0] * 69, min_length=69, max_length=69)
    beta: List[float] = Field(default_factory=lambda: [0.0] * 10, min_length=10, max_length=10)
    root_orient: Vec3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    transl: Vec3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])

    @model_validator(mode="after")
    def rotations_must_be_short(self):
        pose = np.vstack([np.reshape(self.root_orient, (1, 3)), np.reshape(self.theta, (-1, 3))])
        if np.any(np.linalg.norm(pose, axis=1) >= 2 * np.pi):
            raise ValueError("Every axis-angle rotation must be shorter than 2*pi")
        return self

    def to_domain(self) -> BodyParams:
        return BodyParams(np.array(self.theta), np.array(self.beta), np.array(self.root_orient), np.array(self.transl))

    @classmethod
    def from_domain(cls, params: BodyParams) -> "Body":
        return cls(theta=_floats(params.theta), beta=_floats(params.beta),
                   root_orient=_floats(params.root_orient), transl=_floats(params.transl))


class Template(BaseModel):
    """Serialized skeleton template."""
    version: Literal["bmtpl-1"] = body_config.TEMPLATE_VERSION
    joint_names: List[str]
    parents: List[int]
    vertices: List[Vec3]
    weights: List[List[float]]
    regressor: List[List[float]]
    shape_dirs: List[List[List[float]]]

    @model_validator(mode="after")
    def shapes_must_agree(self):
        n_v = len(self.vertices)
        n_j = len(self.parents)
        if len(self.joint_names) != n_j:
            raise ValueError("joint_names and parents differ in length")
        if np.shape(self.weights) != (n_v, n_j):
            raise ValueError("weights must be (vertices, joints)")
        if np.shape(self.regressor) != (n_j, n_v):
            raise ValueError("regressor must be (joints, vertices)")
        if np.shape(self.shape_dirs) != (n_v, 3, body_config.NUM_BETAS):
            raise ValueError("shape_dirs must be (vertices, 3, 10)")
        return self

    def to_domain(self) -> SkeletonTemplate:
        return SkeletonTemplate(
            parents=np.array(self.parents, dtype=int),
            template_vertices=np.array(self.vertices, dtype=float),
            skin_weights=np.array(self.weights, dtype=float),
            joint_regressor=np.array(self.regressor, dtype=float),
            shape_dirs=np.array(self.shape_dirs, dtype=float),
            joint_names=list(self.joint_names),
        )

    @classmethod
    def from_domain(cls, tpl: SkeletonTemplate) -> "Template":
        return cls(
            joint_names=list(tpl.joint_names),
            parents=[int(p) for p in tpl.parents],
            vertices=_floats(tpl.template_vertices),
            weights=_floats(tpl.skin_weights),
            regressor=_floats(tpl.joint_regressor),
            shape_dirs=_floats(tpl.shape_dirs),
        )


class TemplateSummary(BaseModel):
    version: str
    num_vertices: int
    num_joints: int
    joint_names: List[str]
    parents: List[int]
    height: float


class Weights(BaseModel):
    w_2d: float = Field(fit_config.W_2D, ge=0)
    w_mimic_pose: float = Field(fit_config.W_MIMIC_POSE, ge=0)
    w_mimic_shape: float = Field(fit_config.W_MIMIC_SHAPE, ge=0)
    w_measure: float = Field(fit_config.W_MEASURE, ge=0)

    @model_validator(mode="after")
    def one_weight_must_be_positive(self):
        if not any(w > 0 for w in (self.w_2d, self.w_mimic_pose, self.w_mimic_shape, self.w_measure)):
            raise ValueError("At least one loss weight must be positive")
        return self

    def to_domain(self) -> LossWeights:
        return LossWeights(self.w_2d, self.w_mimic_pose, self.w_mimic_shape, self.w_measure)


class Solver(BaseModel):
    max_iters: int = Field(fit_config.MAX_ITERS, gt=0)
    initial_damping: float = Field(fit_config.INITIAL_DAMPING, gt=0)
    damping_up: float = Field(fit_config.DAMPING_UP, gt=1)
    damping_down: float = Field(fit_config.DAMPING_DOWN, gt=0, lt=1)
    convergence_tol: float = Field(fit_config.CONVERGENCE_TOL, gt=0)
    jacobian_step: float = Field(fit_config.JACOBIAN_STEP, gt=0)

    def to_domain(self) -> SolverConfig:
        return SolverConfig(**self.model_dump())


class Problem(BaseModel):
    """Fit problem: 24 keypoints [u, v, confidence], camera, optional mimic reference and height."""
    keypoints: List[Keypoint] = Field(..., min_length=body_config.NUM_JOINTS, max_length=body_config.NUM_JOINTS)
    camera: Camera
    reference: Optional[Body] = None
    target_height: Optional[float] = Field(None, gt=0)
    init: Optional[Body] = None

    @field_validator("keypoints")
    @classmethod
    def confidence_must_be_unit_interval(cls, v):
        for *_, conf in v:
            if not 0.0 <= conf <= 1.0:
                raise ValueError("Keypoint confidence must lie in [0, 1]")
        return v

    def to_domain(self, tpl: SkeletonTemplate) -> FitProblem:
        kp = np.asarray(self.keypoints, dtype=float)
        K, _ = self.camera.to_domain()
        return FitProblem(
            target_kp2d=kp[:, :2],
            confidence=kp[:, 2],
            K=K,
            template=tpl,
            reference_params=self.reference.to_domain() if self.reference is not None else None,
            target_height=self.target_height,
        )

    @classmethod
    def from_domain(cls, prob: FitProblem, size: ImageSize, init: Optional[BodyParams] = None) -> "Problem":
        kp = np.column_stack([prob.target_kp2d, prob.confidence])
        return cls(
            keypoints=_floats(kp),
            camera=Camera.from_domain(prob.K, size),
            reference=Body.from_domain(prob.reference_params) if prob.reference_params is not None else None,
            target_height=prob.target_height,
            init=Body.from_domain(init) if init is not None else None,
        )


class FitRequest(BaseModel):
    problem: Problem
    weights: Weights = Field(default_factory=Weights)
    solver: Solver = Field(default_factory=Solver)


class FitOutcome(BaseModel):
    """Fit result with its per-term cost breakdown."""
    version: Literal["fit-1"] = fit_config.RESULT_VERSION
    params: Body
    final_cost: float = Field(..., ge=0)
    mean_kp2d_error: float = Field(..., ge=0)
    iterations: int = Field(..., ge=0)
    converged: bool
    breakdown: Dict[str, float]
    joints: List[Vec3]
    depth: float
    achieved_height: float

    @classmethod
    def from_domain(cls, result: FitResult) -> "FitOutcome":
        return cls(
            params=Body.from_domain(result.params),
            final_cost=result.final_cost,
            mean_kp2d_error=result.mean_kp2d_error,
            iterations=result.iterations,
            converged=result.converged,
            breakdown=result.breakdown,
            joints=_floats(result.joints),
            depth=result.depth,
            achieved_height=result.achieved_height,
        )


class SweepRequest(BaseModel):
    problem: Problem
    heights: List[float] = Field(..., min_length=1)
    weights: Weights = Field(default_factory=lambda: Weights(w_mimic_shape=fit_config.SWEEP_W_MIMIC_SHAPE))
    solver: Solver = Field(default_factory=Solver)

    @field_validator("heights")
    @classmethod
    def heights_must_be_positive(cls, v):
        if any(h <= 0 for h in v):
            raise ValueError("Heights must be positive")
        return v


class SweepEntry(BaseModel):
    height_m: float
    mean_kp2d_px: Optional[float] = None
    depth_m: Optional[float] = None
    pa_mpjpe_to_reference_mm: Optional[float] = None
    error: Optional[str] = None


class SweepOutcome(BaseModel):
    entries: List[SweepEntry]
    pa_mpjpe_matrix: List[List[Optional[float]]]
    max_pairwise_pa_mpjpe: float

    @classmethod
    def from_domain(cls, sweep: HeightSweepResult) -> "SweepOutcome":
        entries = []
        for i, (h, f) in enumerate(zip(sweep.heights, sweep.fits)):
            ref = sweep.reference_pa_mpjpe[i] if sweep.reference_pa_mpjpe else None
            if f is None:
                entries.append(SweepEntry(height_m=h, error=sweep.failures[i]))
            else:
                entries.append(SweepEntry(height_m=h, mean_kp2d_px=f.mean_kp2d_error, depth_m=f.depth,
                                          pa_mpjpe_to_reference_mm=ref))
        matrix = [[None if np.isnan(x) else float(x) for x in row] for row in sweep.pa_mpjpe_matrix]
        return cls(entries=entries, pa_mpjpe_matrix=matrix, max_pairwise_pa_mpjpe=sweep.max_pairwise_pa_mpjpe)


class JointSequence(BaseModel):
    """Joint sequence in metres: T frames of J joints."""
    version: Literal["seq-1"] = metrics_config.SEQUENCE_VERSION
    fps: float = Field(30.0, gt=0)
    joints: List[List[Vec3]] = Field(..., min_length=1)
    valid: Optional[List[bool]] = None

    @model_validator(mode="after")
    def frames_must_agree(self):
        n = len(self.joints[0])
        if n == 0 or any(len(frame) != n for frame in self.joints):
            raise ValueError("Every frame must have the same non-zero number of joints")
        if self.valid is not None and len(self.valid) != len(self.joints):
            raise ValueError("valid must have one entry per frame")
        return self

    def to_domain(self) -> JointSeq:
        valid = np.array(self.valid, dtype=bool) if self.valid is not None else None
        return JointSeq(np.array(self.joints, dtype=float), frame_rate=self.fps, valid=valid)

    @classmethod
    def from_domain(cls, seq: JointSeq) -> "JointSequence":
        valid = None if bool(np.all(seq.valid)) else [bool(v) for v in seq.valid]
        return cls(fps=seq.frame_rate, joints=_floats(seq.frames), valid=valid)


class RteAlignment(str, Enum):
    yaw = "yaw"
    rigid = "rigid"
    translation = "translation"


class EvaluateRequest(BaseModel):
    pred: JointSequence
    gt: JointSequence
    pred_cam: Optional[JointSequence] = None
    gt_cam: Optional[JointSequence] = None
    local: bool = True
    world: bool = True
    rte_alignment: RteAlignment = RteAlignment(metrics_config.RTE_ALIGNMENT)


class Report(BaseModel):
    version: Literal["report-1"] = metrics_config.REPORT_VERSION
    mpjpe: Optional[float] = None
    pa_mpjpe: Optional[float] = None
    pve: Optional[float] = None
    wa_mpjpe_100: Optional[float] = None
    w_mpjpe_100: Optional[float] = None
    rte: Optional[float] = None
    erve: Optional[float] = None

    @classmethod
    def from_domain(cls, report: MetricReport) -> "Report":
        return cls(**dict(report.items()))


class CameraExtrinsics(BaseModel):
    """World-to-camera rigid transform."""
    rotation: List[Vec3] = Field(default_factory=lambda: np.eye(3).tolist(), min_length=3, max_length=3)
    translation: Vec3 = Field(default_factory=lambda: [0.0, 0.0, 0.0])

    def to_domain(self) -> Extrinsics:
        return Extrinsics(np.array(self.rotation), np.array(self.translation))

    @classmethod
    def from_domain(cls, extr: Extrinsics) -> "CameraExtrinsics":
        return cls(rotation=_floats(extr.rotation), translation=_floats(extr.translation))


class Trajectory(BaseModel):
    """Synthetic sequence specification."""
    path: PathKind = PathKind.line
    length: float = Field(synth_config.PATH_LENGTH, gt=0)
    frames: int = Field(synth_config.NUM_FRAMES, ge=2)
    fps: float = Field(synth_config.FPS, gt=0)
    camera: CameraMode = CameraMode.static
    noise: float = Field(0.0, ge=0)
    seed: int = synth_config.SEED
    width: int = Field(synth_config.IMAGE_WIDTH, ge=1)
    height: int = Field(synth_config.IMAGE_HEIGHT, ge=1)
    focal: float = Field(synth_config.FOCAL, gt=0)

    def to_domain(self) -> TrajectorySpec:
        return TrajectorySpec(
            path=self.path, length=self.length, frames=self.frames, fps=self.fps, camera=self.camera,
            noise=self.noise, seed=self.seed, image_size=ImageSize(self.width, self.height), focal=self.focal,
        )


class Sample(BaseModel):
    """One rendered frame; a line of a synth-1 dataset."""
    version: Literal["synth-1"] = synth_config.DATASET_VERSION
    frame: int = 0
    params: Body
    keypoints: List[Keypoint]
    bbox: BoundingBox
    camera: Camera
    extrinsics: CameraExtrinsics
    world_joints: List[Vec3]
    cam_joints: List[Vec3]

    @classmethod
    def from_domain(cls, sample: SceneSample, frame: int = 0) -> "Sample":
        return cls(
            frame=frame,
            params=Body.from_domain(sample.params),
            keypoints=_floats(np.column_stack([sample.kp2d, sample.confidence])),
            bbox=BoundingBox.from_domain(sample.bbox),
            camera=Camera.from_domain(sample.K, sample.image_size),
            extrinsics=CameraExtrinsics.from_domain(sample.extrinsics),
            world_joints=_floats(sample.world_joints),
            cam_joints=_floats(sample.cam_joints),
        )

    def to_problem(self, target_height: Optional[float] = None, with_reference: bool = True) -> Problem:
        """Fit problem built from this frame's keypoints."""
        return Problem(
            keypoints=self.keypoints,
            camera=self.camera,
            reference=self.params if with_reference else None,
            target_height=target_height,
        )


class SampleRequest(BaseModel):
    params: Body
    camera: Camera
    extrinsics: CameraExtrinsics = Field(default_factory=CameraExtrinsics)
    sigma_kp: float = Field(0.0, ge=0)
    seed: Optional[int] = None


class AmbiguityMode(str, Enum):
    height = "height"
    uniform = "uniform"


class AmbiguityPairRequest(BaseModel):
    params: Body
    camera: Camera
    alpha: float = Field(..., gt=0)
    mode: AmbiguityMode = AmbiguityMode.height


class AmbiguityPairOutcome(BaseModel):
    a: Sample
    b: Sample
    kp2d_rms_px: float


class FocalRequest(BaseModel):
    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)
    convention: FocalConvention


class ProjectRequest(BaseModel):
    camera: Camera
    points: List[Vec3] = Field(..., min_length=1)


class UnprojectRequest(BaseModel):
    camera: Camera
    pixels: List[Vec2] = Field(..., min_length=1)
    normalize: bool = True


class CropRequest(BaseModel):
    camera: Camera
    bbox: BoundingBox


class RayMapRequest(BaseModel):
    camera: Camera
    bbox: Optional[BoundingBox] = None
    normalize: bool = True


class RayMapDocument(BaseModel):
    """Ray map as JSON: rays listed row-major, one [x, y, z] per pixel."""
    width: int = Field(..., ge=1)
    height: int = Field(..., ge=1)
    normalized: bool
    rays: List[Vec3]
    crop_invariance_error: Optional[float] = None

    @model_validator(mode="after")
    def one_ray_per_pixel(self):
        if len(self.rays) != self.width * self.height:
            raise ValueError(f"Expected {self.width * self.height} rays, got {len(self.rays)}")
        return self

    def to_domain(self) -> RayMap:
        rays = np.array(self.rays, dtype=float).reshape(self.height, self.width, 3)
        return RayMap(self.width, self.height, rays, self.normalized)

    @classmethod
    def from_domain(cls, rm: RayMap, crop_invariance_error: Optional[float] = None) -> "RayMapDocument":
        return cls(width=rm.width, height=rm.height, normalized=rm.normalized,
                   rays=_floats(rm.rays.reshape(-1, 3)), crop_invariance_error=crop_invariance_error)


class ShapeRequest(BaseModel):
    beta: List[float] = Field(..., min_length=10, max_length=10)
