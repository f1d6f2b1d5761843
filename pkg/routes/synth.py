from typing import List

from fastapi import APIRouter, Depends, HTTPException, status

from models import AmbiguityPairOutcome, AmbiguityPairRequest, Sample, SampleRequest, Trajectory
from routes import as_http_error
from services.body.body_model import SkeletonTemplate
from services.body.template_store import get_template
from services.errors import ToolkitError
from services.synth.synth import ambiguity_pair, kp2d_rms, render_sample
from services.synth.trajectory import make_trajectory

router = APIRouter()

# Trajectories are returned inline; longer sequences go through the CLI
MAX_INLINE_FRAMES = 1000


@router.post("/sample", response_model=Sample)
def sample(request: SampleRequest, tpl: SkeletonTemplate = Depends(get_template)):
    K, size = request.camera.to_domain()
    try:
        scene = render_sample(tpl, request.params.to_domain(), K, request.extrinsics.to_domain(),
                              request.sigma_kp, request.seed, size)
    except (ToolkitError, ValueError) as e:
        raise as_http_error(e)
    return Sample.from_domain(scene)


@router.post("/trajectory", response_model=List[Sample])
def trajectory(spec: Trajectory, tpl: SkeletonTemplate = Depends(get_template)):
    if spec.frames > MAX_INLINE_FRAMES:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"At most {MAX_INLINE_FRAMES} frames can be returned inline."
        )
    try:
        _, samples = make_trajectory(spec.to_domain(), tpl)
    except ToolkitError as e:
        raise as_http_error(e)
    return [Sample.from_domain(s, frame=k) for k, s in enumerate(samples)]


@router.post("/ambiguity-pair", response_model=AmbiguityPairOutcome)
def pair(request: AmbiguityPairRequest, tpl: SkeletonTemplate = Depends(get_template)):
    K, size = request.camera.to_domain()
    try:
        a, b = ambiguity_pair(tpl, request.params.to_domain(), K, request.alpha, request.mode.value, size)
    except (ToolkitError, ValueError) as e:
        raise as_http_error(e)
    return AmbiguityPairOutcome(
        a=Sample.from_domain(a),
        b=Sample.from_domain(b),
        kp2d_rms_px=kp2d_rms(a, b),
    )
