from fastapi import APIRouter, Depends

from models import Body, ShapeRequest, TemplateSummary
from services.body import body_config
from services.body.body_model import SkeletonTemplate, forward, height, rest_bone_lengths
from services.body.template_store import get_template

router = APIRouter()


@router.get("/template", response_model=TemplateSummary)
def template_summary(tpl: SkeletonTemplate = Depends(get_template)):
    return TemplateSummary(
        version=body_config.TEMPLATE_VERSION,
        num_vertices=tpl.num_vertices,
        num_joints=tpl.num_joints,
        joint_names=list(tpl.joint_names),
        parents=[int(p) for p in tpl.parents],
        height=height(tpl, [0.0] * body_config.NUM_BETAS),
    )


@router.post("/forward")
def body_forward(params: Body, include_vertices: bool = False, tpl: SkeletonTemplate = Depends(get_template)):
    state = forward(tpl, params.to_domain())
    result = {"joints": state.joints.tolist()}
    if include_vertices:
        result["vertices"] = state.vertices.tolist()
    return result


@router.post("/height")
def body_height(request: ShapeRequest, tpl: SkeletonTemplate = Depends(get_template)):
    return {
        "height": height(tpl, request.beta),
        "bone_lengths": rest_bone_lengths(tpl, request.beta).tolist(),
    }
