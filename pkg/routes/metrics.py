from fastapi import APIRouter

from models import EvaluateRequest, Report
from routes import as_http_error
from services.errors import ToolkitError
from services.metrics.metrics import evaluate

router = APIRouter()


@router.post("/evaluate", response_model=Report)
def evaluate_sequences(request: EvaluateRequest):
    try:
        report = evaluate(
            request.pred.to_domain(),
            request.gt.to_domain(),
            local=request.local,
            world=request.world,
            pred_cam=request.pred_cam.to_domain() if request.pred_cam is not None else None,
            gt_cam=request.gt_cam.to_domain() if request.gt_cam is not None else None,
            rte_alignment=request.rte_alignment.value,
        )
    except ToolkitError as e:
        raise as_http_error(e)
    return Report.from_domain(report)
