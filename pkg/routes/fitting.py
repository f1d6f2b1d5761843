from fastapi import APIRouter, Depends

from models import FitOutcome, FitRequest, SweepOutcome, SweepRequest
from routes import as_http_error
from services.body.body_model import SkeletonTemplate
from services.body.template_store import get_template
from services.errors import ToolkitError
from services.fitting.fitting import fit
from services.fitting.sweep import height_sweep

router = APIRouter()


@router.post("/fit", response_model=FitOutcome)
def fit_problem(request: FitRequest, tpl: SkeletonTemplate = Depends(get_template)):
    try:
        problem = request.problem.to_domain(tpl)
        init = request.problem.init.to_domain() if request.problem.init is not None else None
        result = fit(problem, request.weights.to_domain(), init, request.solver.to_domain())
    except (ToolkitError, ValueError) as e:
        raise as_http_error(e)
    return FitOutcome.from_domain(result)


@router.post("/ambiguity", response_model=SweepOutcome)
def ambiguity_sweep(request: SweepRequest, tpl: SkeletonTemplate = Depends(get_template)):
    try:
        problem = request.problem.to_domain(tpl)
        init = request.problem.init.to_domain() if request.problem.init is not None else None
        sweep = height_sweep(problem, request.heights, request.weights.to_domain(), init,
                             request.solver.to_domain())
    except (ToolkitError, ValueError) as e:
        raise as_http_error(e)
    return SweepOutcome.from_domain(sweep)
