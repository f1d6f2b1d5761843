#!/usr/bin/env python
"""
Command-line entry point: ray maps, fitting, the height sweep, metric
evaluation, synthetic datasets and the HTTP server.

Exit codes: 0 success, 1 usage, 2 unreadable input, 3 numerical failure.
"""
import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from models import (
    BoundingBox, Camera, FitOutcome, JointSequence, Problem, Report, Sample, SweepOutcome, Trajectory,
)
from services import __version__
from services.body.body_model import height
from services.camera.camera_config import CROP_INVARIANCE_TOL
from services.camera.camera import crop_invariance_error, crop_ray_map, ray_map
from services.camera.raymap_io import raymap_to_json, write_raymap
from services.errors import CropInvarianceViolation, ToolkitError, UsageError
from services.fitting import fit_config
from services.fitting.fitting import LossWeights, fit
from services.fitting.solver import SolverConfig
from services.fitting.sweep import height_sweep
from services.io.documents import (
    load_template, read_document, read_sequence, write_csv, write_document, write_samples, write_sequence,
)
from services.io.svg import sweep_chart
from services.metrics.metrics import evaluate
from services.synth.trajectory import camera_sequence, make_trajectory

logger = logging.getLogger("cli")


@dataclass
class CommandOutcome:
    exit_code: int = 0
    artifacts: List[Path] = field(default_factory=list)
    summary: str = ""


class ToolkitArgumentParser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(message)


def parse_range(text: str) -> List[float]:
    """'a:b:n' -> n evenly spaced values from a to b inclusive."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise UsageError(f"Expected a range like 1.6:1.8:5, got '{text}'")
    if n < 2:
        raise UsageError("A height sweep needs at least 2 heights.")
    if not (a > 0 and b > 0) or a == b:
        raise UsageError("Sweep bounds must be positive and distinct.")
    return np.linspace(a, b, n).tolist()


def _weights(args, default: LossWeights) -> LossWeights:
    return LossWeights(
        w_2d=default.w_2d if args.w_2d is None else args.w_2d,
        w_mimic_pose=default.w_mimic_pose if args.w_mimic_pose is None else args.w_mimic_pose,
        w_mimic_shape=default.w_mimic_shape if args.w_mimic_shape is None else args.w_mimic_shape,
        w_measure=default.w_measure if args.w_measure is None else args.w_measure,
    )


def _solver(args) -> SolverConfig:
    return SolverConfig(max_iters=args.max_iters, convergence_tol=args.tol)


def cmd_raymap(args) -> CommandOutcome:
    camera = read_document(args.camera, Camera)
    K, size = camera.to_domain()
    if args.bbox is None:
        rm = ray_map(K, size.width, size.height, args.normalize)
        error = None
        summary = f"ray map {rm.width}x{rm.height}"
    else:
        box = read_document(args.bbox, BoundingBox).to_domain()
        rm = crop_ray_map(K, box, args.normalize)
        error = crop_invariance_error(K, box, args.normalize)
        if error > CROP_INVARIANCE_TOL:
            raise CropInvarianceViolation(f"Crop rays deviate from the full-image rays by {error:.3e}")
        summary = f"crop ray map {rm.width}x{rm.height}, invariance error {error:.3e}"

    artifacts = [write_raymap(rm, args.out)]
    if args.json is not None:
        args.json.write_text(raymap_to_json(rm, error))
        artifacts.append(args.json)
    return CommandOutcome(0, artifacts, summary)


def cmd_fit(args) -> CommandOutcome:
    tpl = load_template(args.template)
    doc = read_document(args.problem, Problem)
    problem = doc.to_domain(tpl)
    init = doc.init.to_domain() if doc.init is not None else None
    result = fit(problem, _weights(args, LossWeights()), init, _solver(args))
    out = write_document(FitOutcome.from_domain(result), args.out)
    summary = f"mean 2D error {result.mean_kp2d_error:.4f} px, depth {result.depth:.4f} m"
    if not result.converged:
        summary += f" (not converged after {result.iterations} iterations)"
    return CommandOutcome(0, [out], summary)


def cmd_ambiguity(args) -> CommandOutcome:
    heights = parse_range(args.heights)
    tpl = load_template(args.template)
    doc = read_document(args.problem, Problem)
    problem = doc.to_domain(tpl)
    init = doc.init.to_domain() if doc.init is not None else None
    sweep = height_sweep(problem, heights, _weights(args, LossWeights.for_sweep()), init, _solver(args))
    outcome = SweepOutcome.from_domain(sweep)

    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [[e.height_m, e.mean_kp2d_px, e.depth_m, e.pa_mpjpe_to_reference_mm, e.error or ""]
            for e in outcome.entries]
    artifacts = [write_csv(out_dir / "sweep.csv",
                           ["height_m", "mean_kp2d_px", "depth_m", "pa_mpjpe_ref_mm", "error"], rows)]
    matrix_rows = [[h, *row] for h, row in zip(sweep.heights, outcome.pa_mpjpe_matrix)]
    artifacts.append(write_csv(out_dir / "pairwise_pa_mpjpe.csv",
                               ["height_m", *[repr(h) for h in sweep.heights]], matrix_rows))
    svg = out_dir / "sweep.svg"
    svg.write_text(sweep_chart(sweep.heights, [e.mean_kp2d_px for e in outcome.entries],
                               [e.pa_mpjpe_to_reference_mm for e in outcome.entries]))
    artifacts.append(svg)

    failed = sum(1 for f in sweep.fits if f is None)
    summary = f"{len(heights)} heights, max pairwise PA-MPJPE {sweep.max_pairwise_pa_mpjpe:.4f} mm"
    if failed:
        summary += f", {failed} failed"
    return CommandOutcome(0, artifacts, summary)


def cmd_eval(args) -> CommandOutcome:
    pred = read_sequence(args.pred)
    gt = read_sequence(args.gt)
    pred_cam = read_sequence(args.pred_cam) if args.pred_cam is not None else None
    gt_cam = read_sequence(args.gt_cam) if args.gt_cam is not None else None
    local, world = args.local, args.world
    if not local and not world:
        local = world = True
    report = evaluate(pred, gt, local=local, world=world, pred_cam=pred_cam, gt_cam=gt_cam,
                      rte_alignment=args.rte_alignment)
    artifacts = []
    if args.report is not None:
        artifacts.append(write_document(Report.from_domain(report), args.report))
    print(report.as_table())
    return CommandOutcome(0, artifacts, f"evaluated {pred.num_frames} frames")


def cmd_synth(args) -> CommandOutcome:
    spec_doc = read_document(args.spec, Trajectory) if args.spec is not None else Trajectory()
    if args.seed is not None:
        spec_doc = spec_doc.model_copy(update={"seed": args.seed})
    tpl = load_template(args.template)
    spec = spec_doc.to_domain()
    gt, samples = make_trajectory(spec, tpl)

    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    docs = [Sample.from_domain(s, frame=k) for k, s in enumerate(samples)]
    artifacts = [
        write_samples(docs, out_dir / "samples.jsonl"),
        write_sequence(gt, out_dir / "gt_world.json"),
        write_sequence(camera_sequence(samples, spec.fps), out_dir / "gt_cam.json"),
    ]
    # frame 0 as a fit problem, with the true stature as measurement
    first = docs[0]
    problem = first.to_problem(target_height=height(tpl, samples[0].params.beta))
    artifacts.append(write_document(problem, out_dir / "problem.json"))
    return CommandOutcome(0, artifacts, f"{spec.frames} frames along a {spec.path.value} path")


def cmd_serve(args) -> CommandOutcome:
    import uvicorn

    uvicorn.run("main:app", host=args.host, port=args.port)
    return CommandOutcome(0, [], "server stopped")


def _add_fit_flags(p: argparse.ArgumentParser):
    p.add_argument("--w-2d", type=float, default=None)
    p.add_argument("--w-mimic-pose", type=float, default=None)
    p.add_argument("--w-mimic-shape", type=float, default=None)
    p.add_argument("--w-measure", type=float, default=None)
    p.add_argument("--max-iters", type=int, default=fit_config.MAX_ITERS)
    p.add_argument("--tol", type=float, default=fit_config.CONVERGENCE_TOL, help="relative cost change")


def build_parser() -> argparse.ArgumentParser:
    parser = ToolkitArgumentParser(prog="metric-hmr", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="overrides the seed of generated data")
    parser.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    parser.add_argument("--template", type=Path, default=None, help="body template JSON (bmtpl-1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("raymap", help="export a full-image or crop ray map")
    p.add_argument("camera", type=Path)
    p.add_argument("--bbox", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--json", type=Path, default=None, help="also write the lossless JSON form")
    p.add_argument("--normalize", action="store_true", help="unit rays instead of z = 1")
    p.set_defaults(func=cmd_raymap)

    p = sub.add_parser("fit", help="fit the body to a keypoint problem")
    p.add_argument("problem", type=Path)
    p.add_argument("--out", type=Path, default=Path("fit_result.json"))
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("ambiguity", help="refit a problem across target heights")
    p.add_argument("problem", type=Path)
    p.add_argument("--heights", required=True, help="a:b:n")
    p.add_argument("--out-dir", type=Path, default=Path("sweep"))
    _add_fit_flags(p)
    p.set_defaults(func=cmd_ambiguity)

    p = sub.add_parser("eval", help="evaluate a predicted sequence against ground truth")
    p.add_argument("pred", type=Path)
    p.add_argument("gt", type=Path)
    p.add_argument("--pred-cam", type=Path, default=None)
    p.add_argument("--gt-cam", type=Path, default=None)
    p.add_argument("--report", type=Path, default=None)
    p.add_argument("--local", action="store_true", help="local metrics only (with --world: both)")
    p.add_argument("--world", action="store_true", help="world metrics only (with --local: both)")
    p.add_argument("--rte-alignment", choices=["yaw", "rigid", "translation"], default="yaw")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic walking sequence")
    p.add_argument("spec", type=Path, nargs="?", default=None)
    p.add_argument("--out", type=Path, default=Path("synth"))
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def run(argv: Optional[List[str]] = None) -> CommandOutcome:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except ToolkitError as e:
        return CommandOutcome(e.exit_code, [], f"{type(e).__name__}: {e}")
    except ValueError as e:
        # invariants of the domain types that the documents did not catch
        return CommandOutcome(2, [], f"InputError: {e}")


def main(argv: Optional[List[str]] = None) -> int:
    outcome = run(argv)
    if outcome.exit_code == 0:
        print(outcome.summary)
    else:
        print(f"error: {outcome.summary}", file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
