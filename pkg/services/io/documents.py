"""
Reading and writing the JSON documents defined in `models`.
"""
import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from models import JointSequence, Sample, Template
from services.body.body_model import SkeletonTemplate, default_template
from services.errors import ParseError
from services.metrics.metrics import JointSeq

logger = logging.getLogger(__name__)

Doc = TypeVar("Doc", bound=BaseModel)


def read_document(path: Path, model: Type[Doc]) -> Doc:
    """Parse a JSON file into `model`; any failure becomes ParseError."""
    path = Path(path)
    try:
        return model.model_validate_json(path.read_text())
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e}") from e
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "document"
        raise ParseError(f"{path.name}: {where}: {first['msg']}") from e


def write_document(doc: BaseModel, path: Path) -> Path:
    path = Path(path)
    path.write_text(doc.model_dump_json(indent=2) + "\n")
    logger.info("Wrote %s", path)
    return path


def save_template(tpl: SkeletonTemplate, path: Path) -> Path:
    return write_document(Template.from_domain(tpl), path)


def load_template(path: Path = None) -> SkeletonTemplate:
    """Template from file, or the built-in procedural one."""
    if path is None:
        return default_template()
    return read_document(path, Template).to_domain()


def read_sequence(path: Path) -> JointSeq:
    """Joint sequence from JSON, or from a root-only CSV with columns frame,x,y,z."""
    path = Path(path)
    if path.suffix.lower() != ".csv":
        return read_document(path, JointSequence).to_domain()
    try:
        with path.open(newline="") as f:
            rows = list(csv.DictReader(f))
        roots = np.array([[float(r["x"]), float(r["y"]), float(r["z"])] for r in rows])
    except (OSError, KeyError, ValueError, TypeError) as e:
        raise ParseError(f"Invalid root CSV {path}: {e}") from e
    if roots.shape[0] == 0:
        raise ParseError(f"{path} has no rows")
    return JointSeq(roots[:, None, :])


def write_sequence(seq: JointSeq, path: Path) -> Path:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        write_csv(path, ["frame", "x", "y", "z"],
                  [[k, *seq.roots[k]] for k in range(seq.num_frames)])
        return path
    return write_document(JointSequence.from_domain(seq), path)


def write_samples(samples: Iterable[Sample], path: Path) -> Path:
    """JSON-lines dataset, one sample per line."""
    path = Path(path)
    with path.open("w") as f:
        for sample in samples:
            f.write(sample.model_dump_json() + "\n")
    logger.info("Wrote %s", path)
    return path


def read_samples(path: Path) -> List[Sample]:
    path = Path(path)
    samples = []
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e}") from e
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            samples.append(Sample.model_validate_json(line))
        except ValidationError as e:
            raise ParseError(f"{path.name}:{n}: {e.errors()[0]['msg']}") from e
    return samples


def _cell(value) -> str:
    # repr gives the shortest decimal that parses back to the same float
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.info("Wrote %s", path)
    return path
