"""
Ray map export: a compact binary layout and a lossless JSON mirror.
"""
import struct
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import ValidationError

from models import RayMapDocument
from services.errors import ParseError
from .camera import RayMap
from .camera_config import RAYMAP_DTYPE, RAYMAP_HEADER_FORMAT, RAYMAP_MAGIC

HEADER_SIZE = struct.calcsize(RAYMAP_HEADER_FORMAT)


def raymap_to_bytes(rm: RayMap) -> bytes:
    header = struct.pack(RAYMAP_HEADER_FORMAT, RAYMAP_MAGIC, rm.width, rm.height)
    body = np.ascontiguousarray(rm.rays, dtype=RAYMAP_DTYPE).tobytes(order="C")
    return header + body


def is_homogeneous(rays: np.ndarray) -> bool:
    """True when every ray has z == 1 exactly."""
    return bool(np.all(rays[..., 2] == 1.0))


def raymap_from_bytes(data: bytes, normalized: Optional[bool] = None) -> RayMap:
    """Parse a binary ray map.

    The header carries no normalization flag; when `normalized` is not given it
    is read off the payload (z == 1 everywhere means homogeneous rays).
    """
    if len(data) < HEADER_SIZE:
        raise ParseError("Ray map file is shorter than its header.")
    magic, width, height = struct.unpack(RAYMAP_HEADER_FORMAT, data[:HEADER_SIZE])
    if magic != RAYMAP_MAGIC:
        raise ParseError(f"Bad ray map magic {magic!r}")
    expected = width * height * 3 * 8
    if len(data) - HEADER_SIZE != expected:
        raise ParseError(f"Ray map payload has {len(data) - HEADER_SIZE} bytes, expected {expected}")
    rays = np.frombuffer(data, dtype=RAYMAP_DTYPE, offset=HEADER_SIZE).reshape(height, width, 3).astype(float)
    if normalized is None:
        normalized = not is_homogeneous(rays)
    return RayMap(width, height, rays, normalized)


def write_raymap(rm: RayMap, path: Path) -> Path:
    path = Path(path)
    path.write_bytes(raymap_to_bytes(rm))
    return path


def read_raymap(path: Path, normalized: Optional[bool] = None) -> RayMap:
    return raymap_from_bytes(Path(path).read_bytes(), normalized)


def raymap_to_json(rm: RayMap, crop_invariance_error: Optional[float] = None) -> str:
    return RayMapDocument.from_domain(rm, crop_invariance_error).model_dump_json()


def raymap_from_json(text: str) -> RayMap:
    try:
        return RayMapDocument.model_validate_json(text).to_domain()
    except ValidationError as e:
        raise ParseError(f"Invalid ray map JSON: {e.errors()[0]['msg']}") from e
