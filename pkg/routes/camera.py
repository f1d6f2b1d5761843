from fastapi import APIRouter, HTTPException, status

from models import (
    BoundingBox, Camera, CropRequest, FocalRequest, ProjectRequest, RayMapDocument, RayMapRequest, UnprojectRequest,
)
from routes import as_http_error
from services.camera.camera import (
    FocalConvention, ImageSize, Pixel, cliff_encoding, crop_intrinsics, crop_invariance_error, crop_ray_map,
    focal_from_convention, project_points, ray_map, unproject_ray,
)
from services.errors import ToolkitError

router = APIRouter()

# Ray maps are returned inline; larger grids go through the CLI
MAX_RAYMAP_PIXELS = 512 * 512


@router.post("/focal")
def focal(request: FocalRequest):
    size = ImageSize(request.width, request.height)
    return {"convention": request.convention.value, "focal": focal_from_convention(request.convention, size)}


@router.get("/conventions")
def conventions():
    return [c.value for c in FocalConvention]


@router.post("/project")
def project(request: ProjectRequest):
    K, _ = request.camera.to_domain()
    try:
        pixels = project_points(request.points, K)
    except ToolkitError as e:
        raise as_http_error(e)
    return {"pixels": pixels.tolist()}


@router.post("/unproject")
def unproject(request: UnprojectRequest):
    K, _ = request.camera.to_domain()
    rays = [list(unproject_ray(Pixel(u, v), K, request.normalize).direction) for u, v in request.pixels]
    return {"rays": rays, "normalized": request.normalize}


@router.post("/crop-intrinsics", response_model=Camera)
def crop_camera(request: CropRequest):
    K, _ = request.camera.to_domain()
    box = request.bbox.to_domain()
    n = box.output_size
    if n < 1:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail="Crop resolves to less than one pixel."
        )
    return Camera.from_domain(crop_intrinsics(K, box), ImageSize(n, n))


@router.post("/raymap", response_model=RayMapDocument)
def raymap(request: RayMapRequest):
    K, size = request.camera.to_domain()
    if request.bbox is None:
        width, height = size.width, size.height
    else:
        width = height = request.bbox.to_domain().output_size
    if width * height > MAX_RAYMAP_PIXELS:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"Ray map of {width}x{height} is too large to return inline."
        )

    if request.bbox is None:
        rm = ray_map(K, width, height, request.normalize)
        error = None
    else:
        box = request.bbox.to_domain()
        rm = crop_ray_map(K, box, request.normalize)
        error = crop_invariance_error(K, box, request.normalize)
    return RayMapDocument.from_domain(rm, error)


@router.post("/cliff")
def cliff(camera: Camera, bbox: BoundingBox):
    _, size = camera.to_domain()
    enc = cliff_encoding(bbox.to_domain(), size)
    return {"values": list(enc.values), "f_cliff": enc.f_cliff}
