import os
import tempfile

import numpy as np
import pytest

# Keep the app's materialized template out of the working tree
os.environ.setdefault("BODY_TEMPLATE_PATH", os.path.join(tempfile.mkdtemp(), "body_template.json"))

from services.body.body_model import BodyParams, default_template  # noqa: E402
from services.camera.camera import ImageSize, Intrinsics  # noqa: E402


def pytest_configure(config):
    """
    Register a custom marker for long-running numerical tests.
    """
    config.addinivalue_line(
        "markers", "slow: mark test as running full fits, sweeps or long sequences"
    )


@pytest.fixture(scope="session")
def template():
    return default_template()


@pytest.fixture(scope="session")
def image_size():
    return ImageSize(1920, 1080)


@pytest.fixture(scope="session")
def intrinsics(image_size):
    return Intrinsics.from_focal(1000.0, image_size)


def make_upright(seed: int = 0, depth: float = 4.0, pose_scale: float = 0.15) -> BodyParams:
    """Upright body facing the camera with a mild random pose and shape."""
    rng = np.random.default_rng(seed)
    return BodyParams(
        theta=rng.normal(0.0, pose_scale, 69),
        beta=rng.normal(0.0, 0.5, 10),
        root_orient=np.array([np.pi, 0.0, 0.0]) + rng.normal(0.0, 0.05, 3),
        transl=np.array([rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2), depth]),
    )


@pytest.fixture
def upright_params():
    return make_upright()
