import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from splatcut.scene import Camera, GaussianScene


def make_random_scene(n=100, seed=0, spread=1.0, z_center=4.0,
                      scale_range=(0.05, 0.3), opacity_range=(0.2, 1.0),
                      rich_sh=True) -> GaussianScene:
    rng = np.random.RandomState(seed)
    positions = rng.uniform(-spread, spread, (n, 3))
    positions[:, 2] += z_center
    sh = np.zeros((n, 48))
    sh[:, :3] = rng.uniform(-1.5, 1.5, (n, 3))
    if rich_sh:
        sh[:, 3:] = rng.normal(0.0, 0.1, (n, 45))
    scales = rng.uniform(*scale_range, (n, 3))
    rotations = rng.normal(size=(n, 4))
    opacities = rng.uniform(*opacity_range, n)
    return GaussianScene.from_arrays(positions, sh, scales, rotations, opacities)


def make_camera(width=64, height=64, f=None, cam_id=0, name="cam") -> Camera:
    f = float(f if f is not None else width)
    return Camera(
        id=cam_id, image_name=name, width=width, height=height,
        fx=f, fy=f, cx=width / 2.0, cy=height / 2.0,
        rotation=np.eye(3), translation=np.zeros(3),
    )


@pytest.fixture
def random_scene():
    return make_random_scene()


@pytest.fixture
def camera():
    return make_camera()


@pytest.fixture(params=["active", "pure"])
def backend_mode(request, monkeypatch):
    """Run a test under the default backend and under the pure fallback."""
    if request.param == "pure":
        monkeypatch.setenv("SPLATCUT_PURE", "1")
    else:
        monkeypatch.delenv("SPLATCUT_PURE", raising=False)
    return request.param
