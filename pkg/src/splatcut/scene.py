"""Splat scene, camera, and mask containers plus their on-disk formats."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InputError, SchemaError

SH_DEGREE = 3
SH_BASES = (SH_DEGREE + 1) ** 2  # 16
SH_COEFFS = 3 * SH_BASES  # 48, three color channels per basis

# Vertex layout of the splat PLY format (all float32, this exact order).
PLY_PROPERTIES = (
    ["x", "y", "z", "nx", "ny", "nz"]
    + [f"f_dc_{i}" for i in range(3)]
    + [f"f_rest_{i}" for i in range(45)]
    + ["opacity"]
    + [f"scale_{i}" for i in range(3)]
    + [f"rot_{i}" for i in range(4)]
)
_N_PROPS = len(PLY_PROPERTIES)  # 62
_POS = slice(0, 3)
_DC = slice(6, 9)
_REST = slice(9, 54)
_OPACITY = 54
_SCALE = slice(55, 58)
_ROT = slice(58, 62)

# Internal SH layout is base-major ([base0 RGB, base1 RGB, ...]); the file
# stores the non-DC coefficients channel-major. This permutation maps file
# column j of f_rest to its internal column.
_REST_TO_SH = np.array([3 * (1 + j % 15) + j // 15 for j in range(45)])


def logistic(x):
    """Opacity activation."""
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=np.float64)))


def logit(p):
    """Inverse opacity activation; saturates to +/-inf at 0 and 1."""
    p = np.asarray(p, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.log(p) - np.log1p(-p)


@dataclass
class GaussianScene:
    """Columnar store of splat parameters plus per-splat foreground weight.

    All math-facing arrays are float64 with activations applied. ``stored``
    keeps the raw float32 vertex payload so that exporting a scene (or any
    subset of it) reproduces the serialized bytes exactly.
    """

    positions: np.ndarray  # (N, 3)
    sh: np.ndarray  # (N, 48), base-major, first 3 columns are the DC terms
    scales: np.ndarray  # (N, 3), positive
    rotations: np.ndarray  # (N, 4), unit quaternions (w, x, y, z)
    opacities: np.ndarray  # (N,), in [0, 1]
    weights: np.ndarray  # (N,), foreground likelihood in [0, 1]
    stored: np.ndarray  # (N, 62) float32 raw vertex payload

    @property
    def count(self) -> int:
        return self.positions.shape[0]

    @property
    def dc_colors(self) -> np.ndarray:
        """Zero-degree SH coefficients, (N, 3)."""
        return self.sh[:, :3]

    def validate(self) -> None:
        n = self.count
        if n < 1:
            raise InputError("scene must contain at least one splat")
        norms = np.linalg.norm(self.rotations, axis=1)
        if not np.all(np.abs(norms - 1.0) <= 1e-6):
            raise InputError("rotations are not unit quaternions")
        if not np.all(self.scales > 0):
            raise InputError("scales must be strictly positive")
        if not (np.all(self.opacities >= 0) and np.all(self.opacities <= 1)):
            raise InputError("opacities must lie in [0, 1]")
        if not (np.all(self.weights >= 0) and np.all(self.weights <= 1)):
            raise InputError("weights must lie in [0, 1]")

    @classmethod
    def from_arrays(cls, positions, sh, scales, rotations, opacities, weights=None):
        """Build a scene from activated arrays, synthesizing the raw payload."""
        positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
        n = positions.shape[0]
        sh = np.asarray(sh, dtype=np.float64).reshape(n, SH_COEFFS)
        scales = np.asarray(scales, dtype=np.float64).reshape(n, 3)
        rotations = np.asarray(rotations, dtype=np.float64).reshape(n, 4)
        rotations = rotations / np.linalg.norm(rotations, axis=1, keepdims=True)
        opacities = np.asarray(opacities, dtype=np.float64).reshape(n)
        if weights is None:
            weights = np.zeros(n)
        weights = np.asarray(weights, dtype=np.float64).reshape(n)

        stored = np.zeros((n, _N_PROPS), dtype=np.float32)
        stored[:, _POS] = positions
        stored[:, _DC] = sh[:, :3]
        stored[:, _REST] = sh[:, _REST_TO_SH]
        stored[:, _OPACITY] = logit(opacities)
        stored[:, _SCALE] = np.log(scales)
        stored[:, _ROT] = rotations

        scene = cls(positions, sh, scales, rotations, opacities, weights, stored)
        scene.validate()
        return scene

    def with_weights(self, weights) -> "GaussianScene":
        """Copy of the scene with the weight column replaced wholesale."""
        weights = np.asarray(weights, dtype=np.float64).reshape(self.count)
        return GaussianScene(
            self.positions, self.sh, self.scales, self.rotations,
            self.opacities, weights, self.stored,
        )


def _scene_from_stored(stored: np.ndarray) -> GaussianScene:
    stored64 = stored.astype(np.float64)
    positions = stored64[:, _POS]
    sh = np.empty((stored.shape[0], SH_COEFFS))
    sh[:, :3] = stored64[:, _DC]
    sh[:, _REST_TO_SH] = stored64[:, _REST]
    opacities = logistic(stored64[:, _OPACITY])
    scales = np.exp(stored64[:, _SCALE])
    rotations = stored64[:, _ROT]
    norms = np.linalg.norm(rotations, axis=1)
    if np.any(norms == 0):
        bad = int(np.flatnonzero(norms == 0)[0])
        raise SchemaError(f"zero-norm quaternion at vertex {bad}")
    rotations = rotations / norms[:, None]
    weights = np.zeros(stored.shape[0])
    scene = GaussianScene(positions, sh, scales, rotations, opacities, weights, stored)
    scene.validate()
    return scene


def _read_ply_header(fh) -> int:
    line = fh.readline().strip()
    if line != b"ply":
        raise SchemaError("not a PLY file")
    if fh.readline().strip() != b"format binary_little_endian 1.0":
        raise SchemaError("expected binary little-endian PLY")
    count = None
    props: list[str] = []
    while True:
        raw = fh.readline()
        if not raw:
            raise SchemaError("unterminated PLY header")
        line = raw.strip().decode("ascii")
        if line == "end_header":
            break
        if line.startswith("comment"):
            continue
        if line.startswith("element vertex"):
            count = int(line.split()[-1])
        elif line.startswith("element"):
            raise SchemaError(f"unsupported element: {line.split()[1]}")
        elif line.startswith("property"):
            parts = line.split()
            if parts[1] != "float":
                raise SchemaError(f"property {parts[-1]} is not float32")
            props.append(parts[-1])
    if count is None:
        raise SchemaError("missing vertex element")
    for i, name in enumerate(PLY_PROPERTIES):
        if i >= len(props):
            raise SchemaError(f"missing property {name}")
        if props[i] != name:
            raise SchemaError(f"unexpected property {props[i]} (expected {name})")
    if len(props) > _N_PROPS:
        raise SchemaError(f"unexpected property {props[_N_PROPS]}")
    return count


def load_splat_model(path) -> GaussianScene:
    """Load a binary splat PLY, applying parameter activations."""
    path = Path(path)
    with open(path, "rb") as fh:
        count = _read_ply_header(fh)
        if count == 0:
            raise InputError(f"{path}: empty scene (zero vertices)")
        payload = fh.read(count * _N_PROPS * 4)
    if len(payload) != count * _N_PROPS * 4:
        raise SchemaError(f"{path}: truncated vertex payload")
    stored = np.frombuffer(payload, dtype="<f4").reshape(count, _N_PROPS).copy()
    return _scene_from_stored(stored)


def _coerce_labels(labels, n: int) -> np.ndarray:
    arr = np.asarray(getattr(labels, "labels", labels), dtype=bool).reshape(-1)
    if arr.shape[0] != n:
        raise InputError(f"labels length {arr.shape[0]} != scene size {n}")
    return arr


def _splat_payload(scene: GaussianScene, labels, side: str) -> tuple[bytes, int]:
    if side not in ("fg", "bg", "all"):
        raise InputError(f"unknown side: {side}")
    if side == "all":
        keep = np.ones(scene.count, dtype=bool)
    else:
        arr = _coerce_labels(labels, scene.count)
        keep = arr if side == "fg" else ~arr
    n_out = int(keep.sum())
    if n_out == 0:
        raise InputError(f"empty selection for side={side}; nothing to write")
    header = ["ply", "format binary_little_endian 1.0", f"element vertex {n_out}"]
    header += [f"property float {name}" for name in PLY_PROPERTIES]
    header.append("end_header")
    body = ("\n".join(header) + "\n").encode("ascii")
    return body + np.ascontiguousarray(scene.stored[keep]).tobytes(), n_out


def splat_model_bytes(scene: GaussianScene, labels, side: str) -> tuple[bytes, int]:
    """Serialized PLY of the selected subset plus the splat count."""
    return _splat_payload(scene, labels, side)


def save_splat_model(scene: GaussianScene, labels, side: str, path) -> int:
    """Write the selected subset (fg, bg, or all) back to a binary PLY.

    Returns the number of splats written. Refuses to write an empty file,
    which the loader would reject anyway.
    """
    payload, n_out = _splat_payload(scene, labels, side)
    with open(path, "wb") as fh:
        fh.write(payload)
    return n_out


@dataclass
class Camera:
    """Pinhole camera with a world-to-camera pose."""

    id: int
    image_name: str
    width: int
    height: int
    fx: float
    fy: float
    cx: float
    cy: float
    rotation: np.ndarray  # (3, 3) world-to-camera
    translation: np.ndarray  # (3,) world-to-camera

    @property
    def center(self) -> np.ndarray:
        """Camera position in world coordinates."""
        return -self.rotation.T @ self.translation


def load_cameras(path) -> list[Camera]:
    """Load a camera list from camera-trainer JSON (camera-to-world poses)."""
    path = Path(path)
    try:
        entries = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not isinstance(entries, list):
        raise SchemaError(f"{path}: expected a JSON array of cameras")
    cameras = []
    seen_ids = set()
    for entry in entries:
        for key in ("id", "img_name", "width", "height", "position", "rotation", "fx", "fy"):
            if key not in entry:
                raise SchemaError(f"{path}: camera entry missing '{key}'")
        cam_id = int(entry["id"])
        if cam_id in seen_ids:
            raise InputError(f"{path}: duplicate camera id {cam_id}")
        seen_ids.add(cam_id)
        r_c2w = np.asarray(entry["rotation"], dtype=np.float64)
        if r_c2w.shape != (3, 3):
            raise SchemaError(f"{path}: camera {cam_id} rotation is not 3x3")
        dev = np.abs(r_c2w.T @ r_c2w - np.eye(3)).max()
        if dev > 1e-3:
            raise InputError(
                f"{path}: camera {cam_id} rotation not orthonormal (deviation {dev:.2e})"
            )
        position = np.asarray(entry["position"], dtype=np.float64).reshape(3)
        width = int(entry["width"])
        height = int(entry["height"])
        if width <= 0 or height <= 0:
            raise InputError(f"{path}: camera {cam_id} has non-positive size")
        cameras.append(
            Camera(
                id=cam_id,
                image_name=str(entry["img_name"]),
                width=width,
                height=height,
                fx=float(entry["fx"]),
                fy=float(entry["fy"]),
                cx=width / 2.0,
                cy=height / 2.0,
                rotation=r_c2w.T,
                translation=-r_c2w.T @ position,
            )
        )
    cameras.sort(key=lambda c: c.id)
    return cameras


def save_cameras(cameras: list[Camera], path) -> None:
    """Write cameras back to the JSON format accepted by load_cameras."""
    entries = []
    for cam in cameras:
        r_c2w = cam.rotation.T
        entries.append(
            {
                "id": cam.id,
                "img_name": cam.image_name,
                "width": cam.width,
                "height": cam.height,
                "position": list(cam.center),
                "rotation": [list(row) for row in r_c2w],
                "fx": cam.fx,
                "fy": cam.fy,
            }
        )
    Path(path).write_text(json.dumps(entries, indent=1))


@dataclass
class Mask:
    """Per-pixel boolean foreground map, row-major (height, width)."""

    width: int
    height: int
    bits: np.ndarray  # (H, W) bool

    @classmethod
    def full(cls, width: int, height: int, value: bool = True) -> "Mask":
        return cls(width, height, np.full((height, width), value, dtype=bool))

    @classmethod
    def from_pixels(cls, width: int, height: int, pixels) -> "Mask":
        """Mask that is true exactly at the given (x, y) pixel list."""
        bits = np.zeros((height, width), dtype=bool)
        for x, y in pixels:
            if not (0 <= x < width and 0 <= y < height):
                raise InputError(f"pixel ({x}, {y}) out of bounds for {width}x{height}")
            bits[int(y), int(x)] = True
        return cls(width, height, bits)


_16BIT_MODES = {"I", "I;16", "I;16B", "I;16L", "I;16N", "F"}


def load_mask(path, expected_w: int, expected_h: int) -> Mask:
    """Load a PNG mask; pixels brighter than 127 are foreground.

    RGB inputs are reduced to luminance first. The mask is nearest-neighbor
    resized when its size differs from the paired camera's.
    """
    try:
        img = Image.open(path)
        img.load()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if img.mode in _16BIT_MODES:
        raise InputError(f"{path}: unsupported bit depth (mode {img.mode})")
    if img.mode != "L":
        img = img.convert("L")
    if img.size != (expected_w, expected_h):
        img = img.resize((expected_w, expected_h), Image.NEAREST)
    bits = np.asarray(img) > 127
    return Mask(expected_w, expected_h, bits)


def save_mask(mask: Mask, path) -> None:
    Image.fromarray(mask.bits.astype(np.uint8) * 255, mode="L").save(path)


def write_image(path, img: np.ndarray) -> None:
    """Save a float RGB image in [0, 1] as 8-bit PNG."""
    arr = np.clip(np.rint(np.asarray(img) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="RGB").save(path)


def read_image(path) -> np.ndarray:
    """Load an 8-bit image as float RGB in [0, 1]."""
    try:
        img = Image.open(path)
        img.load()
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
