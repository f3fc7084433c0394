"""Real spherical-harmonics color evaluation up to degree 3."""
from __future__ import annotations

import numpy as np

SH_C0 = 0.28209479177387814
SH_C1 = 0.4886025119029199
SH_C2 = (
    1.0925484305920792,
    -1.0925484305920792,
    0.31539156525252005,
    -1.0925484305920792,
    0.5462742152960396,
)
SH_C3 = (
    -0.5900435899266435,
    2.890611442640554,
    -0.4570457994644658,
    0.3731763325901154,
    -0.4570457994644658,
    1.445305721320277,
    -0.5900435899266435,
)


def sh_basis(dirs: np.ndarray, degree: int) -> np.ndarray:
    """Evaluate the 16 real SH basis polynomials at unit directions.

    Returns (N, 16); bases above `degree` are zero.
    """
    dirs = np.atleast_2d(np.asarray(dirs, dtype=np.float64))
    n = dirs.shape[0]
    basis = np.zeros((n, 16))
    basis[:, 0] = SH_C0
    if degree >= 1:
        x, y, z = dirs[:, 0], dirs[:, 1], dirs[:, 2]
        basis[:, 1] = -SH_C1 * y
        basis[:, 2] = SH_C1 * z
        basis[:, 3] = -SH_C1 * x
    if degree >= 2:
        xx, yy, zz = x * x, y * y, z * z
        xy, yz, xz = x * y, y * z, x * z
        basis[:, 4] = SH_C2[0] * xy
        basis[:, 5] = SH_C2[1] * yz
        basis[:, 6] = SH_C2[2] * (2.0 * zz - xx - yy)
        basis[:, 7] = SH_C2[3] * xz
        basis[:, 8] = SH_C2[4] * (xx - yy)
    if degree >= 3:
        basis[:, 9] = SH_C3[0] * y * (3.0 * xx - yy)
        basis[:, 10] = SH_C3[1] * xy * z
        basis[:, 11] = SH_C3[2] * y * (4.0 * zz - xx - yy)
        basis[:, 12] = SH_C3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy)
        basis[:, 13] = SH_C3[4] * x * (4.0 * zz - xx - yy)
        basis[:, 14] = SH_C3[5] * z * (xx - yy)
        basis[:, 15] = SH_C3[6] * x * (xx - 3.0 * yy)
    return basis


def eval_sh_many(sh: np.ndarray, dirs: np.ndarray, degree: int = 3) -> np.ndarray:
    """Colors for many splats at once: (N, 48) coeffs x (N, 3) unit dirs -> (N, 3).

    Applies the usual +0.5 offset and clamps to [0, 1].
    """
    sh = np.asarray(sh, dtype=np.float64).reshape(-1, 48)
    basis = sh_basis(dirs, degree)
    rgb = np.einsum("nb,nbc->nc", basis, sh.reshape(-1, 16, 3)) + 0.5
    return np.clip(rgb, 0.0, 1.0)


def eval_sh(coeffs: np.ndarray, direction: np.ndarray, degree: int = 3) -> np.ndarray:
    """Color of a single splat viewed from `direction` (unit vector)."""
    return eval_sh_many(np.asarray(coeffs).reshape(1, 48),
                        np.asarray(direction).reshape(1, 3), degree)[0]
