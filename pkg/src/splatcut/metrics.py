"""Mask and photometric quality metrics plus foreground-mask rendering."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import correlate2d

from .errors import InputError
from .render import render
from .scene import Camera, GaussianScene, Mask

_LUMA = np.array([0.299, 0.587, 0.114])

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2


@dataclass
class MaskMetrics:
    iou: float
    accuracy: float
    tp: int
    fp: int
    fn: int
    tn: int


def render_fg_mask(scene: GaussianScene, labels, cam: Camera) -> Mask:
    """Silhouette of the labeled foreground.

    The whole scene is rendered with foreground splats forced white and
    background splats black over a black background, so occlusion between
    the two sides is preserved; pixels with luminance above 0.5 are
    foreground.
    """
    arr = np.asarray(getattr(labels, "labels", labels), dtype=bool).reshape(-1)
    if arr.shape[0] != scene.count:
        raise InputError(f"labels length {arr.shape[0]} != scene size {scene.count}")
    colors = np.where(arr[:, None], 1.0, 0.0) * np.ones((1, 3))
    img = render(scene, cam, background=(0.0, 0.0, 0.0), override_colors=colors)
    luminance = img @ _LUMA
    return Mask(cam.width, cam.height, luminance > 0.5)


def mask_metrics(pred: Mask, gt: Mask) -> MaskMetrics:
    """Pixel confusion counts, foreground IoU, and accuracy."""
    if (pred.width, pred.height) != (gt.width, gt.height):
        raise InputError(
            f"mask sizes differ: {pred.width}x{pred.height} vs {gt.width}x{gt.height}"
        )
    p, g = pred.bits, gt.bits
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    tn = int(np.count_nonzero(~p & ~g))
    union = tp + fp + fn
    iou = 1.0 if union == 0 else tp / union
    accuracy = (tp + tn) / (tp + fp + fn + tn)
    return MaskMetrics(iou=iou, accuracy=accuracy, tp=tp, fp=fp, fn=fn, tn=tn)


def _gaussian_window() -> np.ndarray:
    half = (SSIM_WINDOW - 1) / 2.0
    coords = np.arange(SSIM_WINDOW) - half
    g = np.exp(-(coords ** 2) / (2.0 * SSIM_SIGMA ** 2))
    win = np.outer(g, g)
    return win / win.sum()


def _ssim_channel(a: np.ndarray, b: np.ndarray) -> float:
    if min(a.shape) >= SSIM_WINDOW:
        win = _gaussian_window()
        mu_a = correlate2d(a, win, mode="valid")
        mu_b = correlate2d(b, win, mode="valid")
        var_a = correlate2d(a * a, win, mode="valid") - mu_a ** 2
        var_b = correlate2d(b * b, win, mode="valid") - mu_b ** 2
        cov = correlate2d(a * b, win, mode="valid") - mu_a * mu_b
    else:
        # Crop smaller than the window: single global-moment window.
        mu_a, mu_b = a.mean(), b.mean()
        var_a, var_b = a.var(), b.var()
        cov = float(((a - mu_a) * (b - mu_b)).mean())
    num = (2 * mu_a * mu_b + SSIM_C1) * (2 * cov + SSIM_C2)
    den = (mu_a ** 2 + mu_b ** 2 + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return float(np.mean(num / den))


def photometric(pred: np.ndarray, gt: np.ndarray, gt_mask: Mask) -> dict:
    """PSNR and SSIM over the tight bounding box of the ground-truth mask.

    Images are float RGB in [0, 1]; PSNR is +inf for identical crops. SSIM
    uses the standard 11x11 Gaussian window and is averaged over channels.
    """
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise InputError(f"image shapes differ: {pred.shape} vs {gt.shape}")
    if pred.shape[:2] != (gt_mask.height, gt_mask.width):
        raise InputError("mask size does not match the images")
    rows = np.flatnonzero(gt_mask.bits.any(axis=1))
    cols = np.flatnonzero(gt_mask.bits.any(axis=0))
    if rows.size == 0:
        raise InputError("ground-truth mask is empty")
    r0, r1 = rows[0], rows[-1] + 1
    c0, c1 = cols[0], cols[-1] + 1
    a = pred[r0:r1, c0:c1]
    b = gt[r0:r1, c0:c1]

    mse = float(np.mean((a - b) ** 2))
    psnr = float("inf") if mse == 0.0 else 10.0 * np.log10(1.0 / mse)
    ssim = float(np.mean([_ssim_channel(a[..., ch], b[..., ch]) for ch in range(3)]))
    return {"psnr_db": psnr, "ssim": ssim}
