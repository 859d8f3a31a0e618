"""Face localization and 68-point landmark placement on the average frame.

No pretrained landmark model is bundled; the face is found as the largest
bright connected region of the average frame (IR faces are much brighter
than the background), an ellipse is fitted from its second moments, and a
procedural 68-point template in the standard iBUG ordering is mapped into
that ellipse.  Detection runs once on the average frame only; no tracking.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


class NoFaceError(Exception):
    """No plausible face region in the average frame."""


@dataclass(frozen=True)
class LandmarkSet:
    """68 (x, y) points in pixel coordinates on the average frame."""

    points: np.ndarray          # (68, 2), x = column, y = row
    frame_dims: tuple           # (height, width)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.shape != (68, 2):
            raise ValueError(f"expected 68 points, got shape {pts.shape}")
        h, w = self.frame_dims
        if pts[:, 0].min() < 0 or pts[:, 0].max() >= w or \
           pts[:, 1].min() < 0 or pts[:, 1].max() >= h:
            raise ValueError("landmark outside frame bounds")
        spread = pts.max(axis=0) - pts.min(axis=0)
        if spread.min() < 4:
            raise ValueError("landmark hull is degenerate")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def average_frame(frames):
    frames = iter(frames)
    try:
        acc = np.asarray(next(frames), dtype=np.float64).copy()
    except StopIteration:
        raise NoFaceError("no frames supplied")
    n = 1
    for f in frames:
        acc += np.asarray(f, dtype=np.float64)
        n += 1
    return acc / n


def _otsu_threshold(img):
    hist, edges = np.histogram(img.ravel(), bins=256)
    centers = (edges[:-1] + edges[1:]) / 2
    total = hist.sum()
    best_t, best_var = centers[0], -1.0
    w0 = np.cumsum(hist)
    w1 = total - w0
    m0 = np.cumsum(hist * centers)
    total_m = m0[-1]
    valid = (w0 > 0) & (w1 > 0)
    mu0 = np.where(valid, m0 / np.maximum(w0, 1), 0)
    mu1 = np.where(valid, (total_m - m0) / np.maximum(w1, 1), 0)
    between = w0 * w1 * (mu0 - mu1) ** 2
    between[~valid] = -1
    return centers[int(np.argmax(between))]


def fit_face_ellipse(avg, min_area_px=100):
    """Centroid and 2-sigma semi-axes of the largest bright component."""
    avg = np.asarray(avg, dtype=np.float64)
    if np.ptp(avg) == 0:
        raise NoFaceError("blank frame: no contrast")
    mask = avg > _otsu_threshold(avg)
    labels, n = ndimage.label(mask)
    if n == 0:
        raise NoFaceError("no bright region found")
    sizes = ndimage.sum_labels(np.ones_like(labels), labels, index=np.arange(1, n + 1))
    biggest = int(np.argmax(sizes)) + 1
    if sizes[biggest - 1] < min_area_px:
        raise NoFaceError(f"largest bright region has {int(sizes[biggest - 1])} px, "
                          f"need >= {min_area_px}")
    ys, xs = np.nonzero(labels == biggest)
    cx, cy = xs.mean(), ys.mean()
    # for a filled ellipse the pixel std is semi_axis / 2
    a, b = 2.0 * xs.std(), 2.0 * ys.std()
    if a < 4 or b < 4:
        raise NoFaceError("bright region too thin to be a face")
    return cx, cy, a, b


def landmark_template():
    """68 points in the iBUG ordering, in ellipse-normalized coordinates
    (x, y) with the face ellipse mapped to the unit disc, y pointing down."""
    pts = np.zeros((68, 2))
    # jaw 0-16: lower half of the ellipse, left ear to right ear via the chin
    ang = np.pi * (1.0 - np.arange(17) / 16.0)          # pi -> 0
    pts[0:17, 0] = -np.cos(ang) * 0.95
    pts[0:17, 1] = np.sin(ang) * 0.95
    # eyebrows 17-21 (left) and 22-26 (right)
    xs = np.linspace(-0.65, -0.15, 5)
    pts[17:22] = np.column_stack([xs, -0.45 - 0.08 * np.sin(np.linspace(0, np.pi, 5))])
    pts[22:27] = np.column_stack([-xs[::-1], pts[17:22, 1][::-1]])
    # nose bridge 27-30 and base 31-35
    pts[27:31] = np.column_stack([np.zeros(4), np.linspace(-0.35, 0.05, 4)])
    xs = np.linspace(-0.15, 0.15, 5)
    pts[31:36] = np.column_stack([xs, 0.18 - 0.04 * np.cos(np.linspace(-1, 1, 5))])
    # eyes 36-41 (left) and 42-47 (right): closed hexagons
    def eye(cx0):
        t = np.linspace(0, 2 * np.pi, 7)[:-1]
        return np.column_stack([cx0 + 0.13 * np.cos(t), -0.25 - 0.06 * np.sin(t)])
    pts[36:42] = eye(-0.38)
    pts[42:48] = eye(0.38)
    # mouth: outer lip 48-59 (12 pts), inner lip 60-67 (8 pts)
    t = np.linspace(0, 2 * np.pi, 13)[:-1]
    pts[48:60] = np.column_stack([0.28 * np.cos(t), 0.52 - 0.12 * np.sin(t)])
    t = np.linspace(0, 2 * np.pi, 9)[:-1]
    pts[60:68] = np.column_stack([0.18 * np.cos(t), 0.52 - 0.06 * np.sin(t)])
    return pts


def detect_landmarks(frames) -> LandmarkSet:
    """Landmarks on the pixel-mean average frame; raises NoFaceError if no
    bright face-like region exists."""
    avg = average_frame(frames)
    h, w = avg.shape
    cx, cy, a, b = fit_face_ellipse(avg)
    pts = landmark_template()
    mapped = np.column_stack([cx + a * pts[:, 0], cy + b * pts[:, 1]])
    mapped[:, 0] = np.clip(mapped[:, 0], 0, w - 1)
    mapped[:, 1] = np.clip(mapped[:, 1], 0, h - 1)
    return LandmarkSet(points=mapped, frame_dims=(h, w))
