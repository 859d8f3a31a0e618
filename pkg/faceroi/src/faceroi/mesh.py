"""In-face grid mesh: square pixel cells inside the landmark hull, each
labelled with one of the five major facial areas."""

import numpy as np
from scipy.spatial import ConvexHull, Delaunay

from .landmarks import LandmarkSet

FACIAL_AREAS = ("forehead", "left-cheek", "right-cheek", "nose", "chin")


class MeshError(Exception):
    """The landmark hull cannot support a grid mesh."""


def _face_polygon(lms: LandmarkSet):
    """Hull of the landmarks plus synthetic forehead points.

    The 68-point layout stops at the eyebrows, so the forehead is closed by
    mirroring the jaw contour about the face midline (the line through the
    two jaw endpoints at ear height), which keeps the hull inside the face.
    """
    pts = lms.points
    mid_y = (pts[0, 1] + pts[16, 1]) / 2.0
    forehead = pts[0:17].copy()
    forehead[:, 1] = 2.0 * mid_y - forehead[:, 1]
    h, w = lms.frame_dims
    all_pts = np.vstack([pts, forehead])
    all_pts[:, 0] = np.clip(all_pts[:, 0], 0, w - 1)
    all_pts[:, 1] = np.clip(all_pts[:, 1], 0, h - 1)
    return all_pts[ConvexHull(all_pts).vertices]


def _label_for(cx, cy, lms: LandmarkSet):
    """Facial-area label for a cell center (x, y)."""
    pts = lms.points
    brow_y = pts[17:27, 1].mean()
    mouth_top_y = pts[48:60, 1].min()
    nose_half_w = (pts[31:36, 0].max() - pts[31:36, 0].min()) / 2.0
    face_cx = pts[:, 0].mean()
    if cy < brow_y:
        return "forehead"
    if cy >= mouth_top_y:
        return "chin"
    if abs(cx - face_cx) <= nose_half_w:
        return "nose"
    return "left-cheek" if cx < face_cx else "right-cheek"


def build_mesh(lms: LandmarkSet, cell_px=5):
    """Tile the inside of the face polygon with cell_px x cell_px squares.

    Returns (regions, group_labels, frame_dims) where regions maps
    region_id -> (k, 2) array of (row, col) pixels, in raster order.  A cell
    is kept only if all four of its corners are inside the polygon, so the
    mesh never straddles the face boundary.
    """
    if cell_px < 1:
        raise MeshError(f"cell_px must be >= 1, got {cell_px}")
    poly = _face_polygon(lms)
    tri = Delaunay(poly)
    h, w = lms.frame_dims

    x0 = int(np.floor(poly[:, 0].min()))
    y0 = int(np.floor(poly[:, 1].min()))
    x1 = int(np.ceil(poly[:, 0].max()))
    y1 = int(np.ceil(poly[:, 1].max()))

    regions, labels = {}, {}
    rid = 0
    cell_rc = np.stack(np.meshgrid(np.arange(cell_px), np.arange(cell_px),
                                   indexing="ij"), axis=-1).reshape(-1, 2)
    for top in range(y0, y1 - cell_px + 1, cell_px):
        for left in range(x0, x1 - cell_px + 1, cell_px):
            if top < 0 or left < 0 or top + cell_px > h or left + cell_px > w:
                continue
            corners = np.array([
                [left, top], [left + cell_px - 1, top],
                [left, top + cell_px - 1],
                [left + cell_px - 1, top + cell_px - 1],
            ], dtype=float)
            if np.any(tri.find_simplex(corners) < 0):
                continue
            regions[rid] = cell_rc + np.array([top, left])
            cx, cy = left + (cell_px - 1) / 2.0, top + (cell_px - 1) / 2.0
            labels[rid] = _label_for(cx, cy, lms)
            rid += 1
    if not regions:
        raise MeshError(
            f"face hull too small for any {cell_px}x{cell_px} cell"
        )
    return regions, labels, (h, w)


def write_mesh(regions, labels, frame_dims, path):
    """Mesh text format: a frame_dims line, then one region line per cell."""
    with open(path, "w") as f:
        f.write(f"frame_dims {frame_dims[0]} {frame_dims[1]}\n")
        for rid, coords in regions.items():
            pix = " ".join(f"{int(r)},{int(c)}" for r, c in np.asarray(coords))
            f.write(f"region {rid} {labels[rid]} {pix}\n")
