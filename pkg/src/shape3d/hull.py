"""Convex hull of a point set, plus derived hull measures.

The hull itself comes from scipy's qhull (a quickhull implementation); this
module normalizes the result into a deterministic, outward-oriented triangle
mesh with hull vertices kept in ascending input-index order, which the
landmark tie-breaking rule relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull as _SciHull
from scipy.spatial import QhullError

from . import config
from .errors import DegenerateHull
from .mesh import diameter as _diameter


@dataclass(eq=False)
class ConvexHull:
    """Hull geometry with its surface area, volume and diameter."""

    vertices: np.ndarray  # (k, 3), ascending original input index
    faces: np.ndarray  # (m, 3) indices into vertices, outward-oriented
    input_indices: np.ndarray  # original index of each hull vertex
    surface_area: float
    volume: float
    diameter: float
    epsilon: float  # absolute tolerance used for coplanarity / inside tests

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)


def hull_epsilon(points: np.ndarray) -> float:
    """Scale-relative tolerance: EPS_HULL_REL times the bounding diagonal."""
    spans = points.max(axis=0) - points.min(axis=0)
    return config.EPS_HULL_REL * float(np.linalg.norm(spans))


def convex_hull(points: np.ndarray) -> ConvexHull:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(pts) < 4:
        raise DegenerateHull(f"need at least 4 points, got {len(pts)}")

    eps = hull_epsilon(pts)
    centered = pts - pts.mean(axis=0)
    # Coplanar (or collinear) input: spread along the least-variance direction
    # stays below the scale-relative tolerance.
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    if np.abs(centered @ vt[-1]).max() <= eps:
        raise DegenerateHull("points are coplanar within tolerance")

    try:
        qh = _SciHull(pts)
    except QhullError as exc:
        raise DegenerateHull(str(exc)) from exc

    order = np.sort(qh.vertices)
    remap = np.full(len(pts), -1, dtype=np.int64)
    remap[order] = np.arange(len(order))
    faces = remap[qh.simplices]

    # Reorient each triangle so its normal agrees with qhull's outward plane.
    verts = pts[order]
    a = verts[faces[:, 0]]
    b = verts[faces[:, 1]]
    c = verts[faces[:, 2]]
    tri_normals = np.cross(b - a, c - a)
    flip = np.einsum("ij,ij->i", tri_normals, qh.equations[:, :3]) < 0.0
    faces[flip] = faces[flip][:, [0, 2, 1]]

    return ConvexHull(
        vertices=verts,
        faces=faces,
        input_indices=order,
        surface_area=float(qh.area),
        volume=float(qh.volume),
        diameter=_diameter(verts),
        epsilon=eps,
    )


def esd(hull: ConvexHull) -> tuple[float, float]:
    """Equivalent spherical diameters of the hull.

    Returns (esd_paper, esd_volume): the surface-based formula kept verbatim
    for fidelity, and the dimensionally consistent diameter of a sphere whose
    volume equals the hull volume. Downstream dimensionless indexes use the
    second so they stay in (0, 1].
    """
    esd_paper = (4.0 / 3.0) * math.pi * math.sqrt((hull.surface_area / math.pi) ** 3)
    esd_volume = (6.0 * hull.volume / math.pi) ** (1.0 / 3.0)
    return esd_paper, esd_volume
