"""Triangle meshes and the base geometric measures computed from them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import (
    DegenerateCovariance,
    IndexOutOfRange,
    NonOrthonormalRotation,
    OpenMesh,
    ZeroArea,
)


@dataclass(eq=False)
class Mesh:
    """Indexed triangle mesh. Faces are (n, 3) vertex indices."""

    vertices: np.ndarray
    faces: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if self.faces.size and (
            self.faces.min() < 0 or self.faces.max() >= len(self.vertices)
        ):
            raise IndexOutOfRange(
                f"face references vertex outside [0, {len(self.vertices)})"
            )

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def corners(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-face vertex positions (a, b, c), each (n, 3)."""
        return (
            self.vertices[self.faces[:, 0]],
            self.vertices[self.faces[:, 1]],
            self.vertices[self.faces[:, 2]],
        )


@dataclass
class Measures:
    """Base per-model measures; lengths in model units.

    volume_source records whether the volume came from the mesh itself or
    fell back to the convex hull (non-watertight input).
    """

    volume: float
    surface_area: float
    centroid: np.ndarray
    principal_axes: np.ndarray  # rows are unit axes, eigenvalues descending
    extents: np.ndarray  # vertex-projection spans along the axes, descending
    diameter: float
    feret_extents: np.ndarray  # oriented-bounding-box edge lengths (= extents)
    small_radius: float  # |P1P2|, centroid to nearest hull vertex
    large_radius: float  # |P1P3|, centroid to farthest hull vertex
    esd_paper: float
    esd_volume: float
    volume_source: str = "mesh"


def _triangle_areas(mesh: Mesh) -> np.ndarray:
    a, b, c = mesh.corners()
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def surface_area(mesh: Mesh) -> float:
    """Sum of triangle areas; degenerate triangles contribute zero."""
    return float(_triangle_areas(mesh).sum())


def is_closed(mesh: Mesh) -> bool:
    """True when every undirected edge is shared by exactly two faces."""
    f = mesh.faces
    edges = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    edges.sort(axis=1)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    return bool((counts == 2).all())


def volume(mesh: Mesh) -> float:
    """Enclosed volume of a closed mesh via signed tetrahedra to the origin.

    Raises OpenMesh when a boundary (or non-manifold) edge is found; callers
    that must survive benchmark data fall back to the convex-hull volume.
    """
    if not is_closed(mesh):
        raise OpenMesh(f"mesh {mesh.source_id!r} has boundary edges")
    a, b, c = mesh.corners()
    signed = np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0
    return float(abs(signed))


def surface_centroid(mesh: Mesh) -> np.ndarray:
    """Area-weighted mean of triangle centroids."""
    areas = _triangle_areas(mesh)
    total = areas.sum()
    if total <= 0.0:
        raise ZeroArea(f"mesh {mesh.source_id!r} has zero surface area")
    a, b, c = mesh.corners()
    centers = (a + b + c) / 3.0
    return areas @ centers / total


def principal_axes(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Principal directions of the surface and the vertex spans along them.

    Axes are the eigenvectors of the area-weighted covariance of the surface
    about its centroid, integrated exactly per triangle with the edge-midpoint
    rule (exact for quadratics), so the result does not depend on how the
    surface happens to be triangulated. Covariance entries below numeric
    noise are snapped to zero, which keeps axis-aligned inputs exactly
    axis-aligned. Each axis is sign-fixed (largest-magnitude component
    positive) and the triad is ordered by descending vertex-projection span.
    """
    areas = _triangle_areas(mesh)
    total = areas.sum()
    if total <= 0.0:
        raise DegenerateCovariance("zero total surface area")
    a, b, c = mesh.corners()
    centers = (a + b + c) / 3.0
    g = areas @ centers / total

    mids = np.concatenate([(a + b) / 2.0, (b + c) / 2.0, (c + a) / 2.0]) - g
    weights = np.tile(areas / 3.0, 3)
    cov = (mids * weights[:, None]).T @ mids / total
    cov = (cov + cov.T) / 2.0
    snap = config.DEGENERATE_COV_REL * max(cov.trace(), 0.0)
    cov[np.abs(cov) < snap] = 0.0

    eigvals, eigvecs = np.linalg.eigh(cov)  # ascending
    eigvals = eigvals[::-1]
    axes = eigvecs[:, ::-1].T.copy()
    if eigvals[0] <= 0.0 or eigvals[1] <= eigvals[0] * config.DEGENERATE_COV_REL:
        raise DegenerateCovariance("surface is collinear or coincident")

    # Inside a (near-)degenerate eigen pair the basis returned by eigh is
    # arbitrary, so vertex spans would not survive rigid motions. Replace
    # such a pair with the exact minimal-width caliper directions of the
    # projected vertex set, which are rotation-covariant. A fully isotropic
    # spectrum (sphere-like) is left alone: any triad is as good as another.
    gap01 = eigvals[0] - eigvals[1]
    gap12 = eigvals[1] - eigvals[2]
    tol = _EIGEN_PAIR_REL * eigvals[0]
    if gap01 > tol and gap12 <= tol:
        axes[1], axes[2] = _caliper_pair(mesh.vertices, axes[1], axes[2])
    elif gap01 <= tol and gap12 > tol:
        axes[0], axes[1] = _caliper_pair(mesh.vertices, axes[0], axes[1])

    for row in axes:
        if row[np.argmax(np.abs(row))] < 0.0:
            row *= -1.0

    proj = mesh.vertices @ axes.T
    extents = proj.max(axis=0) - proj.min(axis=0)
    order = np.argsort(-extents, kind="stable")
    return axes[order], extents[order]


# Eigenvalues closer than this (relative to the largest) are treated as a
# degenerate pair and refined with the planar caliper.
_EIGEN_PAIR_REL = 1e-8


def _caliper_pair(vertices: np.ndarray, u: np.ndarray, v: np.ndarray):
    """Orthonormal directions spanning the (u, v) plane, widest span first.

    Uses rotating calipers on the 2D convex hull of the projected vertices:
    the minimal width of a convex polygon is attained flush with one of its
    edges, so the search over edges is exact.
    """
    from scipy.spatial import ConvexHull as _Hull2D
    from scipy.spatial import QhullError as _QhullError

    pts2 = np.column_stack([vertices @ u, vertices @ v])
    try:
        hull2 = _Hull2D(pts2)
    except _QhullError:
        return u, v
    ring = pts2[hull2.vertices]
    edges = np.roll(ring, -1, axis=0) - ring
    lengths = np.linalg.norm(edges, axis=1)
    keep = lengths > 0.0
    if not keep.any():
        return u, v
    tangents = edges[keep] / lengths[keep, None]
    normals = np.column_stack([-tangents[:, 1], tangents[:, 0]])
    spans = np.ptp(ring @ normals.T, axis=0)
    n2 = normals[np.argmin(spans)]
    t2 = np.array([n2[1], -n2[0]])
    narrow = n2[0] * u + n2[1] * v
    wide = t2[0] * u + t2[1] * v
    return wide, narrow


def diameter(points: np.ndarray) -> float:
    """Max pairwise Euclidean distance.

    Centered Gram expansion |p-q|^2 = |p|^2 + |q|^2 - 2 p.q, evaluated over
    upper-triangular blocks with in-place updates, so 10k-point inputs cost a
    few matmuls instead of a 10k x 10k allocation.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    n = len(pts)
    if n < 2:
        return 0.0
    centered = pts - pts.mean(axis=0)
    sq = np.einsum("ij,ij->i", centered, centered)
    best = 0.0
    block = 2048
    for start in range(0, n, block):
        stop = min(start + block, n)
        d2 = centered[start:stop] @ centered[start:].T
        d2 *= -2.0
        d2 += sq[start:stop, None]
        d2 += sq[None, start:]
        m = float(d2.max())
        if m > best:
            best = m
    return float(np.sqrt(max(best, 0.0)))


def rigid_transform(mesh: Mesh, rotation: np.ndarray, translation: np.ndarray) -> Mesh:
    """Apply v -> R v + t to every vertex; faces are unchanged."""
    r = np.asarray(rotation, dtype=np.float64)
    t = np.asarray(translation, dtype=np.float64).reshape(3)
    if r.shape != (3, 3) or np.abs(r @ r.T - np.eye(3)).max() > config.ROTATION_ORTHO_TOL:
        raise NonOrthonormalRotation("rotation must be 3x3 orthonormal")
    return Mesh(mesh.vertices @ r.T + t, mesh.faces.copy(), mesh.source_id)


def compute_measures(mesh: Mesh, hull=None) -> Measures:
    """Assemble all base measures for one mesh.

    Open meshes keep the pipeline alive by taking the hull volume
    (volume_source == "hull").
    """
    from .hull import convex_hull, esd  # local import, hull builds on this module

    if hull is None:
        hull = convex_hull(mesh.vertices)
    s = surface_area(mesh)
    try:
        v = volume(mesh)
        source = "mesh"
    except OpenMesh:
        v = hull.volume
        source = "hull"
    centroid = surface_centroid(mesh)
    axes, extents = principal_axes(mesh)
    radii = np.linalg.norm(hull.vertices - centroid, axis=1)
    esd_paper, esd_volume = esd(hull)
    return Measures(
        volume=v,
        surface_area=s,
        centroid=centroid,
        principal_axes=axes,
        extents=extents,
        diameter=hull.diameter,
        feret_extents=extents.copy(),
        small_radius=float(radii.min()),
        large_radius=float(radii.max()),
        esd_paper=esd_paper,
        esd_volume=esd_volume,
        volume_source=source,
    )
