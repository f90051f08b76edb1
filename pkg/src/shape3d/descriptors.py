"""Per-model descriptors: dimensionless shape indexes, landmark points,
distance-distribution moments and landmark-polygon ratios.

The flattened descriptor layout is fixed (FLAT_COMPONENTS) so corpus vectors
align component-wise; distances group the components into measures, indexes
and moments (GROUP_SLICES).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHull, DegenerateMeasure
from .hull import ConvexHull, convex_hull
from .mesh import Measures, Mesh, compute_measures

INDEX_COMPONENTS = ("c1", "c2", "s1", "elongation", "radii_ratio", "cs", "cv")

# Sphericity prefactor: a * V^(2/3) / S == 1 for a perfect sphere.
SPHERICITY_A = 6.0 ** (2.0 / 3.0) * math.pi ** (1.0 / 3.0)

MEASURE_COMPONENTS = (
    "volume",
    "surface_area",
    "diameter",
    "extent_0",
    "extent_1",
    "extent_2",
    "small_radius",
    "large_radius",
    "esd_paper",
    "esd_volume",
)
TETRA_COMPONENTS = ("volume_ratio", "area_ratio")

# Flattened descriptor: measures, then indexes (with the landmark-polygon
# ratios, which are dimensionless indexes too), then the 12 moments.
FLAT_COMPONENTS = (
    MEASURE_COMPONENTS
    + INDEX_COMPONENTS
    + TETRA_COMPONENTS
    + tuple(
        f"m_{anchor}_{stat}"
        for anchor in ("p1", "p2", "p3", "p4")
        for stat in ("mean", "stddev", "skew")
    )
)
DESCRIPTOR_DIM = len(FLAT_COMPONENTS)  # 31

GROUP_SLICES = {
    "measures": slice(0, 10),
    "indexes": slice(10, 19),
    "moments": slice(19, 31),
}


@dataclass
class ShapeIndexVector:
    """The seven dimensionless shape indexes."""

    c1: float  # equivalent-sphere diameter over hull diameter
    c2: float  # 36*pi*V^2 / S^3
    s1: float  # sphericity, 1 for a sphere
    elongation: float  # 1 - extents[1]/extents[0]
    radii_ratio: float  # small over large landmark radius
    cs: float  # hull surface over mesh surface
    cv: float  # mesh volume over hull volume (1 = convex, near 0 = spiky)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in INDEX_COMPONENTS])


@dataclass
class Landmarks:
    """Four anchor points on/inside the hull plus derived radii and angles.

    p1 is the surface centroid; p2/p3/p4 are hull vertices (nearest to p1,
    farthest from p1, farthest from p3), ties broken by lowest hull-vertex
    index. Angles are measured against the major principal axis and folded
    into [0, pi/2] so the axis sign cannot matter.
    """

    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    p4: np.ndarray
    small_radius: float
    large_radius: float
    angles: tuple[float, float, float]  # a2, a3, a4
    vertex_indices: tuple[int, int, int]  # hull-vertex index of p2, p3, p4

    def points(self) -> np.ndarray:
        return np.stack([self.p1, self.p2, self.p3, self.p4])


@dataclass
class MomentVector:
    """12 moments: (mean, stddev, cbrt-skew) of the vertex-distance
    distribution around each landmark, anchor order p1..p4."""

    values: np.ndarray  # (12,)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values)


@dataclass
class DescriptorVector:
    measures: Measures
    indexes: ShapeIndexVector
    moments: MomentVector
    tetra_ratios: tuple[float, float]  # (volume_ratio, area_ratio)

    def flatten(self) -> np.ndarray:
        m = self.measures
        head = [
            m.volume,
            m.surface_area,
            m.diameter,
            m.extents[0],
            m.extents[1],
            m.extents[2],
            m.small_radius,
            m.large_radius,
            m.esd_paper,
            m.esd_volume,
        ]
        vec = np.concatenate(
            [head, self.indexes.as_array(), self.tetra_ratios, self.moments.as_array()]
        )
        assert vec.shape == (DESCRIPTOR_DIM,)
        return vec


def shape_indexes(measures: Measures, hull: ConvexHull) -> ShapeIndexVector:
    """Compute the shape-index vector from one model's measures and hull."""
    for name, denom in (
        ("hull diameter", hull.diameter),
        ("surface area", measures.surface_area),
        ("major extent", measures.extents[0]),
        ("large radius", measures.large_radius),
        ("hull volume", hull.volume),
        ("hull surface", hull.surface_area),
    ):
        if denom <= 0.0:
            raise DegenerateMeasure(f"{name} is not positive")
    v, s = measures.volume, measures.surface_area
    return ShapeIndexVector(
        c1=measures.esd_volume / hull.diameter,
        c2=36.0 * math.pi * v * v / s**3,
        s1=SPHERICITY_A * v ** (2.0 / 3.0) / s,
        elongation=1.0 - measures.extents[1] / measures.extents[0],
        radii_ratio=measures.small_radius / measures.large_radius,
        cs=hull.surface_area / s,
        cv=v / hull.volume,
    )


def landmark_points(hull: ConvexHull, centroid: np.ndarray, major_axis: np.ndarray) -> Landmarks:
    if hull.vertex_count < 4:
        raise DegenerateHull("landmarks need a hull with at least 4 vertices")
    p1 = np.asarray(centroid, dtype=np.float64)

    d1 = np.linalg.norm(hull.vertices - p1, axis=1)
    i2 = int(np.argmin(d1))
    i3 = int(np.argmax(d1))
    d3 = np.linalg.norm(hull.vertices - hull.vertices[i3], axis=1)
    i4 = int(np.argmax(d3))

    p2, p3, p4 = hull.vertices[i2], hull.vertices[i3], hull.vertices[i4]

    def angle(p):
        u = p - p1
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        cos = min(1.0, abs(float(np.dot(u, major_axis))) / norm)
        return float(math.acos(cos))

    return Landmarks(
        p1=p1,
        p2=p2,
        p3=p3,
        p4=p4,
        small_radius=float(d1[i2]),
        large_radius=float(d1[i3]),
        angles=(angle(p2), angle(p3), angle(p4)),
        vertex_indices=(i2, i3, i4),
    )


def usr_moments(vertices: np.ndarray, landmarks: Landmarks) -> MomentVector:
    """Mean, population stddev and signed cube root of the third central
    moment of vertex distances to each landmark."""
    pts = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    out = np.empty(12)
    for k, anchor in enumerate(landmarks.points()):
        d = np.linalg.norm(pts - anchor, axis=1)
        mean = d.mean()
        centered = d - mean
        var = np.mean(centered**2)
        third = np.mean(centered**3)
        out[3 * k : 3 * k + 3] = (mean, math.sqrt(var), np.cbrt(third))
    return MomentVector(out)


def tetra_ratios(landmarks: Landmarks, hull: ConvexHull) -> tuple[float, float]:
    """Landmark-tetrahedron volume and landmark-triangle area, relative to
    the hull; degenerate configurations give 0."""
    p1, p2, p3, p4 = landmarks.points()
    vol = abs(float(np.dot(p2 - p1, np.cross(p3 - p1, p4 - p1)))) / 6.0
    area = float(np.linalg.norm(np.cross(p3 - p2, p4 - p2))) / 2.0
    return (
        min(max(vol / hull.volume, 0.0), 1.0),
        min(max(area / hull.surface_area, 0.0), 1.0),
    )


@dataclass
class ModelAnalysis:
    """Everything the pipeline derives from one mesh."""

    mesh: Mesh
    hull: ConvexHull
    measures: Measures
    landmarks: Landmarks
    descriptor: DescriptorVector


def analyze_mesh(mesh: Mesh) -> ModelAnalysis:
    """Run the full geometric pipeline for one mesh.

    Errors from any stage are re-raised with the model id prepended so corpus
    builds can report which file failed.
    """
    from .errors import ShapeEngineError

    try:
        hull = convex_hull(mesh.vertices)
        measures = compute_measures(mesh, hull)
        landmarks = landmark_points(hull, measures.centroid, measures.principal_axes[0])
        descriptor = DescriptorVector(
            measures=measures,
            indexes=shape_indexes(measures, hull),
            moments=usr_moments(mesh.vertices, landmarks),
            tetra_ratios=tetra_ratios(landmarks, hull),
        )
    except ShapeEngineError as exc:
        raise type(exc)(f"{mesh.source_id or 'mesh'}: {exc}") from exc
    return ModelAnalysis(mesh, hull, measures, landmarks, descriptor)


def descriptor_vector(mesh: Mesh) -> DescriptorVector:
    return analyze_mesh(mesh).descriptor
