import math

import numpy as np
import pytest

from shape3d import (
    Mesh,
    analyze_mesh,
    compute_measures,
    convex_hull,
    descriptor_vector,
    rigid_transform,
)
from shape3d import primitives as prim
from shape3d.descriptors import (
    DESCRIPTOR_DIM,
    FLAT_COMPONENTS,
    SPHERICITY_A,
    Landmarks,
    landmark_points,
    shape_indexes,
    tetra_ratios,
    usr_moments,
)
from shape3d.errors import DegenerateMeasure

from conftest import random_rigid


def brute_moments(vertices, anchors):
    """Three explicit passes per anchor: mean, variance, third central moment."""
    out = []
    for anchor in anchors:
        dists = [math.dist(v, anchor) for v in vertices]
        n = len(dists)
        mean = sum(dists) / n
        var = sum((d - mean) ** 2 for d in dists) / n
        third = sum((d - mean) ** 3 for d in dists) / n
        out += [mean, math.sqrt(var), math.copysign(abs(third) ** (1 / 3), third)]
    return np.array(out)


class TestShapeIndexes:
    def test_unit_cube_golden_values(self, cube):
        hull = convex_hull(cube.vertices)
        idx = shape_indexes(compute_measures(cube, hull), hull)
        assert idx.c2 == pytest.approx(math.pi / 6.0, abs=1e-12)
        assert idx.s1 == pytest.approx(SPHERICITY_A / 6.0, abs=1e-12)
        assert idx.cs == pytest.approx(1.0, abs=1e-9)
        assert idx.cv == pytest.approx(1.0, abs=1e-9)
        assert idx.elongation == 0.0
        # c1 for the cube: equivalent-sphere diameter over the space diagonal
        assert idx.c1 == pytest.approx((6.0 / math.pi) ** (1 / 3) / math.sqrt(3.0), rel=1e-9)

    def test_icosphere_sphericity_near_one(self, icosphere4):
        a = analyze_mesh(icosphere4)
        assert a.descriptor.indexes.s1 > 0.98
        assert a.descriptor.indexes.s1 <= 1.0 + 1e-6

    def test_box_elongation(self, box211):
        a = analyze_mesh(box211)
        assert a.descriptor.indexes.elongation == pytest.approx(0.5, abs=1e-12)

    def test_zero_denominator_raises(self, cube):
        hull = convex_hull(cube.vertices)
        m = compute_measures(cube, hull)
        m.large_radius = 0.0
        with pytest.raises(DegenerateMeasure):
            shape_indexes(m, hull)

    @pytest.mark.parametrize("mesh", [prim.unit_cube(), prim.regular_tetrahedron(),
                                      prim.icosphere(2)], ids=["cube", "tetra", "sphere"])
    def test_convex_meshes_have_unit_convexity(self, mesh):
        a = analyze_mesh(mesh)
        assert a.descriptor.indexes.cs == pytest.approx(1.0, abs=1e-6)
        assert a.descriptor.indexes.cv == pytest.approx(1.0, abs=1e-6)

    def test_indexes_scale_invariant(self):
        mesh = prim.perturbed(prim.box(2.0, 1.3, 0.7), 0.04, seed=1)
        big = Mesh(mesh.vertices * 7.3, mesh.faces)
        a = analyze_mesh(mesh).descriptor.indexes.as_array()
        b = analyze_mesh(big).descriptor.indexes.as_array()
        assert np.allclose(a, b, rtol=1e-6)

    @pytest.mark.parametrize(
        "mesh",
        [prim.unit_cube(), prim.regular_tetrahedron(), prim.icosphere(2),
         prim.box(3.0, 2.0, 1.0), prim.spiky_star(spike=1.25),
         prim.perturbed(prim.icosphere(3), 0.1, seed=6)],
        ids=["cube", "tetra", "sphere", "box", "star", "psphere"],
    )
    def test_index_ranges(self, mesh):
        # dimensionless indexes stay in their documented ranges (cs needs the
        # convex/dented family, see the hull-dominance note)
        idx = analyze_mesh(mesh).descriptor.indexes
        delta = 1e-6
        for name in ("c1", "c2", "s1", "cs", "cv"):
            value = getattr(idx, name)
            assert 0.0 < value <= 1.0 + delta, f"{name}={value}"
        assert 0.0 <= idx.elongation < 1.0
        assert 0.0 < idx.radii_ratio <= 1.0


class TestLandmarks:
    def test_unit_cube_tie_rule(self, cube):
        a = analyze_mesh(cube)
        lm = a.landmarks
        # all corners are equidistant from the centroid, so the tie rule picks
        # hull vertex 0 for both P2 and P3; P4 is the opposite corner
        assert lm.vertex_indices[0] == 0
        assert lm.vertex_indices[1] == 0
        assert np.allclose(lm.p2, cube.vertices[0])
        assert np.allclose(lm.p4, cube.vertices[7])
        assert lm.small_radius == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-12)
        assert lm.large_radius == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-12)

    def test_box_tie_rule(self, box211):
        a = analyze_mesh(box211)
        assert a.landmarks.vertex_indices[0] == 0
        assert a.landmarks.large_radius == pytest.approx(math.sqrt(1.5), rel=1e-12)

    def test_rigid_equivariance(self):
        mesh = prim.perturbed(prim.box(2.0, 1.3, 0.7), 0.04, seed=8)
        base = analyze_mesh(mesh)
        rng = np.random.default_rng(5)
        rot, t = random_rigid(rng)
        moved = analyze_mesh(rigid_transform(mesh, rot, t))
        assert moved.landmarks.vertex_indices == base.landmarks.vertex_indices
        assert np.allclose(moved.landmarks.p3, base.landmarks.p3 @ rot.T + t, atol=1e-9)

    def test_angles_folded(self):
        mesh = prim.perturbed(prim.box(3.0, 2.0, 1.0), 0.05, seed=2)
        a = analyze_mesh(mesh)
        for angle in a.landmarks.angles:
            assert 0.0 <= angle <= math.pi / 2.0


class TestMoments:
    def test_cube_centroid_anchor(self, cube):
        a = analyze_mesh(cube)
        vals = a.descriptor.moments.as_array()
        assert vals[0] == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-12)
        assert vals[1] == pytest.approx(0.0, abs=1e-12)
        assert vals[2] == pytest.approx(0.0, abs=1e-12)

    def test_rigid_invariance(self):
        mesh = prim.perturbed(prim.icosphere(2), 0.06, seed=3)
        base = analyze_mesh(mesh).descriptor.moments.as_array()
        rng = np.random.default_rng(6)
        moved = analyze_mesh(rigid_transform(mesh, *random_rigid(rng)))
        assert np.allclose(moved.descriptor.moments.as_array(), base, atol=1e-9)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(7)
        verts = rng.normal(size=(50, 3)) * [2.0, 1.0, 0.5]
        lm = Landmarks(
            p1=verts.mean(axis=0), p2=verts[3], p3=verts[11], p4=verts[29],
            small_radius=1.0, large_radius=2.0, angles=(0.0, 0.0, 0.0),
            vertex_indices=(3, 11, 29),
        )
        got = usr_moments(verts, lm).as_array()
        want = brute_moments(verts, lm.points())
        assert np.allclose(got, want, atol=1e-12, rtol=1e-12)

    def test_means_scale_linearly(self):
        mesh = prim.perturbed(prim.box(2.0, 1.3, 0.7), 0.04, seed=1)
        s = 3.25
        a = analyze_mesh(mesh).descriptor.moments.as_array()
        b = analyze_mesh(Mesh(mesh.vertices * s, mesh.faces)).descriptor.moments.as_array()
        means_stds = [i for i in range(12) if i % 3 != 2]
        assert np.allclose(b[means_stds], a[means_stds] * s, rtol=1e-9)


class TestTetraRatios:
    def test_coplanar_landmarks_zero_volume(self, cube):
        hull = convex_hull(cube.vertices)
        lm = Landmarks(
            p1=np.zeros(3), p2=np.array([1.0, 0, 0]), p3=np.array([0, 1.0, 0]),
            p4=np.array([1.0, 1.0, 0]), small_radius=1.0, large_radius=1.0,
            angles=(0, 0, 0), vertex_indices=(0, 1, 2),
        )
        vol_ratio, _ = tetra_ratios(lm, hull)
        assert vol_ratio == 0.0

    def test_scale_invariance(self):
        mesh = prim.perturbed(prim.box(2.0, 1.3, 0.7), 0.04, seed=1)
        a = analyze_mesh(mesh)
        b = analyze_mesh(Mesh(mesh.vertices * 4.0, mesh.faces))
        assert a.descriptor.tetra_ratios == pytest.approx(b.descriptor.tetra_ratios, rel=1e-9)

    def test_against_hand_oracle(self):
        mesh = prim.perturbed(prim.icosphere(1), 0.15, seed=9)
        a = analyze_mesh(mesh)
        p1, p2, p3, p4 = a.landmarks.points()
        vol = abs(np.dot(p2 - p1, np.cross(p3 - p1, p4 - p1))) / 6.0
        area = np.linalg.norm(np.cross(p3 - p2, p4 - p2)) / 2.0
        assert a.descriptor.tetra_ratios[0] == pytest.approx(vol / a.hull.volume, abs=1e-15)
        assert a.descriptor.tetra_ratios[1] == pytest.approx(area / a.hull.surface_area, abs=1e-15)
        assert 0.0 <= a.descriptor.tetra_ratios[0] <= 1.0
        assert 0.0 <= a.descriptor.tetra_ratios[1] <= 1.0


class TestDescriptorVector:
    def test_flat_layout(self, cube):
        vec = descriptor_vector(cube).flatten()
        assert vec.shape == (DESCRIPTOR_DIM,)
        assert len(FLAT_COMPONENTS) == DESCRIPTOR_DIM
        assert vec[FLAT_COMPONENTS.index("volume")] == pytest.approx(1.0)

    def test_deterministic(self, cube):
        a = descriptor_vector(cube).flatten()
        b = descriptor_vector(cube).flatten()
        assert np.array_equal(a, b)

    def test_error_annotated_with_model_id(self):
        flat = Mesh(
            np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float),
            np.array([[0, 1, 2], [1, 3, 2]]),
            source_id="flatland",
        )
        with pytest.raises(Exception, match="flatland"):
            descriptor_vector(flat)

    def test_rigid_invariance_of_indexes(self):
        mesh = prim.perturbed(prim.box(3.0, 2.0, 1.0), 0.05, seed=4)
        base = analyze_mesh(mesh).descriptor.indexes.as_array()
        rng = np.random.default_rng(8)
        for _ in range(3):
            moved = analyze_mesh(rigid_transform(mesh, *random_rigid(rng)))
            assert np.allclose(moved.descriptor.indexes.as_array(), base, rtol=1e-6)
