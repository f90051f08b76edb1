import numpy as np
import pytest

from shape3d import offio
from shape3d import primitives as prim


@pytest.fixture
def cube():
    return prim.unit_cube()


@pytest.fixture
def box211():
    return prim.box(2.0, 1.0, 1.0)


@pytest.fixture
def tetra():
    return prim.regular_tetrahedron()


@pytest.fixture(scope="session")
def icosphere4():
    return prim.icosphere(4)


def write_corpus(directory, meshes):
    """Serialize meshes as <source_id>.off files under directory."""
    directory.mkdir(parents=True, exist_ok=True)
    for mesh in meshes:
        (directory / f"{mesh.source_id}.off").write_text(offio.serialize_off(mesh))
    return directory


def sphere_box_meshes(n_spheres=6, n_boxes=6, box_dims=(4.0, 1.0, 1.0)):
    """Two easily separable synthetic classes with perturbed vertices."""
    meshes = []
    for i in range(n_spheres):
        m = prim.perturbed(prim.icosphere(1), 0.05, seed=i)
        m.source_id = f"sphere_{i:02d}"
        meshes.append(m)
    for i in range(n_boxes):
        m = prim.perturbed(prim.box(*box_dims), 0.05, seed=1000 + i)
        m.source_id = f"boxy_{i:02d}"
        meshes.append(m)
    return meshes


def random_rigid(rng):
    return prim.random_rotation(rng), rng.uniform(-10.0, 10.0, size=3)
