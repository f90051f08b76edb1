"""Closed primitive meshes used by tests, benchmarks and synthetic corpora."""

from __future__ import annotations

import numpy as np

from .mesh import Mesh

# 12 outward-wound triangles of an axis-aligned cube; corner index bits are
# (x, y, z) with 0 = min side, so corner 0 is the all-min corner.
_CUBE_FACES = np.array(
    [
        [0, 1, 3], [0, 3, 2],
        [4, 6, 7], [4, 7, 5],
        [0, 4, 5], [0, 5, 1],
        [2, 3, 7], [2, 7, 6],
        [0, 2, 6], [0, 6, 4],
        [1, 5, 7], [1, 7, 3],
    ],
    dtype=np.int64,
)


def box(dx: float, dy: float, dz: float, center=(0.0, 0.0, 0.0), source_id: str = "") -> Mesh:
    """Axis-aligned closed box with the given edge lengths."""
    half = np.array([dx, dy, dz], dtype=np.float64) / 2.0
    corners = np.array(
        [[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)],
        dtype=np.float64,
    )
    vertices = corners * half + np.asarray(center, dtype=np.float64)
    return Mesh(vertices, _CUBE_FACES.copy(), source_id)


def unit_cube(center=(0.0, 0.0, 0.0), source_id: str = "cube") -> Mesh:
    return box(1.0, 1.0, 1.0, center, source_id)


def regular_tetrahedron(edge: float = 1.0, source_id: str = "tetra") -> Mesh:
    """Regular tetrahedron with the requested edge length, centered at origin."""
    base = np.array(
        [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=np.float64
    )
    # base has edge length 2*sqrt(2)
    vertices = base * (edge / (2.0 * np.sqrt(2.0)))
    faces = np.array([[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]], dtype=np.int64)
    return Mesh(vertices, faces, source_id)


def _icosahedron() -> tuple[np.ndarray, np.ndarray]:
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    f = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    return v / np.linalg.norm(v[0]), f


def icosphere(subdivisions: int = 2, radius: float = 1.0, source_id: str = "sphere") -> Mesh:
    """Unit icosahedron subdivided and reprojected onto the sphere."""
    vertices, faces = _icosahedron()
    verts = [tuple(v) for v in vertices]
    index = {v: i for i, v in enumerate(verts)}

    def midpoint(i, j):
        m = (np.array(verts[i]) + np.array(verts[j])) / 2.0
        m = tuple(m / np.linalg.norm(m))
        if m not in index:
            index[m] = len(verts)
            verts.append(m)
        return index[m]

    tris = [tuple(f) for f in faces]
    for _ in range(subdivisions):
        nxt = []
        for a, b, c in tris:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            nxt += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        tris = nxt

    v = np.array(verts, dtype=np.float64) * radius
    return Mesh(v, np.array(tris, dtype=np.int64), source_id)


def uv_sphere(rings: int, segments: int, radius: float = 1.0, source_id: str = "uvsphere") -> Mesh:
    """Latitude/longitude sphere with rings*segments + 2 vertices."""
    verts = [np.array([0.0, 0.0, radius])]
    for i in range(1, rings + 1):
        theta = np.pi * i / (rings + 1)
        for j in range(segments):
            phi = 2.0 * np.pi * j / segments
            verts.append(
                radius
                * np.array(
                    [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
                )
            )
    verts.append(np.array([0.0, 0.0, -radius]))
    top, bottom = 0, len(verts) - 1

    def ring(i, j):
        return 1 + i * segments + (j % segments)

    faces = []
    for j in range(segments):
        faces.append([top, ring(0, j), ring(0, j + 1)])
    for i in range(rings - 1):
        for j in range(segments):
            faces.append([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)])
            faces.append([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)])
    for j in range(segments):
        faces.append([bottom, ring(rings - 1, j + 1), ring(rings - 1, j)])

    return Mesh(np.array(verts), np.array(faces, dtype=np.int64), source_id)


def spiky_star(spike: float = 1.8, radius: float = 1.0, source_id: str = "star") -> Mesh:
    """Stellated icosahedron: one apex pushed out above every face.

    Strongly non-convex, so surface- and volume-convexity indexes drop well
    below 1.
    """
    base, faces = _icosahedron()
    base = base * radius
    verts = list(base)
    tris = []
    for a, b, c in faces:
        centroid = (base[a] + base[b] + base[c]) / 3.0
        apex = centroid / np.linalg.norm(centroid) * (radius * spike)
        k = len(verts)
        verts.append(apex)
        tris += [[a, b, k], [b, c, k], [c, a, k]]
    return Mesh(np.array(verts), np.array(tris, dtype=np.int64), source_id)


def perturbed(mesh: Mesh, amplitude: float, seed: int) -> Mesh:
    """Displace vertices radially by uniform noise; topology is unchanged."""
    rng = np.random.default_rng(seed)
    center = mesh.vertices.mean(axis=0)
    radial = mesh.vertices - center
    norms = np.linalg.norm(radial, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    noise = rng.uniform(-amplitude, amplitude, size=(mesh.vertex_count, 1))
    return Mesh(mesh.vertices + radial / norms * noise, mesh.faces.copy(), mesh.source_id)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish random proper rotation via QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0.0:
        q[:, 0] *= -1.0
    return q
