"""Reader and writer for ASCII OFF polygonal meshes.

Polygon faces are fan-triangulated around their first vertex at parse time,
so every Mesh leaving this module is a pure triangle mesh. serialize_off
writes 17 significant digits, which round-trips float64 exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyMesh, IndexOutOfRange, MalformedHeader, TruncatedFile
from .mesh import Mesh


def _meaningful_lines(text: str):
    for line in text.splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield stripped


def parse_off(source: str | bytes, source_id: str = "") -> Mesh:
    """Parse ASCII OFF text (optional "OFF" header, counts, vertices, faces)."""
    if isinstance(source, bytes):
        source = source.decode("ascii", errors="replace")
    lines = _meaningful_lines(source)

    try:
        first = next(lines)
    except StopIteration:
        raise MalformedHeader("empty file") from None
    if first.upper() == "OFF":
        try:
            first = next(lines)
        except StopIteration:
            raise MalformedHeader("missing counts line") from None
    elif first.upper().startswith("OFF"):
        # tolerate "OFF nv nf ne" on a single line
        first = first[3:].strip()

    counts = first.split()
    if len(counts) < 3:
        raise MalformedHeader(f"counts line unreadable: {first!r}")
    try:
        nv, nf = int(counts[0]), int(counts[1])
        int(counts[2])
    except ValueError:
        raise MalformedHeader(f"counts line unreadable: {first!r}") from None
    if nv == 0 or nf == 0:
        raise EmptyMesh(f"{nv} vertices, {nf} faces")

    vertices = np.empty((nv, 3), dtype=np.float64)
    for i in range(nv):
        try:
            tokens = next(lines).split()
        except StopIteration:
            raise TruncatedFile(f"expected {nv} vertices, file ended at {i}") from None
        if len(tokens) < 3:
            raise TruncatedFile(f"vertex line {i} has {len(tokens)} fields")
        try:
            vertices[i] = [float(tokens[0]), float(tokens[1]), float(tokens[2])]
        except ValueError:
            raise TruncatedFile(f"vertex line {i} unreadable") from None

    triangles: list[tuple[int, int, int]] = []
    for i in range(nf):
        try:
            tokens = next(lines).split()
        except StopIteration:
            raise TruncatedFile(f"expected {nf} faces, file ended at {i}") from None
        try:
            k = int(tokens[0])
            idx = [int(t) for t in tokens[1 : 1 + k]]
        except ValueError:
            raise TruncatedFile(f"face line {i} unreadable") from None
        if k < 3 or len(idx) != k:
            raise TruncatedFile(f"face line {i} declares {k} vertices")
        for j in idx:
            if j < 0 or j >= nv:
                raise IndexOutOfRange(f"face {i} references vertex {j} of {nv}")
        for j in range(1, k - 1):
            triangles.append((idx[0], idx[j], idx[j + 1]))

    return Mesh(vertices, np.array(triangles, dtype=np.int64), source_id)


def serialize_off(mesh: Mesh) -> str:
    out = ["OFF", f"{mesh.vertex_count} {mesh.face_count} 0"]
    for v in mesh.vertices:
        out.append(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}")
    for f in mesh.faces:
        out.append(f"3 {f[0]} {f[1]} {f[2]}")
    return "\n".join(out) + "\n"
