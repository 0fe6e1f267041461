"""ASCII Wavefront-style mesh reading/writing (v/vn/vt/f records only)."""

from __future__ import annotations

import os

import numpy as np

from .types import Mesh, compute_vertex_normals


class MeshFormatError(ValueError):
    pass


def load_obj(path: str | os.PathLike) -> Mesh:
    """Parse an OBJ file supporting v, vn, vt and f records.

    Faces may use v, v/vt, v/vt/vn or v//vn indexing; polygons are fan
    triangulated. Per-face vt/vn indices are re-associated per vertex (last
    one wins), which is adequate for the simple assets this format targets.
    Missing normals are filled with area-weighted face normal averages.
    """
    positions: list[list[float]] = []
    normals: list[list[float]] = []
    uvs: list[list[float]] = []
    faces: list[tuple[tuple[int, int, int], ...]] = []

    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            try:
                if tag == "v":
                    positions.append([float(x) for x in parts[1:4]])
                elif tag == "vn":
                    normals.append([float(x) for x in parts[1:4]])
                elif tag == "vt":
                    uvs.append([float(x) for x in parts[1:3]])
                elif tag == "f":
                    corners = []
                    for token in parts[1:]:
                        fields = token.split("/")
                        vi = int(fields[0])
                        ti = int(fields[1]) if len(fields) > 1 and fields[1] else 0
                        ni = int(fields[2]) if len(fields) > 2 and fields[2] else 0
                        corners.append((vi, ti, ni))
                    if len(corners) < 3:
                        raise MeshFormatError(f"{path}:{lineno}: face with fewer than 3 vertices")
                    faces.append(tuple(corners))
                # other record types (o, g, s, usemtl, mtllib) are ignored
            except (ValueError, IndexError) as exc:
                raise MeshFormatError(f"{path}:{lineno}: malformed '{tag}' record: {line!r}") from exc

    if not positions:
        raise MeshFormatError(f"{path}: no vertices")

    nv = len(positions)

    def resolve(idx: int, count: int, what: str) -> int:
        # OBJ indices are 1-based; negative indices count from the end
        j = idx - 1 if idx > 0 else count + idx
        if not (0 <= j < count):
            raise MeshFormatError(f"{path}: {what} index {idx} out of range (count {count})")
        return j

    tris = []
    vert_uv = np.zeros((nv, 2)) if uvs else None
    vert_n = np.zeros((nv, 3)) if normals else None
    has_uv = np.zeros(nv, bool)
    for corners in faces:
        resolved = []
        for vi, ti, ni in corners:
            j = resolve(vi, nv, "vertex")
            if ti and vert_uv is not None:
                vert_uv[j] = uvs[resolve(ti, len(uvs), "uv")]
                has_uv[j] = True
            if ni and vert_n is not None:
                vert_n[j] = normals[resolve(ni, len(normals), "normal")]
            resolved.append(j)
        for a in range(1, len(resolved) - 1):
            tris.append((resolved[0], resolved[a], resolved[a + 1]))

    mesh = Mesh(
        vertices=np.asarray(positions, float),
        triangles=np.asarray(tris, np.int64) if tris else np.zeros((0, 3), np.int64),
        uv=vert_uv if (vert_uv is not None and has_uv.any()) else None,
    )
    if vert_n is not None and np.linalg.norm(vert_n, axis=1).min() > 1e-9:
        mesh.vertex_normals = vert_n / np.linalg.norm(vert_n, axis=1, keepdims=True)
    elif mesh.num_triangles:
        mesh.vertex_normals = compute_vertex_normals(mesh)
    return mesh


def save_obj(mesh: Mesh, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for v in mesh.vertices:
            f.write(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
        if mesh.uv is not None:
            for t in mesh.uv:
                f.write(f"vt {_fmt(t[0])} {_fmt(t[1])}\n")
        if mesh.vertex_normals is not None:
            for n in mesh.vertex_normals:
                f.write(f"vn {_fmt(n[0])} {_fmt(n[1])} {_fmt(n[2])}\n")
        has_t = mesh.uv is not None
        has_n = mesh.vertex_normals is not None
        for tri in mesh.triangles:
            refs = []
            for vi in tri:
                i = vi + 1
                if has_t and has_n:
                    refs.append(f"{i}/{i}/{i}")
                elif has_n:
                    refs.append(f"{i}//{i}")
                elif has_t:
                    refs.append(f"{i}/{i}")
                else:
                    refs.append(f"{i}")
            f.write("f " + " ".join(refs) + "\n")


def _fmt(x: float) -> str:
    return np.format_float_positional(float(x), trim="-")


def make_box_mesh(size=(1.0, 1.0, 1.0), center=(0.0, 0.0, 0.0)) -> Mesh:
    """Axis-aligned box with outward per-face normals (24 vertices)."""
    sx, sy, sz = (float(s) / 2.0 for s in size)
    cx, cy, cz = (float(c) for c in center)
    verts = []
    norms = []
    tris = []
    # (axis, sign) -> quad
    for axis in range(3):
        for sign in (-1.0, 1.0):
            n = np.zeros(3)
            n[axis] = sign
            u = np.zeros(3)
            u[(axis + 1) % 3] = 1.0
            v = np.cross(n, u)
            half = np.array([sx, sy, sz])
            base = len(verts)
            for du, dv in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
                p = n * half + u * half * du + v * half * dv
                verts.append([cx + p[0], cy + p[1], cz + p[2]])
                norms.append(n.tolist())
            # wind CCW looking down the outward normal
            tris.append((base, base + 1, base + 2))
            tris.append((base, base + 2, base + 3))
    mesh = Mesh(np.array(verts), np.array(tris, np.int64), vertex_normals=np.array(norms))
    # fix winding so geometric normals agree with the stored outward normals
    v = mesh.vertices
    t = mesh.triangles
    fn = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    flip = np.einsum("ij,ij->i", fn, mesh.vertex_normals[t[:, 0]]) < 0
    t[flip] = t[flip][:, [0, 2, 1]]
    return mesh


def make_sphere_mesh(radius=1.0, center=(0.0, 0.0, 0.0), subdivisions=32) -> Mesh:
    """UV sphere with exact (analytic) vertex normals."""
    n_lat = max(3, subdivisions)
    n_lon = max(3, 2 * subdivisions)
    cx, cy, cz = (float(c) for c in center)
    verts = []
    norms = []
    for i in range(n_lat + 1):
        theta = np.pi * i / n_lat
        for j in range(n_lon):
            phi = 2.0 * np.pi * j / n_lon
            n = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
            verts.append([cx + radius * n[0], cy + radius * n[1], cz + radius * n[2]])
            norms.append(n.tolist())
    tris = []
    for i in range(n_lat):
        for j in range(n_lon):
            a = i * n_lon + j
            b = i * n_lon + (j + 1) % n_lon
            c = (i + 1) * n_lon + j
            d = (i + 1) * n_lon + (j + 1) % n_lon
            if i > 0:
                tris.append((a, c, b))
            if i < n_lat - 1:
                tris.append((b, c, d))
    mesh = Mesh(np.array(verts), np.array(tris, np.int64), vertex_normals=np.array(norms))
    v = mesh.vertices
    t = mesh.triangles
    fn = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    centroid_n = (mesh.vertex_normals[t[:, 0]] + mesh.vertex_normals[t[:, 1]] + mesh.vertex_normals[t[:, 2]])
    flip = np.einsum("ij,ij->i", fn, centroid_n) < 0
    t[flip] = t[flip][:, [0, 2, 1]]
    return mesh
