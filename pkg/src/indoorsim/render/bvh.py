"""Bounding-volume hierarchy over world-space triangles, plus the flattened
scene arrays the numba kernels consume."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..scene.types import Scene
from ..scene.types import compute_vertex_normals

LEAF_SIZE = 4


@dataclass
class Bvh:
    """Flattened BVH. Internal nodes store child indices; leaves reference a
    contiguous run of the reordered triangle list.

    node_left:  internal -> left child index;  leaf -> -(first_tri + 1)
    node_right: internal -> right child index; leaf -> triangle count
    """

    node_min: np.ndarray     # (M, 3) float64
    node_max: np.ndarray     # (M, 3)
    node_left: np.ndarray    # (M,) int32
    node_right: np.ndarray   # (M,) int32
    tri_order: np.ndarray    # (T,) int32, triangle indices in leaf order

    @property
    def num_nodes(self) -> int:
        return len(self.node_left)


@dataclass
class ScenePack:
    """World-space triangle soup + material/light tables for the kernels."""

    tri_v0: np.ndarray       # (T, 3)
    tri_e1: np.ndarray       # v1 - v0
    tri_e2: np.ndarray       # v2 - v0
    tri_n0: np.ndarray       # shading normals at corners (unit, world)
    tri_n1: np.ndarray
    tri_n2: np.ndarray
    tri_uv0: np.ndarray      # (T, 2) texture coordinates at corners
    tri_uv1: np.ndarray
    tri_uv2: np.ndarray
    tri_obj: np.ndarray      # (T,) int32 object index
    obj_mat: np.ndarray      # (O,) int32 material index
    obj_class: np.ndarray    # (O,) int32 NYU40
    obj_inst: np.ndarray     # (O,) int32 instance id
    m_albedo: np.ndarray     # (M, 3)
    m_rough: np.ndarray      # (M,)
    m_tint: np.ndarray       # (M, 3)
    m_ior: np.ndarray        # (M,)
    m_trans: np.ndarray      # (M, 3)
    m_lobes: np.ndarray      # (M, 4)
    m_emission: np.ndarray   # (M, 3)
    m_tex: np.ndarray        # (M,) int32 texture index, -1 = untextured
    tex_data: np.ndarray     # flattened RGB texels of all textures
    tex_meta: np.ndarray     # (K, 3) int64: offset, width, height
    l_kind: np.ndarray       # (L,) int32: 0 sun, 1 spot, 2 area
    l_radiant: np.ndarray    # (L, 3) color * brightness (enabled lights only)
    l_pos: np.ndarray        # (L, 3)
    l_dir: np.ndarray        # (L, 3) unit
    l_maxdist: np.ndarray    # (L,)
    l_cos_half_cone: np.ndarray  # (L,)
    l_u: np.ndarray          # (L, 3) area half-axis u (length = extent/2)
    l_v: np.ndarray          # (L, 3) area half-axis v
    l_area: np.ndarray       # (L,)
    env: np.ndarray          # (3,)

    @property
    def num_triangles(self) -> int:
        return len(self.tri_v0)


def pack_scene(scene: Scene, base_dir: str | None = None) -> ScenePack:
    """Bake object poses into world-space triangles and flatten tables."""
    v0s, e1s, e2s, n0s, n1s, n2s, tobj = [], [], [], [], [], [], []
    uv0s, uv1s, uv2s = [], [], []
    mats: list = []
    mat_index: dict[int, int] = {}
    obj_mat, obj_class, obj_inst = [], [], []

    for oi, obj in enumerate(scene.objects):
        mesh = obj.mesh
        rot = obj.pose.matrix
        verts = mesh.vertices @ rot.T + obj.pose.translation
        vn = mesh.vertex_normals
        if vn is None:
            vn = compute_vertex_normals(mesh)
        normals = vn @ rot.T
        uv = mesh.uv if mesh.uv is not None else np.zeros((mesh.num_vertices, 2))
        t = mesh.triangles
        if mesh.num_triangles:
            v0 = verts[t[:, 0]]
            v1 = verts[t[:, 1]]
            v2 = verts[t[:, 2]]
            v0s.append(v0)
            e1s.append(v1 - v0)
            e2s.append(v2 - v0)
            n0s.append(normals[t[:, 0]])
            n1s.append(normals[t[:, 1]])
            n2s.append(normals[t[:, 2]])
            uv0s.append(uv[t[:, 0]])
            uv1s.append(uv[t[:, 1]])
            uv2s.append(uv[t[:, 2]])
            tobj.append(np.full(mesh.num_triangles, oi, np.int32))
        key = id(obj.material)
        if key not in mat_index:
            mat_index[key] = len(mats)
            mats.append(obj.material)
        obj_mat.append(mat_index[key])
        obj_class.append(obj.nyu40_class)
        obj_inst.append(obj.instance_id)

    def cat(parts, width):
        if parts:
            return np.ascontiguousarray(np.concatenate(parts, axis=0), dtype=np.float64)
        return np.zeros((0, width))

    if not mats:
        from ..scene.types import Material

        mats = [Material()]

    # load albedo-modulating textures (nearest-neighbor lookup in the kernel)
    m_tex = np.full(len(mats), -1, np.int32)
    tex_blobs: list[np.ndarray] = []
    tex_meta: list[tuple[int, int, int]] = []
    offset = 0
    for mi, mat in enumerate(mats):
        if mat.texture is None:
            continue
        img = _load_texture(mat.texture, base_dir)
        if img is None:
            continue
        h, w = img.shape[:2]
        m_tex[mi] = len(tex_meta)
        tex_meta.append((offset, w, h))
        tex_blobs.append(img.reshape(-1))
        offset += img.size

    enabled = [l for l in scene.lights if l.enabled]
    nl = len(enabled)
    l_kind = np.zeros(nl, np.int32)
    l_radiant = np.zeros((nl, 3))
    l_pos = np.zeros((nl, 3))
    l_dir = np.zeros((nl, 3))
    l_maxdist = np.zeros(nl)
    l_cos = np.zeros(nl)
    l_u = np.zeros((nl, 3))
    l_v = np.zeros((nl, 3))
    l_area = np.zeros(nl)
    kind_code = {"Sun": 0, "Spot": 1, "Area": 2}
    for i, light in enumerate(enabled):
        l_kind[i] = kind_code[light.kind.value]
        l_radiant[i] = light.effective_color() * light.brightness
        l_pos[i] = light.position
        d = light.direction / np.linalg.norm(light.direction)
        l_dir[i] = d
        l_maxdist[i] = light.max_distance if np.isfinite(light.max_distance) else 1e30
        l_cos[i] = np.cos(light.cone_angle / 2.0)
        if light.kind.value == "Area":
            # orthonormal tangent frame of the emitting rectangle
            a = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
            u = np.cross(d, a)
            u /= np.linalg.norm(u)
            v = np.cross(d, u)
            l_u[i] = u * light.extent[0] / 2.0
            l_v[i] = v * light.extent[1] / 2.0
            l_area[i] = light.extent[0] * light.extent[1]

    return ScenePack(
        tri_v0=cat(v0s, 3),
        tri_e1=cat(e1s, 3),
        tri_e2=cat(e2s, 3),
        tri_n0=cat(n0s, 3),
        tri_n1=cat(n1s, 3),
        tri_n2=cat(n2s, 3),
        tri_uv0=cat(uv0s, 2),
        tri_uv1=cat(uv1s, 2),
        tri_uv2=cat(uv2s, 2),
        tri_obj=(np.concatenate(tobj) if tobj else np.zeros(0, np.int32)),
        obj_mat=np.asarray(obj_mat, np.int32),
        obj_class=np.asarray(obj_class, np.int32),
        obj_inst=np.asarray(obj_inst, np.int32),
        m_albedo=np.array([m.lambertian_albedo for m in mats], float),
        m_rough=np.array([m.microfacet_roughness for m in mats], float),
        m_tint=np.array([m.microfacet_tint for m in mats], float),
        m_ior=np.array([m.dielectric_ior for m in mats], float),
        m_trans=np.array([m.transmission for m in mats], float),
        m_lobes=np.array([m.lobe_weights for m in mats], float),
        m_emission=np.array([m.emission for m in mats], float),
        m_tex=m_tex,
        tex_data=(np.concatenate(tex_blobs) if tex_blobs else np.zeros(0)),
        tex_meta=(np.asarray(tex_meta, np.int64).reshape(-1, 3) if tex_meta
                  else np.zeros((0, 3), np.int64)),
        l_kind=l_kind,
        l_radiant=l_radiant,
        l_pos=l_pos,
        l_dir=l_dir,
        l_maxdist=l_maxdist,
        l_cos_half_cone=l_cos,
        l_u=l_u,
        l_v=l_v,
        l_area=l_area,
        env=np.asarray(scene.env_radiance, float),
    )


def _load_texture(ref: str | np.ndarray, base_dir: str | None):
    """Texture reference to a linear float RGB array, or None when missing."""
    import os

    if isinstance(ref, np.ndarray):
        return np.ascontiguousarray(ref, dtype=np.float64).reshape(ref.shape[0], -1, 3)
    path = ref if os.path.isabs(ref) or base_dir is None else os.path.join(base_dir, ref)
    if not os.path.exists(path):
        return None
    from PIL import Image

    img = np.asarray(Image.open(path).convert("RGB"), dtype=np.float64) / 255.0
    # stored sRGB; albedo modulation happens in linear space
    return np.where(img <= 0.04045, img / 12.92, ((img + 0.055) / 1.055) ** 2.4)


def build_bvh(pack: ScenePack) -> Bvh:
    """Median-split BVH on centroid of the longest axis, leaves <= LEAF_SIZE."""
    t = pack.num_triangles
    if t == 0:
        return Bvh(
            node_min=np.zeros((1, 3)),
            node_max=np.zeros((1, 3)),
            node_left=np.array([-1], np.int32),
            node_right=np.array([0], np.int32),
            tri_order=np.zeros(0, np.int32),
        )
    v0 = pack.tri_v0
    v1 = v0 + pack.tri_e1
    v2 = v0 + pack.tri_e2
    tmin = np.minimum(np.minimum(v0, v1), v2)
    tmax = np.maximum(np.maximum(v0, v1), v2)
    centroid = (tmin + tmax) * 0.5

    order = np.arange(t, dtype=np.int64)
    node_min: list = []
    node_max: list = []
    node_left: list = []
    node_right: list = []

    # explicit stack of (start, end, node_index); children appended after parent
    def new_node():
        node_min.append(None)
        node_max.append(None)
        node_left.append(0)
        node_right.append(0)
        return len(node_left) - 1

    root = new_node()
    stack = [(0, t, root)]
    while stack:
        start, end, ni = stack.pop()
        idx = order[start:end]
        node_min[ni] = tmin[idx].min(axis=0)
        node_max[ni] = tmax[idx].max(axis=0)
        count = end - start
        if count <= LEAF_SIZE:
            node_left[ni] = -(start + 1)
            node_right[ni] = count
            continue
        cen = centroid[idx]
        axis = int(np.argmax(cen.max(axis=0) - cen.min(axis=0)))
        mid = count // 2
        part = np.argpartition(cen[:, axis], mid)
        order[start:end] = idx[part]
        li = new_node()
        ri = new_node()
        node_left[ni] = li
        node_right[ni] = ri
        stack.append((start, start + mid, li))
        stack.append((start + mid, end, ri))

    return Bvh(
        node_min=np.ascontiguousarray(np.stack(node_min), dtype=np.float64),
        node_max=np.ascontiguousarray(np.stack(node_max), dtype=np.float64),
        node_left=np.asarray(node_left, np.int32),
        node_right=np.asarray(node_right, np.int32),
        tri_order=order.astype(np.int32),
    )
