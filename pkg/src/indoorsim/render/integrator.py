"""Host-side render orchestration: tiling, sampling, ground-truth passes.

Determinism: tiles are processed in a fixed order and every tile draws its
randomness from its own generator seeded by hash(frame, tile, global seed),
so output is bit-identical however the kernel threads are scheduled.
"""

from __future__ import annotations

import hashlib

import numpy as np

from ..geometry import RigidTransform, interpolate_pose
from ..scene.types import Scene
from . import kernels
from .bvh import Bvh, ScenePack, build_bvh, pack_scene
from .lens import generate_rays, project_points
from .settings import FrameBundle, LensModel, RenderSettings

FLOW_SENTINEL = np.nan


def tile_seed(global_seed: int, frame_index: int, tile_x: int, tile_y: int) -> int:
    digest = hashlib.sha256(f"{global_seed}:{frame_index}:{tile_x}:{tile_y}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def prepare_scene(scene: Scene, base_dir: str | None = None) -> tuple[ScenePack, Bvh]:
    pack = pack_scene(scene, base_dir=base_dir)
    return pack, build_bvh(pack)


def _kernel_args(pack: ScenePack, bvh: Bvh):
    return (
        bvh.node_min, bvh.node_max, bvh.node_left, bvh.node_right, bvh.tri_order,
        pack.tri_v0, pack.tri_e1, pack.tri_e2,
        pack.tri_n0, pack.tri_n1, pack.tri_n2,
        pack.tri_uv0, pack.tri_uv1, pack.tri_uv2, pack.tri_obj,
        pack.obj_mat, pack.m_albedo, pack.m_rough, pack.m_tint, pack.m_ior,
        pack.m_trans, pack.m_lobes, pack.m_emission,
        pack.m_tex, pack.tex_data, pack.tex_meta,
        pack.l_kind, pack.l_radiant, pack.l_pos, pack.l_dir, pack.l_maxdist,
        pack.l_cos_half_cone, pack.l_u, pack.l_v, pack.l_area, pack.env,
    )


def _trace_batch(pack, bvh, origins, dirs, valid, uniforms, max_bounces):
    n = len(origins)
    out = np.zeros((n, 3))
    bad = np.zeros(n, bool)
    kernels.trace_paths(
        np.ascontiguousarray(origins), np.ascontiguousarray(dirs),
        np.ascontiguousarray(valid), np.ascontiguousarray(uniforms),
        *_kernel_args(pack, bvh),
        max_bounces, out, bad,
    )
    return out, bad


def render_rgb(
    pack: ScenePack,
    bvh: Bvh,
    lens: LensModel,
    settings: RenderSettings,
    subframe_poses: list[RigidTransform],
    frame_index: int = 0,
):
    """Monte Carlo RGB render; returns ((H, W, 3) linear radiance, stats)."""
    w, h = settings.width, settings.height
    spp = settings.spp
    n_sub = len(subframe_poses)
    image = np.zeros((h, w, 3))
    rejected = 0

    tile = settings.tile
    for ty0 in range(0, h, tile):
        for tx0 in range(0, w, tile):
            tw = min(tile, w - tx0)
            th = min(tile, h - ty0)
            yy, xx = np.mgrid[ty0:ty0 + th, tx0:tx0 + tw]
            px = xx.ravel().astype(float)
            py = yy.ravel().astype(float)
            npix = len(px)
            rng = np.random.default_rng(tile_seed(settings.rng_seed, frame_index, tx0, ty0))
            accum = np.zeros((npix, 3))

            chunk = max(1, min(spp, 262144 // max(npix, 1)))
            s = 0
            while s < spp:
                cs = min(chunk, spp - s)
                n = npix * cs
                u = rng.random((cs, npix))
                v = rng.random((cs, npix))
                lens_uv = rng.random((cs, npix, 2))
                uniforms = rng.random((n, settings.max_bounces, 8))

                origins = np.empty((n, 3))
                dirs = np.empty((n, 3))
                valid = np.empty(n, bool)
                for k in range(cs):
                    pose = subframe_poses[((s + k) * n_sub) // spp]
                    o, d, ok = generate_rays(
                        lens, w, h, px, py, u[k], v[k], pose, lens_uv=lens_uv[k]
                    )
                    origins[k * npix:(k + 1) * npix] = o
                    dirs[k * npix:(k + 1) * npix] = d
                    valid[k * npix:(k + 1) * npix] = ok

                out, bad = _trace_batch(pack, bvh, origins, dirs, valid, uniforms, settings.max_bounces)
                if bad.any():
                    # non-finite samples: one resample pass with fresh uniforms
                    rejected += int(bad.sum())
                    re_uniforms = rng.random((int(bad.sum()), settings.max_bounces, 8))
                    re_out, re_bad = _trace_batch(
                        pack, bvh, origins[bad], dirs[bad], valid[bad], re_uniforms, settings.max_bounces
                    )
                    re_out[re_bad] = 0.0
                    out[bad] = re_out
                if settings.clamp_radiance is not None:
                    np.minimum(out, settings.clamp_radiance, out=out)
                accum += out.reshape(cs, npix, 3).sum(axis=0)
                s += cs

            image[ty0:ty0 + th, tx0:tx0 + tw] = (accum / spp).reshape(th, tw, 3)

    return image, {"rejected_samples": rejected}


def render_gt_passes(
    pack: ScenePack,
    bvh: Bvh,
    lens: LensModel,
    width: int,
    height: int,
    pose: RigidTransform,
):
    """Depth / normals / semantic / instance / albedo at 1 primary ray per pixel center."""
    yy, xx = np.mgrid[0:height, 0:width]
    px = xx.ravel().astype(float)
    py = yy.ravel().astype(float)
    n = len(px)
    half = np.full(n, 0.5)
    origins, dirs, valid = generate_rays(lens, width, height, px, py, half, half, pose)

    t = np.empty(n)
    tri = np.empty(n, np.int64)
    hu = np.empty(n)
    hv = np.empty(n)
    kernels.closest_hit_batch(
        np.ascontiguousarray(origins), np.ascontiguousarray(dirs),
        bvh.node_min, bvh.node_max, bvh.node_left, bvh.node_right, bvh.tri_order,
        pack.tri_v0, pack.tri_e1, pack.tri_e2, kernels.T_MIN, 1e30,
        t, tri, hu, hv,
    )
    hit = (tri >= 0) & valid
    t = np.where(hit, t, 0.0)

    depth = t.reshape(height, width)

    normals = np.zeros((n, 3))
    semantic = np.zeros(n, np.uint16)
    instance = np.zeros(n, np.uint16)
    albedo = np.zeros((n, 3))
    idx = np.nonzero(hit)[0]
    if len(idx):
        tr = tri[idx]
        w0 = (1.0 - hu[idx] - hv[idx])[:, None]
        ns = w0 * pack.tri_n0[tr] + hu[idx][:, None] * pack.tri_n1[tr] + hv[idx][:, None] * pack.tri_n2[tr]
        ns /= np.maximum(np.linalg.norm(ns, axis=1, keepdims=True), 1e-300)
        # orient toward the camera, then express in the camera frame
        flip = np.einsum("ij,ij->i", ns, dirs[idx]) > 0
        ns[flip] = -ns[flip]
        normals[idx] = ns @ pose.matrix  # world -> camera (R^T n)
        obj = pack.tri_obj[tr]
        semantic[idx] = pack.obj_class[obj].astype(np.uint16)
        instance[idx] = pack.obj_inst[obj].astype(np.uint16)
        mats = pack.obj_mat[obj]
        alb = pack.m_albedo[mats].copy()
        textured = pack.m_tex[mats] >= 0
        if textured.any():
            uv = (w0 * pack.tri_uv0[tr] + hu[idx][:, None] * pack.tri_uv1[tr]
                  + hv[idx][:, None] * pack.tri_uv2[tr])
            for k in np.nonzero(textured)[0]:
                ti = pack.m_tex[mats[k]]
                off, tw, th = pack.tex_meta[ti]
                x = min(int((uv[k, 0] % 1.0) * tw), tw - 1)
                y = min(max(int((1.0 - uv[k, 1] % 1.0) * th), 0), th - 1)
                base = off + (y * tw + x) * 3
                alb[k] *= pack.tex_data[base:base + 3]
        albedo[idx] = alb

    return (
        depth,
        normals.reshape(height, width, 3),
        semantic.reshape(height, width),
        instance.reshape(height, width),
        hit.reshape(height, width),
        albedo.reshape(height, width, 3),
    )


def compute_flow(
    pack: ScenePack,
    bvh: Bvh,
    pose_t: RigidTransform,
    pose_t1: RigidTransform,
    lens: LensModel,
    width: int,
    height: int,
) -> np.ndarray:
    """Optical flow (pixels) from the frame at pose_t toward pose_t1.

    Static scene assumed: hit points at pose_t are reprojected under pose_t1;
    no-hit pixels carry NaN sentinels.
    """
    yy, xx = np.mgrid[0:height, 0:width]
    px = xx.ravel().astype(float)
    py = yy.ravel().astype(float)
    n = len(px)
    half = np.full(n, 0.5)
    origins, dirs, valid = generate_rays(lens, width, height, px, py, half, half, pose_t)

    t = np.empty(n)
    tri = np.empty(n, np.int64)
    hu = np.empty(n)
    hv = np.empty(n)
    kernels.closest_hit_batch(
        np.ascontiguousarray(origins), np.ascontiguousarray(dirs),
        bvh.node_min, bvh.node_max, bvh.node_left, bvh.node_right, bvh.tri_order,
        pack.tri_v0, pack.tri_e1, pack.tri_e2, kernels.T_MIN, 1e30,
        t, tri, hu, hv,
    )
    hit = (tri >= 0) & valid

    flow = np.full((n, 2), FLOW_SENTINEL, dtype=np.float32)
    idx = np.nonzero(hit)[0]
    if len(idx):
        points = origins[idx] + t[idx, None] * dirs[idx]
        coords, ok = project_points(lens, width, height, points, pose_t1)
        src = np.stack([px[idx] + 0.5, py[idx] + 0.5], axis=1)
        f = (coords - src).astype(np.float32)
        f[~ok] = FLOW_SENTINEL
        flow[idx] = f
    return flow.reshape(height, width, 2)


def render_frame(
    scene: Scene | tuple[ScenePack, Bvh],
    pose_open: RigidTransform,
    pose_close: RigidTransform,
    lens: LensModel,
    settings: RenderSettings,
    timestamp: float = 0.0,
    frame_index: int = 0,
) -> FrameBundle:
    """Full frame: motion-blurred RGB plus ground-truth passes.

    RGB averages shutter_subframes pose interpolations at fractions
    (i + 0.5)/S (linear translation, slerp rotation), spp split contiguously
    across subframes. GT passes render at the shutter midpoint.
    """
    if isinstance(scene, Scene):
        pack, bvh = prepare_scene(scene)
    else:
        pack, bvh = scene

    n_sub = settings.shutter_subframes
    subframe_poses = [
        interpolate_pose(pose_open, pose_close, (i + 0.5) / n_sub) for i in range(n_sub)
    ]
    rgb, stats = render_rgb(pack, bvh, lens, settings, subframe_poses, frame_index)

    pose_mid = interpolate_pose(pose_open, pose_close, 0.5)
    depth, normals, semantic, instance, _, albedo = render_gt_passes(
        pack, bvh, lens, settings.width, settings.height, pose_mid
    )

    return FrameBundle(
        rgb=rgb,
        depth=depth,
        normals=normals,
        semantic=semantic,
        instance=instance,
        flow=None,
        albedo=albedo,
        shutter_open_pose=pose_open,
        shutter_close_pose=pose_close,
        timestamp=timestamp,
        stats=stats,
    )


def trace_path(ray, scene: Scene | tuple[ScenePack, Bvh], bvh: Bvh | None = None,
               rng=None, max_bounces: int = 6) -> np.ndarray:
    """Single-path radiance estimate for (origin, direction); test/debug API."""
    if isinstance(scene, Scene):
        pack, bvh_ = prepare_scene(scene)
    else:
        pack, bvh_ = scene
    if bvh is not None:
        bvh_ = bvh
    if rng is None:
        rng = np.random.default_rng(0)
    origin, direction = ray
    o = np.asarray(origin, float).reshape(1, 3)
    d = np.asarray(direction, float).reshape(1, 3)
    d = d / np.linalg.norm(d)
    uniforms = rng.random((1, max_bounces, 8))
    out, bad = _trace_batch(pack, bvh_, o, d, np.ones(1, bool), uniforms, max_bounces)
    if bad[0]:
        out[0] = 0.0
    return out[0]
