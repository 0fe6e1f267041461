from .settings import FrameBundle, LensKind, LensModel, RenderSettings
from .bvh import Bvh, ScenePack, build_bvh, pack_scene
from .lens import generate_ray, generate_rays, project_points
from .integrator import (
    compute_flow,
    prepare_scene,
    render_frame,
    render_gt_passes,
    render_rgb,
    tile_seed,
    trace_path,
)
from .kinect import KinectNoiseParams, apply_kinect_noise

__all__ = [
    "Bvh",
    "FrameBundle",
    "KinectNoiseParams",
    "LensKind",
    "LensModel",
    "RenderSettings",
    "ScenePack",
    "apply_kinect_noise",
    "build_bvh",
    "compute_flow",
    "generate_ray",
    "generate_rays",
    "pack_scene",
    "prepare_scene",
    "project_points",
    "render_frame",
    "render_gt_passes",
    "render_rgb",
    "tile_seed",
    "trace_path",
]
