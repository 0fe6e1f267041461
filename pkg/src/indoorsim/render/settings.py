"""Render settings, lens models and the per-frame output bundle."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..geometry import RigidTransform


@dataclass
class RenderSettings:
    width: int = 640
    height: int = 480
    spp: int = 256                 # samples per pixel
    max_bounces: int = 6
    shutter_subframes: int = 8
    rng_seed: int = 0
    clamp_radiance: float | None = None
    tile: int = 64                 # tile edge, pixels

    def __post_init__(self):
        if self.spp < 1:
            raise ValueError("spp must be >= 1")
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be >= 1")
        if self.max_bounces < 1:
            raise ValueError("max_bounces must be >= 1")
        if self.shutter_subframes < 1:
            raise ValueError("shutter_subframes must be >= 1")


class LensKind(Enum):
    PINHOLE = "Pinhole"
    THIN_LENS_DOF = "ThinLensDoF"
    FISHEYE = "Fisheye"
    PANORAMA = "Panorama"


@dataclass
class LensModel:
    kind: LensKind = LensKind.PINHOLE
    focal_px: float = 600.0        # Pinhole / DoF; Fisheye: r = f * theta
    aperture_radius: float = 0.0   # meters, DoF
    focus_distance: float = 1.0    # meters, DoF

    def __post_init__(self):
        if isinstance(self.kind, str):
            self.kind = LensKind(self.kind)
        if self.focal_px <= 0:
            raise ValueError("focal_px must be > 0")
        if self.kind == LensKind.THIN_LENS_DOF and self.focus_distance <= 0:
            raise ValueError("focus_distance must be > 0 for depth of field")

    @staticmethod
    def pinhole(focal_px: float = 600.0) -> "LensModel":
        return LensModel(LensKind.PINHOLE, focal_px=focal_px)

    @staticmethod
    def fisheye_180(width: int = 600, height: int = 600) -> "LensModel":
        # equidistant r = f*theta with the image circle reaching 90 deg
        f = (min(width, height) / 2.0) / (np.pi / 2.0)
        return LensModel(LensKind.FISHEYE, focal_px=f)

    @staticmethod
    def panorama() -> "LensModel":
        return LensModel(LensKind.PANORAMA, focal_px=1.0)


@dataclass
class FrameBundle:
    rgb: np.ndarray                     # (H, W, 3) float, linear radiance
    depth: np.ndarray                   # (H, W) float, Euclidean ray meters; 0 = no hit
    normals: np.ndarray                 # (H, W, 3) float, camera frame, unit where hit
    semantic: np.ndarray                # (H, W) uint16 NYU40 id, 0 = background
    instance: np.ndarray                # (H, W) uint16 instance id, 0 = background
    flow: np.ndarray | None             # (H, W, 2) float32 pixels toward next frame
    albedo: np.ndarray | None = None    # (H, W, 3) texture-modulated lambertian albedo
    shutter_open_pose: RigidTransform = field(default_factory=RigidTransform.identity)
    shutter_close_pose: RigidTransform = field(default_factory=RigidTransform.identity)
    timestamp: float = 0.0
    stats: dict = field(default_factory=dict)
