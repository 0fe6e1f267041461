"""Camera ray generation and world-to-pixel projection for the four lens models.

Camera frame: +z along the optical axis, +x right, +y down (image rows grow
downward). Pixel (x, y) with sub-pixel sample (u, v) in [0,1)^2 maps through
the lens; pixel centers are (x + 0.5, y + 0.5).
"""

from __future__ import annotations

import numpy as np

from ..geometry import RigidTransform
from .settings import LensKind, LensModel


def generate_rays(
    lens: LensModel,
    width: int,
    height: int,
    pixels_x: np.ndarray,
    pixels_y: np.ndarray,
    sample_u: np.ndarray,
    sample_v: np.ndarray,
    pose: RigidTransform,
    lens_uv: np.ndarray | None = None,
):
    """Batch ray generation.

    Returns (origins (N,3), directions (N,3) unit, valid (N,) bool). Invalid
    rays (fisheye pixels outside the image circle) carry a zero direction.
    """
    cx = width / 2.0
    cy = height / 2.0
    px = np.asarray(pixels_x, float) + np.asarray(sample_u, float)
    py = np.asarray(pixels_y, float) + np.asarray(sample_v, float)
    n = len(px)
    valid = np.ones(n, dtype=bool)
    origins_cam = np.zeros((n, 3))

    if lens.kind in (LensKind.PINHOLE, LensKind.THIN_LENS_DOF):
        d = np.stack([(px - cx) / lens.focal_px, (py - cy) / lens.focal_px, np.ones(n)], axis=1)
        if lens.kind == LensKind.THIN_LENS_DOF and lens.aperture_radius > 0:
            if lens_uv is None:
                raise ValueError("thin-lens rays need aperture samples")
            r = lens.aperture_radius * np.sqrt(lens_uv[:, 0])
            phi = 2.0 * np.pi * lens_uv[:, 1]
            origins_cam[:, 0] = r * np.cos(phi)
            origins_cam[:, 1] = r * np.sin(phi)
            focus = d * lens.focus_distance  # point on the focal plane (z = focus_distance)
            d = focus - origins_cam
    elif lens.kind == LensKind.FISHEYE:
        dx = px - cx
        dy = py - cy
        r = np.hypot(dx, dy)
        r_max = min(cx, cy)
        theta = r / lens.focal_px
        valid = (r <= r_max) & (theta <= np.pi)
        with np.errstate(invalid="ignore", divide="ignore"):
            sx = np.where(r > 0, dx / np.maximum(r, 1e-300), 0.0)
            sy = np.where(r > 0, dy / np.maximum(r, 1e-300), 0.0)
        st = np.sin(theta)
        d = np.stack([st * sx, st * sy, np.cos(theta)], axis=1)
        d[~valid] = 0.0
    elif lens.kind == LensKind.PANORAMA:
        az = px / width * 2.0 * np.pi - np.pi
        el = np.pi / 2.0 - py / height * np.pi
        ce = np.cos(el)
        d = np.stack([np.sin(az) * ce, -np.sin(el), np.cos(az) * ce], axis=1)
    else:  # pragma: no cover
        raise ValueError(f"unknown lens kind {lens.kind}")

    norm = np.linalg.norm(d, axis=1, keepdims=True)
    norm[norm == 0] = 1.0
    d = d / norm
    rot = pose.matrix
    dirs_world = d @ rot.T
    origins_world = origins_cam @ rot.T + pose.translation
    return origins_world, dirs_world, valid


def generate_ray(lens: LensModel, width: int, height: int, pixel, sample, pose: RigidTransform):
    """Single-ray convenience wrapper: returns (origin, unit direction) or None
    when the fisheye pixel falls outside the image circle."""
    x, y = pixel
    if not (0 <= x < width and 0 <= y < height):
        raise ValueError(f"pixel {pixel} outside {width}x{height} image")
    u, v = sample
    o, d, valid = generate_rays(
        lens, width, height,
        np.array([x], float), np.array([y], float),
        np.array([u], float), np.array([v], float),
        pose,
        lens_uv=np.array([[0.0, 0.0]]),  # aperture center
    )
    if not valid[0]:
        return None
    return o[0], d[0]


def project_points(
    lens: LensModel,
    width: int,
    height: int,
    points_world: np.ndarray,
    pose: RigidTransform,
):
    """Project world points to continuous pixel coordinates under a pose.

    Returns (coords (N,2) in (x+u, y+v) space, valid (N,) bool). Thin-lens
    projects through the aperture center (the pinhole limit).
    """
    cx = width / 2.0
    cy = height / 2.0
    rot = pose.matrix
    pc = (np.asarray(points_world, float) - pose.translation) @ rot  # camera frame
    x, y, z = pc[:, 0], pc[:, 1], pc[:, 2]
    n = len(pc)

    if lens.kind in (LensKind.PINHOLE, LensKind.THIN_LENS_DOF):
        valid = z > 1e-9
        zz = np.where(valid, z, 1.0)
        coords = np.stack([lens.focal_px * x / zz + cx, lens.focal_px * y / zz + cy], axis=1)
    elif lens.kind == LensKind.FISHEYE:
        rad = np.linalg.norm(pc, axis=1)
        valid = rad > 1e-12
        theta = np.arccos(np.clip(z / np.maximum(rad, 1e-300), -1.0, 1.0))
        rho = np.hypot(x, y)
        r = lens.focal_px * theta
        sx = np.where(rho > 0, x / np.maximum(rho, 1e-300), 0.0)
        sy = np.where(rho > 0, y / np.maximum(rho, 1e-300), 0.0)
        coords = np.stack([cx + r * sx, cy + r * sy], axis=1)
        valid &= np.hypot(coords[:, 0] - cx, coords[:, 1] - cy) <= min(cx, cy) + 1e-9
    elif lens.kind == LensKind.PANORAMA:
        rad = np.linalg.norm(pc, axis=1)
        valid = rad > 1e-12
        az = np.arctan2(x, z)
        el = np.arcsin(np.clip(-y / np.maximum(rad, 1e-300), -1.0, 1.0))
        coords = np.stack([(az + np.pi) / (2.0 * np.pi) * width, (np.pi / 2.0 - el) / np.pi * height], axis=1)
    else:  # pragma: no cover
        raise ValueError(f"unknown lens kind {lens.kind}")
    return coords, valid
