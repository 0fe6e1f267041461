"""Stochastic base trajectories inside scene free space.

Three motion types share a two-body simulation (one body carries the camera,
the other the look-at point):
  type 1: both bodies random-walk and bounce inside free space;
  type 2: hand-held bias, the look-at point stays strictly below the camera;
  type 3: look-forward, the look-at point is pulled by a critically damped
          proportional force toward a target along the velocity, and camera
          forces are biased into the velocity hemisphere.

The camera height is reflected into [floor+1, floor+2] m; the camera frame
carries a constant per-trajectory roll from gravity, uniform in [0, 5] deg.
Angular rate of the view direction is capped at w_mult rad/s; random body
forces are redrawn every 0.1 s with magnitude scaled by v_mult; velocities
damp by 0.9 per second; occupied-cell contacts reflect the velocity.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation

from ..geometry import RigidTransform, look_at_pose
from ..scene.types import FreeSpaceMap
from .params import HEIGHT_RANGE, Keyframe, Trajectory, TrajectoryParams, UP_TILT_MAX_DEG

FORCE_REDRAW_PERIOD = 0.1   # seconds
FORCE_MAG_PER_VMULT = 4.0   # m/s^2 of random force per unit v_mult
DAMPING_PER_SECOND = 0.9    # velocity multiplier per second
SPEED_CAP_PER_VMULT = 1.2   # m/s; v_mult reads as the max body speed scale
LOOKAT_GAIN = 20.0          # s^-2, type-3 proportional force
LOOKAT_TARGET_DIST = 2.0    # meters ahead along the velocity
W_CAP_PER_WMULT = 2.0       # rad/s of view angular rate per unit w_mult
TYPE2_MARGIN = 0.1          # meters the look-at stays below the camera
GRAZE_FACTOR = 0.25         # type-3 wall bounces keep sliding (normal damped)
TYPE3_VERTICAL_SCALE = 0.15  # vertical kicks suppressed for look-forward motion
WALL_PROBE = 0.6            # meters, type-3 wall repulsion lookahead
WALL_REPULSION = 5.0        # m/s^2 away from nearby occupied cells
TYPE3_FORCE_PERSISTENCE = 4.0  # along-velocity component blended into forces
TYPE3_FORCE_SCALE = 0.5     # gentler kicks keep the heading stable
TYPE3_DIR_SMOOTHING = 0.25  # seconds, EMA of the velocity direction
MAX_START_TRIES = 1000


class TrajectoryError(RuntimeError):
    pass


def look_at_roll_pose(position, target, roll: float) -> RigidTransform:
    """Zero-roll look-at pose, then a roll about the optical axis.

    The camera up axis ends exactly `roll` radians from the gravity-aligned
    zero-roll up for the same view direction.
    """
    base = look_at_pose(position, target, np.array([0.0, 0.0, 1.0]))
    if roll == 0.0:
        return base
    rz = Rotation.from_rotvec([0.0, 0.0, roll]).as_matrix()
    return RigidTransform.from_matrix(base.matrix @ rz, base.translation)


def _free_columns(free: FreeSpaceMap) -> np.ndarray:
    """Centers of free cells whose z lies in the camera height band."""
    centers = free.free_cell_centers()
    if len(centers) == 0:
        return centers
    z0 = free.floor_height + HEIGHT_RANGE[0]
    z1 = free.floor_height + HEIGHT_RANGE[1]
    keep = (centers[:, 2] >= z0) & (centers[:, 2] <= z1)
    return centers[keep]


def _reflect_step(free: FreeSpaceMap, pos, vel, dt, z_band=None, graze: float = 1.0):
    """Advance pos by vel*dt with axis-wise reflection off occupied cells and,
    optionally, a z band (lo, hi). graze < 1 damps the reflected (normal)
    component so bodies slide along walls instead of ricocheting."""
    new = pos.copy()
    for axis in range(3):
        trial = new.copy()
        trial[axis] += vel[axis] * dt
        if z_band is not None and axis == 2:
            if trial[2] < z_band[0]:
                trial[2] = z_band[0] + (z_band[0] - trial[2]) * graze
                vel[2] = -vel[2] * graze
            elif trial[2] > z_band[1]:
                trial[2] = z_band[1] - (trial[2] - z_band[1]) * graze
                vel[2] = -vel[2] * graze
            trial[2] = min(max(trial[2], z_band[0]), z_band[1])
        if free.is_free(trial):
            new = trial
        else:
            vel[axis] = -vel[axis] * graze
    return new, vel


def _wall_repulsion(free: FreeSpaceMap, pos, band) -> np.ndarray:
    """Push away from occupied cells within WALL_PROBE, and from the height
    band edges; keeps look-forward motion from pinning into corners."""
    acc = np.zeros(3)
    for axis in range(3):
        for sign in (-1.0, 1.0):
            probe = pos.copy()
            probe[axis] += sign * WALL_PROBE
            blocked = not free.is_free(probe)
            if axis == 2 and not (band[0] <= probe[2] <= band[1]):
                blocked = True
            if blocked:
                acc[axis] -= sign * WALL_REPULSION
    return acc


def generate_trajectory(free: FreeSpaceMap, params: TrajectoryParams) -> Trajectory:
    """Simulate the two-body system and emit shutter open/close keyframes."""
    rng = np.random.default_rng(params.seed)
    band = (free.floor_height + HEIGHT_RANGE[0], free.floor_height + HEIGHT_RANGE[1])
    spots = _free_columns(free)
    if len(spots) == 0:
        raise TrajectoryError("no free space in the camera height band [1, 2] m above the floor")

    cam = None
    look = None
    for _ in range(MAX_START_TRIES):
        cam_try = spots[rng.integers(len(spots))] + (rng.random(3) - 0.5) * free.resolution * 0.5
        cam_try[2] = min(max(cam_try[2], band[0]), band[1])
        if not free.is_free(cam_try):
            continue
        # look-at starts nearby, in free space, below the camera for type 2
        offset = rng.normal(size=3)
        offset /= max(np.linalg.norm(offset), 1e-9)
        look_try = cam_try + offset * (1.0 + rng.random())
        if params.traj_type == 2:
            look_try[2] = min(look_try[2], cam_try[2] - TYPE2_MARGIN - 0.05)
        look_try[2] = max(look_try[2], free.floor_height + 0.05)
        horiz = np.linalg.norm((look_try - cam_try)[:2])
        if horiz < 0.2:
            continue
        if free.is_free(look_try):
            cam = cam_try
            look = look_try
            break
    if cam is None:
        raise TrajectoryError("could not place the two bodies in free space after bounded retries")

    roll = np.deg2rad(rng.uniform(0.0, UP_TILT_MAX_DEG))
    f_mag = FORCE_MAG_PER_VMULT * params.v_mult
    w_cap = W_CAP_PER_WMULT * params.w_mult

    cam_vel = rng.normal(size=3) * 0.3 * params.v_mult
    look_vel = rng.normal(size=3) * 0.3
    cam_force = np.zeros(3)
    look_force = np.zeros(3)
    next_redraw = 0.0

    forward = look - cam
    forward /= np.linalg.norm(forward)

    period = 1.0 / params.frame_rate
    exposure = params.exposure
    frames: list[Keyframe] = []
    t = 0.0

    def redraw_forces():
        nonlocal cam_force, look_force
        d = rng.normal(size=3)
        d /= max(np.linalg.norm(d), 1e-9)
        if params.traj_type == 3:
            vn = np.linalg.norm(cam_vel)
            if vn > 1e-6:
                if np.dot(d, cam_vel) < 0.0:
                    d = -d  # bias into the velocity hemisphere
                # persistence along the motion keeps the look target smooth
                d = d + TYPE3_FORCE_PERSISTENCE * cam_vel / vn
                d /= np.linalg.norm(d)
            d[2] *= TYPE3_VERTICAL_SCALE
            cam_force = d * f_mag * TYPE3_FORCE_SCALE
        else:
            cam_force = d * f_mag
        d2 = rng.normal(size=3)
        d2 /= max(np.linalg.norm(d2), 1e-9)
        look_force = d2 * f_mag

    speed_cap = SPEED_CAP_PER_VMULT * params.v_mult
    graze = GRAZE_FACTOR if params.traj_type == 3 else 1.0
    vel_ema = cam_vel / max(np.linalg.norm(cam_vel), 1e-9)

    def step(dt: float):
        nonlocal cam, look, cam_vel, look_vel, next_redraw, t
        if t >= next_redraw - 1e-12:
            redraw_forces()
            next_redraw += FORCE_REDRAW_PERIOD
        damp = DAMPING_PER_SECOND ** dt
        force = cam_force
        if params.traj_type == 3:
            force = cam_force + _wall_repulsion(free, cam, band)
        cam_vel[:] = (cam_vel + force * dt) * damp
        sp = np.linalg.norm(cam_vel)
        if sp > speed_cap:
            cam_vel[:] = cam_vel * (speed_cap / sp)
        cam[:], cam_vel[:] = _reflect_step(free, cam, cam_vel, dt, z_band=band, graze=graze)

        if params.traj_type == 3:
            vn = np.linalg.norm(cam_vel)
            vdir = cam_vel / vn if vn > 1e-6 else forward
            # track a smoothed velocity direction (tau ~ 0.2 s)
            alpha = min(1.0, dt / TYPE3_DIR_SMOOTHING)
            vel_ema[:] = (1.0 - alpha) * vel_ema + alpha * vdir
            en = np.linalg.norm(vel_ema)
            smooth_dir = vel_ema / en if en > 1e-6 else vdir
            target = cam + smooth_dir * LOOKAT_TARGET_DIST
            # camera-velocity feed-forward removes the ramp lag of a plain PD
            accel = (
                LOOKAT_GAIN * (target - look)
                - 2.0 * np.sqrt(LOOKAT_GAIN) * (look_vel - cam_vel)
            )
            look_vel[:] = look_vel + accel * dt
        else:
            look_vel[:] = (look_vel + look_force * dt) * damp
        if params.traj_type == 3:
            # virtual aim point: unconstrained by furniture, it only marks the
            # direction the camera should face
            look[:] = look + look_vel * dt
        else:
            zb = None
            if params.traj_type == 2:
                zb = (free.floor_height + 0.05, cam[2] - TYPE2_MARGIN)
            look[:], look_vel[:] = _reflect_step(free, look, look_vel, dt, z_band=zb)
            if params.traj_type == 2 and look[2] >= cam[2] - TYPE2_MARGIN:
                look[2] = cam[2] - TYPE2_MARGIN
        t += dt

    def limited_pose(dt_view: float) -> tuple[RigidTransform, np.ndarray]:
        """Turn the view direction toward the look-at body, capped at
        w_cap * dt_view radians since the previous evaluation."""
        nonlocal forward
        desired = look - cam
        dn = np.linalg.norm(desired)
        if dn < 1e-9:
            desired = forward
            dn = 1.0
        desired = desired / dn
        cosang = float(np.clip(np.dot(forward, desired), -1.0, 1.0))
        ang = np.arccos(cosang)
        max_ang = w_cap * dt_view
        if ang > max_ang and ang > 1e-12:
            axis = np.cross(forward, desired)
            an = np.linalg.norm(axis)
            if an > 1e-12:
                axis /= an
                forward = Rotation.from_rotvec(axis * max_ang).as_matrix() @ forward
            # antiparallel: keep the current forward this step
        else:
            forward = desired
        forward /= np.linalg.norm(forward)
        look_eff = cam + forward * dn
        return look_at_roll_pose(cam, cam + forward, roll), look_eff

    for i in range(params.num_frames):
        pose_open, look_eff = limited_pose(period - exposure if i else 0.0)
        step(exposure)
        pose_close, _ = limited_pose(exposure)
        step(period - exposure)
        frames.append(
            Keyframe(
                timestamp=i * period,
                shutter_open_pose=pose_open,
                shutter_close_pose=pose_close,
                look_at=look_eff,
            )
        )

    meta = {
        "roll_deg": float(np.rad2deg(roll)),
        "v_mult": params.v_mult,
        "w_mult": params.w_mult,
        "traj_type": params.traj_type,
    }
    return Trajectory(frames=frames, params=params, metadata=meta)
