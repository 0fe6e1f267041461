"""Trajectory parameter types and randomization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import RigidTransform

V_MULT_RANGE = (0.5, 5.0)
W_MULT_RANGE = (0.5, 3.0)
TRAJ_TYPES = (1, 2, 3)   # 1: two-body random, 2: hand-held, 3: look-forward
HEIGHT_RANGE = (1.0, 2.0)  # camera height above the floor, meters
UP_TILT_MAX_DEG = 5.0


@dataclass
class TrajectoryParams:
    traj_type: int = 1
    v_mult: float = 1.0
    w_mult: float = 1.0
    duration: float = 40.0        # seconds
    frame_rate: float = 25.0      # Hz
    seed: int = 0
    exposure: float | None = None  # seconds; default half the frame period

    def __post_init__(self):
        if self.traj_type not in TRAJ_TYPES:
            raise ValueError(f"traj_type must be one of {TRAJ_TYPES}")
        n = self.duration * self.frame_rate
        if abs(n - round(n)) > 1e-9:
            raise ValueError("duration * frame_rate must be an integer frame count")
        if self.exposure is None:
            self.exposure = 0.5 / self.frame_rate
        if not (0.0 < self.exposure < 1.0 / self.frame_rate):
            raise ValueError("exposure must lie in (0, frame period)")

    @property
    def num_frames(self) -> int:
        return int(round(self.duration * self.frame_rate))


@dataclass
class Keyframe:
    timestamp: float
    shutter_open_pose: RigidTransform
    shutter_close_pose: RigidTransform
    look_at: np.ndarray | None = None  # effective look-at point (diagnostics)


@dataclass
class Trajectory:
    frames: list[Keyframe]
    params: TrajectoryParams
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.frames)

    def positions(self) -> np.ndarray:
        return np.array([k.shutter_open_pose.translation for k in self.frames])

    def timestamps(self) -> np.ndarray:
        return np.array([k.timestamp for k in self.frames])

    def stamped_poses(self, which: str = "open") -> list[tuple[float, RigidTransform]]:
        if which == "open":
            return [(k.timestamp, k.shutter_open_pose) for k in self.frames]
        if which == "close":
            return [(k.timestamp + self.params.exposure, k.shutter_close_pose) for k in self.frames]
        raise ValueError("which must be 'open' or 'close'")


def sample_params(seed: int, duration: float = 40.0, frame_rate: float = 25.0) -> TrajectoryParams:
    """Random per-trajectory parameters: v_mult ~ U[0.5, 5], w_mult ~ U[0.5, 3],
    type uniform over {1, 2, 3}."""
    rng = np.random.default_rng(seed)
    return TrajectoryParams(
        traj_type=int(rng.integers(1, 4)),
        v_mult=float(rng.uniform(*V_MULT_RANGE)),
        w_mult=float(rng.uniform(*W_MULT_RANGE)),
        duration=duration,
        frame_rate=frame_rate,
        seed=seed,
    )
