from .params import (
    HEIGHT_RANGE,
    TRAJ_TYPES,
    UP_TILT_MAX_DEG,
    V_MULT_RANGE,
    W_MULT_RANGE,
    Keyframe,
    Trajectory,
    TrajectoryParams,
    sample_params,
)
from .generator import TrajectoryError, generate_trajectory, look_at_roll_pose
from .io import load_trajectory, save_trajectory
from .jitter import (
    JitterModel,
    apply_jitter,
    default_jitter_model,
    fit_jitter_model,
    highpass_energy,
)

__all__ = [
    "HEIGHT_RANGE",
    "JitterModel",
    "Keyframe",
    "TRAJ_TYPES",
    "Trajectory",
    "TrajectoryError",
    "TrajectoryParams",
    "UP_TILT_MAX_DEG",
    "V_MULT_RANGE",
    "W_MULT_RANGE",
    "apply_jitter",
    "default_jitter_model",
    "fit_jitter_model",
    "generate_trajectory",
    "highpass_energy",
    "load_trajectory",
    "look_at_roll_pose",
    "sample_params",
    "save_trajectory",
]
