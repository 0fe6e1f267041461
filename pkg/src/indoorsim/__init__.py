"""indoorsim: synthetic indoor RGB-D-inertial-event sequences for SLAM work.

Scene loading and free space, a CPU path tracer with ground-truth passes,
stochastic trajectory synthesis, continuous-time pose splines with IMU and
event-camera emulation, scene-change simulation, dataset export, and ATE
evaluation — plus a local preview service for the browser trajectory editor.
"""

from .geometry import RigidTransform

__version__ = "0.1.0"

__all__ = ["RigidTransform", "__version__"]
