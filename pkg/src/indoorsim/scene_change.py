"""Daily-life scene variation: planar push-and-settle rearrangement of movable
objects, and randomized lighting configurations."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .geometry import RigidTransform
from .scene.types import Light, Scene

GRAVITY = 9.81           # m/s^2
SIM_RATE = 100.0         # Hz integration
CONTACT_GAP = 5e-4       # meters kept clear of obstacles (< 1 mm interpenetration)


@dataclass
class RearrangeConfig:
    fraction: float | None = None       # share of movables; None -> sampled per run
    fraction_range: tuple[float, float] = (0.05, 0.45)
    accel_range: tuple[float, float] = (0.5, 2.0)   # m/s^2
    impulse_duration: float = 1.0       # seconds of applied acceleration
    settle_time: float = 10.0           # seconds total integration budget
    gravity: float = GRAVITY
    seed: int = 0

    def __post_init__(self):
        if self.fraction is not None and not (self.fraction_range[0] <= self.fraction <= self.fraction_range[1]):
            raise ValueError(f"fraction must lie in {self.fraction_range}")


@dataclass
class LightingConfig:
    temperature_range: tuple[float, float] = (2500.0, 7500.0)  # Kelvin
    brightness_scale_range: tuple[float, float] = (0.3, 2.0)
    disable_probability: float = 0.15
    seed: int = 0


def temperature_to_rgb(kelvin: float) -> np.ndarray:
    """Blackbody temperature to linear RGB, max channel normalized to 1.

    Piecewise log/power fit of the Planckian locus (pivot near 6600 K),
    converted from the fit's gamma-encoded output to linear.
    """
    if not (1000.0 <= kelvin <= 12000.0):
        raise ValueError(f"temperature {kelvin} K outside [1000, 12000]")
    t = kelvin / 100.0
    if t <= 66.0:
        r = 255.0
        g = 99.4708025861 * np.log(t) - 161.1195681661 if t > 10 else 0.0
        b = 0.0 if t <= 19 else 138.5177312231 * np.log(t - 10.0) - 305.0447927307
    else:
        r = 329.698727446 * (t - 60.0) ** -0.1332047592
        g = 288.1221695283 * (t - 60.0) ** -0.0755148492
        b = 255.0
    linear = np.clip(np.array([r, g, b]) / 255.0, 0.0, 1.0)
    peak = linear.max()
    return linear / peak if peak > 0 else linear


def _aabb(obj) -> tuple[np.ndarray, np.ndarray]:
    return obj.world_aabb()


def _sweep_limit(lo, hi, direction, obstacles, bounds) -> float:
    """Largest travel distance of AABB [lo, hi] along unit planar `direction`
    before touching any obstacle AABB or the scene bounds (minus CONTACT_GAP)."""
    best = np.inf
    blo, bhi = bounds
    # walls: box must stay inside the scene bounds
    for axis in range(2):
        d = direction[axis]
        if d > 1e-12:
            best = min(best, (bhi[axis] - hi[axis]) / d)
        elif d < -1e-12:
            best = min(best, (blo[axis] - lo[axis]) / d)
    for olo, ohi in obstacles:
        if ohi[2] <= lo[2] + 1e-12 or olo[2] >= hi[2] - 1e-12:
            continue  # no z overlap, planar motion cannot collide
        # entry distance of the moving box into the obstacle (2D slab test in xy)
        t_entry = -np.inf
        t_exit = np.inf
        skip = False
        for axis in range(2):
            d = direction[axis]
            gap_lo = olo[axis] - hi[axis]   # distance until faces touch moving +
            gap_hi = ohi[axis] - lo[axis]
            if abs(d) < 1e-12:
                if hi[axis] <= olo[axis] or lo[axis] >= ohi[axis]:
                    skip = True
                    break
                continue
            t0 = gap_lo / d
            t1 = gap_hi / d
            if t0 > t1:
                t0, t1 = t1, t0
            t_entry = max(t_entry, t0)
            t_exit = min(t_exit, t1)
        if skip or t_entry > t_exit:
            continue
        # overlap in z required for a collision
        if t_entry >= 0:
            best = min(best, t_entry)
    return max(best - CONTACT_GAP, 0.0)


def rearrange(scene: Scene, config: RearrangeConfig, report: dict | None = None) -> Scene:
    """Push a random subset of movable objects along random planar directions.

    Each selected object accelerates for impulse_duration, then slides out
    under friction (mu * g), all integrated at SIM_RATE with the run capped at
    settle_time; straight-line travel is clamped by an exact swept-AABB test
    against every other object (at its current position) and the walls.
    Objects stay upright and keep their height. When `report` is given it is
    filled with the sampled fraction, selected object names and displacements.
    """
    movable_idx = [i for i, o in enumerate(scene.objects) if o.physical.movable]
    if not movable_idx:
        raise ValueError("scene has no movable objects")

    rng = np.random.default_rng(config.seed)
    fraction = config.fraction
    if fraction is None:
        fraction = rng.uniform(*config.fraction_range)
    count = max(1, int(round(fraction * len(movable_idx))))
    count = min(count, len(movable_idx))
    chosen = rng.choice(len(movable_idx), size=count, replace=False)
    chosen = [movable_idx[i] for i in np.sort(chosen)]

    out = copy.copy(scene)
    out.objects = list(scene.objects)
    if report is not None:
        report["fraction"] = fraction
        report["selected"] = [scene.objects[i].name for i in chosen]
        report["displacements"] = {}

    dt = 1.0 / SIM_RATE
    for oi in chosen:
        obj = out.objects[oi]
        angle = rng.uniform(0.0, 2.0 * np.pi)
        direction = np.array([np.cos(angle), np.sin(angle), 0.0])
        accel = rng.uniform(*config.accel_range)
        mu = obj.physical.friction

        # planar kinematics: accelerate, then friction slide to rest
        v = 0.0
        dist = 0.0
        t = 0.0
        while t < config.settle_time:
            a = accel if t < config.impulse_duration else -mu * config.gravity
            v += a * dt
            if t >= config.impulse_duration and v <= 0.0:
                break
            dist += v * dt
            t += dt

        lo, hi = _aabb(obj)
        obstacles = [_aabb(o) for j, o in enumerate(out.objects) if j != oi]
        limit = _sweep_limit(lo, hi, direction, obstacles, scene.bounds)
        dist = min(dist, limit)
        new_pose = RigidTransform(
            rotation=obj.pose.rotation.copy(),
            translation=obj.pose.translation + direction * dist,
        )
        out.objects[oi] = obj.moved(new_pose)
        if report is not None:
            report["displacements"][obj.name] = float(dist)

    return out


def save_lighting(scene: Scene, path) -> None:
    """Write the lighting setup as a standalone structured-text document."""
    import yaml

    from .scene.loader import _light_doc

    doc = {"lights": [_light_doc(l) for l in scene.lights]}
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(doc, f, sort_keys=False)


def load_lighting(scene: Scene, path) -> Scene:
    """Return a copy of the scene with its lights replaced from a lighting
    document written by save_lighting (or the scene file's lights[] schema)."""
    import yaml

    from .scene.loader import _parse_light

    with open(path, "r", encoding="utf-8") as f:
        doc = yaml.safe_load(f)
    if not isinstance(doc, dict) or "lights" not in doc:
        raise ValueError(f"{path}: expected a mapping with a lights[] section")
    lights = [_parse_light(ld, f"lights[{i}]") for i, ld in enumerate(doc["lights"])]
    out = copy.copy(scene)
    out.lights = lights
    return out


def randomize_lighting(scene: Scene, config: LightingConfig) -> Scene:
    """Independently resample temperature, brightness scale and enablement per
    light; if everything ends up disabled one light is re-enabled."""
    if not scene.lights:
        raise ValueError("scene has no lights")
    rng = np.random.default_rng(config.seed)
    out = copy.copy(scene)
    out.lights = []
    for light in scene.lights:
        new = copy.deepcopy(light)
        new.temperature = float(rng.uniform(*config.temperature_range))
        new.brightness = light.brightness * float(rng.uniform(*config.brightness_scale_range))
        # a light that was already off stays off; enabled ones may be disabled
        new.enabled = light.enabled and bool(rng.random() >= config.disable_probability)
        out.lights.append(new)
    if not any(l.enabled for l in out.lights):
        out.lights[int(rng.integers(len(out.lights)))].enabled = True
    return out
