"""Sequence directory serialization.

Layout (one directory per sequence):
    rgb/%06d.png        8-bit sRGB
    depth/%06d.png      16-bit single channel, millimeters, 0 = invalid
    label/%06d.png      16-bit NYU40 ids
    instance/%06d.png   16-bit instance ids
    flow/%06d.npy       float32 (H, W, 2), pixels toward the next frame
    imu.csv             timestamp_ns, gyro xyz, accel xyz (EuRoC ordering)
    events.txt          timestamp_ns x y polarity
    groundtruth_tum.txt shutter-open poses, TUM format
    manifest.json       inventory with sha256 checksums, written last
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..events import Event
from ..imu import ImuSample
from .trajfiles import export_trajectory

MM_PER_M = 1000.0
DEPTH_MAX_MM = 65535


class ManifestError(ValueError):
    pass


@dataclass
class SequenceManifest:
    scene_name: str
    configuration: str = "original"      # original | relit | rearranged
    trajectory: dict = field(default_factory=dict)
    camera: dict = field(default_factory=dict)
    frame_count: int = 0
    inventory: dict = field(default_factory=dict)  # relative path -> sha256
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "scene_name": self.scene_name,
                "configuration": self.configuration,
                "trajectory": self.trajectory,
                "camera": self.camera,
                "frame_count": self.frame_count,
                "seed": self.seed,
                "inventory": self.inventory,
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "SequenceManifest":
        doc = json.loads(text)
        return cls(
            scene_name=doc["scene_name"],
            configuration=doc.get("configuration", "original"),
            trajectory=doc.get("trajectory", {}),
            camera=doc.get("camera", {}),
            frame_count=doc.get("frame_count", 0),
            inventory=doc.get("inventory", {}),
            seed=doc.get("seed", 0),
        )


def sha256_file(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def srgb_encode(linear: np.ndarray) -> np.ndarray:
    """Linear radiance -> 8-bit sRGB."""
    x = np.clip(np.asarray(linear, float), 0.0, 1.0)
    srgb = np.where(x <= 0.0031308, 12.92 * x, 1.055 * np.power(x, 1.0 / 2.4) - 0.055)
    return np.round(srgb * 255.0).astype(np.uint8)


def srgb_decode(img8: np.ndarray) -> np.ndarray:
    s = np.asarray(img8, float) / 255.0
    return np.where(s <= 0.04045, s / 12.92, ((s + 0.055) / 1.055) ** 2.4)


def write_rgb_png(path, rgb_linear: np.ndarray) -> None:
    Image.fromarray(srgb_encode(rgb_linear), mode="RGB").save(path)


def write_u16_png(path, values: np.ndarray) -> None:
    arr = np.asarray(values)
    if arr.dtype != np.uint16:
        arr = arr.astype(np.uint16)
    Image.fromarray(arr).save(path)  # uint16 -> 16-bit grayscale PNG


def read_u16_png(path) -> np.ndarray:
    return np.array(Image.open(path), dtype=np.uint16)


def depth_to_mm(depth_m: np.ndarray) -> np.ndarray:
    """Meters to 16-bit millimeters, round half even; 0 stays invalid."""
    mm = np.round(np.asarray(depth_m, float) * MM_PER_M)
    mm = np.clip(mm, 0, DEPTH_MAX_MM)
    return mm.astype(np.uint16)


def write_imu_csv(path, samples: list[ImuSample]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("#timestamp [ns],w_x [rad s^-1],w_y [rad s^-1],w_z [rad s^-1],"
                "a_x [m s^-2],a_y [m s^-2],a_z [m s^-2]\n")
        for s in samples:
            ns = round(s.timestamp * 1e9)
            f.write(
                f"{ns},{_fmt(s.gyro[0])},{_fmt(s.gyro[1])},{_fmt(s.gyro[2])},"
                f"{_fmt(s.accel[0])},{_fmt(s.accel[1])},{_fmt(s.accel[2])}\n"
            )


def read_imu_csv(path) -> list[ImuSample]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals = line.split(",")
            out.append(
                ImuSample(
                    timestamp=int(vals[0]) * 1e-9,
                    gyro=np.array([float(v) for v in vals[1:4]]),
                    accel=np.array([float(v) for v in vals[4:7]]),
                )
            )
    return out


def write_events_txt(path, events: list[Event]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("# timestamp_ns x y polarity\n")
        for e in events:
            f.write(f"{round(e.timestamp * 1e9)} {e.x} {e.y} {e.polarity}\n")


def read_events_txt(path) -> list[Event]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            ts, x, y, p = line.split()
            out.append(Event(x=int(x), y=int(y), timestamp=int(ts) * 1e-9, polarity=int(p)))
    return out


def _fmt(x: float) -> str:
    return np.format_float_positional(float(x), trim="-")


def write_sequence(
    out_dir: str | os.PathLike,
    frames,
    manifest: SequenceManifest,
    imu: list[ImuSample] | None = None,
    events: list[Event] | None = None,
    noisy_depth: list[np.ndarray] | None = None,
) -> SequenceManifest:
    """Write frame assets + sensor files, then the manifest as commit point.

    frames: iterable of FrameBundle. Returns the manifest with the inventory
    filled in.
    """
    root = Path(out_dir)
    for sub in ("rgb", "depth", "label", "instance", "flow"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    if noisy_depth is not None:
        (root / "depth_noisy").mkdir(parents=True, exist_ok=True)

    inventory: dict[str, str] = {}
    stamped = []
    count = 0
    for i, fb in enumerate(frames):
        rel = write_frame_assets(root, i, fb, None if noisy_depth is None else noisy_depth[i])
        for r in rel:
            inventory[r] = sha256_file(root / r)
        stamped.append((fb.timestamp, fb.shutter_open_pose))
        count += 1

    export_trajectory(stamped, root / "groundtruth_tum.txt", format="TUM")
    inventory["groundtruth_tum.txt"] = sha256_file(root / "groundtruth_tum.txt")
    if imu is not None:
        write_imu_csv(root / "imu.csv", imu)
        inventory["imu.csv"] = sha256_file(root / "imu.csv")
    if events is not None:
        write_events_txt(root / "events.txt", events)
        inventory["events.txt"] = sha256_file(root / "events.txt")

    manifest.frame_count = count
    manifest.inventory = inventory
    (root / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    return manifest


def write_frame_assets(root: Path, index: int, fb, noisy_depth: np.ndarray | None = None) -> list[str]:
    """Write one frame's images; returns the relative paths written."""
    name = f"{index:06d}"
    rel = []
    write_rgb_png(root / "rgb" / f"{name}.png", fb.rgb)
    rel.append(f"rgb/{name}.png")
    write_u16_png(root / "depth" / f"{name}.png", depth_to_mm(fb.depth))
    rel.append(f"depth/{name}.png")
    write_u16_png(root / "label" / f"{name}.png", fb.semantic)
    rel.append(f"label/{name}.png")
    write_u16_png(root / "instance" / f"{name}.png", fb.instance)
    rel.append(f"instance/{name}.png")
    if fb.flow is not None:
        np.save(root / "flow" / f"{name}.npy", fb.flow.astype(np.float32))
        rel.append(f"flow/{name}.npy")
    if getattr(fb, "albedo", None) is not None:
        (root / "albedo").mkdir(exist_ok=True)
        write_rgb_png(root / "albedo" / f"{name}.png", fb.albedo)
        rel.append(f"albedo/{name}.png")
    if noisy_depth is not None:
        write_u16_png(root / "depth_noisy" / f"{name}.png", depth_to_mm(noisy_depth))
        rel.append(f"depth_noisy/{name}.png")
    return rel


def read_manifest(seq_dir: str | os.PathLike) -> SequenceManifest:
    path = Path(seq_dir) / "manifest.json"
    if not path.exists():
        raise ManifestError(f"{seq_dir}: missing manifest.json (incomplete sequence)")
    return SequenceManifest.from_json(path.read_text(encoding="utf-8"))


def verify_sequence(seq_dir: str | os.PathLike) -> SequenceManifest:
    """Check every inventory file exists with a matching checksum."""
    root = Path(seq_dir)
    manifest = read_manifest(root)
    for rel, digest in manifest.inventory.items():
        p = root / rel
        if not p.exists():
            raise ManifestError(f"{rel}: missing file listed in manifest")
        actual = sha256_file(p)
        if actual != digest:
            raise ManifestError(f"{rel}: checksum mismatch (manifest {digest[:12]}.., file {actual[:12]}..)")
    return manifest
