"""Native trajectory file: shutter-open and shutter-close pose records.

Format (text, '#' header lines):

    # indoorsim-trajectory v1
    # params: type=1 v_mult=1 w_mult=1 duration=40 frame_rate=25 seed=7 exposure=0.02
    # columns: timestamp tx ty tz rx ry rz
    # shutter: open
    <one record per frame>
    # shutter: close
    <one record per frame, timestamps offset by the exposure>
"""

from __future__ import annotations

import os

import numpy as np

from ..geometry import RigidTransform
from .params import Keyframe, Trajectory, TrajectoryParams


def _fmt(x: float) -> str:
    return np.format_float_positional(float(x), trim="-")


def save_trajectory(traj: Trajectory, path: str | os.PathLike) -> None:
    p = traj.params
    lines = [
        "# indoorsim-trajectory v1",
        f"# params: type={p.traj_type} v_mult={_fmt(p.v_mult)} w_mult={_fmt(p.w_mult)} "
        f"duration={_fmt(p.duration)} frame_rate={_fmt(p.frame_rate)} seed={p.seed} "
        f"exposure={_fmt(p.exposure)}",
        "# columns: timestamp tx ty tz rx ry rz",
        "# shutter: open",
    ]
    for kf in traj.frames:
        t = kf.shutter_open_pose.translation
        r = kf.shutter_open_pose.rotation
        lines.append(
            f"{kf.timestamp:.6f} {_fmt(t[0])} {_fmt(t[1])} {_fmt(t[2])} "
            f"{_fmt(r[0])} {_fmt(r[1])} {_fmt(r[2])}"
        )
    lines.append("# shutter: close")
    for kf in traj.frames:
        t = kf.shutter_close_pose.translation
        r = kf.shutter_close_pose.rotation
        lines.append(
            f"{kf.timestamp + p.exposure:.6f} {_fmt(t[0])} {_fmt(t[1])} {_fmt(t[2])} "
            f"{_fmt(r[0])} {_fmt(r[1])} {_fmt(r[2])}"
        )
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def load_trajectory(path: str | os.PathLike) -> Trajectory:
    params_kv: dict[str, str] = {}
    opens: list[tuple[float, RigidTransform]] = []
    closes: list[tuple[float, RigidTransform]] = []
    section = "open"
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("params:"):
                    for tok in body[len("params:"):].split():
                        k, _, v = tok.partition("=")
                        params_kv[k] = v
                elif body.startswith("shutter:"):
                    section = body.split(":", 1)[1].strip()
                continue
            parts = line.split()
            if len(parts) != 7:
                raise ValueError(f"{path}:{lineno}: expected 7 fields, got {len(parts)}")
            vals = [float(x) for x in parts]
            pose = RigidTransform(rotation=np.array(vals[4:7]), translation=np.array(vals[1:4]))
            (opens if section == "open" else closes).append((vals[0], pose))

    if not opens:
        raise ValueError(f"{path}: no shutter-open records")
    if closes and len(closes) != len(opens):
        raise ValueError(f"{path}: open/close record counts differ")

    frame_rate = float(params_kv.get("frame_rate", 25.0))
    if len(opens) >= 2:
        dt = opens[1][0] - opens[0][0]
        if dt > 0:
            frame_rate = 1.0 / dt
    exposure = float(params_kv.get("exposure", 0.5 / frame_rate))
    params = TrajectoryParams(
        traj_type=int(params_kv.get("type", 1)),
        v_mult=float(params_kv.get("v_mult", 1.0)),
        w_mult=float(params_kv.get("w_mult", 1.0)),
        duration=len(opens) / frame_rate,
        frame_rate=frame_rate,
        seed=int(params_kv.get("seed", 0)),
        exposure=exposure,
    )
    frames = []
    for i, (t, pose) in enumerate(opens):
        close_pose = closes[i][1] if closes else pose
        frames.append(Keyframe(timestamp=t, shutter_open_pose=pose, shutter_close_pose=close_pose))
    return Trajectory(frames=frames, params=params)
