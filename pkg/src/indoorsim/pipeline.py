"""End-to-end sequence generation: scene -> (scene change) -> trajectory ->
spline -> rendered frames -> IMU/events -> sequence directory.

Progress is reported as line-delimited JSON records; the run is resumable at
frame granularity (frames already on disk with matching checksums are kept).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset.sequence import (
    SequenceManifest,
    sha256_file,
    write_frame_assets,
    write_events_txt,
    write_imu_csv,
)
from .dataset.trajfiles import export_trajectory
from .events import EventConfig, emulate_events, rgb_to_luminance
from .geometry import interpolate_pose
from .imu import ImuConfig, ImuNoise, synthesize_imu
from .render import (
    LensModel,
    RenderSettings,
    apply_kinect_noise,
    compute_flow,
    prepare_scene,
    render_frame,
    render_rgb,
)
from .scene import compute_free_space, load_scene
from .scene_change import LightingConfig, RearrangeConfig, randomize_lighting, rearrange
from .spline import fit_spline
from .trajectory import TrajectoryParams, generate_trajectory
from .trajectory.io import load_trajectory


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class JobConfig:
    scene_path: str
    out_dir: str
    configuration: str = "original"          # original | relit | rearranged
    trajectory_params: TrajectoryParams | None = None
    trajectory_file: str | None = None       # native format; overrides params
    render: RenderSettings = field(default_factory=RenderSettings)
    lens: LensModel = field(default_factory=LensModel)
    imu: bool = True
    imu_rate: float = 800.0
    imu_noise: ImuNoise | None = None
    events: bool = False
    event_config: EventConfig = field(default_factory=EventConfig)
    event_spp: int = 32  # pixel noise feeds straight into the threshold crossings
    depth_noise: bool = False
    albedo_pass: bool = False
    free_cell: float = 0.25
    seed: int = 0
    resume: bool = True

    def __post_init__(self):
        if self.configuration not in ("original", "relit", "rearranged"):
            raise ValueError("configuration must be original | relit | rearranged")


def _emit(progress, record: dict):
    if progress is None:
        print(json.dumps(record), flush=True)
    else:
        progress(record)


def run_pipeline(job: JobConfig, progress=None) -> SequenceManifest:
    """Execute the full pipeline; returns the verified manifest."""
    t_start = time.time()
    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def stage(name, fn, *args, **kwargs):
        _emit(progress, {"stage": name, "status": "start"})
        try:
            result = fn(*args, **kwargs)
        except Exception as exc:
            _emit(progress, {"stage": name, "status": "error", "message": str(exc)})
            raise PipelineError(name, str(exc)) from exc
        _emit(progress, {"stage": name, "status": "done", "elapsed": round(time.time() - t_start, 3)})
        return result

    scene = stage("scene_load", load_scene, job.scene_path)

    if job.configuration == "relit":
        scene = stage("scene_change", randomize_lighting, scene, LightingConfig(seed=job.seed))
    elif job.configuration == "rearranged":
        scene = stage("scene_change", rearrange, scene, RearrangeConfig(seed=job.seed))

    if job.trajectory_file:
        traj = stage("trajectory", load_trajectory, job.trajectory_file)
    else:
        params = job.trajectory_params or TrajectoryParams(seed=job.seed)
        free = compute_free_space(scene, job.free_cell)
        traj = stage("trajectory", generate_trajectory, free, params)

    if len(traj.frames) < 4:
        raise PipelineError("spline_fit", "need at least 4 frames to fit the pose spline")
    spline = stage(
        "spline_fit",
        fit_spline,
        traj.timestamps(),
        [kf.shutter_open_pose for kf in traj.frames],
    )

    import os

    pack_bvh = stage("scene_pack", prepare_scene, scene,
                     os.path.dirname(os.path.abspath(job.scene_path)))

    # --- frames (resumable) ---
    progress_path = out / "frames_progress.jsonl"
    done_frames: dict[int, dict] = {}
    if job.resume and progress_path.exists():
        for line in progress_path.read_text(encoding="utf-8").splitlines():
            try:
                rec = json.loads(line)
                done_frames[rec["frame"]] = rec["files"]
            except (KeyError, json.JSONDecodeError):
                continue

    def frame_done(i: int) -> bool:
        files = done_frames.get(i)
        if not files:
            return False
        for rel, digest in files.items():
            p = out / rel
            if not p.exists() or sha256_file(p) != digest:
                return False
        return True

    settings = job.render
    for sub in ("rgb", "depth", "label", "instance", "flow"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    if job.depth_noise:
        (out / "depth_noisy").mkdir(parents=True, exist_ok=True)
    if job.albedo_pass:
        (out / "albedo").mkdir(parents=True, exist_ok=True)
    mids = [
        interpolate_pose(kf.shutter_open_pose, kf.shutter_close_pose, 0.5) for kf in traj.frames
    ]
    inventory: dict[str, str] = {}
    n = len(traj.frames)
    with open(progress_path, "a", encoding="utf-8") as plog:
        for i, kf in enumerate(traj.frames):
            if frame_done(i):
                for rel, digest in done_frames[i].items():
                    inventory[rel] = digest
                _emit(progress, {"stage": "render", "frame": i, "status": "skipped"})
                continue
            fb = render_frame(
                pack_bvh, kf.shutter_open_pose, kf.shutter_close_pose,
                job.lens, settings, timestamp=kf.timestamp, frame_index=i,
            )
            if i + 1 < n:
                fb.flow = compute_flow(
                    pack_bvh[0], pack_bvh[1], mids[i], mids[i + 1],
                    job.lens, settings.width, settings.height,
                )
            else:
                fb.flow = np.full((settings.height, settings.width, 2), np.nan, np.float32)
            noisy = None
            if job.depth_noise:
                noisy = apply_kinect_noise(fb.depth, seed=job.seed + i)
            if not job.albedo_pass:
                fb.albedo = None
            rel_files = write_frame_assets(out, i, fb, noisy)
            files = {rel: sha256_file(out / rel) for rel in rel_files}
            inventory.update(files)
            plog.write(json.dumps({"frame": i, "files": files}) + "\n")
            plog.flush()
            _emit(progress, {"stage": "render", "frame": i, "status": "done",
                             "rejected": fb.stats.get("rejected_samples", 0)})

    # --- ground-truth trajectory + sensors ---
    stamped = [(kf.timestamp, kf.shutter_open_pose) for kf in traj.frames]
    export_trajectory(stamped, out / "groundtruth_tum.txt", format="TUM")
    inventory["groundtruth_tum.txt"] = sha256_file(out / "groundtruth_tum.txt")

    if job.imu:
        def make_imu():
            cfg = ImuConfig(rate=job.imu_rate, noise=job.imu_noise)
            return synthesize_imu(spline, cfg)
        samples = stage("imu", make_imu)
        write_imu_csv(out / "imu.csv", samples)
        inventory["imu.csv"] = sha256_file(out / "imu.csv")

    if job.events:
        def make_events():
            ec = job.event_config
            if ec.sim_rate <= traj.params.frame_rate:
                raise ValueError(
                    f"event sim_rate {ec.sim_rate} Hz must exceed the RGB frame rate "
                    f"{traj.params.frame_rate} Hz"
                )
            n_ev = int(np.floor((spline.t_max - spline.t_min) * ec.sim_rate)) + 1
            ts = spline.t_min + np.arange(n_ev) / ec.sim_rate
            ev_lens = LensModel(
                kind=job.lens.kind,
                focal_px=job.lens.focal_px * ec.width / settings.width,
                aperture_radius=job.lens.aperture_radius,
                focus_distance=job.lens.focus_distance,
            )
            ev_settings = RenderSettings(
                width=ec.width, height=ec.height, spp=job.event_spp,
                max_bounces=settings.max_bounces, shutter_subframes=1,
                rng_seed=settings.rng_seed + 7919,  # distinct stream from the RGB frames
            )
            lum = []
            for k, t in enumerate(ts):
                pose = spline.pose(float(t))
                rgb, _ = render_rgb(pack_bvh[0], pack_bvh[1], ev_lens, ev_settings, [pose], frame_index=k)
                lum.append(rgb_to_luminance(rgb))
            return emulate_events(lum, ec, timestamps=ts - spline.t_min)
        events = stage("events", make_events)
        write_events_txt(out / "events.txt", events)
        inventory["events.txt"] = sha256_file(out / "events.txt")

    manifest = SequenceManifest(
        scene_name=scene.name,
        configuration=job.configuration,
        trajectory={
            "type": traj.params.traj_type,
            "v_mult": traj.params.v_mult,
            "w_mult": traj.params.w_mult,
            "duration": traj.params.duration,
            "frame_rate": traj.params.frame_rate,
            "seed": traj.params.seed,
            "exposure": traj.params.exposure,
        },
        camera={
            "lens": job.lens.kind.value,
            "focal_px": job.lens.focal_px,
            "width": settings.width,
            "height": settings.height,
            "spp": settings.spp,
            "distortion": [0.0, 0.0, 0.0, 0.0],
            "stereo_baseline": 0.0,
        },
        frame_count=n,
        inventory=inventory,
        seed=job.seed,
    )
    (out / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    _emit(progress, {"stage": "manifest", "status": "done", "frames": n})
    return manifest
