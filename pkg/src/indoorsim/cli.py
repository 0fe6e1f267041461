"""Command-line front end.

Subcommands: render, trajectory, imu, events, rearrange, relight, export,
ate, serve. Every randomized subcommand takes --seed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="indoorsim",
        description="Synthetic indoor RGB-D-inertial-event sequence generator and evaluation tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="run the full pipeline: scene -> sequence directory")
    p.add_argument("--scene", required=True, help="scene YAML file")
    p.add_argument("--out", required=True, help="output sequence directory")
    p.add_argument("--config", default="original", choices=["original", "relit", "rearranged"])
    p.add_argument("--trajectory-file", help="native trajectory file (skips generation)")
    p.add_argument("--traj-type", type=int, default=1, choices=[1, 2, 3])
    p.add_argument("--v-mult", type=float, default=1.0)
    p.add_argument("--w-mult", type=float, default=1.0)
    p.add_argument("--duration", type=float, default=4.0, help="seconds")
    p.add_argument("--frame-rate", type=float, default=25.0, help="Hz")
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--spp", type=int, default=256)
    p.add_argument("--max-bounces", type=int, default=6)
    p.add_argument("--subframes", type=int, default=8, help="motion blur subframes")
    p.add_argument("--lens", default="Pinhole", choices=["Pinhole", "ThinLensDoF", "Fisheye", "Panorama"])
    p.add_argument("--focal-px", type=float, default=600.0)
    p.add_argument("--no-imu", action="store_true")
    p.add_argument("--imu-rate", type=float, default=800.0)
    p.add_argument("--events", action="store_true")
    p.add_argument("--depth-noise", action="store_true")
    p.add_argument("--albedo", action="store_true", help="write the albedo ground-truth pass")
    p.add_argument("--no-resume", action="store_true")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("trajectory", help="generate a trajectory file for a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True, help="native trajectory file to write")
    p.add_argument("--traj-type", type=int, default=1, choices=[1, 2, 3])
    p.add_argument("--v-mult", type=float)
    p.add_argument("--w-mult", type=float)
    p.add_argument("--duration", type=float, default=40.0)
    p.add_argument("--frame-rate", type=float, default=25.0)
    p.add_argument("--cell", type=float, default=0.25, help="free-space cell size, meters")
    p.add_argument("--jitter", action="store_true", help="apply the default jitter model")
    p.add_argument("--random-params", action="store_true", help="sample type and multipliers from the seed")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("imu", help="synthesize IMU samples from a trajectory file")
    p.add_argument("--trajectory", required=True, help="native or TUM trajectory file")
    p.add_argument("--format", default="native", choices=["native", "TUM", "EuRoC"])
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--rate", type=float, default=800.0)
    p.add_argument("--gyro-noise", type=float, default=0.0, help="rad/s/sqrt(Hz)")
    p.add_argument("--accel-noise", type=float, default=0.0, help="m/s^2/sqrt(Hz)")
    p.add_argument("--gyro-bias-walk", type=float, default=0.0)
    p.add_argument("--accel-bias-walk", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("events", help="emulate an event stream along a trajectory")
    p.add_argument("--scene", required=True)
    p.add_argument("--trajectory", required=True, help="native trajectory file")
    p.add_argument("--out", required=True, help="output events.txt")
    p.add_argument("--threshold", type=float, default=0.2)
    p.add_argument("--sim-rate", type=float, default=1000.0)
    p.add_argument("--width", type=int, default=320)
    p.add_argument("--height", type=int, default=240)
    p.add_argument("--spp", type=int, default=8)
    p.add_argument("--focal-px", type=float, default=300.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("rearrange", help="physics-style movable-object rearrangement")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True, help="output scene YAML")
    p.add_argument("--fraction", type=float, help="share of movables, default sampled in [0.05, 0.45]")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("relight", help="randomize the lighting configuration")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True, help="output scene YAML")
    p.add_argument("--disable-probability", type=float, default=0.15)
    p.add_argument("--lights-out", help="also write the lighting setup as a standalone document")
    p.add_argument("--lights-in", help="apply a lighting document instead of randomizing")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("export", help="convert trajectory files between formats")
    p.add_argument("--input", required=True)
    p.add_argument("--input-format", default="TUM", choices=["TUM", "EuRoC", "native"])
    p.add_argument("--out", required=True)
    p.add_argument("--output-format", default="EuRoC", choices=["TUM", "EuRoC"])

    p = sub.add_parser("ate", help="absolute trajectory error between two TUM files")
    p.add_argument("--gt", required=True, help="ground-truth TUM file")
    p.add_argument("--est", required=True, help="estimated TUM file")
    p.add_argument("--max-dt", type=float, default=0.02, help="association window, seconds")
    p.add_argument("--scale", action="store_true", help="also estimate a scale (monocular)")
    p.add_argument("--per-pair", help="write per-pair errors to this file")

    p = sub.add_parser("serve", help="run the local preview service for the editor UI")
    p.add_argument("--scene", required=True)
    p.add_argument("--port", type=int, default=8777)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--export-dir", help="directory for /api/export output")

    args = parser.parse_args(argv)
    return COMMANDS[args.command](args)


def cmd_render(args) -> int:
    from .events import EventConfig
    from .pipeline import JobConfig, run_pipeline
    from .render import LensModel, RenderSettings
    from .trajectory import TrajectoryParams

    job = JobConfig(
        scene_path=args.scene,
        out_dir=args.out,
        configuration=args.config,
        trajectory_file=args.trajectory_file,
        trajectory_params=TrajectoryParams(
            traj_type=args.traj_type, v_mult=args.v_mult, w_mult=args.w_mult,
            duration=args.duration, frame_rate=args.frame_rate, seed=args.seed,
        ),
        render=RenderSettings(
            width=args.width, height=args.height, spp=args.spp,
            max_bounces=args.max_bounces, shutter_subframes=args.subframes,
            rng_seed=args.seed,
        ),
        lens=LensModel(kind=args.lens, focal_px=args.focal_px),
        imu=not args.no_imu,
        imu_rate=args.imu_rate,
        events=args.events,
        event_config=EventConfig(),
        depth_noise=args.depth_noise,
        albedo_pass=args.albedo,
        seed=args.seed,
        resume=not args.no_resume,
    )
    manifest = run_pipeline(job)
    print(f"wrote {manifest.frame_count} frames to {args.out}")
    return 0


def cmd_trajectory(args) -> int:
    from .scene import compute_free_space, load_scene
    from .trajectory import (
        TrajectoryParams,
        apply_jitter,
        default_jitter_model,
        generate_trajectory,
        sample_params,
    )
    from .trajectory.io import save_trajectory

    scene = load_scene(args.scene)
    free = compute_free_space(scene, args.cell)
    if args.random_params:
        params = sample_params(args.seed, duration=args.duration, frame_rate=args.frame_rate)
    else:
        params = TrajectoryParams(
            traj_type=args.traj_type,
            v_mult=args.v_mult if args.v_mult is not None else 1.0,
            w_mult=args.w_mult if args.w_mult is not None else 1.0,
            duration=args.duration, frame_rate=args.frame_rate, seed=args.seed,
        )
    traj = generate_trajectory(free, params)
    if args.jitter:
        traj = apply_jitter(traj, default_jitter_model(), free, seed=args.seed)
    save_trajectory(traj, args.out)
    print(f"wrote {len(traj.frames)} keyframes (type {params.traj_type}, "
          f"v={params.v_mult:.2f}, w={params.w_mult:.2f}) to {args.out}")
    return 0


def cmd_imu(args) -> int:
    from .dataset.sequence import write_imu_csv
    from .dataset.trajfiles import import_trajectory
    from .imu import ImuConfig, ImuNoise, synthesize_imu
    from .spline import fit_spline
    from .trajectory.io import load_trajectory

    if args.format == "native":
        traj = load_trajectory(args.trajectory)
        ts = traj.timestamps()
        poses = [kf.shutter_open_pose for kf in traj.frames]
    else:
        stamped = import_trajectory(args.trajectory, format=args.format)
        ts = np.array([s.timestamp for s in stamped])
        poses = [s.pose for s in stamped]
    spline = fit_spline(ts, poses)
    noise = None
    if args.gyro_noise or args.accel_noise or args.gyro_bias_walk or args.accel_bias_walk:
        noise = ImuNoise(
            gyro_noise_density=args.gyro_noise,
            accel_noise_density=args.accel_noise,
            gyro_bias_walk=args.gyro_bias_walk,
            accel_bias_walk=args.accel_bias_walk,
            seed=args.seed,
        )
    samples = synthesize_imu(spline, ImuConfig(rate=args.rate, noise=noise))
    write_imu_csv(args.out, samples)
    print(f"wrote {len(samples)} IMU samples at {args.rate:g} Hz to {args.out}")
    return 0


def cmd_events(args) -> int:
    from .dataset.sequence import write_events_txt
    from .events import EventConfig, emulate_events, rgb_to_luminance
    from .render import LensModel, RenderSettings, prepare_scene, render_rgb
    from .scene import load_scene
    from .spline import fit_spline
    from .trajectory.io import load_trajectory

    scene = load_scene(args.scene)
    traj = load_trajectory(args.trajectory)
    spline = fit_spline(traj.timestamps(), [kf.shutter_open_pose for kf in traj.frames])
    pack, bvh = prepare_scene(scene)
    cfg = EventConfig(threshold=args.threshold, sim_rate=args.sim_rate,
                      width=args.width, height=args.height)
    lens = LensModel(kind="Pinhole", focal_px=args.focal_px)
    settings = RenderSettings(width=args.width, height=args.height, spp=args.spp,
                              max_bounces=4, rng_seed=args.seed)
    n = int(np.floor((spline.t_max - spline.t_min) * cfg.sim_rate)) + 1
    ts = spline.t_min + np.arange(n) / cfg.sim_rate
    frames = []
    for k, t in enumerate(ts):
        rgb, _ = render_rgb(pack, bvh, lens, settings, [spline.pose(float(t))], frame_index=k)
        frames.append(rgb_to_luminance(rgb))
    events = emulate_events(frames, cfg, timestamps=ts - spline.t_min)
    write_events_txt(args.out, events)
    print(f"wrote {len(events)} events from {n} high-rate frames to {args.out}")
    return 0


def cmd_rearrange(args) -> int:
    from .scene import load_scene, save_scene
    from .scene_change import RearrangeConfig, rearrange

    scene = load_scene(args.scene)
    out = rearrange(scene, RearrangeConfig(fraction=args.fraction, seed=args.seed))
    save_scene(out, args.out)
    moved = sum(
        1 for a, b in zip(scene.objects, out.objects)
        if not np.allclose(a.pose.translation, b.pose.translation)
    )
    print(f"moved {moved} objects; wrote {args.out}")
    return 0


def cmd_relight(args) -> int:
    from .scene import load_scene, save_scene
    from .scene_change import LightingConfig, load_lighting, randomize_lighting, save_lighting

    scene = load_scene(args.scene)
    if args.lights_in:
        out = load_lighting(scene, args.lights_in)
        action = f"applied {args.lights_in}"
    else:
        out = randomize_lighting(
            scene, LightingConfig(disable_probability=args.disable_probability, seed=args.seed)
        )
        action = "randomized"
    save_scene(out, args.out)
    if args.lights_out:
        save_lighting(out, args.lights_out)
    enabled = sum(1 for l in out.lights if l.enabled)
    print(f"{action} {len(out.lights)} lights ({enabled} enabled); wrote {args.out}")
    return 0


def cmd_export(args) -> int:
    from .dataset.trajfiles import export_trajectory, import_trajectory
    from .trajectory.io import load_trajectory

    if args.input_format == "native":
        traj = load_trajectory(args.input)
        stamped = traj.stamped_poses("open")
    else:
        stamped = import_trajectory(args.input, format=args.input_format)
    export_trajectory(stamped, args.out, format=args.output_format)
    print(f"wrote {args.out} ({args.output_format})")
    return 0


def cmd_ate(args) -> int:
    from .dataset.trajfiles import import_trajectory
    from .evaluate import associate, compute_ate

    gt = import_trajectory(args.gt, format="TUM")
    est = import_trajectory(args.est, format="TUM")
    result = compute_ate(
        [(s.timestamp, s.position) for s in est],
        [(s.timestamp, s.position) for s in gt],
        max_dt=args.max_dt,
        with_scale=args.scale,
    )
    print(result.format_block())
    if args.per_pair:
        matches = associate([s.timestamp for s in est], [s.timestamp for s in gt], args.max_dt)
        rot = result.alignment.matrix
        with open(args.per_pair, "w", encoding="utf-8") as f:
            f.write("# est_timestamp gt_timestamp error_m\n")
            for i, j in matches:
                p = rot @ est[i].position + result.alignment.translation
                err = float(np.linalg.norm(p - gt[j].position))
                f.write(f"{est[i].timestamp:.6f} {gt[j].timestamp:.6f} {err:.6f}\n")
        print(f"per-pair errors written to {args.per_pair}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve_preview

    server, _service = serve_preview(
        args.scene, port=args.port, host=args.host, export_dir=args.export_dir
    )
    print(f"preview service for {args.scene} on http://{args.host}:{args.port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


COMMANDS = {
    "render": cmd_render,
    "trajectory": cmd_trajectory,
    "imu": cmd_imu,
    "events": cmd_events,
    "rearrange": cmd_rearrange,
    "relight": cmd_relight,
    "export": cmd_export,
    "ate": cmd_ate,
    "serve": cmd_serve,
}


if __name__ == "__main__":
    sys.exit(main())
