"""Local preview service backing the browser trajectory editor.

JSON endpoints over a loopback ThreadingHTTPServer; the loaded Scene is
immutable and shared read-only, render previews run through a small worker
pool so interactive endpoints stay responsive. Every endpoint except
/api/export is idempotent.
"""

from __future__ import annotations

import base64
import io
import json
import threading
import traceback
from concurrent.futures import ThreadPoolExecutor
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np
from PIL import Image

from .dataset.sequence import srgb_encode
from .dataset.trajfiles import export_trajectory
from .geometry import RigidTransform
from .imu import ImuConfig, synthesize_imu
from .render import LensModel, RenderSettings, prepare_scene, render_rgb
from .scene import Scene, compute_free_space, load_scene
from .spline import PoseSpline, fit_spline
from .trajectory import TrajectoryParams, generate_trajectory

PREVIEW_MAX_W = 320
PREVIEW_MAX_H = 240
PREVIEW_MAX_SPP = 32
PREVIEW_TIME_BUDGET_S = 2.0


class ServiceError(Exception):
    def __init__(self, stage: str, message: str, status: int = 400):
        super().__init__(message)
        self.stage = stage
        self.status = status


def _pose_from_doc(doc) -> RigidTransform:
    return RigidTransform(
        rotation=np.asarray(doc.get("rotation", [0, 0, 0]), float),
        translation=np.asarray(doc.get("position", doc.get("translation", [0, 0, 0])), float),
    )


def _parse_control_poses(doc):
    poses = doc.get("control_poses")
    if not poses:
        raise ServiceError("spline", "control_poses missing or empty")
    ts = [float(p["timestamp"]) for p in poses]
    rts = [_pose_from_doc(p) for p in poses]
    return np.asarray(ts), rts


def _fit_from_doc(doc) -> PoseSpline:
    ts, poses = _parse_control_poses(doc)
    if len(ts) < 4:
        raise ServiceError("spline", f"spline needs >= 4 control poses, got {len(ts)}")
    try:
        return fit_spline(ts, poses)
    except ValueError as exc:
        raise ServiceError("spline", str(exc)) from exc


class PreviewService:
    """Application logic behind the HTTP handler (separable for tests)."""

    def __init__(self, scene_path: str, export_dir: str | None = None):
        self.scene_path = str(scene_path)
        self.scene: Scene = load_scene(scene_path)
        self.pack, self.bvh = prepare_scene(self.scene)
        self.export_dir = Path(export_dir) if export_dir else Path(scene_path).parent
        self._render_pool = ThreadPoolExecutor(max_workers=2)
        self._export_lock = threading.Lock()
        self._export_counter = 0

    # ---- endpoint payloads ----

    def scene_summary(self) -> dict:
        objects = []
        for obj in self.scene.objects:
            lo, hi = obj.world_aabb()
            objects.append({
                "name": obj.name,
                "instance_id": obj.instance_id,
                "nyu40_class": obj.nyu40_class,
                "movable": obj.physical.movable,
                "footprint": [
                    [float(lo[0]), float(lo[1])],
                    [float(hi[0]), float(lo[1])],
                    [float(hi[0]), float(hi[1])],
                    [float(lo[0]), float(hi[1])],
                ],
                "z_range": [float(lo[2]), float(hi[2])],
            })
        lights = []
        for i, l in enumerate(self.scene.lights):
            lights.append({
                "index": i,
                "kind": l.kind.value,
                "position": [float(x) for x in l.position],
                "enabled": l.enabled,
                "brightness": float(l.brightness),
            })
        lo, hi = self.scene.bounds
        return {
            "name": self.scene.name,
            "bounds": {"min": [float(x) for x in lo], "max": [float(x) for x in hi]},
            "floor_height": float(self.scene.floor_height),
            "objects": objects,
            "lights": lights,
        }

    def spline_sample(self, doc: dict) -> dict:
        spline = _fit_from_doc(doc)
        rate = float(doc.get("rate", 25.0))
        if rate <= 0:
            raise ServiceError("spline", "rate must be positive")
        n = int(np.floor((spline.t_max - spline.t_min) * rate)) + 1
        ts = spline.t_min + np.arange(n) / rate
        val = spline.eval(ts, 0)
        vel = spline.eval(ts, 1)
        samples = []
        for k in range(n):
            samples.append({
                "timestamp": float(ts[k]),
                "position": [float(x) for x in val[k, :3]],
                "rotation": [float(x) for x in val[k, 3:]],
                "velocity": [float(x) for x in vel[k, :3]],
                "angular_rate": [float(x) for x in vel[k, 3:]],
            })
        return {"samples": samples}

    def trajectory_generate(self, doc: dict) -> dict:
        try:
            params = TrajectoryParams(
                traj_type=int(doc.get("traj_type", 1)),
                v_mult=float(doc.get("v_mult", 1.0)),
                w_mult=float(doc.get("w_mult", 1.0)),
                duration=float(doc.get("duration", 4.0)),
                frame_rate=float(doc.get("frame_rate", 25.0)),
                seed=int(doc.get("seed", 0)),
            )
            free = compute_free_space(self.scene, float(doc.get("cell", 0.25)))
            traj = generate_trajectory(free, params)
        except (ValueError, RuntimeError) as exc:
            raise ServiceError("trajectory", str(exc)) from exc
        frames = []
        for kf in traj.frames:
            frames.append({
                "timestamp": kf.timestamp,
                "position": [float(x) for x in kf.shutter_open_pose.translation],
                "rotation": [float(x) for x in kf.shutter_open_pose.rotation],
            })
        return {"keyframes": frames, "metadata": traj.metadata}

    def render_preview(self, doc: dict) -> dict:
        width = min(int(doc.get("width", PREVIEW_MAX_W)), PREVIEW_MAX_W)
        height = min(int(doc.get("height", PREVIEW_MAX_H)), PREVIEW_MAX_H)
        spp = min(int(doc.get("spp", 8)), PREVIEW_MAX_SPP)
        pose = _pose_from_doc(doc.get("pose", {}))
        lens_doc = doc.get("lens", {})
        lens = LensModel(
            kind=lens_doc.get("kind", "Pinhole"),
            focal_px=float(lens_doc.get("focal_px", 600.0 * width / 640.0)),
        )
        max_bounces = int(doc.get("max_bounces", 4))
        seed = int(doc.get("seed", 0))

        def work():
            # best effort: accumulate sample chunks until the requested SPP is
            # reached or the PREVIEW_TIME_BUDGET_S wall clock runs out
            import time as _time

            t0 = _time.monotonic()
            chunk = 4
            total = 0
            accum = None
            rejected = 0
            while total < spp:
                n = min(chunk, spp - total)
                settings = RenderSettings(
                    width=width, height=height, spp=n, max_bounces=max_bounces,
                    rng_seed=seed + total,
                )
                rgb, stats = render_rgb(self.pack, self.bvh, lens, settings, [pose])
                accum = rgb * n if accum is None else accum + rgb * n
                rejected += stats["rejected_samples"]
                total += n
                if _time.monotonic() - t0 > PREVIEW_TIME_BUDGET_S:
                    break
            img = Image.fromarray(srgb_encode(accum / total), mode="RGB")
            buf = io.BytesIO()
            img.save(buf, format="PNG")
            return {
                "width": width, "height": height, "spp": total,
                "image_png_base64": base64.b64encode(buf.getvalue()).decode("ascii"),
                "rejected_samples": rejected,
            }

        return self._render_pool.submit(work).result(timeout=60.0)

    def imu_preview(self, doc: dict) -> dict:
        spline = _fit_from_doc(doc)
        rate = float(doc.get("rate", 800.0))
        cfg = ImuConfig(rate=rate)
        samples = synthesize_imu(spline, cfg)
        cutoff = spline.t_min + 2.0
        out = []
        for s in samples:
            if s.timestamp > cutoff:
                break
            out.append({
                "timestamp": s.timestamp,
                "gyro": [float(x) for x in s.gyro],
                "accel": [float(x) for x in s.accel],
            })
        return {"samples": out, "rate": rate}

    def export(self, doc: dict) -> dict:
        fmt = doc.get("format", "TUM")
        if str(fmt).upper() not in ("TUM", "EUROC"):
            raise ServiceError("export", f"unsupported format {fmt!r}")
        spline = _fit_from_doc(doc)
        rate = float(doc.get("frame_rate", doc.get("rate", 25.0)))
        if rate <= 0:
            raise ServiceError("export", "frame_rate must be positive")
        n = int(np.floor((spline.t_max - spline.t_min) * rate)) + 1
        ts = spline.t_min + np.arange(n) / rate
        val = spline.eval(ts, 0)
        stamped = [
            (float(ts[k]), RigidTransform(rotation=val[k, 3:], translation=val[k, :3]))
            for k in range(n)
        ]
        baseline = float(doc.get("stereo_baseline", 0.0))
        with self._export_lock:
            self._export_counter += 1
            stem = f"export_{self._export_counter:04d}"
        ext = "txt" if str(fmt).upper() == "TUM" else "csv"
        path = self.export_dir / f"{stem}_{str(fmt).lower()}.{ext}"
        export_trajectory(stamped, path, format=fmt)
        result = {"path": str(path), "samples": n, "format": str(fmt).upper()}
        if baseline > 0.0:
            right = []
            for t, pose in stamped:
                offset = pose.matrix @ np.array([baseline, 0.0, 0.0])
                right.append((t, RigidTransform(pose.rotation.copy(), pose.translation + offset)))
            rpath = self.export_dir / f"{stem}_right_{str(fmt).lower()}.{ext}"
            export_trajectory(right, rpath, format=fmt)
            result["right_path"] = str(rpath)
        return result

    # ---- dispatch ----

    ROUTES_GET = {"/api/scene": "scene_summary"}
    ROUTES_POST = {
        "/api/spline/sample": "spline_sample",
        "/api/trajectory/generate": "trajectory_generate",
        "/api/render/preview": "render_preview",
        "/api/imu/preview": "imu_preview",
        "/api/export": "export",
    }

    def handle(self, method: str, path: str, body: dict | None) -> tuple[int, dict]:
        try:
            if method == "GET" and path in self.ROUTES_GET:
                return 200, getattr(self, self.ROUTES_GET[path])()
            if method == "POST" and path in self.ROUTES_POST:
                return 200, getattr(self, self.ROUTES_POST[path])(body or {})
            return 404, {"error": {"stage": "router", "message": f"unknown endpoint {method} {path}"}}
        except ServiceError as exc:
            return exc.status, {"error": {"stage": exc.stage, "message": str(exc)}}
        except Exception as exc:  # structured errors for anything unexpected
            traceback.print_exc()
            return 500, {"error": {"stage": "internal", "message": str(exc)}}


def serve_preview(scene_path: str, port: int = 8777, host: str = "127.0.0.1",
                  export_dir: str | None = None):
    """Start the preview service; returns (ThreadingHTTPServer, PreviewService).

    Call serve_forever() on the returned server (or shutdown() from another
    thread). Binds loopback by default; the service is for the local editor UI.
    """
    service = PreviewService(scene_path, export_dir=export_dir)

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # quiet
            pass

        def _reply(self, status: int, payload: dict):
            data = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(data)

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()

        def do_GET(self):
            status, payload = service.handle("GET", self.path, None)
            self._reply(status, payload)

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length) if length else b"{}"
            try:
                body = json.loads(raw.decode("utf-8")) if raw else {}
            except json.JSONDecodeError:
                self._reply(400, {"error": {"stage": "router", "message": "body is not valid JSON"}})
                return
            status, payload = service.handle("POST", self.path, body)
            self._reply(status, payload)

    server = ThreadingHTTPServer((host, port), Handler)
    return server, service
