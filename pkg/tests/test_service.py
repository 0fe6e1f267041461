import base64
import io
import json
import threading
import urllib.request

import numpy as np
import pytest

from indoorsim.dataset import import_trajectory
from indoorsim.server import PreviewService, serve_preview


@pytest.fixture(scope="module")
def service(toy_room_path, tmp_path_factory):
    return PreviewService(toy_room_path, export_dir=tmp_path_factory.mktemp("exports"))


def control_pose_doc(n=4, step=1.0):
    poses = []
    for k in range(n):
        poses.append({
            "timestamp": k * 0.5,
            "position": [1.0 + k * step * 0.5, 1.0 + k * step * 0.25, 1.5],
            "rotation": [0.0, 0.0, 0.1 * k],
        })
    return {"control_poses": poses}


class TestServiceLogic:
    def test_scene_summary_counts(self, service, toy_room):
        doc = service.scene_summary()
        assert len(doc["objects"]) == len(toy_room.objects)
        assert len(doc["lights"]) == len(toy_room.lights)
        assert doc["floor_height"] == 0.0
        footprint = doc["objects"][0]["footprint"]
        assert len(footprint) == 4 and len(footprint[0]) == 2

    def test_spline_sample_straight_line(self, service):
        doc = control_pose_doc()
        # collinear, equally spaced: samples lie exactly on the line
        body = service.spline_sample({**doc, "rate": 20.0})
        samples = body["samples"]
        assert len(samples) == int(1.5 * 20) + 1
        for s in samples:
            t = s["timestamp"]
            assert s["position"][0] == pytest.approx(1.0 + t, abs=1e-9)
            assert s["position"][1] == pytest.approx(1.0 + 0.5 * t, abs=1e-9)

    def test_spline_needs_four_poses(self, service):
        from indoorsim.server import ServiceError

        with pytest.raises(ServiceError, match=">= 4"):
            service.spline_sample({"control_poses": control_pose_doc(2)["control_poses"]})

    def test_trajectory_generate(self, service):
        body = service.trajectory_generate({"traj_type": 2, "duration": 2.0, "seed": 1})
        assert len(body["keyframes"]) == 50
        z = [k["position"][2] for k in body["keyframes"]]
        assert min(z) >= 1.0 and max(z) <= 2.0

    def test_imu_preview_first_two_seconds(self, service):
        body = service.imu_preview(control_pose_doc(8))
        stamps = [s["timestamp"] for s in body["samples"]]
        assert stamps[0] == 0.0
        assert max(stamps) <= 2.0 + 1e-9
        assert len(stamps) == int(2.0 * 800) + 1

    def test_render_preview_bounded_and_decodable(self, service):
        body = service.render_preview({
            "pose": {"position": [3.0, 1.0, 1.5], "rotation": [0.0, 0.0, 0.0]},
            "width": 4096, "height": 4096, "spp": 999, "seed": 0,
        })
        assert body["width"] <= 320 and body["height"] <= 240
        assert body["spp"] <= 32
        from PIL import Image

        img = Image.open(io.BytesIO(base64.b64decode(body["image_png_base64"])))
        assert img.size == (body["width"], body["height"])

    def test_export_round_trips_through_importer(self, service):
        body = service.export({**control_pose_doc(), "format": "TUM", "frame_rate": 10.0})
        stamped = import_trajectory(body["path"], format="TUM")
        assert len(stamped) == body["samples"]

    def test_export_stereo_baseline(self, service):
        body = service.export({**control_pose_doc(), "format": "TUM",
                               "frame_rate": 10.0, "stereo_baseline": 0.12})
        left = import_trajectory(body["path"], format="TUM")
        right = import_trajectory(body["right_path"], format="TUM")
        for l, r in zip(left, right):
            offset = np.linalg.norm(r.position - l.position)
            assert offset == pytest.approx(0.12, abs=1e-9)

    def test_unknown_endpoint_structured_error(self, service):
        status, payload = service.handle("GET", "/api/nope", None)
        assert status == 404
        assert payload["error"]["stage"] == "router"

    def test_error_payload_carries_stage(self, service):
        status, payload = service.handle("POST", "/api/spline/sample", {"control_poses": []})
        assert status == 400
        assert payload["error"]["stage"] == "spline"

    def test_scene_endpoint_idempotent(self, service):
        a = service.handle("GET", "/api/scene", None)
        b = service.handle("GET", "/api/scene", None)
        assert a == b


@pytest.fixture(scope="module")
def server_url(toy_room_path, tmp_path_factory):
    server, _ = serve_preview(
        str(toy_room_path), port=0, export_dir=str(tmp_path_factory.mktemp("exp"))
    )
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    yield f"http://{host}:{port}"
    server.shutdown()


class TestHttpServer:
    def _get(self, url):
        with urllib.request.urlopen(url, timeout=30) as r:
            return r.status, json.loads(r.read().decode())

    def _post(self, url, body):
        req = urllib.request.Request(
            url, data=json.dumps(body).encode(), headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=60) as r:
                return r.status, json.loads(r.read().decode())
        except urllib.error.HTTPError as e:
            return e.code, json.loads(e.read().decode())

    def test_get_scene_over_http(self, server_url, toy_room):
        status, body = self._get(server_url + "/api/scene")
        assert status == 200
        assert len(body["objects"]) == len(toy_room.objects)

    def test_spline_sample_over_http(self, server_url):
        status, body = self._post(server_url + "/api/spline/sample",
                                  {**control_pose_doc(), "rate": 10.0})
        assert status == 200
        assert len(body["samples"]) == 16

    def test_error_status_over_http(self, server_url):
        status, body = self._post(server_url + "/api/spline/sample", {"control_poses": []})
        assert status == 400
        assert body["error"]["stage"] == "spline"

    def test_export_over_http(self, server_url):
        status, body = self._post(server_url + "/api/export",
                                  {**control_pose_doc(), "format": "TUM", "frame_rate": 5.0})
        assert status == 200
        stamped = import_trajectory(body["path"], format="TUM")
        assert len(stamped) == body["samples"]
