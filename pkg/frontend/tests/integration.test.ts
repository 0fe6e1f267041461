/** Scripted browser test against the real preview service (the secondary
 * acceptance criterion): load the toy scene, place 4 control poses, observe
 * the spline preview, export TUM, then check the file through the core
 * importer and an ATE self-comparison.
 *
 * Requires the python package to be installed (skipped otherwise).
 */

import { execFileSync, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { EditorController } from "../src/controller.js";
import { EditorState } from "../src/state.js";

const REPO_ROOT = resolve(__dirname, "..", "..");
const SCENE = join(REPO_ROOT, "scenes", "toy_room", "toy_room.yaml");
const PORT = 8873;
const BASE = `http://127.0.0.1:${PORT}`;

function pythonAvailable(): boolean {
  try {
    execFileSync("python3", ["-c", "import indoorsim"], { stdio: "ignore" });
    return true;
  } catch {
    return false;
  }
}

const HAVE_SERVICE = pythonAvailable();

describe.skipIf(!HAVE_SERVICE)("scripted flow against the live service", () => {
  let server: ChildProcess;
  let exportDir: string;

  beforeAll(async () => {
    exportDir = mkdtempSync(join(tmpdir(), "editor-export-"));
    server = spawn(
      "python3",
      ["-m", "indoorsim.cli", "serve", "--scene", SCENE, "--port", String(PORT),
       "--export-dir", exportDir],
      { stdio: "ignore" },
    );
    // wait for readiness
    for (let tries = 0; tries < 120; tries++) {
      try {
        const resp = await fetch(`${BASE}/api/scene`);
        if (resp.ok) return;
      } catch {
        /* not up yet */
      }
      await new Promise((r) => setTimeout(r, 500));
    }
    throw new Error("preview service did not come up");
  });

  afterAll(() => {
    server?.kill();
  });

  it("loads the scene, previews a spline through 4 placed poses, exports TUM, and the core accepts it", async () => {
    const api = new ApiClient(BASE);
    const state = new EditorState();
    let splineUpdates = 0;
    const serviceErrors: unknown[] = [];
    const controller = new EditorController(state, api, {
      splineUpdated: () => splineUpdates++,
      splineUnavailable: () => {},
      serviceError: (err) => serviceErrors.push(err),
      exported: () => {},
    });
    controller.refreshSpline.cancel(); // drive requests explicitly in the test

    // scene summary matches the loader's view of the toy room
    const scene = await api.getScene();
    expect(scene.objects.length).toBe(12);
    expect(scene.lights.length).toBe(3);

    // place 4 control poses inside the room, heights in the walking band
    // travel time 6 s puts the control timestamps (0, 2, 4, 6) exactly on
    // the 25 Hz sample grid, so interpolation is checkable to 1e-6
    state.addPose(1.0, 1.0, 1.5, 0.3);
    state.addPose(2.5, 1.6, 1.5, 0.1);
    state.addPose(4.0, 2.4, 1.6, -0.2);
    state.addPose(5.0, 3.5, 1.4, -0.5);
    state.setCamera("travelTime", 6);
    state.setCamera("frameRate", 25);

    // spline preview passes through the dragged control poses
    await controller.requestSpline();
    expect(splineUpdates).toBe(1);
    const samples = state.cache.splineSamples!;
    expect(samples.length).toBe(151); // floor(6 s * 25 Hz) + 1
    const first = samples[0];
    expect(first.position[0]).toBeCloseTo(1.0, 6);
    expect(first.position[1]).toBeCloseTo(1.0, 6);
    // interpolation: some sample passes (numerically) through pose 3
    const nearPose3 = samples.some(
      (s) => Math.hypot(s.position[0] - 4.0, s.position[1] - 2.4) < 1e-6,
    );
    expect(nearPose3).toBe(true);

    // drag a pose and observe the polyline move through the new position
    state.movePose(state.poses[1].id, 2.8, 1.2);
    controller.refreshSpline.cancel();
    await controller.requestSpline();
    const moved = state.cache.splineSamples!;
    const nearMoved = moved.some(
      (s) => Math.hypot(s.position[0] - 2.8, s.position[1] - 1.2) < 1e-6,
    );
    expect(nearMoved).toBe(true);

    // export TUM server-side
    const path = await controller.exportTrajectory("TUM");
    expect(path).not.toBeNull();
    expect(readFileSync(path!, "utf-8")).toMatch(/^# timestamp tx ty tz qx qy qz qw/);

    // the exported file passes the core importer and an ATE self-check
    const out = execFileSync(
      "python3",
      ["-m", "indoorsim.cli", "ate", "--gt", path!, "--est", path!],
      { encoding: "utf-8" },
    );
    expect(out).toMatch(/ate\.rmse\s+0\.000000 m/);
    expect(out).toMatch(/tracked_fraction 1\.0000/);

    // stereo export produces a parallel right-camera trajectory
    state.setCamera("stereoBaseline", 0.1);
    const stereoPath = await controller.exportTrajectory("TUM");
    expect(stereoPath).not.toBeNull();
    const imported = execFileSync(
      "python3",
      [
        "-c",
        [
          "import sys, numpy as np",
          "from indoorsim.dataset import import_trajectory",
          "left = import_trajectory(sys.argv[1]); right = import_trajectory(sys.argv[2])",
          "d = [float(np.linalg.norm(r.position - l.position)) for l, r in zip(left, right)]",
          "print(min(d), max(d))",
        ].join("\n"),
        stereoPath!,
        stereoPath!.replace(/_tum\.txt$/, "").replace(/export_(\d+)/, "export_$1_right") + "_tum.txt",
      ],
      { encoding: "utf-8" },
    );
    const [lo, hi] = imported.trim().split(" ").map(Number);
    expect(lo).toBeCloseTo(0.1, 9);
    expect(hi).toBeCloseTo(0.1, 9);

    expect(serviceErrors).toEqual([]);
    controller.refreshSpline.cancel(); // no stragglers after the server stops
  });
});
