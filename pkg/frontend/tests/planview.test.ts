import { describe, expect, it } from "vitest";

import {
  Canvas2DLike,
  MARKER_RADIUS_PX,
  PlanView,
  canvasToWorld,
  fitTransform,
  hitTestPose,
  worldToCanvas,
} from "../src/planview.js";
import { EditorState } from "../src/state.js";
import { SceneSummary } from "../src/types.js";

const SCENE: SceneSummary = {
  name: "toy",
  bounds: { min: [-0.2, -0.2, -0.1], max: [6.2, 5.2, 3.1] },
  floor_height: 0,
  objects: [
    { name: "table", instance_id: 1, nyu40_class: 7, movable: false, footprint: [[2, 2], [4, 2], [4, 3], [2, 3]], z_range: [0, 0.75] },
    { name: "chair", instance_id: 2, nyu40_class: 5, movable: true, footprint: [[1, 1], [1.4, 1], [1.4, 1.4], [1, 1.4]], z_range: [0, 0.9] },
  ],
  lights: [
    { index: 0, kind: "Area", position: [3, 2.5, 2.96], enabled: true, brightness: 26 },
  ],
};

class RecordingCtx implements Canvas2DLike {
  calls: string[] = [];
  strokeStyle: string | CanvasGradient | CanvasPattern = "";
  fillStyle: string | CanvasGradient | CanvasPattern = "";
  lineWidth = 1;
  globalAlpha = 1;
  clearRect(): void { this.calls.push("clearRect"); }
  beginPath(): void { this.calls.push("beginPath"); }
  moveTo(): void { this.calls.push("moveTo"); }
  lineTo(): void { this.calls.push("lineTo"); }
  closePath(): void { this.calls.push("closePath"); }
  arc(): void { this.calls.push("arc"); }
  stroke(): void { this.calls.push("stroke"); }
  fill(): void { this.calls.push("fill"); }
  fillRect(): void { this.calls.push("fillRect"); }
}

describe("plan transforms", () => {
  it("world/canvas round trip", () => {
    const t = fitTransform(SCENE.bounds, 760, 560);
    for (const [x, y] of [[0, 0], [3.1, 2.7], [6.0, 5.0], [-0.2, -0.2]]) {
      const [px, py] = worldToCanvas(t, x, y);
      const [wx, wy] = canvasToWorld(t, px, py);
      expect(wx).toBeCloseTo(x, 9);
      expect(wy).toBeCloseTo(y, 9);
    }
  });

  it("y axis points up in world space", () => {
    const t = fitTransform(SCENE.bounds, 760, 560);
    const [, pyLow] = worldToCanvas(t, 3, 0);
    const [, pyHigh] = worldToCanvas(t, 3, 5);
    expect(pyHigh).toBeLessThan(pyLow);
  });

  it("bounds fit inside the canvas with margin", () => {
    const t = fitTransform(SCENE.bounds, 760, 560);
    for (const corner of [[-0.2, -0.2], [6.2, 5.2]]) {
      const [px, py] = worldToCanvas(t, corner[0], corner[1]);
      expect(px).toBeGreaterThanOrEqual(0);
      expect(py).toBeGreaterThanOrEqual(0);
      expect(px).toBeLessThanOrEqual(760);
      expect(py).toBeLessThanOrEqual(560);
    }
  });
});

describe("hit testing", () => {
  it("finds the marker under the pointer, topmost first", () => {
    const t = fitTransform(SCENE.bounds, 760, 560);
    const poses = [
      { id: 1, x: 2, y: 2, z: 1.5, yaw: 0 },
      { id: 2, x: 2.02, y: 2.02, z: 1.5, yaw: 0 },
    ];
    const [px, py] = worldToCanvas(t, 2.02, 2.02);
    expect(hitTestPose(t, poses, px, py)).toBe(2);
    expect(hitTestPose(t, poses, px + MARKER_RADIUS_PX * 4, py)).toBeNull();
  });
});

describe("PlanView drawing and interaction", () => {
  function build(state: EditorState) {
    const ctx = new RecordingCtx();
    const events: string[] = [];
    const view = new PlanView(ctx, 760, 560, SCENE, state, {
      onPoseAdded: (x, y) => {
        events.push("add");
        state.addPose(x, y, 1.5, 0);
      },
      onPoseMoved: (id, x, y) => {
        events.push("move");
        state.movePose(id, x, y);
      },
      onPoseSelected: (id) => {
        events.push(`select:${id}`);
        state.select(id);
      },
    });
    return { ctx, view, events };
  }

  it("draws one filled polygon per object footprint", () => {
    const state = new EditorState();
    const { ctx, view } = build(state);
    view.draw();
    expect(ctx.calls.filter((c) => c === "fill").length).toBe(SCENE.objects.length);
    expect(ctx.calls.filter((c) => c === "arc").length).toBe(SCENE.lights.length);
  });

  it("click on empty space adds a pose at the world position", () => {
    const state = new EditorState();
    const { view, events } = build(state);
    const t = view.getTransform();
    const [px, py] = worldToCanvas(t, 3.0, 2.0);
    view.pointerDown(px, py);
    view.pointerUp();
    expect(events).toEqual(["add"]);
    expect(state.poses.length).toBe(1);
    expect(state.poses[0].x).toBeCloseTo(3.0, 6);
    expect(state.poses[0].y).toBeCloseTo(2.0, 6);
  });

  it("dragging a marker moves the pose to the drop position", () => {
    const state = new EditorState();
    const id = state.addPose(1.0, 1.0, 1.5);
    const { view, events } = build(state);
    const t = view.getTransform();
    const [px, py] = worldToCanvas(t, 1.0, 1.0);
    view.pointerDown(px, py);
    const [qx, qy] = worldToCanvas(t, 2.5, 3.5);
    view.pointerMove(qx, qy);
    view.pointerUp();
    expect(events[0]).toBe(`select:${id}`);
    expect(events).toContain("move");
    expect(state.poses[0].x).toBeCloseTo(2.5, 6);
    expect(state.poses[0].y).toBeCloseTo(3.5, 6);
  });

  it("draws the spline polyline only when samples are cached", () => {
    const state = new EditorState();
    const { ctx, view } = build(state);
    view.draw();
    const before = ctx.calls.filter((c) => c === "lineTo").length;
    state.cache.splineSamples = [
      { timestamp: 0, position: [1, 1, 1.5], rotation: [0, 0, 0], velocity: [0, 0, 0], angular_rate: [0, 0, 0] },
      { timestamp: 1, position: [2, 2, 1.5], rotation: [0, 0, 0], velocity: [0, 0, 0], angular_rate: [0, 0, 0] },
      { timestamp: 2, position: [3, 2.5, 1.5], rotation: [0, 0, 0], velocity: [0, 0, 0], angular_rate: [0, 0, 0] },
    ];
    ctx.calls = [];
    view.draw();
    const after = ctx.calls.filter((c) => c === "lineTo").length;
    expect(after).toBeGreaterThan(before);
  });
});
