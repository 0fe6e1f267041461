/** Top-down floorplan: object footprints, light markers, control-pose markers
 * with orientation arrows, and the service-sampled spline polyline.
 *
 * Geometry helpers are pure so they test without a real canvas; draw() only
 * issues 2D-context calls.
 */

import { EditorState } from "./state.js";
import { ControlPose, SceneSummary, SplineSample } from "./types.js";

export interface PlanTransform {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
  height: number; // canvas height, for y-flip
}

export function fitTransform(
  bounds: { min: number[]; max: number[] },
  width: number,
  height: number,
  marginPx = 20,
): PlanTransform {
  const wx = bounds.max[0] - bounds.min[0];
  const wy = bounds.max[1] - bounds.min[1];
  const scale = Math.min((width - 2 * marginPx) / wx, (height - 2 * marginPx) / wy);
  return {
    scale,
    offsetX: marginPx - bounds.min[0] * scale,
    offsetY: marginPx - bounds.min[1] * scale,
    height,
  };
}

export function worldToCanvas(t: PlanTransform, x: number, y: number): [number, number] {
  return [x * t.scale + t.offsetX, t.height - (y * t.scale + t.offsetY)];
}

export function canvasToWorld(t: PlanTransform, px: number, py: number): [number, number] {
  return [(px - t.offsetX) / t.scale, (t.height - py - t.offsetY) / t.scale];
}

export const MARKER_RADIUS_PX = 7;

export function hitTestPose(
  t: PlanTransform,
  poses: ControlPose[],
  px: number,
  py: number,
): number | null {
  for (let i = poses.length - 1; i >= 0; i--) {
    const [cx, cy] = worldToCanvas(t, poses[i].x, poses[i].y);
    const d = Math.hypot(cx - px, cy - py);
    if (d <= MARKER_RADIUS_PX + 2) return poses[i].id;
  }
  return null;
}

/** Minimal subset of CanvasRenderingContext2D the view uses; tests pass a
 * recording stub. */
export interface Canvas2DLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
}

export interface PlanViewCallbacks {
  onPoseMoved(id: number, x: number, y: number): void;
  onPoseAdded(x: number, y: number): void;
  onPoseSelected(id: number | null): void;
}

export class PlanView {
  private transform: PlanTransform;
  private dragging: number | null = null;
  private dragMoved = false;

  constructor(
    private ctx: Canvas2DLike,
    private width: number,
    private heightPx: number,
    private scene: SceneSummary,
    private state: EditorState,
    private callbacks: PlanViewCallbacks,
  ) {
    this.transform = fitTransform(scene.bounds, width, heightPx);
  }

  getTransform(): PlanTransform {
    return this.transform;
  }

  // ---- pointer interaction ----

  pointerDown(px: number, py: number): void {
    const hit = hitTestPose(this.transform, this.state.poses, px, py);
    if (hit !== null) {
      this.dragging = hit;
      this.dragMoved = false;
      this.callbacks.onPoseSelected(hit);
    } else {
      const [wx, wy] = canvasToWorld(this.transform, px, py);
      this.callbacks.onPoseAdded(wx, wy);
    }
  }

  pointerMove(px: number, py: number): void {
    if (this.dragging === null) return;
    const [wx, wy] = canvasToWorld(this.transform, px, py);
    this.dragMoved = true;
    this.callbacks.onPoseMoved(this.dragging, wx, wy);
  }

  pointerUp(): void {
    this.dragging = null;
    this.dragMoved = false;
  }

  // ---- drawing ----

  draw(): void {
    const ctx = this.ctx;
    const t = this.transform;
    ctx.clearRect(0, 0, this.width, this.heightPx);
    ctx.globalAlpha = 1;

    // scene bounds
    ctx.strokeStyle = "#666";
    ctx.lineWidth = 1;
    this.polygon([
      [this.scene.bounds.min[0], this.scene.bounds.min[1]],
      [this.scene.bounds.max[0], this.scene.bounds.min[1]],
      [this.scene.bounds.max[0], this.scene.bounds.max[1]],
      [this.scene.bounds.min[0], this.scene.bounds.max[1]],
    ]);
    ctx.stroke();

    // object footprints
    for (const obj of this.scene.objects) {
      ctx.strokeStyle = obj.movable ? "#4a90d9" : "#999";
      ctx.fillStyle = obj.movable ? "rgba(74,144,217,0.15)" : "rgba(150,150,150,0.15)";
      this.polygon(obj.footprint);
      ctx.fill();
      ctx.stroke();
    }

    // light markers
    for (const light of this.scene.lights) {
      const [cx, cy] = worldToCanvas(t, light.position[0], light.position[1]);
      ctx.strokeStyle = light.enabled ? "#e6a817" : "#555";
      ctx.beginPath();
      ctx.arc(cx, cy, 5, 0, Math.PI * 2);
      ctx.stroke();
    }

    // sampled spline polyline (from the service, never computed locally)
    const samples = this.state.cache.splineSamples;
    if (samples && samples.length > 1) {
      ctx.strokeStyle = "#2fbf71";
      ctx.lineWidth = 2;
      ctx.beginPath();
      samples.forEach((s: SplineSample, i: number) => {
        const [cx, cy] = worldToCanvas(t, s.position[0], s.position[1]);
        if (i === 0) ctx.moveTo(cx, cy);
        else ctx.lineTo(cx, cy);
      });
      ctx.stroke();
    }

    // control-pose markers with yaw arrows
    for (const pose of this.state.poses) {
      const [cx, cy] = worldToCanvas(t, pose.x, pose.y);
      const selected = pose.id === this.state.selected;
      ctx.fillStyle = selected ? "#d94a4a" : "#333";
      ctx.strokeStyle = ctx.fillStyle;
      ctx.beginPath();
      ctx.arc(cx, cy, MARKER_RADIUS_PX, 0, Math.PI * 2);
      ctx.fill();
      const ax = cx + Math.cos(-pose.yaw) * MARKER_RADIUS_PX * 2.2;
      const ay = cy + Math.sin(-pose.yaw) * MARKER_RADIUS_PX * 2.2;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(cx, cy);
      ctx.lineTo(ax, ay);
      ctx.stroke();
    }
  }

  private polygon(points: number[][]): void {
    const ctx = this.ctx;
    ctx.beginPath();
    points.forEach((p, i) => {
      const [cx, cy] = worldToCanvas(this.transform, p[0], p[1]);
      if (i === 0) ctx.moveTo(cx, cy);
      else ctx.lineTo(cx, cy);
    });
    ctx.closePath();
  }
}
