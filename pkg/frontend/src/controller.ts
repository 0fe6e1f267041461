/** Glue between the editor state, the preview service, and the DOM panels.
 * All spline/IMU/render geometry comes from the service; edits re-request the
 * spline sample behind a 150 ms debounce with latest-wins cancellation. */

import { ApiClient, ApiError, LatestWins } from "./api.js";
import { debounce, Debounced } from "./debounce.js";
import { EditorState } from "./state.js";
import { MIN_SPLINE_POSES, toControlPoseDocs } from "./types.js";

export const DEBOUNCE_MS = 150;
export const SPLINE_HINT = `spline preview needs at least ${MIN_SPLINE_POSES} control poses`;

export interface ValidationResult {
  ok: boolean;
  errors: Partial<Record<"travelTime" | "frameRate" | "focalPx" | "poses" | "stereoBaseline", string>>;
}

export function validateForExport(state: EditorState): ValidationResult {
  const errors: ValidationResult["errors"] = {};
  if (state.camera.travelTime <= 0) errors.travelTime = "travel time must be > 0";
  if (state.camera.frameRate <= 0) errors.frameRate = "frame rate must be > 0";
  if (state.camera.focalPx <= 0) errors.focalPx = "focal length must be > 0";
  if (state.camera.stereoBaseline < 0) errors.stereoBaseline = "baseline must be >= 0";
  if (state.poses.length < MIN_SPLINE_POSES) {
    errors.poses = SPLINE_HINT;
  }
  return { ok: Object.keys(errors).length === 0, errors };
}

export interface ControllerEvents {
  splineUpdated(): void;
  splineUnavailable(hint: string): void;
  serviceError(err: ApiError): void;
  exported(path: string): void;
}

export class EditorController {
  readonly refreshSpline: Debounced<[]>;
  private splineChannel = new LatestWins();
  private previewChannel = new LatestWins();
  /** sample rate for the preview polyline, Hz of the travel time span */
  sampleRate = 25;

  constructor(
    readonly state: EditorState,
    readonly api: ApiClient,
    private events: ControllerEvents,
  ) {
    this.refreshSpline = debounce(() => void this.requestSpline(), DEBOUNCE_MS);
    state.onChange(() => this.refreshSpline());
  }

  async requestSpline(): Promise<void> {
    if (this.state.poses.length < MIN_SPLINE_POSES || this.state.camera.travelTime <= 0) {
      this.state.cache.splineSamples = null;
      this.events.splineUnavailable(SPLINE_HINT);
      return;
    }
    const docs = toControlPoseDocs(this.state.poses, this.state.camera.travelTime);
    try {
      const result = await this.splineChannel.run(() =>
        this.api.sampleSpline(docs, this.sampleRate),
      );
      if (result === null) return; // superseded by a newer request
      this.state.cache.splineSamples = result.samples;
      this.events.splineUpdated();
    } catch (err) {
      if (err instanceof ApiError) this.events.serviceError(err);
      else throw err;
    }
  }

  async requestRenderPreview(poseId: number | null): Promise<string | null> {
    const pose =
      poseId !== null
        ? this.state.poses.find((p) => p.id === poseId)
        : this.state.poses[0];
    if (!pose) return null;
    try {
      const result = await this.previewChannel.run(() =>
        this.api.renderPreview({
          pose: { position: [pose.x, pose.y, pose.z], rotation: [0, 0, pose.yaw] },
          width: 320,
          height: 240,
          spp: 8,
        }),
      );
      if (result === null) return null;
      this.state.cache.previewImageB64 = result.image_png_base64;
      return result.image_png_base64;
    } catch (err) {
      if (err instanceof ApiError) {
        this.events.serviceError(err);
        return null;
      }
      throw err;
    }
  }

  /** Validates, then posts to /api/export; invalid states never hit the
   * service. Returns the server-side path, or null when validation failed. */
  async exportTrajectory(format: string): Promise<string | null> {
    const check = validateForExport(this.state);
    if (!check.ok) return null;
    const docs = toControlPoseDocs(this.state.poses, this.state.camera.travelTime);
    try {
      const result = await this.api.exportTrajectory({
        control_poses: docs,
        format,
        frame_rate: this.state.camera.frameRate,
        stereo_baseline: this.state.camera.stereoBaseline,
      });
      this.events.exported(result.path);
      return result.path;
    } catch (err) {
      if (err instanceof ApiError) {
        this.events.serviceError(err);
        return null;
      }
      throw err;
    }
  }
}
