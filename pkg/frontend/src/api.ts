/** Preview-service client: every displayed geometry sample comes from these
 * endpoints; the editor performs no trajectory math of its own. */

import {
  ControlPoseDoc,
  ExportResult,
  ImuSampleDoc,
  SceneSummary,
  SplineSample,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly stage: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base: string,
    private fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, {
        method,
        headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
        body: body !== undefined ? JSON.stringify(body) : undefined,
      });
    } catch (err) {
      throw new ApiError("network", `service unreachable: ${String(err)}`, 0);
    }
    const payload = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok || payload.error) {
      const detail = (payload.error ?? {}) as { stage?: string; message?: string };
      throw new ApiError(detail.stage ?? "unknown", detail.message ?? resp.statusText, resp.status);
    }
    return payload as T;
  }

  getScene(): Promise<SceneSummary> {
    return this.request<SceneSummary>("GET", "/api/scene");
  }

  sampleSpline(controlPoses: ControlPoseDoc[], rate: number): Promise<{ samples: SplineSample[] }> {
    return this.request("POST", "/api/spline/sample", { control_poses: controlPoses, rate });
  }

  generateTrajectory(params: {
    traj_type: number;
    duration: number;
    seed: number;
    v_mult?: number;
    w_mult?: number;
  }): Promise<{ keyframes: { timestamp: number; position: number[]; rotation: number[] }[] }> {
    return this.request("POST", "/api/trajectory/generate", params);
  }

  renderPreview(req: {
    pose: { position: number[]; rotation: number[] };
    width?: number;
    height?: number;
    spp?: number;
    lens?: { kind: string; focal_px?: number };
  }): Promise<{ image_png_base64: string; width: number; height: number }> {
    return this.request("POST", "/api/render/preview", req);
  }

  imuPreview(controlPoses: ControlPoseDoc[]): Promise<{ samples: ImuSampleDoc[] }> {
    return this.request("POST", "/api/imu/preview", { control_poses: controlPoses });
  }

  exportTrajectory(req: {
    control_poses: ControlPoseDoc[];
    format: string;
    frame_rate: number;
    stereo_baseline?: number;
  }): Promise<ExportResult> {
    return this.request("POST", "/api/export", req);
  }
}

/** At most one in-flight request per channel; stale responses are dropped
 * (latest wins). Returns null for superseded calls. */
export class LatestWins {
  private seq = 0;

  async run<T>(fn: () => Promise<T>): Promise<T | null> {
    const ticket = ++this.seq;
    const result = await fn();
    return ticket === this.seq ? result : null;
  }
}
