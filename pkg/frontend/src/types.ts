/** Shared types mirroring the preview service JSON payloads. */

export interface SceneObjectSummary {
  name: string;
  instance_id: number;
  nyu40_class: number;
  movable: boolean;
  footprint: [number, number][];
  z_range: [number, number];
}

export interface LightSummary {
  index: number;
  kind: string;
  position: number[];
  enabled: boolean;
  brightness: number;
}

export interface SceneSummary {
  name: string;
  bounds: { min: number[]; max: number[] };
  floor_height: number;
  objects: SceneObjectSummary[];
  lights: LightSummary[];
}

export interface ControlPose {
  id: number;
  /** world position, meters */
  x: number;
  y: number;
  z: number;
  /** yaw about world up, radians */
  yaw: number;
}

export interface CameraConfig {
  focalPx: number;
  width: number;
  height: number;
  distortion: [number, number, number, number];
  stereoBaseline: number;
  frameRate: number;
  /** seconds the camera takes to traverse all control poses */
  travelTime: number;
}

export interface SplineSample {
  timestamp: number;
  position: number[];
  rotation: number[];
  velocity: number[];
  angular_rate: number[];
}

export interface ExportResult {
  path: string;
  samples: number;
  format: string;
  right_path?: string;
}

export interface ImuSampleDoc {
  timestamp: number;
  gyro: number[];
  accel: number[];
}

/** Control-pose document sent to /api/spline/sample and /api/export. */
export interface ControlPoseDoc {
  timestamp: number;
  position: [number, number, number];
  rotation: [number, number, number];
}

export const MIN_SPLINE_POSES = 4;

/** Uniform timestamps over the travel time; the service spline requires
 * uniform spacing, the editor owns no other trajectory math. */
export function toControlPoseDocs(poses: ControlPose[], travelTime: number): ControlPoseDoc[] {
  const n = poses.length;
  const dt = n > 1 ? travelTime / (n - 1) : 0;
  return poses.map((p, k) => ({
    timestamp: k * dt,
    position: [p.x, p.y, p.z],
    rotation: [0, 0, p.yaw],
  }));
}
