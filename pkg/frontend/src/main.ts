/** Browser entry point: builds the DOM, loads the scene, wires everything. */

import { ApiClient, ApiError } from "./api.js";
import { EditorController, validateForExport, SPLINE_HINT } from "./controller.js";
import { PlanView } from "./planview.js";
import { EditorState } from "./state.js";
import { CameraConfig } from "./types.js";

const SERVICE_BASE = (window as unknown as { INDOORSIM_SERVICE?: string }).INDOORSIM_SERVICE
  ?? "http://127.0.0.1:8777";

export async function boot(root: HTMLElement, base: string = SERVICE_BASE): Promise<void> {
  const api = new ApiClient(base);
  const state = new EditorState();

  root.innerHTML = `
    <div id="banner" class="banner hidden"></div>
    <div class="layout">
      <div class="plan">
        <canvas id="plan" width="760" height="560"></canvas>
        <div id="hint" class="hint">${SPLINE_HINT}</div>
      </div>
      <div class="panel">
        <h3 id="scene-name">loading…</h3>
        <fieldset>
          <legend>camera</legend>
          <label>focal px <input id="focalPx" type="number" value="600"></label>
          <label>width <input id="width" type="number" value="640"></label>
          <label>height <input id="height" type="number" value="480"></label>
          <label>distortion <input id="distortion" type="text" value="0,0,0,0"></label>
          <label>stereo baseline m <input id="stereoBaseline" type="number" value="0" step="0.01"></label>
          <label>frame rate Hz <input id="frameRate" type="number" value="25"></label>
          <label>travel time s <input id="travelTime" type="number" value="5" step="0.5"></label>
          <div id="camera-errors" class="error"></div>
        </fieldset>
        <fieldset>
          <legend>selected pose</legend>
          <label>height m <input id="poseHeight" type="range" min="0.2" max="2.8" step="0.05" value="1.5"></label>
          <label>yaw rad <input id="poseYaw" type="range" min="-3.1416" max="3.1416" step="0.05" value="0"></label>
          <button id="deletePose">delete pose</button>
        </fieldset>
        <div class="buttons">
          <button id="undo">undo</button>
          <button id="redo">redo</button>
          <button id="preview">render preview</button>
          <select id="format"><option>TUM</option><option>EuRoC</option></select>
          <button id="export">export</button>
        </div>
        <div id="export-result" class="status"></div>
        <img id="preview-img" alt="">
      </div>
    </div>`;

  const q = <T extends HTMLElement>(sel: string) => root.querySelector(sel) as T;
  const banner = q<HTMLDivElement>("#banner");
  const hint = q<HTMLDivElement>("#hint");
  const canvas = q<HTMLCanvasElement>("#plan");

  let scene;
  try {
    scene = await api.getScene();
  } catch (err) {
    banner.textContent = `service unreachable at ${base} — start it with: indoorsim serve --scene <scene.yaml>`;
    banner.classList.remove("hidden");
    const retry = document.createElement("button");
    retry.textContent = "retry";
    retry.onclick = () => void boot(root, base);
    banner.appendChild(retry);
    return;
  }
  q<HTMLHeadingElement>("#scene-name").textContent =
    `${scene.name}: ${scene.objects.length} objects, ${scene.lights.length} lights`;

  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");

  const controller = new EditorController(state, api, {
    splineUpdated: () => {
      hint.classList.add("hidden");
      view.draw();
    },
    splineUnavailable: (text) => {
      hint.textContent = text;
      hint.classList.remove("hidden");
      view.draw();
    },
    serviceError: (err: ApiError) => {
      banner.textContent = `[${err.stage}] ${err.message}`;
      banner.classList.remove("hidden");
      setTimeout(() => banner.classList.add("hidden"), 5000);
    },
    exported: (path) => {
      q<HTMLDivElement>("#export-result").textContent = `written on the server: ${path}`;
    },
  });

  const view = new PlanView(ctx, canvas.width, canvas.height, scene, state, {
    onPoseAdded: (x, y) => state.addPose(x, y, 1.5, 0),
    onPoseMoved: (id, x, y) => state.movePose(id, x, y),
    onPoseSelected: (id) => state.select(id),
  });

  canvas.addEventListener("pointerdown", (e) => {
    const r = canvas.getBoundingClientRect();
    view.pointerDown(e.clientX - r.left, e.clientY - r.top);
  });
  canvas.addEventListener("pointermove", (e) => {
    const r = canvas.getBoundingClientRect();
    view.pointerMove(e.clientX - r.left, e.clientY - r.top);
  });
  canvas.addEventListener("pointerup", () => view.pointerUp());

  const bindCamera = (id: string, field: keyof CameraConfig, parse: (v: string) => unknown) => {
    const input = q<HTMLInputElement>(`#${id}`);
    input.addEventListener("change", () => {
      state.setCamera(field, parse(input.value) as never);
      const check = validateForExport(state);
      q<HTMLDivElement>("#camera-errors").textContent =
        Object.values(check.errors).filter((e) => !e.includes("poses")).join("; ");
    });
  };
  bindCamera("focalPx", "focalPx", Number);
  bindCamera("width", "width", Number);
  bindCamera("height", "height", Number);
  bindCamera("stereoBaseline", "stereoBaseline", Number);
  bindCamera("frameRate", "frameRate", Number);
  bindCamera("travelTime", "travelTime", Number);
  bindCamera("distortion", "distortion", (v) => v.split(",").map(Number));

  q<HTMLInputElement>("#poseHeight").addEventListener("change", (e) => {
    if (state.selected !== null)
      state.setHeight(state.selected, Number((e.target as HTMLInputElement).value));
  });
  q<HTMLInputElement>("#poseYaw").addEventListener("change", (e) => {
    if (state.selected !== null)
      state.setYaw(state.selected, Number((e.target as HTMLInputElement).value));
  });
  q<HTMLButtonElement>("#deletePose").addEventListener("click", () => {
    if (state.selected !== null) state.removePose(state.selected);
  });
  q<HTMLButtonElement>("#undo").addEventListener("click", () => state.undo());
  q<HTMLButtonElement>("#redo").addEventListener("click", () => state.redo());
  q<HTMLButtonElement>("#preview").addEventListener("click", () => {
    void controller.requestRenderPreview(state.selected).then((b64) => {
      if (b64) q<HTMLImageElement>("#preview-img").src = `data:image/png;base64,${b64}`;
    });
  });
  q<HTMLButtonElement>("#export").addEventListener("click", () => {
    const check = validateForExport(state);
    q<HTMLDivElement>("#camera-errors").textContent = Object.values(check.errors).join("; ");
    if (check.ok) void controller.exportTrajectory(q<HTMLSelectElement>("#format").value);
  });

  state.onChange(() => view.draw());
  view.draw();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot(document.getElementById("app") as HTMLElement);
}
