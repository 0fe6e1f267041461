import { describe, expect, it } from "vitest";

import { EditorState, Snapshot } from "../src/state.js";

/** Deterministic LCG so the random edit sequence is reproducible. */
function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (1664525 * s + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}

describe("EditorState undo/redo", () => {
  it("restores the exact prior state over a 100-operation random sequence", () => {
    const rnd = lcg(42);
    const state = new EditorState();
    const history: Snapshot[] = [state.current()];
    const ids: number[] = [];

    for (let i = 0; i < 100; i++) {
      const r = rnd();
      if (r < 0.3 || ids.length === 0) {
        ids.push(state.addPose(rnd() * 6, rnd() * 5, 1 + rnd(), rnd() * 3));
      } else if (r < 0.5) {
        const id = ids[Math.floor(rnd() * ids.length)];
        state.movePose(id, rnd() * 6, rnd() * 5);
      } else if (r < 0.65) {
        const id = ids[Math.floor(rnd() * ids.length)];
        state.setYaw(id, rnd() * 6 - 3);
      } else if (r < 0.8) {
        const id = ids[Math.floor(rnd() * ids.length)];
        state.setHeight(id, 0.5 + rnd() * 2);
      } else if (r < 0.9) {
        state.setCamera("travelTime", 1 + rnd() * 10);
      } else {
        const idx = Math.floor(rnd() * ids.length);
        state.removePose(ids[idx]);
        ids.splice(idx, 1);
      }
      history.push(state.current());
    }

    // walk all the way back: every intermediate state is restored exactly
    for (let k = history.length - 1; k > 0; k--) {
      expect(state.current()).toEqual(history[k]);
      expect(state.undo()).toBe(true);
    }
    expect(state.current()).toEqual(history[0]);
    expect(state.undo()).toBe(false);

    // and all the way forward again
    for (let k = 1; k < history.length; k++) {
      expect(state.redo()).toBe(true);
      expect(state.current()).toEqual(history[k]);
    }
    expect(state.redo()).toBe(false);
  });

  it("a new edit clears the redo stack", () => {
    const state = new EditorState();
    state.addPose(1, 1, 1.5);
    state.addPose(2, 2, 1.5);
    state.undo();
    expect(state.canRedo()).toBe(true);
    state.addPose(3, 3, 1.5);
    expect(state.canRedo()).toBe(false);
    expect(state.poses.length).toBe(2);
  });

  it("mutating a missing pose id is a no-op", () => {
    const state = new EditorState();
    const before = state.current();
    state.movePose(99, 1, 1);
    expect(state.current()).toEqual(before);
    expect(state.canUndo()).toBe(false);
  });

  it("selection participates in undo", () => {
    const state = new EditorState();
    const a = state.addPose(1, 1, 1.5);
    const b = state.addPose(2, 2, 1.5);
    state.select(a);
    expect(state.selected).toBe(a);
    state.undo();
    expect(state.selected).toBe(b);
  });

  it("preview cache is transient and not tracked by undo", () => {
    const state = new EditorState();
    state.addPose(1, 1, 1.5);
    state.cache.previewImageB64 = "abc";
    state.undo();
    expect(state.cache.previewImageB64).toBe("abc");
  });
});
