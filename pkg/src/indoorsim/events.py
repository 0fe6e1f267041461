"""Event-camera emulation from high-frame-rate luminance sequences.

Per pixel, a reference log level tracks the last event; between consecutive
frames the log intensity is linearly interpolated and every contrast-threshold
multiple crossed emits one event with an interpolated timestamp. The merged
stream is time-sorted with stable (y, x) tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REC709 = np.array([0.2126, 0.7152, 0.0722])


@dataclass
class EventConfig:
    threshold: float = 0.2        # log-intensity contrast C
    sim_rate: float = 1000.0      # Hz of the underlying renders
    width: int = 320
    height: int = 240
    intensity_floor: float = 1e-3  # epsilon added before log
    # reserved sensor-effect hooks; the ideal model keeps them at zero
    threshold_sigma: float = 0.0   # per-pixel threshold mismatch std
    refractory_period: float = 0.0  # seconds a pixel stays blind after an event

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be > 0")
        if self.sim_rate <= 0:
            raise ValueError("sim_rate must be > 0")
        if self.intensity_floor <= 0:
            raise ValueError("intensity_floor must be > 0")
        if self.threshold_sigma != 0.0 or self.refractory_period != 0.0:
            raise NotImplementedError(
                "per-pixel threshold mismatch and refractory periods are "
                "reserved hooks, not modeled yet"
            )


@dataclass
class Event:
    x: int
    y: int
    timestamp: float  # seconds, sub-frame interpolated
    polarity: int     # +1 or -1


def rgb_to_luminance(rgb: np.ndarray) -> np.ndarray:
    """Rec.709 luma weighting of linear RGB (H, W, 3) -> (H, W)."""
    return np.asarray(rgb, dtype=float) @ REC709


def emulate_events(
    frames,
    config: EventConfig,
    timestamps=None,
) -> list[Event]:
    """Convert >= 2 uniformly spaced luminance frames into an event stream.

    frames: iterable of (H, W) luminance images (linear intensity, >= 0).
    timestamps: optional explicit frame times; defaults to k / sim_rate.
    """
    frames = [np.asarray(f, dtype=float) for f in frames]
    if len(frames) < 2:
        raise ValueError("need at least 2 frames")
    shape = frames[0].shape
    if any(f.shape != shape for f in frames):
        raise ValueError("frame size mismatch")
    if timestamps is None:
        ts = np.arange(len(frames)) / config.sim_rate
    else:
        ts = np.asarray(timestamps, dtype=float)
        if len(ts) != len(frames):
            raise ValueError("one timestamp per frame required")
        dt = np.diff(ts)
        if np.any(dt <= 0) or np.max(np.abs(dt - dt[0])) > 1e-9 * max(dt[0], 1e-12):
            raise ValueError("non-uniform frame timing")

    c = config.threshold
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    xx = xx.ravel()
    yy = yy.ravel()

    log_prev = np.log(frames[0].ravel() + config.intensity_floor)
    ref = log_prev.copy()

    chunks_t: list[np.ndarray] = []
    chunks_x: list[np.ndarray] = []
    chunks_y: list[np.ndarray] = []
    chunks_p: list[np.ndarray] = []

    for i in range(1, len(frames)):
        log_new = np.log(frames[i].ravel() + config.intensity_floor)
        d0 = log_prev - ref
        d1 = log_new - ref
        rising = d1 > d0
        # number of threshold levels crossed toward d1 (levels at +-k*c from ref)
        n_pos = np.where(rising, np.floor(d1 / c + 1e-12), 0.0).astype(np.int64)
        n_neg = np.where(~rising, np.floor(-d1 / c + 1e-12), 0.0).astype(np.int64)
        n_pos = np.maximum(n_pos, 0)
        n_neg = np.maximum(n_neg, 0)

        t0, t1 = ts[i - 1], ts[i]
        for count, sign in ((n_pos, 1), (n_neg, -1)):
            active = np.nonzero(count > 0)[0]
            if len(active) == 0:
                continue
            reps = count[active]
            pix = np.repeat(active, reps)
            # per-event level index 1..count within each pixel
            lvl = np.concatenate([np.arange(1, r + 1) for r in reps]).astype(float)
            denom = (d1 - d0)[pix]
            frac = (sign * lvl * c - d0[pix]) / denom
            frac = np.clip(frac, 0.0, 1.0)
            chunks_t.append(t0 + frac * (t1 - t0))
            chunks_x.append(xx[pix])
            chunks_y.append(yy[pix])
            chunks_p.append(np.full(len(pix), sign, dtype=np.int64))

        ref = ref + (n_pos - n_neg) * c
        log_prev = log_new

    if not chunks_t:
        return []
    t_all = np.concatenate(chunks_t)
    x_all = np.concatenate(chunks_x)
    y_all = np.concatenate(chunks_y)
    p_all = np.concatenate(chunks_p)
    order = np.lexsort((x_all, y_all, t_all))  # time-major, then (y, x)
    return [
        Event(x=int(x_all[k]), y=int(y_all[k]), timestamp=float(t_all[k]), polarity=int(p_all[k]))
        for k in order
    ]


def events_to_array(events: list[Event]) -> np.ndarray:
    """(N, 4) float array [timestamp, x, y, polarity]."""
    if not events:
        return np.zeros((0, 4))
    return np.array([[e.timestamp, e.x, e.y, e.polarity] for e in events], dtype=float)
