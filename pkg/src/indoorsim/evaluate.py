"""Trajectory evaluation: timestamp association, rigid alignment, ATE statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import RigidTransform


@dataclass
class AteResult:
    rmse: float
    mean: float
    median: float
    std: float
    min: float
    max: float
    matched_pairs: int
    tracked_fraction: float
    alignment: RigidTransform = field(default_factory=RigidTransform.identity)

    def format_block(self) -> str:
        return (
            f"matched_pairs    {self.matched_pairs}\n"
            f"tracked_fraction {self.tracked_fraction:.4f}\n"
            f"ate.rmse         {self.rmse:.6f} m\n"
            f"ate.mean         {self.mean:.6f} m\n"
            f"ate.median       {self.median:.6f} m\n"
            f"ate.std          {self.std:.6f} m\n"
            f"ate.min          {self.min:.6f} m\n"
            f"ate.max          {self.max:.6f} m"
        )


def associate(est_times, gt_times, max_dt: float = 0.02) -> list[tuple[int, int]]:
    """Greedy nearest-timestamp matching; each pose used at most once.

    Candidate pairs within max_dt are taken in order of |dt| (ties by index),
    skipping already-used members — the standard RGB-D benchmark association.
    Returns (est_index, gt_index) pairs sorted by est index.
    """
    est_times = np.asarray(est_times, dtype=float)
    gt_times = np.asarray(gt_times, dtype=float)
    if len(est_times) == 0 or len(gt_times) == 0:
        raise ValueError("empty trajectory passed to associate")

    # relative slack: timestamps arrive through float arithmetic, and an exact
    # half-period offset must still match (|dt| == max_dt up to rounding)
    limit = max_dt * (1.0 + 1e-9) + 1e-12
    cand = []
    j_lo = 0
    for i, t in enumerate(est_times):
        # advance to the neighborhood of t (both lists are time-sorted)
        while j_lo + 1 < len(gt_times) and gt_times[j_lo + 1] <= t - limit:
            j_lo += 1
        j = j_lo
        while j < len(gt_times) and gt_times[j] <= t + limit:
            dt = abs(gt_times[j] - t)
            if dt <= limit:
                # quantize to nanoseconds so float jitter cannot break ties
                cand.append((round(dt * 1e9), i, j))
            j += 1
    cand.sort(key=lambda c: (c[0], c[1], c[2]))
    used_est = set()
    used_gt = set()
    matches = []
    for _, i, j in cand:
        if i in used_est or j in used_gt:
            continue
        used_est.add(i)
        used_gt.add(j)
        matches.append((i, j))
    matches.sort()
    return matches


def align_rigid(est_points, gt_points, with_scale: bool = False):
    """Closed-form least-squares rigid fit T minimizing sum ||T(est) - gt||^2.

    Horn/Umeyama without scale by default (metric sequences); set with_scale
    for monocular studies. Returns (transform, scale, degenerate_flag); on
    degenerate geometry (< 3 points or collinear) the rotation falls back to
    identity and only the translation is estimated.
    """
    est = np.asarray(est_points, dtype=float).reshape(-1, 3)
    gt = np.asarray(gt_points, dtype=float).reshape(-1, 3)
    if est.shape != gt.shape:
        raise ValueError("point sets must have matching shapes")
    n = len(est)
    mu_e = est.mean(axis=0)
    mu_g = gt.mean(axis=0)
    ec = est - mu_e
    gc = gt - mu_g

    degenerate = False
    scale = 1.0
    if n < 3:
        degenerate = True
        rot = np.eye(3)
    else:
        cov = gc.T @ ec / n
        u, s, vt = np.linalg.svd(cov)
        # rank < 2 leaves the rotation unconstrained
        if s[1] < 1e-12 * max(s[0], 1e-300):
            degenerate = True
            rot = np.eye(3)
        else:
            d = np.sign(np.linalg.det(u @ vt))
            diag = np.diag([1.0, 1.0, d])
            rot = u @ diag @ vt
            if with_scale:
                var_e = (ec ** 2).sum() / n
                scale = float(np.trace(np.diag(s) @ diag) / var_e) if var_e > 0 else 1.0
    trans = mu_g - scale * rot @ mu_e
    return RigidTransform.from_matrix(rot, trans), scale, degenerate


def compute_ate(
    est,
    gt,
    max_dt: float = 0.02,
    with_scale: bool = False,
) -> AteResult:
    """Associate, rigidly align, and report translational error statistics.

    est, gt: sequences of (timestamp, RigidTransform) or (timestamp, position)
    tuples; only positions enter the ATE.
    """
    est_times, est_pos = _times_positions(est)
    gt_times, gt_pos = _times_positions(gt)
    matches = associate(est_times, gt_times, max_dt)
    if not matches:
        raise ValueError("no matches within max_dt; cannot compute ATE")
    ei = [m[0] for m in matches]
    gi = [m[1] for m in matches]
    e = est_pos[ei]
    g = gt_pos[gi]
    transform, scale, _ = align_rigid(e, g, with_scale=with_scale)
    aligned = scale * (e @ transform.matrix.T) + transform.translation
    err = np.linalg.norm(aligned - g, axis=1)
    return AteResult(
        rmse=float(np.sqrt(np.mean(err ** 2))),
        mean=float(np.mean(err)),
        median=float(np.median(err)),
        std=float(np.std(err)),
        min=float(np.min(err)),
        max=float(np.max(err)),
        matched_pairs=len(matches),
        tracked_fraction=len(matches) / len(gt_times),
        alignment=transform,
    )


def _times_positions(seq):
    times = []
    pos = []
    for item in seq:
        t, p = item[0], item[1]
        if isinstance(p, RigidTransform):
            pos.append(p.translation)
        else:
            arr = np.asarray(p, dtype=float).reshape(-1)
            pos.append(arr[:3])
        times.append(float(t))
    return np.asarray(times), np.asarray(pos)
