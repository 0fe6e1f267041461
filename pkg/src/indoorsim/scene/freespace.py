"""Occupancy-grid free space used to constrain trajectory generation."""

from __future__ import annotations

import numpy as np

from .types import FreeSpaceMap, Scene


def compute_free_space(scene: Scene, cell: float) -> FreeSpaceMap:
    """Voxelize the scene at `cell` meters per cell.

    A cell is occupied when it strictly overlaps any object collision hull
    AABB (touching only at a face does not count). Cells outside the scene
    bounds do not exist; queries there report not-free.
    """
    if cell <= 0:
        raise ValueError("cell size must be positive")
    lo, hi = scene.bounds
    extent = hi - lo
    if np.any(extent <= 0):
        raise ValueError("scene bounds are degenerate")
    if cell > extent.max():
        raise ValueError(f"cell size {cell} exceeds scene extent {extent.max()}")

    shape = np.maximum(np.ceil((extent - 1e-12) / cell).astype(int), 1)
    occ = np.zeros(tuple(shape), dtype=bool)

    for obj in scene.objects:
        if obj.mesh.num_vertices == 0:
            continue
        omin, omax = obj.world_aabb()
        i0 = np.floor((omin - lo) / cell).astype(int)
        i1 = np.ceil((omax - lo) / cell).astype(int) - 1
        i0 = np.maximum(i0, 0)
        i1 = np.minimum(i1, shape - 1)
        if np.any(i1 < i0):
            continue
        occ[i0[0]:i1[0] + 1, i0[1]:i1[1] + 1, i0[2]:i1[2] + 1] = True

    return FreeSpaceMap(resolution=float(cell), origin=lo.copy(), occupancy=occ, floor_height=scene.floor_height)
