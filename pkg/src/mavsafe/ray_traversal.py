"""Exact voxel stepping for rays through a regular grid.

Both entry points honour the same contract: every voxel the clipped segment
intersects is visited exactly once, in order along the ray, with the entry
and exit distances of the segment inside that voxel. ``traverse_segment`` is
the scalar reference; ``traverse_batch`` steps many rays in lockstep with
numpy and is what frame integration uses.
"""

from __future__ import annotations

import numpy as np

_EPS = 1e-12


def _ray_aabb(origin: np.ndarray, inv_dir: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Entry/exit distances of a ray against an axis-aligned box (slab method)."""
    with np.errstate(invalid="ignore"):
        t_near = (lo - origin) * inv_dir
        t_far = (hi - origin) * inv_dir
    # 0 * inf -> NaN happens only when the origin sits exactly on a slab face
    # with no motion along that axis; treat the axis as unconstraining.
    t0 = np.nan_to_num(np.minimum(t_near, t_far), nan=-np.inf)
    t1 = np.nan_to_num(np.maximum(t_near, t_far), nan=np.inf)
    return np.max(t0, axis=-1), np.min(t1, axis=-1)


def traverse_segment(origin, direction, t_stop, grid_origin, resolution, shape):
    """Visit the voxels a ray segment crosses, one at a time.

    ``direction`` need not be normalized; distances are Euclidean. Returns
    four arrays: voxel indices (n, 3), entry distances, exit distances.
    The segment is the portion of the ray with t in [0, t_stop] clipped to
    the grid volume.
    """
    origin = np.asarray(origin, dtype=float)
    d = np.asarray(direction, dtype=float)
    n = np.linalg.norm(d)
    if n == 0.0:
        raise ValueError("direction must be non-zero")
    d = d / n
    lo = np.asarray(grid_origin, dtype=float)
    hi = lo + resolution * np.asarray(shape, dtype=float)

    with np.errstate(divide="ignore", over="ignore"):
        inv = np.where(d != 0.0, 1.0 / np.where(d == 0.0, 1.0, d), np.inf)
    t0, t1 = _ray_aabb(origin, inv, lo, hi)
    t_in = max(t0, 0.0)
    t_end = min(t1, float(t_stop))
    if t_in >= t_end:
        return (np.empty((0, 3), dtype=np.int64), np.empty(0), np.empty(0))

    p = origin + d * (t_in + _EPS)
    idx = np.clip(np.floor((p - lo) / resolution).astype(np.int64), 0, np.asarray(shape) - 1)
    step = np.where(d > 0, 1, np.where(d < 0, -1, 0)).astype(np.int64)
    # Distance at which the ray leaves the current voxel along each axis.
    next_bound = lo + (idx + (step > 0)) * resolution
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t_max = np.where(d != 0.0, (next_bound - origin) / d, np.inf)
        t_delta = np.where(d != 0.0, resolution / np.abs(d), np.inf)

    out_idx, out_tin, out_tout = [], [], []
    shape = np.asarray(shape)
    while True:
        t_next = float(np.min(t_max))
        out_idx.append(idx.copy())
        out_tin.append(t_in)
        out_tout.append(min(t_next, t_end))
        if t_next >= t_end:
            break
        axis = int(np.argmin(t_max))
        idx[axis] += step[axis]
        if idx[axis] < 0 or idx[axis] >= shape[axis]:
            break
        t_in = t_next
        t_max[axis] += t_delta[axis]
    return np.array(out_idx, dtype=np.int64), np.array(out_tin), np.array(out_tout)


def traverse_batch(origins, directions, t_stops, grid_origin, resolution, shape):
    """Lockstep traversal of many rays at once.

    Returns ``(ray_index, flat_voxel, t_in, t_out)`` arrays concatenated over
    all visits, where ``flat_voxel`` indexes a C-ordered array of ``shape``.
    Rays are stepped together, one boundary crossing per iteration, so the
    per-ray visit order is preserved within each ray.
    """
    origins = np.atleast_2d(np.asarray(origins, dtype=float))
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    norms = np.linalg.norm(d, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("directions must be non-zero")
    d = d / norms[:, None]
    t_stops = np.asarray(t_stops, dtype=float)
    lo = np.asarray(grid_origin, dtype=float)
    shape = np.asarray(shape, dtype=np.int64)
    hi = lo + resolution * shape.astype(float)

    with np.errstate(divide="ignore", over="ignore"):
        inv = np.where(d != 0.0, 1.0 / np.where(d == 0.0, 1.0, d), np.inf)
    t0, t1 = _ray_aabb(origins, inv, lo, hi)
    t_in = np.maximum(t0, 0.0)
    t_end = np.minimum(t1, t_stops)
    active = t_in < t_end

    p = origins + d * (t_in[:, None] + _EPS)
    idx = np.clip(np.floor((p - lo) / resolution).astype(np.int64), 0, shape - 1)
    step = np.sign(d).astype(np.int64)
    next_bound = lo + (idx + (step > 0)) * resolution
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t_max = np.where(d != 0.0, (next_bound - origins) / d, np.inf)
        t_delta = np.where(d != 0.0, resolution / np.abs(d), np.inf)

    strides = np.array([shape[1] * shape[2], shape[2], 1], dtype=np.int64)
    ray_ids = np.arange(origins.shape[0], dtype=np.int64)

    chunks_ray, chunks_vox, chunks_tin, chunks_tout = [], [], [], []
    while np.any(active):
        a = np.nonzero(active)[0]
        tm = t_max[a]
        t_next = tm.min(axis=1)
        axis = tm.argmin(axis=1)
        chunks_ray.append(ray_ids[a])
        chunks_vox.append(idx[a] @ strides)
        chunks_tin.append(t_in[a])
        chunks_tout.append(np.minimum(t_next, t_end[a]))

        done = t_next >= t_end[a]
        idx[a, axis] += step[a, axis]
        oob = (idx[a, axis] < 0) | (idx[a, axis] >= shape[axis])
        t_in[a] = t_next
        t_max[a, axis] += t_delta[a, axis]
        active[a[done | oob]] = False

    if not chunks_ray:
        e = np.empty(0, dtype=np.int64)
        return e, e, np.empty(0), np.empty(0)
    return (
        np.concatenate(chunks_ray),
        np.concatenate(chunks_vox),
        np.concatenate(chunks_tin),
        np.concatenate(chunks_tout),
    )
