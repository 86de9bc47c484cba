"""Truncated Euclidean signed distance field derived from an occupancy snapshot.

The field h is the distance from a point to the boundary of the free set,
positive inside free space, negative in occupied or unknown space, clamped
to [-h_b, +h_b]. The boundary is the set of voxel faces separating a free
voxel from a non-free one (unknown counts as non-free, and so does the edge
of the mapped volume). Unlike the raw occupancy field, h is continuous
across the free/unknown frontier, which is what makes it usable as a
barrier function.

``build_tesdf`` is the production path (vectorized distance transform);
``brute_force_esdf`` is an independent exhaustive reference used by tests.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from mavsafe.grid_map import OccupancyGrid

_AXES = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class TesdfField:
    """Voxel-center samples of the truncated signed distance, in meters."""

    values: np.ndarray
    h_b: float
    origin: np.ndarray
    resolution: float

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def upper(self) -> np.ndarray:
        return self.origin + self.resolution * np.asarray(self.shape)


@dataclass(frozen=True)
class TesdfQuery:
    value: float
    gradient: np.ndarray
    degraded: bool = False


def _free_mask(snapshot: OccupancyGrid) -> np.ndarray:
    return snapshot.cells < 0.0


def build_tesdf(snapshot: OccupancyGrid, h_b: float = 0.5) -> TesdfField:
    """Build the field from an occupancy snapshot.

    Distances are taken between voxel centers with an exact Euclidean
    transform, then shifted by half a voxel toward the boundary so that the
    value approximates the distance to the separating faces; a voxel
    adjacent to the frontier reads exactly +-resolution/2. The error against
    the exact face distance is bounded by half a voxel, well inside the one
    voxel diagonal the acceptance contract allows.
    """
    if h_b <= 0:
        raise ValueError("truncation bound must be positive")
    cfg = snapshot.config
    res = cfg.resolution
    free = _free_mask(snapshot)

    if not free.any():
        values = np.full(cfg.shape, -h_b)
    else:
        # Pad with non-free so the volume edge acts as a boundary.
        padded = np.pad(free, 1, constant_values=False)
        d_in = ndimage.distance_transform_edt(padded, sampling=res)[1:-1, 1:-1, 1:-1]
        d_out = ndimage.distance_transform_edt(~free, sampling=res)
        inside = np.minimum(d_in - 0.5 * res, h_b)
        outside = np.minimum(d_out - 0.5 * res, h_b)
        values = np.where(free, inside, -outside)

    return TesdfField(values=values, h_b=float(h_b),
                      origin=np.asarray(cfg.origin, dtype=float), resolution=res)


def _interpolate(field: TesdfField, pts: np.ndarray) -> np.ndarray:
    """Trilinear interpolation of voxel-center samples at world points."""
    shape = np.asarray(field.shape)
    g = (pts - (field.origin + 0.5 * field.resolution)) / field.resolution
    g = np.clip(g, 0.0, shape - 1 - 1e-12)
    i0 = np.floor(g).astype(int)
    i1 = np.minimum(i0 + 1, shape - 1)
    f = g - i0

    v = field.values
    c000 = v[i0[:, 0], i0[:, 1], i0[:, 2]]
    c100 = v[i1[:, 0], i0[:, 1], i0[:, 2]]
    c010 = v[i0[:, 0], i1[:, 1], i0[:, 2]]
    c110 = v[i1[:, 0], i1[:, 1], i0[:, 2]]
    c001 = v[i0[:, 0], i0[:, 1], i1[:, 2]]
    c101 = v[i1[:, 0], i0[:, 1], i1[:, 2]]
    c011 = v[i0[:, 0], i1[:, 1], i1[:, 2]]
    c111 = v[i1[:, 0], i1[:, 1], i1[:, 2]]

    fx, fy, fz = f[:, 0], f[:, 1], f[:, 2]
    c00 = c000 * (1 - fx) + c100 * fx
    c10 = c010 * (1 - fx) + c110 * fx
    c01 = c001 * (1 - fx) + c101 * fx
    c11 = c011 * (1 - fx) + c111 * fx
    c0 = c00 * (1 - fy) + c10 * fy
    c1 = c01 * (1 - fy) + c11 * fy
    return c0 * (1 - fz) + c1 * fz


def query(field: TesdfField, x, step: float | None = None) -> TesdfQuery:
    """Value and central-difference gradient of the interpolated field at ``x``.

    Points closer than one voxel to the volume edge are clamped to the
    interior and the result is flagged degraded.
    """
    res = field.resolution
    if step is None:
        step = 0.5 * res
    x = np.asarray(x, dtype=float)
    lo = field.origin + res
    hi = field.upper - res
    clamped = np.clip(x, lo, hi)
    degraded = bool(np.any(clamped != x))

    offsets = np.vstack([np.zeros(3), np.eye(3) * step, -np.eye(3) * step])
    samples = _interpolate(field, clamped + offsets)
    value = float(samples[0])
    gradient = (samples[1:4] - samples[4:7]) / (2.0 * step)
    return TesdfQuery(value=value, gradient=gradient, degraded=degraded)


def one_sided_gradients(field: TesdfField, x, step: float | None = None):
    """Forward and backward difference gradients, used to detect ridges."""
    res = field.resolution
    if step is None:
        step = 0.5 * res
    x = np.clip(np.asarray(x, dtype=float), field.origin + res, field.upper - res)
    center = _interpolate(field, x[None, :])[0]
    fwd = _interpolate(field, x + np.eye(3) * step)
    bwd = _interpolate(field, x - np.eye(3) * step)
    return (fwd - center) / step, (center - bwd) / step


def brute_force_esdf(snapshot: OccupancyGrid, h_b: float = 0.5) -> TesdfField:
    """Reference field: exact nearest boundary-face distance per voxel center.

    Exhaustive over all separating faces (with an exact metric prune so the
    search finishes), intended for test grids only.
    """
    cfg = snapshot.config
    if int(np.prod(cfg.shape)) > 64 ** 3:
        raise ValueError("brute-force reference restricted to grids <= 64^3")
    res = cfg.resolution
    free = _free_mask(snapshot)
    if not free.any():
        values = np.full(cfg.shape, -h_b)
        return TesdfField(values, float(h_b), np.asarray(cfg.origin, dtype=float), res)

    padded = np.pad(free, 1, constant_values=False)
    centers = []
    axes = []
    core = (slice(1, -1),) * 3
    for axis in range(3):
        for sign in (-1, 1):
            shifted = np.roll(padded, -sign, axis=axis)[core]
            boundary = free & ~shifted
            idx = np.argwhere(boundary).astype(float)
            if idx.size == 0:
                continue
            c = np.asarray(cfg.origin) + (idx + 0.5) * res
            c[:, axis] += sign * 0.5 * res
            centers.append(c)
            axes.append(np.full(len(c), axis))
    face_centers = np.concatenate(centers)
    face_axes = np.concatenate(axes)
    half = 0.5 * res
    half_diag = half * np.sqrt(2.0)  # face half-diagonal

    tree = cKDTree(face_centers)
    grid_idx = np.indices(cfg.shape).reshape(3, -1).T
    pts = np.asarray(cfg.origin) + (grid_idx + 0.5) * res
    d_center, _ = tree.query(pts, workers=-1)

    # A face's exact distance differs from its center distance by at most
    # the face half-diagonal, so only points that could land under h_b need
    # the exact candidate scan.
    dist = np.full(len(pts), h_b)
    need = np.nonzero(d_center - half_diag <= h_b)[0]
    if need.size:
        neighborhoods = tree.query_ball_point(
            pts[need], d_center[need] + half_diag, workers=-1)
        for i, cand in zip(need, neighborhoods):
            p = pts[i]
            fc = face_centers[cand]
            fa = face_axes[cand]
            rows = np.arange(len(cand))
            delta = np.abs(p - fc)
            normal = delta[rows, fa]
            delta[rows, fa] = 0.0
            tangent = np.maximum(delta - half, 0.0)
            dist[i] = np.sqrt(normal ** 2 + np.sum(tangent ** 2, axis=1)).min()

    d = np.minimum(dist, h_b).reshape(cfg.shape)
    values = np.where(free, d, -d)
    return TesdfField(values, float(h_b), np.asarray(cfg.origin, dtype=float), res)


def slice_values(field: TesdfField, axis: str, coord: float) -> tuple[np.ndarray, dict]:
    """2D plane of h values at the voxel layer nearest ``coord``.

    Rows iterate the later of the two remaining axes, columns the earlier
    (a z slice is rows=y, cols=x). Returns the array and layout metadata.
    """
    a = _AXES[axis]
    res = field.resolution
    k = int(np.floor((coord - field.origin[a]) / res))
    k = int(np.clip(k, 0, field.shape[a] - 1))
    plane = np.take(field.values, k, axis=a)
    # np.take keeps the remaining axes in ascending order: (earlier, later).
    arr = plane.T
    rest = [i for i in range(3) if i != a]
    meta = {
        "axis": axis,
        "coord": float(field.origin[a] + (k + 0.5) * res),
        "col_axis": "xyz"[rest[0]],
        "row_axis": "xyz"[rest[1]],
        "origin": [float(field.origin[rest[0]]), float(field.origin[rest[1]])],
        "resolution": float(res),
        "h_b": float(field.h_b),
    }
    return arr, meta


def export_slice_csv(field: TesdfField, axis: str, coord: float, path) -> None:
    """Write a slice as CSV with a metadata comment header."""
    arr, meta = slice_values(field, axis, coord)
    with open(path, "w", newline="") as f:
        f.write(
            f"# axis={meta['axis']} coord={meta['coord']!r} cols={meta['col_axis']}"
            f" rows={meta['row_axis']} origin={meta['origin']!r}"
            f" resolution={meta['resolution']!r} h_b={meta['h_b']!r}\n"
        )
        writer = csv.writer(f)
        for row in arr:
            writer.writerow([repr(v) for v in row.tolist()])
