"""Probabilistic voxel occupancy map over a bounded volume.

Cells store log-odds of occupancy, 0 meaning never observed. Depth frames
are fused ray by ray with an inverse sensor model: free hits along the ray,
an occupied band around the measured endpoint, saturation at configurable
bounds. Classification into free / unknown / occupied follows the sign of
the log-odds, i.e. the occupancy probability against 0.5.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field

import numpy as np

from mavsafe.ray_traversal import traverse_batch
from mavsafe.transforms import RigidTransform

_DUMP_MAGIC = b"MVSG"
_DUMP_VERSION = 1


class OutOfVolumeError(ValueError):
    """Query point lies outside the mapped volume."""


class VoxelClass(enum.Enum):
    FREE = "free"
    UNKNOWN = "unknown"
    OCCUPIED = "occupied"


@dataclass(frozen=True)
class MapConfig:
    """Geometry and inverse-sensor-model constants of the occupancy map.

    The volume is snapped to whole voxels: its true upper corner is
    ``origin + shape * resolution``.
    """

    origin: tuple = (0.0, 0.0, 0.0)
    extent: tuple = (10.0, 10.0, 3.0)
    resolution: float = 0.05
    log_odds_hit: float = 0.85
    log_odds_miss: float = -0.4
    log_odds_min: float = -3.5
    log_odds_max: float = 3.5
    occupied_band: float | None = None  # defaults to one voxel

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if any(e <= 0 for e in self.extent):
            raise ValueError("extent components must be positive")
        if not (self.log_odds_min < 0 < self.log_odds_max):
            raise ValueError("log-odds bounds must straddle zero")
        if self.log_odds_hit <= 0 or self.log_odds_miss >= 0:
            raise ValueError("hit update must be positive, miss update negative")
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "extent", tuple(float(v) for v in self.extent))
        if self.occupied_band is None:
            object.__setattr__(self, "occupied_band", float(self.resolution))

    @property
    def shape(self) -> tuple:
        return tuple(max(1, int(round(e / self.resolution))) for e in self.extent)

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.origin) + self.resolution * np.asarray(self.shape)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= np.asarray(self.origin)) and np.all(x < self.upper))

    def world_to_index(self, x) -> tuple:
        x = np.asarray(x, dtype=float)
        idx = np.floor((x - np.asarray(self.origin)) / self.resolution).astype(int)
        return tuple(idx)

    def index_to_center(self, idx) -> np.ndarray:
        return np.asarray(self.origin) + (np.asarray(idx, dtype=float) + 0.5) * self.resolution


class OccupancyGrid:
    """Dense log-odds grid. A fresh grid is all zeros, i.e. all unknown."""

    def __init__(self, config: MapConfig, cells: np.ndarray | None = None):
        self.config = config
        if cells is None:
            cells = np.zeros(config.shape, dtype=np.float64)
        elif cells.shape != config.shape:
            raise ValueError(f"cells shape {cells.shape} does not match config {config.shape}")
        self.cells = cells

    def snapshot(self) -> "OccupancyGrid":
        """Read-only copy, safe to hand to the distance-field builder."""
        frozen = self.cells.copy()
        frozen.setflags(write=False)
        return OccupancyGrid(self.config, frozen)

    def classify_index(self, idx) -> VoxelClass:
        v = self.cells[idx]
        if v < 0:
            return VoxelClass.FREE
        if v > 0:
            return VoxelClass.OCCUPIED
        return VoxelClass.UNKNOWN


def classify(grid: OccupancyGrid, x) -> VoxelClass:
    """Class of the voxel containing ``x``; raises OutOfVolumeError outside."""
    if not grid.config.contains(x):
        raise OutOfVolumeError(f"point {np.asarray(x)} outside mapped volume")
    return grid.classify_index(grid.config.world_to_index(x))


def snapshot(grid: OccupancyGrid) -> OccupancyGrid:
    return grid.snapshot()


def integrate_depth_frame(grid: OccupancyGrid, frame, sensor_pose: RigidTransform) -> OccupancyGrid:
    """Fuse one depth frame into the grid, mutating and returning it.

    Per valid pixel the ray is walked from the camera origin: voxels whose
    segment midpoint falls strictly before ``endpoint - occupied_band`` get
    the miss update, voxels within the band around the endpoint get the hit
    update. Pixels at or beyond max range carve free space up to max range
    and mark nothing occupied; zero/NaN depths contribute nothing. Updates
    for the whole frame are accumulated and then saturated at the log-odds
    bounds, so the result is independent of pixel order.
    """
    cfg = grid.config
    depth = np.asarray(frame.depth, dtype=float)
    if depth.shape != (frame.height, frame.width):
        raise ValueError("depth array does not match frame dimensions")
    intr = frame.intrinsics
    if min(intr.fx, intr.fy) <= 0:
        raise ValueError("intrinsics must have positive focal lengths")

    cols, rows = np.meshgrid(np.arange(frame.width), np.arange(frame.height))
    u = cols.ravel() + 0.5
    v = rows.ravel() + 0.5
    d = depth.ravel()

    valid = np.isfinite(d) & (d > 0.0)
    if not np.any(valid):
        return grid
    beyond = valid & (d >= frame.max_range)
    hit_ray = valid & ~beyond

    dirs_opt = np.stack(
        [(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, np.ones_like(u)], axis=1
    )
    scale = np.linalg.norm(dirs_opt, axis=1)  # z-depth -> range along the ray
    dirs_world = dirs_opt @ sensor_pose.rotation.T

    ranges = np.where(hit_ray, d * scale, frame.max_range * scale)
    band = cfg.occupied_band
    t_stop = np.where(hit_ray, ranges + band, frame.max_range * scale)

    sel = np.nonzero(valid)[0]
    origins = np.broadcast_to(sensor_pose.translation, (sel.size, 3))
    ray_id, flat_vox, t_in, t_out = traverse_batch(
        origins, dirs_world[sel], t_stop[sel], cfg.origin, cfg.resolution, cfg.shape
    )
    if ray_id.size == 0:
        return grid

    t_mid = 0.5 * (t_in + t_out)
    rng = ranges[sel][ray_id]
    is_hit = hit_ray[sel][ray_id] & (t_mid >= rng - band)
    update = np.where(is_hit, cfg.log_odds_hit, cfg.log_odds_miss)

    delta = np.bincount(flat_vox, weights=update, minlength=int(np.prod(cfg.shape)))
    cells = grid.cells
    np.clip(cells + delta.reshape(cfg.shape), cfg.log_odds_min, cfg.log_odds_max, out=cells)
    return grid


def save_grid(grid: OccupancyGrid, path) -> None:
    """Binary dump: see README for the exact layout."""
    cfg = grid.config
    header = struct.pack(
        "<4sI3d3d d 5d 3I",
        _DUMP_MAGIC,
        _DUMP_VERSION,
        *cfg.origin,
        *cfg.extent,
        cfg.resolution,
        cfg.log_odds_hit,
        cfg.log_odds_miss,
        cfg.log_odds_min,
        cfg.log_odds_max,
        cfg.occupied_band,
        *cfg.shape,
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(grid.cells, dtype=np.float64).tobytes())


def load_grid(path) -> OccupancyGrid:
    fmt = "<4sI3d3d d 5d 3I"
    size = struct.calcsize(fmt)
    with open(path, "rb") as f:
        raw = f.read(size)
        magic, version, ox, oy, oz, ex, ey, ez, res, lh, lm, lmin, lmax, band, nx, ny, nz = struct.unpack(fmt, raw)
        if magic != _DUMP_MAGIC or version != _DUMP_VERSION:
            raise ValueError("not a grid dump or unsupported version")
        cfg = MapConfig(
            origin=(ox, oy, oz),
            extent=(ex, ey, ez),
            resolution=res,
            log_odds_hit=lh,
            log_odds_miss=lm,
            log_odds_min=lmin,
            log_odds_max=lmax,
            occupied_band=band,
        )
        cells = np.frombuffer(f.read(), dtype=np.float64).reshape((nx, ny, nz)).copy()
    return OccupancyGrid(cfg, cells)
