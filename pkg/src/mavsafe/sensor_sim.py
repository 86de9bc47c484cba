"""Depth camera simulation over scenes of geometric primitives.

Scenes are static collections of axis-aligned boxes, spheres, and an
optional solid ground half-space. Intersections are analytic, so rendered
frames are exact up to the configured depth noise and the mapping pipeline
downstream can be tested against ground truth.

Conventions: the optical frame has x right, y down, z forward; depth is the
z coordinate of the hit point in the optical frame (not the Euclidean range
along the ray). Pixel (row, col) rays pass through (col + 0.5, row + 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mavsafe.transforms import RigidTransform, R_BODY_FROM_OPTICAL


@dataclass(frozen=True)
class Box:
    """Axis-aligned solid box given by center and full edge lengths."""

    center: tuple
    size: tuple

    def __post_init__(self):
        if min(self.size) <= 0:
            raise ValueError("box size must be positive")

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float) - 0.5 * np.asarray(self.size, dtype=float)

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float) + 0.5 * np.asarray(self.size, dtype=float)


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True)
class GroundPlane:
    """Solid half-space z <= height."""

    height: float = 0.0


@dataclass(frozen=True)
class Scene:
    primitives: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole parameters; the default is a 90 degree horizontal FOV."""

    width: int = 640
    height: int = 480
    fx: float = 320.0
    fy: float = 320.0
    cx: float = 320.0
    cy: float = 240.0
    max_range: float = 5.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if self.max_range <= 0:
            raise ValueError("max range must be positive")

    @classmethod
    def fov90(cls, width: int, height: int, max_range: float = 5.0) -> "CameraIntrinsics":
        """Square-pixel intrinsics with a 90 degree horizontal FOV."""
        f = width / 2.0
        return cls(width=width, height=height, fx=f, fy=f,
                   cx=width / 2.0, cy=height / 2.0, max_range=max_range)


@dataclass(frozen=True)
class CameraRig:
    """Mounting of the camera on the vehicle: body frame to optical frame."""

    body_from_optical: RigidTransform = field(
        default_factory=lambda: RigidTransform(R_BODY_FROM_OPTICAL, np.zeros(3))
    )


@dataclass(frozen=True)
class DepthFrame:
    """One rendered depth image. depth == 0 marks an invalid pixel."""

    depth: np.ndarray
    intrinsics: CameraIntrinsics
    max_range: float

    def __post_init__(self):
        d = np.asarray(self.depth, dtype=float)
        if d.shape != (self.intrinsics.height, self.intrinsics.width):
            raise ValueError("depth shape does not match intrinsics")
        object.__setattr__(self, "depth", d)

    @property
    def width(self) -> int:
        return self.intrinsics.width

    @property
    def height(self) -> int:
        return self.intrinsics.height


def _box_hits(box: Box, origins: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Parametric hit distance per unit-direction ray, inf when missed.

    Origins inside the box report 0.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / dirs
        t0 = (box.lo - origins) * inv
        t1 = (box.hi - origins) * inv
    # 0 * inf on a face-aligned axis: treat that axis as unconstraining.
    t0 = np.nan_to_num(t0, nan=-np.inf, posinf=np.inf, neginf=-np.inf)
    t1 = np.nan_to_num(t1, nan=np.inf, posinf=np.inf, neginf=-np.inf)
    near = np.minimum(t0, t1).max(axis=-1)
    far = np.maximum(t0, t1).min(axis=-1)
    # Zero-direction axis outside the slab: both slab bounds land on the same
    # side, which the min/max above already turns into near > far (miss).
    outside = (dirs == 0) & ((origins < box.lo) | (origins > box.hi))
    far = np.where(outside.any(axis=-1), -np.inf, far)
    t = np.where((far >= near) & (far >= 0.0), np.maximum(near, 0.0), np.inf)
    return t


def _sphere_hits(sphere: Sphere, origins: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    oc = origins - np.asarray(sphere.center, dtype=float)
    b = np.sum(oc * dirs, axis=-1)
    c = np.sum(oc * oc, axis=-1) - sphere.radius ** 2
    disc = b * b - c
    with np.errstate(invalid="ignore"):
        sqrt_disc = np.sqrt(disc)
    t_near = -b - sqrt_disc
    t_far = -b + sqrt_disc
    t = np.where(t_near >= 0.0, t_near, np.where(t_far >= 0.0, 0.0, np.inf))
    return np.where(disc >= 0.0, t, np.inf)


def _plane_hits(plane: GroundPlane, origins: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    oz = origins[..., 2]
    dz = dirs[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (plane.height - oz) / dz
    t = np.where((oz > plane.height) & (dz < 0.0), t, np.inf)
    return np.where(oz <= plane.height, 0.0, t)


def _all_hits(scene: Scene, origins: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    t = np.full(origins.shape[:-1], np.inf)
    for prim in scene.primitives:
        if isinstance(prim, Box):
            t = np.minimum(t, _box_hits(prim, origins, dirs))
        elif isinstance(prim, Sphere):
            t = np.minimum(t, _sphere_hits(prim, origins, dirs))
        elif isinstance(prim, GroundPlane):
            t = np.minimum(t, _plane_hits(prim, origins, dirs))
        else:
            raise TypeError(f"unknown primitive type: {type(prim).__name__}")
    return t


def ray_hit(scene: Scene, origin, direction) -> float | None:
    """Euclidean distance to the nearest primitive surface, None on a miss."""
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        raise ValueError("ray direction must be non-zero")
    origin = np.asarray(origin, dtype=float).reshape(1, 3)
    t = _all_hits(scene, origin, (direction / norm).reshape(1, 3))[0]
    return float(t) if np.isfinite(t) else None


def contains(scene: Scene, points, inflate: float = 0.0) -> np.ndarray:
    """Whether each point lies inside any primitive inflated by ``inflate``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    inside = np.zeros(len(pts), dtype=bool)
    for prim in scene.primitives:
        if isinstance(prim, Box):
            d = np.abs(pts - np.asarray(prim.center, dtype=float))
            half = 0.5 * np.asarray(prim.size, dtype=float) + inflate
            inside |= np.all(d <= half, axis=1)
        elif isinstance(prim, Sphere):
            d = np.linalg.norm(pts - np.asarray(prim.center, dtype=float), axis=1)
            inside |= d <= prim.radius + inflate
        elif isinstance(prim, GroundPlane):
            inside |= pts[:, 2] <= prim.height + inflate
    return inside


def render_depth(
    scene: Scene,
    camera_pose: RigidTransform,
    intrinsics: CameraIntrinsics,
    noise_sigma: float = 0.0,
    rng: np.random.Generator | None = None,
    miss_value: str = "max_range",
) -> DepthFrame:
    """Ray-cast one depth frame from the given optical-frame pose.

    Pixels whose nearest hit lies beyond max_range, or that hit nothing,
    read max_range (so downstream mapping can carve free space) or 0 when
    ``miss_value="invalid"``. ``noise_sigma`` adds seeded Gaussian noise,
    interpreted in meters; the result is clipped back into (0, max_range].
    """
    if miss_value not in ("max_range", "invalid"):
        raise ValueError("miss_value must be 'max_range' or 'invalid'")
    intr = intrinsics
    cols, rows = np.meshgrid(np.arange(intr.width), np.arange(intr.height))
    u = cols.ravel() + 0.5
    v = rows.ravel() + 0.5
    dirs_opt = np.stack(
        [(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, np.ones_like(u)], axis=1
    )
    scale = np.linalg.norm(dirs_opt, axis=1)
    dirs_world = (dirs_opt / scale[:, None]) @ camera_pose.rotation.T
    origins = np.broadcast_to(camera_pose.translation, dirs_world.shape)

    t = _all_hits(scene, origins, dirs_world)
    depth = t / scale  # Euclidean range back to optical-axis depth

    if noise_sigma > 0.0:
        if rng is None:
            raise ValueError("noise requires an explicit generator")
        hit = np.isfinite(depth)
        depth = np.where(hit, depth + noise_sigma * rng.standard_normal(depth.shape), depth)

    miss = ~np.isfinite(depth) | (depth > intr.max_range)
    fill = intr.max_range if miss_value == "max_range" else 0.0
    depth = np.where(miss, fill, depth)
    depth = np.where(depth <= 0.0, 0.0, depth)

    return DepthFrame(depth=depth.reshape(intr.height, intr.width),
                      intrinsics=intr, max_range=intr.max_range)
