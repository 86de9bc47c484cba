"""Rigid-transform helpers shared by the sensor simulator and the harness.

Conventions:
  world frame   : x forward, y left, z up
  body frame    : x forward, y left, z up (FLU), attached to the MAV
  optical frame : x right, y down, z along the optical axis (OpenCV)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Maps optical-frame coordinates into the body frame for a camera looking
# along body +x: optical z -> body x, optical x -> body -y, optical y -> body -z.
R_BODY_FROM_OPTICAL = np.array(
    [
        [0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
    ]
)


def rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class RigidTransform:
    """Rotation + translation, mapping child-frame points into the parent frame."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        if not np.allclose(r @ r.T, np.eye(3), atol=1e-9):
            raise ValueError("rotation must be orthonormal")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    def apply(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return p @ self.rotation.T + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        return RigidTransform(self.rotation @ other.rotation,
                              self.rotation @ other.translation + self.translation)

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))


def body_pose(position: np.ndarray, yaw: float, pitch: float = 0.0) -> RigidTransform:
    """World-from-body pose at ``position``.

    ``yaw`` rotates about world z; positive ``pitch`` tips the body x axis up.
    """
    return RigidTransform(rot_z(yaw) @ rot_y(-pitch), np.asarray(position, dtype=float))


def camera_pose(position: np.ndarray, yaw: float, pitch: float = 0.0,
                rig: "RigidTransform | None" = None) -> RigidTransform:
    """World-from-optical pose for a camera mounted on a body at ``position``."""
    mount = rig if rig is not None else RigidTransform(R_BODY_FROM_OPTICAL, np.zeros(3))
    return body_pose(position, yaw, pitch).compose(mount)
