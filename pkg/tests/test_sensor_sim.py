import numpy as np
import pytest

from mavsafe.sensor_sim import (
    Box,
    CameraIntrinsics,
    DepthFrame,
    GroundPlane,
    Scene,
    Sphere,
    contains,
    ray_hit,
    render_depth,
)
from mavsafe.transforms import camera_pose

ORIGIN = np.zeros(3)
PLUS_X = np.array([1.0, 0.0, 0.0])


def test_ray_hits_box_face():
    scene = Scene((Box(center=(2.0, 0.0, 0.0), size=(1.0, 1.0, 1.0)),))
    assert ray_hit(scene, ORIGIN, PLUS_X) == pytest.approx(1.5, abs=1e-12)
    # unnormalized directions measure the same metric distance
    assert ray_hit(scene, ORIGIN, 7.0 * PLUS_X) == pytest.approx(1.5, abs=1e-12)


def test_ray_hits_sphere():
    scene = Scene((Sphere(center=(3.0, 0.0, 0.0), radius=1.0),))
    assert ray_hit(scene, ORIGIN, PLUS_X) == pytest.approx(2.0, abs=1e-12)


def test_ray_grazes_tangent_sphere():
    # closest approach exactly equals the radius: single-root contact at t=3
    scene = Scene((Sphere(center=(3.0, 1.0, 0.0), radius=1.0),))
    assert ray_hit(scene, ORIGIN, PLUS_X) == pytest.approx(3.0, abs=1e-9)


def test_ray_pointing_away_misses():
    scene = Scene((Box(center=(2.0, 0.0, 0.0), size=(1.0, 1.0, 1.0)),))
    assert ray_hit(scene, ORIGIN, -PLUS_X) is None
    assert ray_hit(Scene(()), ORIGIN, PLUS_X) is None


def test_ray_from_inside_reports_zero():
    scene = Scene((Box(center=(0.0, 0.0, 0.0), size=(2.0, 2.0, 2.0)),))
    assert ray_hit(scene, ORIGIN, PLUS_X) == pytest.approx(0.0, abs=1e-12)
    sphere = Scene((Sphere(center=(0.1, 0.0, 0.0), radius=1.0),))
    assert ray_hit(sphere, ORIGIN, PLUS_X) == pytest.approx(0.0, abs=1e-12)


def test_ground_plane_is_solid_halfspace():
    scene = Scene((GroundPlane(height=0.0),))
    assert ray_hit(scene, (0.0, 0.0, 1.0), (0.0, 0.0, -1.0)) == pytest.approx(1.0)
    assert ray_hit(scene, (0.0, 0.0, 1.0), (0.0, 0.0, 1.0)) is None
    assert ray_hit(scene, (0.0, 0.0, -0.5), PLUS_X) == pytest.approx(0.0)


def test_nearest_of_several_primitives_wins():
    scene = Scene((
        Sphere(center=(3.0, 0.0, 0.0), radius=1.0),
        Box(center=(6.0, 0.0, 0.0), size=(1.0, 1.0, 1.0)),
    ))
    assert ray_hit(scene, ORIGIN, PLUS_X) == pytest.approx(2.0, abs=1e-12)


def test_zero_direction_raises():
    with pytest.raises(ValueError):
        ray_hit(Scene(()), ORIGIN, np.zeros(3))


def test_render_empty_scene_reads_max_range():
    intr = CameraIntrinsics.fov90(8, 6, max_range=5.0)
    pose = camera_pose(ORIGIN, yaw=0.0)
    frame = render_depth(Scene(()), pose, intr)
    np.testing.assert_array_equal(frame.depth, 5.0)
    frame = render_depth(Scene(()), pose, intr, miss_value="invalid")
    np.testing.assert_array_equal(frame.depth, 0.0)
    with pytest.raises(ValueError):
        render_depth(Scene(()), pose, intr, miss_value="zero")


def test_perpendicular_wall_has_uniform_depth():
    # z-depth convention: every pixel of a frontal wall reads the same
    # distance even though ray lengths grow toward the image corners
    scene = Scene((Box(center=(2.5, 0.0, 0.0), size=(1.0, 12.0, 12.0)),))
    intr = CameraIntrinsics.fov90(8, 6, max_range=5.0)
    frame = render_depth(scene, camera_pose(ORIGIN, yaw=0.0), intr)
    np.testing.assert_allclose(frame.depth, 2.0, atol=1e-12)


def test_sphere_center_pixel_depth():
    scene = Scene((Sphere(center=(3.0, 0.0, 0.0), radius=1.0),))
    intr = CameraIntrinsics.fov90(5, 5, max_range=5.0)  # odd size: pixel (2,2) on axis
    frame = render_depth(scene, camera_pose(ORIGIN, yaw=0.0), intr)
    assert frame.depth[2, 2] == pytest.approx(2.0, abs=1e-12)
    assert np.all(frame.depth >= 2.0 - 1e-12)


def test_hits_beyond_range_become_misses():
    scene = Scene((Box(center=(6.5, 0.0, 0.0), size=(1.0, 20.0, 20.0)),))
    intr = CameraIntrinsics.fov90(6, 4, max_range=5.0)
    frame = render_depth(scene, camera_pose(ORIGIN, yaw=0.0), intr)
    np.testing.assert_array_equal(frame.depth, 5.0)


def test_render_from_inside_marks_pixels_invalid():
    scene = Scene((Box(center=(0.0, 0.0, 0.0), size=(2.0, 2.0, 2.0)),))
    intr = CameraIntrinsics.fov90(4, 4, max_range=5.0)
    frame = render_depth(scene, camera_pose(ORIGIN, yaw=0.0), intr)
    np.testing.assert_array_equal(frame.depth, 0.0)


def test_noise_is_seeded_and_requires_generator():
    scene = Scene((Box(center=(2.5, 0.0, 0.0), size=(1.0, 12.0, 12.0)),))
    intr = CameraIntrinsics.fov90(8, 6, max_range=5.0)
    pose = camera_pose(ORIGIN, yaw=0.0)

    a = render_depth(scene, pose, intr, noise_sigma=0.01,
                     rng=np.random.default_rng(3))
    b = render_depth(scene, pose, intr, noise_sigma=0.01,
                     rng=np.random.default_rng(3))
    np.testing.assert_array_equal(a.depth, b.depth)
    assert np.any(a.depth != 2.0)
    assert np.all(np.abs(a.depth - 2.0) < 0.1)

    with pytest.raises(ValueError):
        render_depth(scene, pose, intr, noise_sigma=0.01)


def test_yawed_camera_sees_sideways():
    scene = Scene((Box(center=(0.0, 2.5, 0.0), size=(12.0, 1.0, 12.0)),))
    intr = CameraIntrinsics.fov90(5, 5, max_range=5.0)
    frame = render_depth(scene, camera_pose(ORIGIN, yaw=np.pi / 2), intr)
    assert frame.depth[2, 2] == pytest.approx(2.0, abs=1e-12)


def test_contains_with_inflation():
    scene = Scene((
        Box(center=(2.0, 0.0, 1.0), size=(1.0, 1.0, 1.0)),
        Sphere(center=(0.0, 3.0, 1.0), radius=0.5),
        GroundPlane(height=0.2),
    ))
    pts = np.array([
        [2.0, 0.0, 1.0],    # inside box
        [1.4, 0.0, 1.0],    # just outside box face at x=1.5
        [0.0, 3.4, 1.0],    # just inside sphere edge band
        [0.0, 0.0, 0.1],    # below ground plane
        [0.0, 0.0, 0.9],    # free air
    ])
    np.testing.assert_array_equal(
        contains(scene, pts), [True, False, True, True, False])
    # inflating by 0.2 pulls the box face out to x=1.3; the free-air point
    # still clears the inflated plane at z=0.4
    np.testing.assert_array_equal(
        contains(scene, pts, inflate=0.2), [True, True, True, True, False])


def test_depth_frame_validates_shape():
    intr = CameraIntrinsics(width=2, height=2, fx=1.0, fy=1.0, cx=1.0, cy=1.0)
    with pytest.raises(ValueError):
        DepthFrame(np.zeros((3, 3)), intr, 5.0)
    with pytest.raises(ValueError):
        CameraIntrinsics(width=0, height=2, fx=1.0, fy=1.0, cx=1.0, cy=1.0)
    with pytest.raises(ValueError):
        CameraIntrinsics(width=2, height=2, fx=-1.0, fy=1.0, cx=1.0, cy=1.0)


def test_fov90_geometry():
    intr = CameraIntrinsics.fov90(64, 48, max_range=4.0)
    assert intr.fx == intr.fy == 32.0
    assert intr.cx == 32.0 and intr.cy == 24.0
    assert intr.max_range == 4.0
    # a corner ray of the horizontal FOV spans 45 degrees off axis
    u_edge = (0.0 - intr.cx) / intr.fx
    assert u_edge == pytest.approx(-1.0)
