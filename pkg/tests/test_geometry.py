import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dronefetch.geometry import (
    BehindCameraError,
    CameraIntrinsics,
    InvalidDepthError,
    OutOfBoundsError,
    Pose,
    RigidTransform,
    camera_to_world,
    deproject,
    forward_mount,
    project,
    vec3,
    world_to_camera,
    wrap_angle,
)

INTR = CameraIntrinsics(fx=600.0, fy=600.0, cx=320.0, cy=240.0, width=640, height=480)


class TestWrapAngle:
    @given(st.floats(min_value=-1e6, max_value=1e6))
    def test_range(self, a):
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi

    @given(st.floats(min_value=-100.0, max_value=100.0))
    def test_idempotent(self, a):
        assert wrap_angle(wrap_angle(a)) == pytest.approx(wrap_angle(a), abs=1e-12)

    def test_pi_maps_to_pi(self):
        assert wrap_angle(math.pi) == math.pi
        assert wrap_angle(-math.pi) == math.pi
        assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)


class TestDeproject:
    def test_principal_point_is_optical_axis(self):
        p = deproject(INTR.cx, INTR.cy, 2.0, INTR)
        assert np.allclose(p, [0.0, 0.0, 2.0])

    def test_hand_evaluated_pinhole(self):
        # (620-320)*1.2/600 = 0.6
        p = deproject(620, 240, 1.2, INTR)
        assert np.allclose(p, [0.6, 0.0, 1.2], atol=1e-12)

    def test_zero_depth_rejected(self):
        with pytest.raises(InvalidDepthError):
            deproject(320, 240, 0.0, INTR)

    def test_out_of_bounds_pixel_rejected(self):
        with pytest.raises(OutOfBoundsError):
            deproject(-5, 240, 1.0, INTR)


class TestProject:
    def test_on_axis(self):
        u, v, d = project(vec3(0, 0, 2.0), INTR)
        assert (u, v, d) == (INTR.cx, INTR.cy, 2.0)

    def test_behind_camera(self):
        with pytest.raises(BehindCameraError):
            project(vec3(0, 0, -1.0), INTR)

    def test_roundtrip_1000_random_points(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            p = vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 10.0))
            u, v, d = project(p, INTR)
            if not (0 <= u <= INTR.width and 0 <= v <= INTR.height):
                continue
            back = deproject(u, v, d, INTR)
            assert np.allclose(back, p, atol=1e-9)


class TestCameraToWorld:
    def test_identity_mount_drone_at_origin(self):
        mount = RigidTransform.identity()
        pose = Pose(position=np.zeros(3), yaw=0.0)
        p = camera_to_world(vec3(1, 2, 3), pose, mount)
        assert np.allclose(p, [1, 2, 3])

    def test_forward_mount_hand_composed(self):
        # camera z -> body x, camera x -> body -y, camera y -> body -z
        pose = Pose(position=vec3(1, 2, 1.5), yaw=0.0)
        p = camera_to_world(vec3(0, 0, 2.0), pose, forward_mount())
        assert np.allclose(p, [3.0, 2.0, 1.5], atol=1e-12)

    def test_inverse_recovers_point(self):
        rng = np.random.default_rng(3)
        mount = forward_mount(offset=(0.1, 0.0, -0.05))
        for _ in range(50):
            pose = Pose(position=rng.uniform(-3, 3, size=3), yaw=rng.uniform(-math.pi, math.pi))
            p_cam = rng.uniform(-2, 2, size=3)
            w = camera_to_world(p_cam, pose, mount)
            assert np.allclose(world_to_camera(w, pose, mount), p_cam, atol=1e-12)


class TestRigidTransform:
    def test_compose_inverse_is_identity(self):
        t = RigidTransform.from_yaw(0.7, (1.0, -2.0, 0.5))
        ident = t.compose(t.inverse())
        assert np.allclose(ident.rotation, np.eye(3), atol=1e-12)
        assert np.allclose(ident.translation, 0.0, atol=1e-12)

    def test_composition_associative(self):
        rng = np.random.default_rng(11)
        a, b, c = (RigidTransform.from_yaw(rng.uniform(-3, 3), rng.uniform(-1, 1, 3)) for _ in range(3))
        p = rng.uniform(-1, 1, 3)
        left = a.compose(b).compose(c).apply(p)
        right = a.compose(b.compose(c)).apply(p)
        assert np.allclose(left, right, atol=1e-12)
