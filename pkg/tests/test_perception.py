import math

import numpy as np
import pytest

from dronefetch.geometry import DEFAULT_INTRINSICS, Pose, vec3
from dronefetch.handover import estimate_orientation
from dronefetch.perception import (
    LANDMARK_NAMES,
    NoiseParams,
    localize,
    scene_mount,
    synth_detections,
    synth_skeleton,
)
from dronefetch.scene import HandSide, HumanModel, default_scene

INTR = DEFAULT_INTRINSICS


def survey_pose(scene):
    """Drone pose looking at the table from the home side."""
    home = scene.drone_home.position
    table = scene.table.center
    yaw = math.atan2(table[1] - home[1], table[0] - home[0])
    return Pose(position=vec3(home[0], home[1], 1.2), yaw=yaw)


class TestSynthDetections:
    def test_on_axis_object_zero_noise(self):
        scene = default_scene()
        obj = scene.objects[0]
        # place the drone 2 m behind the object, looking straight at it
        pose = Pose(position=obj.position - vec3(2.0, 0.0, 0.0), yaw=0.0)
        dets = synth_detections(scene, pose, INTR, NoiseParams.zero(), np.random.default_rng(0))
        match = [d for d in dets if d.object_id == obj.id]
        assert len(match) == 1
        u, v = match[0].centroid
        assert u == pytest.approx(INTR.cx, abs=1e-9)
        assert v == pytest.approx(INTR.cy, abs=1e-9)
        assert match[0].centroid_depth == pytest.approx(2.0, abs=1e-12)

    def test_object_behind_camera_absent(self):
        scene = default_scene()
        obj = scene.objects[0]
        pose = Pose(position=obj.position + vec3(2.0, 0.0, 0.0), yaw=0.0)  # looking away
        dets = synth_detections(scene, pose, INTR, NoiseParams.zero(), np.random.default_rng(0))
        assert all(d.object_id != obj.id for d in dets)

    def test_deterministic_for_fixed_seed(self):
        scene = default_scene()
        pose = survey_pose(scene)
        a = synth_detections(scene, pose, INTR, NoiseParams(), np.random.default_rng(42))
        b = synth_detections(scene, pose, INTR, NoiseParams(), np.random.default_rng(42))
        assert a == b

    def test_bbox_inside_image_and_confidence_range(self):
        scene = default_scene()
        pose = survey_pose(scene)
        noise = NoiseParams()
        for seed in range(20):
            for d in synth_detections(scene, pose, INTR, noise, np.random.default_rng(seed)):
                u0, v0, u1, v1 = d.bbox
                assert 0 <= u0 < u1 <= INTR.width
                assert 0 <= v0 < v1 <= INTR.height
                assert noise.conf_lo <= d.confidence <= 1.0


class TestLocalize:
    def test_zero_noise_roundtrip_all_visible(self):
        scene = default_scene()
        pose = survey_pose(scene)
        dets = synth_detections(scene, pose, INTR, NoiseParams.zero(), np.random.default_rng(0))
        assert dets, "expected visible objects from the survey pose"
        for d in dets:
            truth = scene.object_by_id(d.object_id).position
            est = localize(d, pose, INTR, scene_mount())
            assert np.linalg.norm(est - truth) < 1e-6

    def test_principal_point_maps_along_forward_axis(self):
        scene = default_scene()
        pose = Pose(position=np.zeros(3), yaw=0.0)
        from dronefetch.perception import Detection

        det = Detection(
            noun="cup", attributes=frozenset(), bbox=(310, 230, 330, 250),
            confidence=1.0, centroid_depth=1.5, object_id="x",
        )
        est = localize(det, pose, INTR, scene_mount())
        assert np.allclose(est, [1.5, 0.0, 0.0], atol=1e-12)

    def test_noisy_localization_error_within_mc_bound(self):
        # Oracle: Monte-Carlo through the same pinhole geometry.
        scene = default_scene()
        pose = survey_pose(scene)
        noise = NoiseParams(sigma_px=2.0, sigma_depth=0.02)
        obj_errors = []
        rng = np.random.default_rng(123)
        for _ in range(1000):
            for d in synth_detections(scene, pose, INTR, noise, rng):
                truth = scene.object_by_id(d.object_id).position
                est = localize(d, pose, INTR, scene_mount())
                obj_errors.append(np.linalg.norm(est - truth))
        mean_err = float(np.mean(obj_errors))
        # depth of the farthest object bounds the pixel-induced error
        depths = [np.linalg.norm(o.position - pose.position) for o in scene.objects]
        d_max = max(depths)
        bound = 3.0 * math.sqrt(2 * (noise.sigma_px * d_max / INTR.fx) ** 2 + noise.sigma_depth**2)
        assert mean_err < bound


class TestSynthSkeleton:
    def test_hand_applied_shoulder_convention(self):
        h = HumanModel(center=vec3(0, 0, 0), facing_yaw=0.0, shoulder_half_width=0.2, shoulder_height=1.4)
        sk = synth_skeleton(h)
        assert np.allclose(sk["LeftShoulder"], [0.0, 0.2, 1.4], atol=1e-12)
        assert np.allclose(sk["RightShoulder"], [0.0, -0.2, 1.4], atol=1e-12)

    def test_orientation_roundtrip_100_random_yaws(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            yaw = rng.uniform(-math.pi, math.pi)
            h = HumanModel(center=vec3(1.0, -2.0, 0.0), facing_yaw=yaw)
            est = estimate_orientation(synth_skeleton(h))
            assert abs(math.remainder(est.facing_yaw - h.facing_yaw, 2 * math.pi)) < 1e-9

    def test_deterministic(self):
        h = HumanModel(center=vec3(0.3, 0.4, 0.0), facing_yaw=1.0, preferred_hand=HandSide.LEFT)
        a, b = synth_skeleton(h), synth_skeleton(h)
        assert set(a.points) == set(LANDMARK_NAMES)
        for name in LANDMARK_NAMES:
            assert np.array_equal(a[name], b[name])

    def test_exactly_33_landmarks(self):
        sk = synth_skeleton(HumanModel(center=vec3(0, 0, 0), facing_yaw=0.0))
        assert len(sk.points) == 33
