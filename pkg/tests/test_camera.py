import numpy as np
import pytest

from spotrack.camera import (
    CameraModel,
    ClutterModel,
    clutter_log_density,
    measurement_covariance,
    project,
)


def camera_1080p(frame_rate=30):
    return CameraModel(image_width=1920, image_height=1080, frame_rate=frame_rate)


def state(x=0.0, y=0.0, z=10.0, w=0.85, h=1.65, vx=0.0, vy=0.0, vz=0.0):
    return np.array([x, vx, y, vy, z, vz, w, h])


class TestProject:
    def test_reference_point(self):
        box = project(state(), camera_1080p())
        assert np.allclose(box, [960.0, 540.0, 85.0, 165.0])

    def test_unit_scale_depth(self):
        cam = camera_1080p()
        z = cam.focal_length / cam.pixel_size  # scale factor exactly 1
        box = project(state(x=3.0, y=-2.0, z=z, w=0.85, h=1.65), cam)
        assert np.allclose(box, [960 + 3.0, 540 - 2.0, 0.85, 1.65])

    def test_depth_guard(self):
        with pytest.raises(ValueError, match="non-positive depth"):
            project(state(z=1e-12 - 1e-12), camera_1080p())
        with pytest.raises(ValueError, match="non-positive depth"):
            project(state(z=-1.0), camera_1080p())

    def test_vectorized_matches_scalar(self):
        cam = camera_1080p()
        rng = np.random.default_rng(0)
        states = rng.uniform(0.5, 5.0, size=(10, 8))
        batch = project(states, cam)
        for i in range(10):
            assert np.allclose(batch[i], project(states[i], cam))

    def test_scale_invariance(self):
        # scaling the metric subvector (x, y, z, w, h) leaves the box fixed
        cam = camera_1080p()
        rng = np.random.default_rng(1)
        for _ in range(30):
            s = rng.uniform(0.1, 10.0)
            base = state(x=rng.normal(), y=rng.normal(), z=rng.uniform(1, 30),
                         w=rng.uniform(0.1, 2), h=rng.uniform(0.1, 2))
            scaled = base.copy()
            scaled[[0, 2, 4, 6, 7]] *= s
            assert np.allclose(project(base, cam), project(scaled, cam), rtol=1e-12)


class TestMeasurementCovariance:
    def test_reference_entry(self):
        r = measurement_covariance(camera_1080p())
        assert r[0, 0] == pytest.approx(1080.0 ** 2 * 1e-5 * 2.029)
        assert r[0, 0] == pytest.approx(23.666256, abs=1e-6)

    def test_symmetric_positive_diagonal(self):
        r = measurement_covariance(CameraModel(640, 480, 25))
        assert np.allclose(r, r.T)
        assert (np.diag(r) > 0).all()

    def test_gamma_is_min_side(self):
        r_landscape = measurement_covariance(CameraModel(640, 480, 25))
        r_portrait = measurement_covariance(CameraModel(480, 640, 25))
        assert np.allclose(r_landscape, r_portrait)
        assert r_landscape[0, 0] == pytest.approx(480.0 ** 2 * 1e-5 * 2.029)

    def test_positive_definite(self):
        r = measurement_covariance(camera_1080p())
        assert np.linalg.eigvalsh(r).min() > 0


class TestClutter:
    def test_density_is_product_of_interval_lengths(self):
        expected = 1.0 / ((1.5 * 1920) * (1.5 * 1080) * (0.5 * 1920) * (4.0 / 3.0 * 1080))
        logd = clutter_log_density(np.array([960.0, 540.0, 100.0, 200.0]), camera_1080p())
        assert logd == pytest.approx(np.log(expected), rel=1e-12)
        assert np.exp(logd) == pytest.approx(1.5504535957425189e-13, rel=1e-9)

    def test_outside_support(self):
        cam = camera_1080p()
        assert clutter_log_density(np.array([960.0, 540.0, -1.0, 200.0]), cam) == -np.inf
        assert clutter_log_density(np.array([-1920.0, 540.0, 100.0, 200.0]), cam) == -np.inf
        assert clutter_log_density(np.array([960.0, 540.0, 100.0, 2000.0]), cam) == -np.inf

    def test_support_bounds(self):
        support = ClutterModel(1.552, 1920, 1080).support
        assert np.allclose(support, [[-480.0, 2400.0],
                                     [0.0, 1620.0],
                                     [0.0, 960.0],
                                     [0.0, 1440.0]])

    def test_density_integrates_to_one(self):
        model = ClutterModel(1.0, 1920, 1080)
        lengths = model.support[:, 1] - model.support[:, 0]
        logd = model.log_density(np.array([0.0, 10.0, 10.0, 10.0]))
        assert np.exp(logd) * lengths.prod() == pytest.approx(1.0, rel=1e-12)


class TestCameraModel:
    def test_period(self):
        assert camera_1080p(frame_rate=25).period == pytest.approx(0.04)

    def test_default_principal_point_is_center(self):
        cam = camera_1080p()
        assert np.allclose(cam.center, [960.0, 540.0])

    def test_validation(self):
        with pytest.raises(ValueError):
            CameraModel(0, 1080, 30)
        with pytest.raises(ValueError):
            CameraModel(1920, 1080, 0)
        with pytest.raises(ValueError):
            CameraModel(1920, 1080, 30, focal_length=-1.0)
