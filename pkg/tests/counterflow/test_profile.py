import math
from unittest import TestCase

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from parameterized import parameterized

from warpflow.counterflow.charts import distance_to_origin
from warpflow.counterflow.charts import equidistant_height
from warpflow.counterflow.charts import from_isothermal
from warpflow.counterflow.charts import hyperboloid_point
from warpflow.counterflow.charts import isothermal
from warpflow.counterflow.charts import minkowski
from warpflow.counterflow.charts import slice_distance_gradient
from warpflow.counterflow.charts import to_geodesic_chart
from warpflow.counterflow.curvature import generated_mean_curvature
from warpflow.counterflow.curvature import orbit_volume
from warpflow.counterflow.curve import paraboloid_cap
from warpflow.counterflow.curve import ProfileCurve
from warpflow.counterflow.flow import cfl_time_step
from warpflow.counterflow.flow import graph_measures
from warpflow.counterflow.flow import run_profile
from warpflow.counterflow.flow import step_profile
from warpflow.oracle.profile import chart_roundtrip_check
from warpflow.oracle.profile import metric_pullback_check
from warpflow.utils.exceptions import InvalidAxisError

coordinate = st.floats(min_value=0.0, max_value=3.0, allow_nan=False)
height = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


class TestCharts(TestCase):
    @given(coordinate)
    def test_isothermal_roundtrip(self, r):
        self.assertAlmostEqual(float(from_isothermal(isothermal(r))), r, places=9)

    @given(coordinate, height)
    def test_hyperboloid(self, r, u):
        p = hyperboloid_point(r, u, 0.3)
        self.assertAlmostEqual(float(minkowski(p, p)), -1.0, delta=1e-9 * np.cosh(r) ** 2)

    @given(coordinate, height)
    def test_distance_gradient_is_unit(self, r, u):
        dl_r, dl_u = slice_distance_gradient(r, u)
        self.assertAlmostEqual(float(dl_r**2 + (dl_u / np.cosh(r)) ** 2), 1.0, places=9)

    def test_equidistant_height(self):
        r = np.linspace(0.0, 3.0, 7)
        _, ell = to_geodesic_chart(r, equidistant_height(r, 0.7))
        np.testing.assert_allclose(ell, 0.7)

    def test_hyperboloid_pulls_back_to_the_orbit_metric(self):
        result = metric_pullback_check(samples=8)
        self.assertTrue(result.passed, result.to_dict())
        self.assertTrue(chart_roundtrip_check(samples=64).passed)


class TestProfileCurve(TestCase):
    @parameterized.expand(
        [
            ("too_short", [0.0, 1.0], [0.0, 0.0], ValueError),
            ("negative", [0.0, -0.5, 1.0], [0.0, 0.0, 0.0], ValueError),
            ("interior_axis", [0.5, 0.0, 1.0], [0.0, 0.0, 0.0], InvalidAxisError),
        ]
    )
    def test_validation(self, _, r, u, error):
        with self.assertRaises(error):
            ProfileCurve(r=r, u=u)

    def test_geodesic_sphere(self):
        curve = ProfileCurve.geodesic_sphere(1.0, 101)
        self.assertEqual(curve.on_axis, (True, True))
        np.testing.assert_allclose(distance_to_origin(curve.r, curve.u), 1.0, atol=1e-12)
        self.assertFalse(curve.self_intersects())

    def test_resampled_is_uniform(self):
        curve = ProfileCurve(r=np.linspace(0, 2, 41) ** 2, u=np.zeros(41))
        self.assertFalse(curve.spacing_ok())
        even = curve.resampled()
        self.assertTrue(even.spacing_ok())
        self.assertEqual(even.r[0], 0.0)
        self.assertAlmostEqual(even.r[-1], 4.0)
        self.assertAlmostEqual(even.length, curve.length, delta=0.05)

    def test_self_intersection(self):
        w = np.array([0.1, 0.5, 0.5, 0.2, 0.2, 0.8])
        u = np.array([0.0, 0.0, 0.5, 0.5, -0.5, -0.5])
        curve = ProfileCurve(r=from_isothermal(w), u=u)
        self.assertTrue(curve.self_intersects())


class TestGeneratedCurvature(TestCase):
    @parameterized.expand([(2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2)])
    def test_orbit_volume(self, n, expected):
        self.assertAlmostEqual(orbit_volume(n), expected)

    def test_geodesic_sphere_is_umbilic(self):
        H, _ = generated_mean_curvature(ProfileCurve.geodesic_sphere(1.0, 201))
        np.testing.assert_allclose(np.abs(H), 2 / math.tanh(1.0), rtol=1e-3)

    def test_equidistant_curvature(self):
        curve = ProfileCurve.equidistant(0.5, 2.0, 201, toward_axis=True)
        H, _ = generated_mean_curvature(curve)
        self.assertEqual(H[0], 0.0)
        np.testing.assert_allclose(H[1:], 2 * math.tanh(0.5), atol=1e-3)

    def test_orientation_flips_sign(self):
        curve = ProfileCurve.geodesic_sphere(1.0, 51)
        flipped = ProfileCurve(r=curve.r[::-1], u=curve.u[::-1])
        H, _ = generated_mean_curvature(curve)
        H_flipped, _ = generated_mean_curvature(flipped)
        np.testing.assert_allclose(H_flipped[::-1], -H, rtol=1e-10, atol=1e-12)

    def test_equidistant_graph_measures(self):
        curve = ProfileCurve.equidistant(0.5, 2.0, 101)
        m = graph_measures(curve)
        self.assertTrue(np.all(np.isfinite(m.v_eq)))
        np.testing.assert_allclose(np.abs(m.geo_product), 1.0, atol=1e-3)


class TestProfileFlow(TestCase):
    def test_step_keeps_fixed_endpoint(self):
        curve = ProfileCurve.from_graph(lambda r: np.tanh(r), 2.0, 41)
        moved = step_profile(curve, cfl_time_step(curve))
        self.assertEqual(moved.r[0], 0.0)
        self.assertEqual(moved.r[-1], curve.r[-1])
        self.assertEqual(moved.u[-1], curve.u[-1])
        self.assertGreater(moved.t, 0.0)

    def test_samples_on_cadence(self):
        curve = ProfileCurve.from_graph(lambda r: 0.5 * np.tanh(r), 2.0, 41)
        traj = run_profile(curve, horizon=0.02, cadence=0.01)
        self.assertEqual(traj.status, "completed")
        np.testing.assert_allclose([s.t for s in traj.samples], [0.0, 0.01, 0.02])

    def test_cone_tip_does_not_cross_the_axis(self):
        cone = ProfileCurve.from_graph(lambda r: 2.0 * np.tanh(2.0 * r), 3.0, 48)
        dt = cfl_time_step(cone)
        H, normal = generated_mean_curvature(cone)
        r_next = cone.r + dt * H * normal[:, 0]
        self.assertTrue(np.all(r_next[1:-1] >= 0.5 * cone.r[1:-1] * (1 - 1e-12)))
        moved = step_profile(cone, dt)
        self.assertTrue(np.all(moved.r[1:-1] > 0))

    def test_axis_limit_only_shortens_the_step(self):
        curve = ProfileCurve.from_graph(lambda r: 0.5 * np.tanh(r), 2.0, 41)
        plain = 0.4 * float(np.min(curve.segment_lengths())) ** 2 / (2 * curve.n)
        self.assertLessEqual(cfl_time_step(curve), plain)
        self.assertEqual(cfl_time_step(curve, axis_fraction=np.inf), plain)


class TestParaboloidCap(TestCase):
    def setUp(self):
        self.height = lambda r: 3.0 * np.tanh(2.0 * r)
        self.capped = paraboloid_cap(self.height, 0.2)

    def test_flat_on_the_axis(self):
        u = self.capped(np.array([0.0, 1e-4]))
        self.assertLess(abs(u[1] - u[0]) / 1e-4, 1e-2)

    def test_matches_outside_the_cap(self):
        r = np.array([0.2, 0.5, 2.0])
        np.testing.assert_allclose(self.capped(r), self.height(r))

    def test_c1_at_the_rim(self):
        h = 1e-5
        inside = (self.capped(np.array([0.2 - h])) - self.capped(np.array([0.2 - 2 * h]))) / h
        outside = (self.height(np.array([0.2 + 2 * h])) - self.height(np.array([0.2 + h]))) / h
        self.assertAlmostEqual(float(inside[0]), float(outside[0]), places=2)
        self.assertAlmostEqual(
            float(self.capped(np.array([0.2 - 1e-9]))[0]), float(self.height(np.array([0.2]))[0])
        )

    def test_graph_with_cap_meets_the_axis_flat(self):
        curve = ProfileCurve.from_graph(self.height, 3.0, 48, tip_radius=0.2)
        first = curve.segment_lengths()[0]
        self.assertLess((curve.u[1] - curve.u[0]) / curve.r[1], 3.0)
        self.assertGreater(curve.r[1], 0.25 * first)
