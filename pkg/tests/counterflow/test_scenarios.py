import math
from unittest import TestCase

import numpy as np
from parameterized import parameterized

from warpflow.counterflow.flow import ProfileTrajectory
from warpflow.counterflow.flow import sample_profile
from warpflow.counterflow.scenarios import classify_notion
from warpflow.counterflow.scenarios import CounterexampleReport
from warpflow.counterflow.scenarios import EQUIDISTANT_CEILING
from warpflow.counterflow.scenarios import equidistant_sinh
from warpflow.counterflow.scenarios import initial_profile
from warpflow.counterflow.scenarios import NotionVerdict
from warpflow.counterflow.scenarios import run_counterexample
from warpflow.counterflow.scenarios import sphere_extinction_time
from warpflow.counterflow.scenarios import sphere_radius


class TestClosedForms(TestCase):
    def test_sphere_radius_follows_cosh_law(self):
        rho0, n = 1.5, 2
        times = np.linspace(0.0, 0.8 * sphere_extinction_time(rho0, n), 5)
        rho = sphere_radius(rho0, n, times)
        np.testing.assert_allclose(np.cosh(rho), math.cosh(rho0) * np.exp(-n * times), rtol=1e-6)

    def test_extinction_time(self):
        self.assertAlmostEqual(sphere_extinction_time(1.5, 2), math.log(math.cosh(1.5)) / 2)

    def test_equidistant_sinh(self):
        expected = [math.sinh(0.5), math.sinh(0.5) * math.exp(-3)]
        np.testing.assert_allclose(equidistant_sinh(0.5, 3, [0.0, 1.0]), expected)


class TestClassifyNotion(TestCase):
    @parameterized.expand(
        [
            ("persistent", [1.0, 2.0, 3.0], [1.0, 0.5, 0.2], False, None, None),
            ("crossed", [1.0, 2e3, math.inf], [1.0, 0.5, 0.0], True, 0.1, 0.2),
            ("flipped", [1.0, 2.0, 3.0], [1.0, -0.1, 0.2], True, None, 0.1),
        ]
    )
    def test_classify(self, _, sups, products, failed, failure_time, sign_change_time):
        verdict = classify_notion([0.0, 0.1, 0.2], sups, products)
        self.assertEqual(verdict.failed, failed)
        self.assertEqual(verdict.failure_time, failure_time)
        self.assertEqual(verdict.sign_change_time, sign_change_time)

    @parameterized.expand([(0.3, 0.1, 0.1), (None, 0.2, 0.2), (0.4, None, 0.4), (None, None, None)])
    def test_onset(self, failure_time, sign_change_time, expected):
        verdict = NotionVerdict(1.0, expected is not None, failure_time, sign_change_time)
        self.assertEqual(verdict.onset, expected)
        self.assertEqual(verdict.to_dict()["onset"], expected)

    @parameterized.expand(
        [
            (False, False, "both graph notions persistent"),
            (False, True, "geodesic graph failed"),
            (True, False, "equidistant graph failed"),
            (True, True, "both graph notions failed"),
        ]
    )
    def test_verdict(self, eq_failed, geo_failed, expected):
        report = CounterexampleReport(
            scenario="steep-equidistant-graph",
            parameters={},
            trajectory=ProfileTrajectory(),
            equidistant=NotionVerdict(1.0, eq_failed),
            geodesic=NotionVerdict(1.0, geo_failed),
        )
        self.assertEqual(report.verdict, expected)
        self.assertTrue(report.passed)


class TestRunCounterexample(TestCase):
    def test_unknown_scenario(self):
        with self.assertRaises(ValueError):
            initial_profile("helicoid", {})

    def test_steep_graph_short_run(self):
        seen = []
        report = run_counterexample(
            "steep-equidistant-graph", horizon=0.05, nodes=48, on_sample=seen.append
        )
        self.assertEqual(report.trajectory.status, "completed")
        self.assertFalse(report.equidistant.failed)
        self.assertEqual(
            set(report.expected),
            {"completed", "equidistant_persistent", "equidistant_bounded", "geodesic_failed"},
        )
        self.assertTrue(report.passed, report.expected)
        self.assertEqual(len(seen), len(report.timeseries()))
        self.assertNotIn("on_sample", report.to_dict()["parameters"])

    def test_steep_graph_to_unit_time(self):
        report = run_counterexample("steep-equidistant-graph", horizon=1.0, nodes=48)
        self.assertEqual(report.trajectory.status, "completed")
        self.assertEqual(report.verdict, "geodesic graph failed")
        self.assertLess(max(s["sup_v_eq"] for s in report.timeseries()), EQUIDISTANT_CEILING)
        self.assertIsNotNone(report.geodesic.onset)
        self.assertLess(report.geodesic.onset, 1.0)
        self.assertTrue(report.passed, report.expected)

    def test_steep_graph_folds_in_the_geodesic_chart(self):
        sample = sample_profile(initial_profile("steep-equidistant-graph", {}))
        self.assertLess(sample.min_geo_product, 0.0)
        self.assertGreater(sample.min_eq_product, 0.0)
        self.assertLess(sample.sup_v_eq, EQUIDISTANT_CEILING)

    def test_lower_graph_stays_geodesic(self):
        sample = sample_profile(initial_profile("steep-equidistant-graph", {"u_max": 2.0}))
        self.assertGreater(sample.min_geo_product, 0.0)

    def test_steep_graph_counts_a_persistent_geodesic_graph_as_a_miss(self):
        report = run_counterexample(
            "steep-equidistant-graph", horizon=0.02, nodes=32, u_max=2.0, cadence=0.01
        )
        self.assertFalse(report.geodesic.failed)
        self.assertFalse(report.expected["geodesic_failed"])
        self.assertFalse(report.passed)

    def test_geodesic_sphere_negative_control(self):
        report = run_counterexample("geodesic-sphere", rho0=1.0, nodes=48)
        self.assertEqual(report.trajectory.status, "pinch")
        self.assertEqual(report.verdict, "both graph notions failed")
        self.assertIsNotNone(report.extinction)
        self.assertAlmostEqual(report.extinction["predicted"], math.log(math.cosh(1.0)) / 2)
        self.assertLess(report.extinction["pinch_time"], report.extinction["predicted"])
