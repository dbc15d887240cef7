import json
import math
import tempfile
from pathlib import Path
from unittest import mock
from unittest import TestCase

import numpy as np
from parameterized import parameterized

from warpflow.geometry.base import FlatTorus
from warpflow.geometry.base import HyperbolicPolar
from warpflow.geometry.warp import CoshRadial
from warpflow.geometry.warp import TorusBump
from warpflow.graphflow.flow import FlowConfig
from warpflow.graphflow.flow import run_flow
from warpflow.graphflow.timestep import FixedTimeStep
from warpflow.monitors.residual import v_residual_check
from warpflow.oracle.conformance import _parabola_state
from warpflow.oracle.conformance import _torus_bump_state
from warpflow.oracle.conformance import CATALOG_RESIDUAL_LEVELS
from warpflow.oracle.conformance import ConformanceSuite
from warpflow.oracle.conformance import FAST_RESIDUAL_LEVELS
from warpflow.oracle.conformance import RESIDUAL_REDUCTION
from warpflow.oracle.conformance import residual_refinement
from warpflow.oracle.conformance import run_verification
from warpflow.oracle.conformance import sectional_curvature_check
from warpflow.oracle.first_variation import first_variation_check
from warpflow.oracle.identities import gradient_identity_check
from warpflow.oracle.identities import laplacian_identity_check
from warpflow.oracle.refinement import observed_order
from warpflow.oracle.refinement import order_check
from warpflow.oracle.report import CheckResult
from warpflow.oracle.residual import v_evolution_residual
from warpflow.oracle.riemann import ambient_metric
from warpflow.oracle.riemann import fd_riemann_check
from warpflow.oracle.riemann import symmetry_defect


class TestCheckResult(TestCase):
    @parameterized.expand(
        [
            ("within", 1e-5, 1e-4, True),
            ("above", 1e-3, 1e-4, False),
            ("no_tolerance", 5.0, None, True),
            ("nan", math.nan, None, False),
        ]
    )
    def test_passed(self, _, error, tolerance, expected):
        result = CheckResult("c", error, tolerance)
        self.assertEqual(result.passed, expected)
        self.assertEqual(result.to_dict()["passed"], expected)


class TestRefinement(TestCase):
    def test_second_order(self):
        np.testing.assert_allclose(observed_order([4.0, 1.0, 0.25]), [2.0, 2.0])

    @parameterized.expand([("single", [1.0]), ("zero", [1.0, 0.0])])
    def test_invalid(self, _, errors):
        with self.assertRaises(ValueError):
            observed_order(errors)

    def test_order_check(self):
        self.assertTrue(order_check("ok", [4.0, 1.0]).passed)
        low = order_check("low", [2.0, 1.0])
        self.assertFalse(low.passed)
        self.assertAlmostEqual(low.error, 0.5)


class TestCurvatureOracle(TestCase):
    def test_ambient_metric(self):
        g = ambient_metric(HyperbolicPolar(), CoshRadial(), np.array([1.0, 0.5, 0.0]))
        np.testing.assert_allclose(np.diag(g), [1.0, math.sinh(1.0) ** 2, math.cosh(1.0) ** 2])

    def test_symmetry_defect(self):
        self.assertEqual(symmetry_defect(np.zeros((3, 3, 3, 3))), 0.0)
        rng = np.random.default_rng(0)
        self.assertGreater(symmetry_defect(rng.normal(size=(3, 3, 3, 3))), 0.1)

    @parameterized.expand(
        [
            ("hyperbolic", HyperbolicPolar(), CoshRadial()),
            ("torus_bump", FlatTorus(), TorusBump(a=1.5, b=0.5)),
        ]
    )
    def test_fd_riemann_matches_closed_form(self, _, base, warp):
        result = fd_riemann_check(base, warp)
        self.assertTrue(result.passed, result.to_dict())
        self.assertEqual(result.details["samples"], 6)

    def test_hyperbolic_sectional_curvature(self):
        self.assertTrue(sectional_curvature_check().passed)


class TestGraphIdentities(TestCase):
    def test_first_variation_sign(self):
        state = _parabola_state()
        (x,) = state.grid.coordinates()
        chi = np.exp(-(((x - math.pi) / 0.3) ** 2))
        result = first_variation_check(state, chi, tolerance=1e-3)
        self.assertTrue(result.passed, result.to_dict())
        self.assertLess(result.details["predicted"], 0.0)

    def test_gradient_identity(self):
        state = _torus_bump_state(64, 0.8, TorusBump(a=1.5, b=0.5))
        self.assertTrue(gradient_identity_check(state).passed)

    def test_laplacian_identity(self):
        result = laplacian_identity_check(_torus_bump_state(256, 0.2), tolerance=1e-4)
        self.assertTrue(result.passed, result.to_dict())


class TestEvolutionResidual(TestCase):
    def _run(self, amplitude):
        state = _torus_bump_state(16, 0.0, warp=TorusBump(a=1.5, b=0.5))
        state = state.evolve(state.u + amplitude, 0.0)
        config = FlowConfig(0.02, cadence=0.005, dt_policy=FixedTimeStep(dt=1e-3))
        return run_flow(state, config)

    def test_slices_have_no_residual(self):
        series = v_evolution_residual(self._run(0.4))
        np.testing.assert_allclose(series.times, [0.005, 0.01, 0.015])
        np.testing.assert_allclose(series.values, 0.0, atol=1e-12)
        self.assertEqual(series.to_dict()["max"], series.max)

    def test_needs_three_samples(self):
        state = _torus_bump_state(16, 0.1)
        traj = run_flow(state, FlowConfig(0.01, cadence=0.01, dt_policy=FixedTimeStep(dt=1e-3)))
        with self.assertRaises(ValueError):
            v_evolution_residual(traj)
        report = v_residual_check(traj)
        self.assertIn("skipped", report.details)
        self.assertTrue(report.passed)


class TestConformanceSuite(TestCase):
    def test_failures_are_collected(self):
        suites = {
            "ok": lambda: CheckResult("ok", 0.0, 1.0),
            "raises": lambda: [CheckResult("fine", 0.0), 1 / 0],
        }
        with tempfile.TemporaryDirectory() as tmp:
            with mock.patch.object(ConformanceSuite, "suites", return_value=suites):
                code = run_verification(output_dir=tmp, verbose=False)
            report = json.loads((Path(tmp) / "0_verify.json").read_text())
        self.assertEqual(code, 1)
        self.assertFalse(report["passed"])
        self.assertTrue(report["checks"]["ok"][0]["passed"])
        self.assertIn("ZeroDivisionError", report["checks"]["raises"][0]["exception"])
        self.assertIn("provenance", report)

    def test_passing_suite(self):
        suites = {"ok": lambda: [CheckResult("a", 0.0, 1.0), CheckResult("b", 2.0)]}
        with mock.patch.object(ConformanceSuite, "suites", return_value=suites):
            self.assertEqual(run_verification(verbose=False), 0)

    @parameterized.expand(
        [
            ("fast", False, None, FAST_RESIDUAL_LEVELS),
            ("catalog", True, None, CATALOG_RESIDUAL_LEVELS),
            ("explicit", False, [64, 128], (64, 128)),
        ]
    )
    def test_residual_levels(self, _, catalog, levels, expected):
        suite = ConformanceSuite(catalog=catalog, residual_levels=levels, verbose=False)
        self.assertEqual(suite.residual_levels, expected)

    def test_residual_levels_must_increase(self):
        with self.assertRaises(ValueError):
            ConformanceSuite(residual_levels=[128, 64])

    def test_residual_levels_are_reported(self):
        suites = {"ok": lambda: CheckResult("a", 0.0, 1.0)}
        with mock.patch.object(ConformanceSuite, "suites", return_value=suites):
            report = ConformanceSuite(residual_levels=[64, 128], verbose=False)()
        self.assertEqual(report["residual_levels"], [64, 128])
        self.assertFalse(report["catalog"])


class TestResidualRefinement(TestCase):
    def test_second_order_reduction(self):
        result = residual_refinement(CATALOG_RESIDUAL_LEVELS)
        self.assertEqual(result.details["resolutions"], [64, 128])
        self.assertGreaterEqual(result.details["reduction"], RESIDUAL_REDUCTION)
        self.assertTrue(result.passed)
