import json
import math
import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np
from parameterized import parameterized

from warpflow.geometry.base import FlatTorus
from warpflow.geometry.base import HyperbolicPolar
from warpflow.geometry.constants import estimate_constants
from warpflow.geometry.warp import ConstantOne
from warpflow.geometry.warp import CoshRadial
from warpflow.graphflow.flow import FlowConfig
from warpflow.graphflow.flow import run_flow
from warpflow.graphflow.state import GraphState
from warpflow.monitors.base import BoundRecord
from warpflow.monitors.base import BoundReport
from warpflow.monitors.base import classify_violation
from warpflow.monitors.base import DIAGNOSTIC
from warpflow.monitors.base import DISCRETIZATION
from warpflow.monitors.base import GENUINE
from warpflow.monitors.bounds import decay_check
from warpflow.monitors.bounds import frakg_bound_check
from warpflow.monitors.bounds import gradient_bound_check
from warpflow.monitors.bounds import graph_property_check
from warpflow.monitors.bounds import regularization_check
from warpflow.monitors.bounds import Decay
from warpflow.monitors.factory import AutoMonitor
from warpflow.scenarios.initial import gaussian_bump
from warpflow.utils.exceptions import PreconditionError


def torus_trajectory(amplitude: float = 0.3, horizon: float = 0.2):
    base = FlatTorus()
    grid = base.make_grid([32, 32])
    x, y = grid.coordinates()
    state = GraphState(base, ConstantOne(), grid, amplitude * np.sin(x) * np.sin(y))
    traj = run_flow(state, FlowConfig(horizon=horizon, cadence=horizon / 4))
    v0_sup = float(np.max(traj.initial.fields.v))
    constants = estimate_constants(base, ConstantOne(), grid, v0_sup, horizon)
    return traj, constants


class TestBoundReport(TestCase):
    def test_margins_and_violation(self):
        report = BoundReport(bound_id="b", tolerance=0.1)
        report.append(BoundRecord(0.0, 1.0, 2.0))
        report.append(BoundRecord(1.0, 2.05, 2.0, (3,)))
        report.finalize()
        self.assertAlmostEqual(report.min_margin, -0.05)
        self.assertIsNone(report.violation)
        self.assertTrue(report.passed)

        report.append(BoundRecord(2.0, 3.0, 2.0, (4,)))
        report.finalize()
        self.assertEqual(report.violation.node, (4,))
        self.assertEqual(report.violation.excess, 1.0)
        self.assertFalse(report.passed)

    def test_one_sided_violation_is_diagnostic(self):
        report = BoundReport(bound_id="b", strict=False)
        report.append(BoundRecord(0.0, 3.0, 1.0))
        report.finalize()
        self.assertEqual(report.violation.classification, DIAGNOSTIC)
        self.assertTrue(report.passed)
        self.assertEqual(report.to_dict()["mode"], "one-sided")

    def test_error_fails(self):
        report = BoundReport(bound_id="b", error="precondition")
        self.assertFalse(report.passed)
        self.assertEqual(report.min_margin, math.inf)

    @parameterized.expand(
        [
            ("shrinks", 0.4, 0.1, DISCRETIZATION),
            ("stalls", 0.4, 0.3, GENUINE),
            ("vanishes", 0.4, 0.0, DISCRETIZATION),
            ("appears", 0.0, 0.2, GENUINE),
        ]
    )
    def test_classify_violation(self, _, coarse, fine, expected):
        self.assertEqual(classify_violation(coarse, fine, ratio=2.0), expected)


class TestBoundChecks(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.traj, cls.constants = torus_trajectory()

    def test_gradient_bound_holds(self):
        report = gradient_bound_check(self.traj, self.constants, tolerance=1e-3)
        self.assertTrue(report.passed)
        self.assertEqual(len(report.records), len(self.traj))
        self.assertEqual(report.details["exponent"], 0.0)

    def test_gradient_bound_negative_control(self):
        constants = self.constants.with_offsets(nu=-10.0)
        report = gradient_bound_check(self.traj, constants, tolerance=1e-3)
        self.assertIsNotNone(report.violation)
        self.assertAlmostEqual(report.violation.t, self.traj.times[-1])
        self.assertFalse(report.passed)

    def test_frakg_bound_holds(self):
        report = frakg_bound_check(self.traj, self.constants, tolerance=1e-3)
        self.assertTrue(report.passed)
        measured = [r.measured for r in report.records]
        self.assertEqual(measured, sorted(measured))

    def test_frakg_breach(self):
        constants = self.constants.with_offsets(delta=10.0)
        report = frakg_bound_check(self.traj, constants)
        self.assertEqual(report.records, [])
        self.assertEqual(report.failure["t"], 0.0)
        self.assertFalse(report.passed)

    @parameterized.expand([(0,), (1,)])
    def test_regularization_is_finite(self, order):
        report = regularization_check(self.traj, self.constants, order=order)
        self.assertTrue(report.details["finite"])
        self.assertEqual(report.records[0].measured, 0.0)

    def test_regularization_order(self):
        with self.assertRaises(ValueError):
            regularization_check(self.traj, order=2)

    def test_decay_preconditions(self):
        with self.assertRaises(PreconditionError):
            decay_check(self.traj, k=0.5)
        with self.assertRaises(PreconditionError) as ctx:
            decay_check(self.traj, k=-1.0)
        self.assertEqual(ctx.exception.value, 0.0)

    def test_graph_property(self):
        report = graph_property_check(self.traj)
        self.assertTrue(report.passed)
        self.assertEqual(report.details["status"], "completed")


class TestHyperbolicDecay(TestCase):
    @classmethod
    def setUpClass(cls):
        base = HyperbolicPolar()
        grid = base.make_grid([32, 32], truncation_radius=3.0)
        state = GraphState(base, CoshRadial(), grid, gaussian_bump(grid, amplitude=0.8, width=1.0))
        cls.state = state
        cls.traj = run_flow(state, FlowConfig(horizon=0.5, cadence=0.1))

    def test_bump_decays_toward_the_slice(self):
        report = decay_check(self.traj, k=-1.0, tolerance=1e-3)
        self.assertTrue(report.details["exact_distance"])
        self.assertAlmostEqual(report.details["sectional_max"], -1.0)
        self.assertIsNone(report.violation)
        self.assertTrue(report.passed)
        self.assertLess(report.records[-1].measured, report.records[0].measured)

    def test_preconditions_hold_in_hyperbolic_space(self):
        Decay(k=-1.0).check_preconditions(self.state)

    def test_nonnegative_ceiling_is_rejected(self):
        with self.assertRaises(PreconditionError):
            Decay(k=0.0).check_preconditions(self.state)


class TestMonitor(TestCase):
    def setUp(self):
        self.traj, self.constants = torus_trajectory(horizon=0.05)

    def test_report_is_saved(self):
        with tempfile.TemporaryDirectory() as tmp:
            monitor = AutoMonitor("gradient_bound", output_dir=tmp)
            report = monitor(self.traj, self.constants)
            path = Path(tmp) / "0_gradient_bound.json"
            self.assertTrue(path.exists())
            saved = json.loads(path.read_text())
        self.assertEqual(saved["passed"], report.passed)
        self.assertEqual(saved["bound"], "gradient_bound")

    def test_precondition_becomes_error(self):
        report = AutoMonitor("decay", k=-1.0)(self.traj, self.constants)
        self.assertIsNotNone(report.error)
        self.assertFalse(report.passed)
        self.assertEqual(report.records, [])

    def test_regularization_id(self):
        self.assertEqual(AutoMonitor("regularization", order=1).bound_id, "regularization_m1")

    def test_unknown_monitor(self):
        with self.assertRaises(ValueError):
            AutoMonitor("curvature_pinching")
