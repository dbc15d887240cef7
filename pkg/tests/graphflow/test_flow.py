import math
from unittest import TestCase

import numpy as np
from parameterized import parameterized

from warpflow.geometry.base import FlatCircle
from warpflow.geometry.base import FlatTorus
from warpflow.geometry.warp import ConstantOne
from warpflow.geometry.warp import TorusBump
from warpflow.graphflow.flow import FlowConfig
from warpflow.graphflow.flow import run_flow
from warpflow.graphflow.flow import Scheme
from warpflow.graphflow.flow import step_flow
from warpflow.graphflow.state import GraphState
from warpflow.graphflow.timestep import AutoTimeStep
from warpflow.graphflow.timestep import CflTimeStep
from warpflow.graphflow.timestep import FixedTimeStep
from warpflow.utils.exceptions import BlowUpError


def circle_state(amplitude: float, n: int = 128) -> GraphState:
    base = FlatCircle()
    grid = base.make_grid([n])
    (x,) = grid.coordinates()
    return GraphState(base, ConstantOne(), grid, amplitude * np.sin(x))


class TestTimeStep(TestCase):
    def test_cfl_step(self):
        state = circle_state(0.1, n=64)
        dt = CflTimeStep(fraction=0.5)(state)
        self.assertAlmostEqual(dt, 0.5 * state.grid.h_min**2 / 2)
        self.assertEqual(CflTimeStep(fraction=0.5, max_dt=1e-6)(state), 1e-6)

    @parameterized.expand([(0.0,), (-0.1,), (1.5,)])
    def test_cfl_fraction_range(self, fraction):
        with self.assertRaises(ValueError):
            CflTimeStep(fraction=fraction)

    def test_auto(self):
        self.assertIsInstance(AutoTimeStep(mode="fixed", dt=1e-3), FixedTimeStep)
        self.assertIsInstance(AutoTimeStep(), CflTimeStep)
        self.assertEqual(AutoTimeStep(mode="fixed", dt=1e-3).describe()["dt"], 1e-3)
        with self.assertRaises(ValueError):
            AutoTimeStep(mode="implicit")
        with self.assertRaises(ValueError):
            FixedTimeStep(dt=0.0)


class TestFlowConfig(TestCase):
    def test_default_cadence(self):
        config = FlowConfig(horizon=2.0, scheme="rk2")
        self.assertAlmostEqual(config.cadence, 2.0 / 50)
        self.assertEqual(config.scheme, Scheme.rk2)

    @parameterized.expand(
        [("horizon", dict(horizon=-1.0)), ("cadence", dict(horizon=1, cadence=0))]
    )
    def test_rejects_non_positive(self, _, kwargs):
        with self.assertRaises(ValueError):
            FlowConfig(**kwargs)


class TestRunFlow(TestCase):
    def test_samples_on_cadence(self):
        config = FlowConfig(horizon=0.1, cadence=0.025)
        traj = run_flow(circle_state(0.3, n=64), config)
        self.assertEqual(traj.status, "completed")
        np.testing.assert_allclose(traj.times, [0.0, 0.025, 0.05, 0.075, 0.1], atol=1e-15)
        self.assertEqual(traj.times[-1], 0.1)
        self.assertGreater(traj.steps, 4)

    def test_small_sine_decays_like_heat(self):
        a, horizon = 0.01, 0.5
        traj = run_flow(circle_state(a), FlowConfig(horizon=horizon, cadence=0.25))
        (x,) = traj.grid.coordinates()
        expected = a * math.exp(-horizon) * np.sin(x)
        self.assertLess(np.max(np.abs(traj.final.state.u - expected)), 1e-5)

    def test_sup_norm_does_not_grow(self):
        traj = run_flow(circle_state(0.8), FlowConfig(horizon=0.5, cadence=0.05))
        sups = [float(np.max(np.abs(s.state.u))) for s in traj.samples]
        self.assertTrue(all(b <= a + 1e-12 for a, b in zip(sups, sups[1:])))

    def test_schemes_agree(self):
        results = {}
        for scheme in ("euler", "rk2"):
            traj = run_flow(circle_state(0.5), FlowConfig(horizon=0.2, scheme=scheme))
            results[scheme] = traj.final.state.u
        np.testing.assert_allclose(results["euler"], results["rk2"], atol=1e-3)

    def test_constant_height_is_stationary(self):
        base = FlatTorus()
        grid = base.make_grid([32, 32])
        state = GraphState(base, TorusBump(), grid, np.full(grid.shape, 0.25))
        traj = run_flow(state, FlowConfig(horizon=0.05))
        np.testing.assert_allclose(traj.final.state.u, 0.25, atol=1e-14)

    def test_stop_tolerance(self):
        config = FlowConfig(horizon=1.0, cadence=0.1, stop_tolerance=0.02)
        traj = run_flow(circle_state(0.01), config)
        self.assertEqual(traj.status, "converged")
        self.assertEqual(len(traj), 2)

    def test_on_sample_callback(self):
        seen = []
        config = FlowConfig(horizon=0.02, cadence=0.01, on_sample=lambda s: seen.append(s.t))
        run_flow(circle_state(0.2, n=32), config)
        np.testing.assert_allclose(seen, [0.0, 0.01, 0.02])

    def test_blow_up_is_reported(self):
        with self.assertRaises(BlowUpError) as ctx:
            run_flow(circle_state(1e7, n=32), FlowConfig(horizon=0.1))
        err = ctx.exception
        self.assertEqual(err.t, 0.0)
        self.assertGreater(err.value, 1e6)
        self.assertEqual(err.trajectory.status, "blow-up")
        self.assertEqual(err.trajectory.failure["node"], list(err.node))

    def test_restart_is_bitwise(self):
        policy = FixedTimeStep(dt=1e-4)
        config = FlowConfig(horizon=0.02, cadence=0.01, dt_policy=policy)
        full = run_flow(circle_state(0.6, n=64), config)
        midway = full.samples[1].state
        self.assertEqual(midway.t, 0.01)
        u = np.array(midway.u)
        restarted = GraphState(midway.base, midway.warp, midway.grid, u, t=midway.t)
        resumed = run_flow(restarted, config)
        self.assertEqual(len(resumed), 2)
        np.testing.assert_array_equal(resumed.final.state.u, full.final.state.u)

    def test_step_rejects_non_positive_dt(self):
        with self.assertRaises(ValueError):
            step_flow(circle_state(0.1, n=32), 0.0)
