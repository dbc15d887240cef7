import math
from unittest import TestCase

import numpy as np
from parameterized import parameterized

from warpflow.geometry.grid import Grid
from warpflow.scenarios.initial import gaussian_bump
from warpflow.scenarios.initial import initial_height
from warpflow.scenarios.initial import lipschitz_cone
from warpflow.scenarios.initial import sinusoid
from warpflow.scenarios.initial import tanh_ramp

TORUS = Grid.periodic_box([2 * math.pi, 2 * math.pi], [32, 32])
CIRCLE = Grid.periodic_box([2 * math.pi], [64])
DISC = Grid.polar_disc(3.0, [32, 32])


class TestInitialData(TestCase):
    def test_sinusoid(self):
        x, y = TORUS.coordinates()
        np.testing.assert_allclose(sinusoid(TORUS, 0.5, [1, 2]), 0.5 * np.sin(x) * np.sin(2 * y))
        with self.assertRaises(ValueError):
            sinusoid(TORUS, modes=[1])

    def test_gaussian_peaks_at_center(self):
        u = gaussian_bump(TORUS, amplitude=0.8, width=0.5, center=[1.0, 2.0])
        node = np.unravel_index(np.argmax(u), u.shape)
        x, y = TORUS.coordinates()
        self.assertAlmostEqual(x[node], 1.0, delta=TORUS.spacing[0])
        self.assertAlmostEqual(y[node], 2.0, delta=TORUS.spacing[1])
        with self.assertRaises(ValueError):
            gaussian_bump(TORUS, width=0.0)

    def test_cone_is_periodized(self):
        u = lipschitz_cone(CIRCLE, slope=0.5, center=[0.0])
        (x,) = CIRCLE.coordinates()
        np.testing.assert_allclose(u, 0.5 * np.minimum(x, 2 * math.pi - x), atol=1e-12)
        self.assertLessEqual(u.max(), 0.5 * math.pi + 1e-12)

    def test_polar_data_is_radial(self):
        r, _ = DISC.coordinates()
        np.testing.assert_allclose(tanh_ramp(DISC, 1.0, 2.0), np.tanh(2 * r))
        np.testing.assert_allclose(lipschitz_cone(DISC, 1.0), r, atol=1e-12)


class TestInitialHeight(TestCase):
    def test_noise_is_seeded(self):
        conf = {"kind": "constant", "value": 1.0, "noise": 0.1}
        a = initial_height(TORUS, conf, seed=4)
        b = initial_height(TORUS, conf, seed=4)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, initial_height(TORUS, conf, seed=5)))
        self.assertLessEqual(np.max(np.abs(a - 1.0)), 0.1)

    def test_conf_is_not_mutated(self):
        conf = {"kind": "sinusoid", "amplitude": 0.2}
        initial_height(CIRCLE, conf)
        self.assertEqual(conf, {"kind": "sinusoid", "amplitude": 0.2})

    @parameterized.expand([("unknown", {"kind": "spiral"}), ("missing", {"amplitude": 1.0})])
    def test_unknown_kind(self, _, conf):
        with self.assertRaises(ValueError):
            initial_height(TORUS, conf)
