import math
from unittest import TestCase

import numpy as np
from parameterized import parameterized

from warpflow.geometry.base import FlatCircle
from warpflow.geometry.base import FlatTorus
from warpflow.geometry.base import HyperbolicPolar
from warpflow.geometry.grid import Chart
from warpflow.geometry.grid import diff1
from warpflow.geometry.grid import diff2
from warpflow.geometry.grid import Grid


class TestGrid(TestCase):
    def test_periodic_box(self):
        grid = Grid.periodic_box([2 * math.pi, math.pi], [64, 32])
        self.assertEqual(grid.chart, Chart.cartesian)
        self.assertEqual(grid.shape, (64, 32))
        self.assertAlmostEqual(grid.spacing[0], 2 * math.pi / 64)
        self.assertAlmostEqual(grid.h_min, math.pi / 32)
        self.assertFalse(grid.boundary_mask().any())

    def test_polar_disc_last_ring_on_radius(self):
        grid = Grid.polar_disc(3.0, [32, 64])
        r = grid.axes[0]
        self.assertAlmostEqual(grid.radius, 3.0, places=12)
        self.assertAlmostEqual(r[0], 0.5 * grid.spacing[0], places=14)
        self.assertTrue(grid.boundary_mask()[-1].all())
        self.assertFalse(grid.boundary_mask()[:-1].any())

    def test_polar_disc_needs_even_angles(self):
        with self.assertRaises(ValueError):
            Grid.polar_disc(1.0, [16, 33])

    @parameterized.expand(
        [
            ("circle", FlatCircle(), [32], None),
            ("torus", FlatTorus(), [32, 16], None),
            ("hyperbolic", HyperbolicPolar(), [16, 32], 2.0),
        ]
    )
    def test_refined_doubles_resolution(self, _, base, resolution, radius):
        grid = base.make_grid(resolution, radius)
        fine = grid.refined(2)
        self.assertEqual(fine.shape, tuple(2 * n for n in grid.shape))
        self.assertAlmostEqual(fine.h_min, grid.h_min / 2, delta=0.05 * grid.h_min)
        if grid.chart == Chart.polar:
            self.assertAlmostEqual(fine.radius, grid.radius, places=12)

    def test_periodic_differences_are_second_order(self):
        errors = []
        for n in (32, 64):
            grid = Grid.periodic_box([2 * math.pi], [n])
            (x,) = grid.coordinates()
            errors.append(
                (
                    np.max(np.abs(diff1(np.sin(x), grid, 0) - np.cos(x))),
                    np.max(np.abs(diff2(np.sin(x), grid, 0) + np.sin(x))),
                )
            )
        for coarse, fine in zip(*errors):
            self.assertGreater(coarse / fine, 3.5)

    def test_pole_value_is_ring_mean(self):
        grid = Grid.polar_disc(1.0, [16, 32])
        f = np.arange(np.prod(grid.shape), dtype=float).reshape(grid.shape)
        self.assertAlmostEqual(float(grid.pole_value(f)), float(f[0].mean()))
