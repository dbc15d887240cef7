import math
from unittest import TestCase

import numpy as np
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from warpflow.geometry.base import FlatCircle
from warpflow.geometry.base import FlatTorus
from warpflow.geometry.base import HyperbolicPolar
from warpflow.geometry.constants import estimate_constants
from warpflow.geometry.constants import truncation_radius
from warpflow.geometry.distance import distance_to_slice
from warpflow.geometry.warp import ConstantOne
from warpflow.geometry.warp import CoshRadial
from warpflow.geometry.warp import TorusBump


class TestEstimateConstants(TestCase):
    def test_flat_torus(self):
        base = FlatTorus()
        constants = estimate_constants(base, ConstantOne(), base.make_grid([32, 32]), 1.2, 2.0)
        self.assertTrue(constants.compact)
        self.assertEqual(constants.eta, 0.0)
        self.assertEqual(constants.nu, 0.0)
        self.assertEqual(constants.delta_case, "compact")
        self.assertAlmostEqual(constants.delta, 1 / (2 * 1.2**2))
        self.assertAlmostEqual(constants.gradient_bound(1.7), 1.2)
        self.assertAlmostEqual(constants.K, 0.0)
        self.assertAlmostEqual(constants.C, 0.0)
        self.assertAlmostEqual(constants.frakg_ceiling(0.3), 1.0)

    def test_torus_bump_nu(self):
        # hess(phi)/phi has eigenvalues in [-0.25, 0.5] and the base is flat
        base = FlatTorus()
        grid = base.make_grid([64, 16])
        constants = estimate_constants(base, TorusBump(a=1.5, b=0.5), grid, 1.5, 2.0)
        self.assertAlmostEqual(constants.mu1, -0.25, places=10)
        self.assertAlmostEqual(constants.mu2, 0.5, places=10)
        self.assertAlmostEqual(constants.nu, 1.0, places=10)
        self.assertAlmostEqual(constants.eta, 0.5 / math.sqrt(2.0), places=2)
        self.assertAlmostEqual(
            constants.gradient_bound(2.0), 1.5 * math.exp(constants.nu * 2.0), places=10
        )

    def test_curves_have_no_nu(self):
        base = FlatCircle()
        constants = estimate_constants(base, ConstantOne(), base.make_grid([64]), 1.0, 1.0)
        self.assertEqual(constants.n, 1)
        self.assertEqual(constants.nu, 0.0)
        self.assertEqual(constants.gradient_growth_exponent(), 0.0)

    def test_hyperbolic_space(self):
        base = HyperbolicPolar()
        grid = base.make_grid([32, 32], truncation_radius=2.0)
        constants = estimate_constants(base, CoshRadial(), grid, 1.5, 1.0)
        self.assertFalse(constants.compact)
        self.assertEqual(constants.delta_case, "noncompact-bounded")
        self.assertAlmostEqual(constants.mu, -1.0)
        self.assertAlmostEqual(constants.mu1, 1.0, places=10)
        self.assertAlmostEqual(constants.mu2, 1.0, places=10)
        self.assertAlmostEqual(constants.nu, 0.0, places=10)
        self.assertAlmostEqual(constants.eta, math.tanh(grid.radius), places=10)
        self.assertLessEqual(constants.delta, 0.5)

    def test_unbounded_initial_gradient_case(self):
        base = HyperbolicPolar()
        grid = base.make_grid([32, 32], truncation_radius=2.0)
        bounded = estimate_constants(base, CoshRadial(), grid, 1.5, 1.0)
        unbounded = estimate_constants(
            base, CoshRadial(), grid, 1.5, 1.0, v0_bounded=False, gamma=0.5
        )
        self.assertEqual(unbounded.delta_case, "noncompact-unbounded")
        self.assertAlmostEqual(unbounded.delta, bounded.delta * 0.5**4)

    def test_invalid_inputs(self):
        base = FlatTorus()
        grid = base.make_grid([16, 16])
        with self.assertRaises(ValueError):
            estimate_constants(base, ConstantOne(), grid, 0.5, 1.0)
        with self.assertRaises(ValueError):
            estimate_constants(base, ConstantOne(), grid, 1.0, 0.0)

    def test_offsets(self):
        base = FlatTorus()
        constants = estimate_constants(base, ConstantOne(), base.make_grid([16, 16]), 1.2, 1.0)
        shifted = constants.with_offsets(nu=-1.0)
        self.assertEqual(shifted.nu, -1.0)
        self.assertEqual(shifted.offsets, {"nu": -1.0})
        self.assertEqual(constants.nu, 0.0)
        self.assertAlmostEqual(shifted.gradient_bound(1.0), 1.2 * math.exp(-1.0))
        self.assertIn("pinching", shifted.to_dict())

    @settings(max_examples=25, deadline=None)
    @given(v=st.floats(min_value=1.0, max_value=1.4))
    def test_psi_is_finite_below_the_gradient_bound(self, v):
        base = FlatTorus()
        constants = estimate_constants(base, ConstantOne(), base.make_grid([16, 16]), 1.4, 1.0)
        psi = constants.psi(np.array([v]))
        self.assertTrue(np.all(np.isfinite(psi)))
        self.assertTrue(np.all(psi >= v**2))


class TestTruncationRadius(TestCase):
    def test_nonnegative_curvature_has_no_radius(self):
        self.assertIsNone(truncation_radius(0.0, 1.0, 2, 1.0, 1.0))

    def test_cascade_is_ordered(self):
        out = truncation_radius(-1.0, 1.0, 2, 1.0, 1.0, gamma=0.5, m=0)
        self.assertGreater(out["rho_inner"], 1.0)
        self.assertGreater(out["rho"], out["rho_inner"])
        self.assertAlmostEqual(out["beta"], 1.5)
        deeper = truncation_radius(-1.0, 1.0, 2, 1.0, 1.0, gamma=0.5, m=1)
        self.assertGreater(deeper["rho"], out["rho"])


class TestLipschitzConstant(TestCase):
    def test_lipschitz_constant(self):
        base = FlatTorus()
        constants = estimate_constants(base, ConstantOne(), base.make_grid([16, 16]), 1.2, 1.0)
        delta = 1 / (2 * 1.2**2)
        self.assertAlmostEqual(constants.alpha0, (1 - delta) / (2 * delta))

        base = HyperbolicPolar()
        grid = base.make_grid([32, 32], truncation_radius=2.0)
        constants = estimate_constants(base, CoshRadial(), grid, 1.5, 1.0)
        expected = (
            (1 - constants.delta) * max(constants.K + constants.C, 1.0) / (2 * constants.delta)
        )
        self.assertAlmostEqual(constants.alpha0, expected)


class TestDistanceToSlice(TestCase):
    def test_hyperbolic_space_is_exact(self):
        r = np.array([0.0, 0.5, 1.5])
        d, exact = distance_to_slice(HyperbolicPolar(), CoshRadial(), (r, np.zeros(3)), 0.8)
        self.assertTrue(exact)
        np.testing.assert_allclose(d, np.arcsinh(np.cosh(r) * np.sinh(0.8)))
        self.assertAlmostEqual(float(d[0]), 0.8)

    def test_vertical_segment_elsewhere(self):
        x = (np.array([0.1, 2.0]), np.array([1.0, 3.0]))
        d, exact = distance_to_slice(FlatTorus(), ConstantOne(), x, np.array([-0.5, 0.25]))
        self.assertFalse(exact)
        np.testing.assert_allclose(d, [0.5, 0.25])

        d, exact = distance_to_slice(HyperbolicPolar(), CoshRadial(rate=2.0), x, 0.5)
        self.assertFalse(exact)
