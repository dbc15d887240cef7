"""
The conformance suite behind `warpflow verify`: every oracle check on fixed desk-scale cases,
collected into one JSON report. No flow of the main scenarios is run; the residual study runs
its own short torus flows.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np
from loguru import logger

from warpflow.counterflow.curve import ProfileCurve
from warpflow.geometry.base import FlatCircle
from warpflow.geometry.base import FlatTorus
from warpflow.geometry.base import HyperbolicPolar
from warpflow.geometry.catalog import build_pair
from warpflow.geometry.warp import ConstantOne
from warpflow.geometry.warp import CoshRadial
from warpflow.geometry.warp import TorusBump
from warpflow.graphflow.flow import FlowConfig
from warpflow.graphflow.flow import run_flow
from warpflow.graphflow.state import GraphState
from warpflow.graphflow.timestep import CflTimeStep
from warpflow.oracle.first_variation import first_variation_check
from warpflow.oracle.identities import gradient_identity_check
from warpflow.oracle.identities import laplacian_identity_check
from warpflow.oracle.profile import chart_roundtrip_check
from warpflow.oracle.profile import generated_curvature_check
from warpflow.oracle.profile import metric_pullback_check
from warpflow.oracle.profile import profile_first_variation_check
from warpflow.oracle.refinement import order_check
from warpflow.oracle.report import CheckResult
from warpflow.oracle.residual import v_evolution_residual
from warpflow.oracle.riemann import default_sample_points
from warpflow.oracle.riemann import fd_riemann_check
from warpflow.oracle.riemann import frame_riemann_fd
from warpflow.utils.provenance import run_provenance
from warpflow.utils.reporting import JsonReporter

CATALOG_PAIRS = (
    ({"kind": "flat-circle"}, {"kind": "constant-one"}),
    ({"kind": "flat-torus"}, {"kind": "constant-one"}),
    ({"kind": "flat-torus"}, {"kind": "torus-bump", "a": 1.5, "b": 0.5}),
    ({"kind": "euclidean-polar"}, {"kind": "cosh-r", "rate": 0.5}),
    ({"kind": "hyperbolic-polar"}, {"kind": "cosh-r"}),
)
EXTRA_PAIRS = (({"kind": "rotationally-symmetric", "curvature": -0.5}, {"kind": "cosh-r"}),)
RESIDUAL_REDUCTION = 3.5
# residual resolutions of the default suite and of the catalog
FAST_RESIDUAL_LEVELS = (32, 64)
CATALOG_RESIDUAL_LEVELS = (64, 128)


def sectional_curvature_check(
    points: Optional[List[tuple]] = None, tolerance: float = 1e-4
) -> CheckResult:
    """Every coordinate-plane sectional curvature of H^2 x_cosh R is -1."""
    base, warp = HyperbolicPolar(), CoshRadial()
    points = default_sample_points(base) if points is None else points
    worst = 0.0
    for x in points:
        rm = frame_riemann_fd(base, warp, x)
        dim = rm.shape[0]
        for a in range(dim):
            for b in range(a + 1, dim):
                worst = max(worst, abs(rm[a, b, a, b] + 1.0))
    return CheckResult(
        name="sectional_curvature[hyperbolic-polar, cosh-r]",
        error=worst,
        tolerance=tolerance,
        details={"samples": len(points)},
    )


def _parabola_state() -> GraphState:
    base = FlatCircle()
    grid = base.make_grid([6284])
    (x,) = grid.coordinates()
    return GraphState(base, ConstantOne(), grid, 0.5 * (x - math.pi) ** 2)


def _random_smooth_states(count: int, seed: int):
    """(state, chi) pairs with wide features on the catalog bases."""
    rng = np.random.default_rng(seed)
    makers = [
        lambda: (FlatTorus(), ConstantOne(), [64, 64], None),
        lambda: (FlatTorus(), TorusBump(a=1.5, b=0.5), [64, 64], None),
        lambda: (FlatCircle(), ConstantOne(), [512], None),
        lambda: (HyperbolicPolar(), CoshRadial(), [128, 128], 2.0),
    ]
    for i in range(count):
        base, warp, resolution, radius = makers[i % len(makers)]()
        grid = base.make_grid(resolution, radius)
        coords = grid.coordinates()
        if radius is None:
            phases = rng.uniform(0, 2 * np.pi, size=len(coords))
            amplitude = rng.uniform(0.2, 0.6)
            u = amplitude * np.prod([np.sin(c + p) for c, p in zip(coords, phases)], axis=0)
            chi = 1.0 + 0.5 * np.prod([np.cos(c) for c in coords], axis=0)
        else:
            r, theta = coords
            x, y = r * np.cos(theta), r * np.sin(theta)
            x0, y0 = rng.uniform(-0.3, 0.3, size=2)
            u = rng.uniform(0.2, 0.6) * np.exp(-((x - x0) ** 2 + (y - y0) ** 2) / 0.8)
            chi = np.exp(-((r / 0.6) ** 2))
        yield GraphState(base, warp, grid, u), chi


def _torus_bump_state(resolution: int, amplitude: float, warp=None) -> GraphState:
    base = FlatTorus()
    grid = base.make_grid([resolution, resolution])
    x, y = grid.coordinates()
    return GraphState(base, warp or ConstantOne(), grid, amplitude * np.sin(x) * np.sin(y))


def _radial_state(resolution: int) -> GraphState:
    base = HyperbolicPolar()
    grid = base.make_grid([resolution, resolution], truncation_radius=2.0)
    r, _ = grid.coordinates()
    return GraphState(base, CoshRadial(), grid, 0.5 * np.exp(-(r**2)))


def residual_refinement(resolutions=(32, 64), horizon: float = 0.05) -> CheckResult:
    """Max v-evolution residual on a torus run, refined once; h is halved and the CFL step is
    quartered between the levels."""
    maxima = []
    for n in resolutions:
        state = _torus_bump_state(n, 0.3, warp=TorusBump(a=1.5, b=0.5))
        policy = CflTimeStep(fraction=0.4)
        traj = run_flow(state, FlowConfig(horizon, cadence=4 * policy(state), dt_policy=policy))
        maxima.append(v_evolution_residual(traj).max)
    reduction = maxima[0] / maxima[-1] if maxima[-1] > 0 else math.inf
    return CheckResult(
        name="v_evolution_residual_refinement",
        error=max(0.0, RESIDUAL_REDUCTION - reduction),
        tolerance=0.0,
        details={"resolutions": list(resolutions), "residuals": maxima, "reduction": reduction},
    )


def _random_profiles(count: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        a, b = rng.uniform(0.3, 1.5), rng.uniform(0.5, 2.0)
        c = rng.uniform(-0.5, 0.5)
        curve = ProfileCurve.from_graph(
            lambda r: a * np.tanh(b * r) + c * r**2 / (1 + r**2),
            r_max=float(rng.uniform(1.0, 3.0)),
            nodes=256,
            n=int(rng.integers(2, 4)),
        )
        s = np.concatenate([[0.0], np.cumsum(curve.segment_lengths())])
        yield curve, np.sin(np.pi * s / s[-1]) ** 2


def _guarded(name: str, fn: Callable[[], Union[CheckResult, List[CheckResult]]]):
    try:
        out = fn()
    except Exception as exc:
        logger.exception(f"Check {name} raised")
        return [CheckResult(name=name, error=math.nan, details={"exception": repr(exc)})]
    return out if isinstance(out, list) else [out]


class ConformanceSuite(JsonReporter):
    """
    Runs the oracle checks. The default suite is a fast subset; `catalog=True` adds more sample
    points, randomized states and profiles, and a finer residual study. `residual_levels`
    picks the residual resolutions independently of the catalog.
    """

    output_file_name = "verify.json"
    summary_exclude = ["provenance"]

    def __init__(
        self,
        *,
        catalog: bool = False,
        seed: int = 0,
        residual_levels: Optional[Sequence[int]] = None,
        **kwargs,
    ):
        super().__init__(**kwargs)
        self.catalog = catalog
        self.seed = seed
        if residual_levels is None:
            residual_levels = CATALOG_RESIDUAL_LEVELS if catalog else FAST_RESIDUAL_LEVELS
        if len(residual_levels) != 2 or not 0 < residual_levels[0] < residual_levels[1]:
            raise ValueError(f"residual levels must be two increasing sizes, got {residual_levels}")
        self.residual_levels = tuple(int(n) for n in residual_levels)

    def suites(self) -> Dict[str, Callable[[], Union[CheckResult, List[CheckResult]]]]:
        catalog, seed = self.catalog, self.seed
        points = 20 if catalog else 6
        pairs = CATALOG_PAIRS + (EXTRA_PAIRS if catalog else ())

        def riemann():
            out = []
            for base_conf, warp_conf in pairs:
                base, warp = build_pair(base_conf, warp_conf)
                out.append(fd_riemann_check(base, warp, default_sample_points(base, points, seed)))
            return out

        def mean_curvature():
            state = _parabola_state()
            (x,) = state.grid.coordinates()
            chi = np.exp(-(((x - math.pi) / 0.3) ** 2))
            out = [first_variation_check(state, chi, tolerance=1e-3)]
            if catalog:
                for state, chi in _random_smooth_states(20, seed):
                    out.append(first_variation_check(state, chi, tolerance=1e-3))
            return out

        def identities():
            levels = (32, 64, 128)
            errors = [
                laplacian_identity_check(_radial_state(n), boundary_rings=n // 4).error
                for n in levels
            ]
            return [
                gradient_identity_check(_torus_bump_state(64, 0.8, TorusBump(a=1.5, b=0.5))),
                laplacian_identity_check(_torus_bump_state(256, 0.2), tolerance=1e-4),
                order_check("laplacian_identity_order[hyperbolic-polar]", errors),
            ]

        def residual():
            return residual_refinement(self.residual_levels)

        def profiles():
            out = [
                metric_pullback_check(),
                chart_roundtrip_check(),
                generated_curvature_check(
                    ProfileCurve.geodesic_sphere(1.0, 201),
                    2.0 / math.tanh(1.0),
                    "geodesic_sphere_curvature",
                ),
                generated_curvature_check(
                    ProfileCurve.equidistant(0.5, 2.0, 201, toward_axis=True),
                    2.0 * math.tanh(0.5),
                    "equidistant_curvature",
                ),
            ]
            for curve, chi in _random_profiles(50 if catalog else 5, seed):
                out.append(profile_first_variation_check(curve, chi))
            return out

        return {
            "curvature": lambda: riemann() + [sectional_curvature_check()],
            "mean_curvature": mean_curvature,
            "identities": identities,
            "v_residual": residual,
            "profiles": profiles,
        }

    def __call__(self) -> Dict:
        results: Dict[str, List[Dict]] = {}
        passed = True
        for name, fn in self.suites().items():
            logger.info(f"Running conformance checks: {name}")
            checks = _guarded(name, fn)
            passed &= all(c.passed for c in checks)
            results[name] = [c.to_dict() for c in checks]
        report = {
            "catalog": self.catalog,
            "seed": self.seed,
            "residual_levels": list(self.residual_levels),
            "passed": passed,
            "checks": results,
            "provenance": run_provenance(),
        }
        self._process_results(report)
        return report


def run_verification(
    catalog: bool = False,
    output_dir: Optional[Union[str, Path]] = None,
    seed: int = 0,
    verbose: bool = True,
    residual_levels: Optional[Sequence[int]] = None,
) -> int:
    """Run the conformance suite and return the process exit code, 1 on any failed check."""
    report = ConformanceSuite(
        catalog=catalog,
        seed=seed,
        residual_levels=residual_levels,
        output_dir=output_dir,
        verbose=verbose,
    )()
    if not report["passed"]:
        failed = [c["name"] for cs in report["checks"].values() for c in cs if not c["passed"]]
        logger.error(f"Conformance failed: {failed}")
        return 1
    logger.info("All conformance checks passed")
    return 0
