from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Dict
from typing import Optional

import numpy as np
from loguru import logger

from warpflow.geometry.ambient import covariant_curvature_norm
from warpflow.geometry.ambient import ricci_norm
from warpflow.geometry.base import BaseManifold
from warpflow.geometry.comparison import comparison_fn
from warpflow.geometry.grid import Chart
from warpflow.geometry.grid import Grid
from warpflow.geometry.warp import WarpFactor

DIVERGENCE_TOLERANCE = 0.1


@dataclass(frozen=True)
class EstimateConstants:
    """
    Constants of the gradient and curvature estimates, all sampled on the simulation grid.

    eta      sup |grad phi| / phi
    mu1, mu2 extreme eigenvalues of hess(phi) / phi
    mu       lower bound of the base sectional curvature
    nu       (-n mu1 + mu2)/(n - 1) - mu, zero for curves
    delta    psi(v) = v^2 / (1 - delta v^2) parameter, 0 < delta <= 1/2
    K, C     constants of the stationary ceiling of psi(v)|A|^2
    """

    n: int
    horizon: float
    v0_sup: float
    compact: bool
    eta: float
    mu1: float
    mu2: float
    mu: float
    nu: float
    eps_nu: float
    delta: float
    delta_case: str
    ricci_sup: float
    nabla_rm_sup: float
    K: float
    C: float
    alpha0: float
    sec_max: float = 0.0
    unbounded_suspected: bool = False
    offsets: Dict[str, float] = field(default_factory=dict)

    def psi(self, v: np.ndarray) -> np.ndarray:
        return v**2 / (1.0 - self.delta * v**2)

    def gradient_growth_exponent(self) -> float:
        if self.compact:
            return (self.n - 1) * self.nu
        return 2 * self.eta**2 + (self.n - 1) * self.eps_nu

    def gradient_bound(self, t: float) -> float:
        return self.v0_sup * math.exp(self.gradient_growth_exponent() * t)

    def frakg_ceiling(self, frakg0_max: float) -> float:
        return max(frakg0_max, (self.K + self.C) / (2 * self.delta), 1.0)

    @property
    def pinching(self) -> Dict[str, bool]:
        """Hypotheses of the convergence statements: 0 > -mu1 > sec >= (-n mu1 + mu2)/(n-1)."""
        return {
            "hessian_positive": self.mu1 > 0,
            "hessian_dominates_sectional": -self.mu1 > self.sec_max,
            "nu_nonpositive": self.nu <= 0,
        }

    def with_offsets(self, **offsets: float) -> "EstimateConstants":
        """Shift named constants, e.g. `nu=-1.0`, leaving the others untouched."""
        changes = {k: getattr(self, k) + float(v) for k, v in offsets.items()}
        merged = {**self.offsets, **{k: float(v) for k, v in offsets.items()}}
        return dataclasses.replace(self, offsets=merged, **changes)

    def to_dict(self) -> Dict[str, Any]:
        out = dataclasses.asdict(self)
        out["pinching"] = self.pinching
        return out


def _hessian_quotient_extremes(hess: np.ndarray, phi: np.ndarray):
    n = hess.shape[0]
    q = hess / phi
    if n == 1:
        return float(q.min()), float(q.max())
    q = np.moveaxis(q.reshape(n, n, -1), -1, 0)
    eig = np.linalg.eigvalsh(0.5 * (q + np.swapaxes(q, -1, -2)))
    return float(eig[:, 0].min()), float(eig[:, -1].max())


def _warp_extremes(base: BaseManifold, warp: WarpFactor, coords, mask=None):
    phi = warp.checked_value(base, *coords)
    grad = warp.gradient(base, *coords)
    hess = warp.hessian(base, *coords)
    if mask is not None:
        phi, grad, hess = phi[mask], grad[..., mask], hess[..., mask]
    eta = float(np.max(np.sqrt(np.sum(grad**2, axis=0)) / phi))
    mu1, mu2 = _hessian_quotient_extremes(hess, phi)
    return eta, mu1, mu2


def estimate_constants(
    base: BaseManifold,
    warp: WarpFactor,
    grid: Grid,
    v0_sup: float,
    horizon: float,
    *,
    v0_bounded: bool = True,
    gamma: float = 0.5,
) -> EstimateConstants:
    """Sample every constant of the estimates over the grid nodes."""
    if v0_sup < 1:
        raise ValueError(f"v0_sup must be >= 1, got {v0_sup}")
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    n = base.dimension
    coords = grid.coordinates()
    eta, mu1, mu2 = _warp_extremes(base, warp, coords)
    mu = float(base.sectional_lower_bound(grid)) if n > 1 else 0.0
    sec_max = float(np.max(base.gauss_curvature(*coords))) if n > 1 else 0.0

    # the bracket of the v-evolution reduces to -|grad phi|^2/phi^2 for curves
    nu = (-n * mu1 + mu2) / (n - 1) - mu if n > 1 else 0.0
    eps_nu = max(nu, 0.0)

    if base.compact:
        delta_case = "compact"
        delta = 1.0 / (2 * v0_sup**2 * math.exp(2 * (n - 1) * nu * horizon))
    else:
        rate = 2 * (2 * eta**2 + (n - 1) * eps_nu) * horizon
        if v0_bounded:
            delta_case = "noncompact-bounded"
            delta = 1.0 / (2 * v0_sup**2 * math.exp(rate))
        else:
            delta_case = "noncompact-unbounded"
            delta = (1 - gamma) ** 4 / (2 * v0_sup**2 * math.exp(rate))
    delta = min(delta, 0.5)

    ricci_sup = float(np.max(ricci_norm(base, warp, grid)))
    nabla_rm_sup = float(np.max(covariant_curvature_norm(base, warp, grid)))
    K = 4 * eta**2 / delta + 4 * (1 - 2 * delta) * eps_nu + (2 + 8 * n) * ricci_sup
    C = 4 / math.sqrt(delta) * nabla_rm_sup
    alpha0 = (1 - delta) * max(K + C, 1.0) / (2 * delta)

    unbounded = False
    if grid.chart == Chart.polar:
        inner = base.distance_to_pole(*coords) <= 0.75 * grid.radius
        inner_extremes = _warp_extremes(base, warp, coords, mask=inner)
        for name, full, part in zip(("eta", "mu1", "mu2"), (eta, mu1, mu2), inner_extremes):
            change = abs(full - part) / max(abs(full), 1e-12)
            if change > DIVERGENCE_TOLERANCE:
                unbounded = True
                logger.warning(
                    f"{name} changes by {change:.1%} between 3/4 of the disc and the full disc; "
                    f"the sampled constant may not exist on the whole base"
                )

    constants = EstimateConstants(
        n=n,
        horizon=float(horizon),
        v0_sup=float(v0_sup),
        compact=bool(base.compact),
        eta=eta,
        mu1=mu1,
        mu2=mu2,
        mu=mu,
        nu=nu,
        eps_nu=eps_nu,
        delta=delta,
        delta_case=delta_case,
        ricci_sup=ricci_sup,
        nabla_rm_sup=nabla_rm_sup,
        K=K,
        C=C,
        alpha0=alpha0,
        sec_max=sec_max,
        unbounded_suspected=unbounded,
    )
    logger.info(
        f"Estimate constants: eta={eta:.4g}, mu1={mu1:.4g}, mu2={mu2:.4g}, mu={mu:.4g}, "
        f"nu={nu:.4g}, delta={delta:.4g} ({delta_case}), K={K:.4g}, C={C:.4g}"
    )
    return constants


def truncation_radius(
    mu: float,
    eta: float,
    n: int,
    horizon: float,
    rho0: float,
    gamma: float = 0.5,
    m: int = 0,
) -> Optional[Dict[str, float]]:
    """
    Radius of the exhaustion disc guaranteeing that the ball of radius rho0 stays inside the
    region where the interior estimates hold up to time T. Returns None for mu >= 0.

    c_mu(rho_{2+m}) e^{-beta n T} = c_mu(rho0) with beta = -mu (1 + eta / n) and the cascade
    gamma c_mu(rho_i) = c_mu(rho_{i+1}).
    """
    if mu >= 0:
        return None
    beta = -mu * (1 + eta / n)
    _, c0 = comparison_fn(mu, rho0)
    c_inner = c0 * math.exp(beta * n * horizon)
    c_outer = c_inner / gamma ** (2 + m)
    scale = math.sqrt(-mu)
    return {
        "beta": beta,
        "rho_inner": math.acosh(c_inner) / scale,
        "rho": math.acosh(c_outer) / scale,
    }
