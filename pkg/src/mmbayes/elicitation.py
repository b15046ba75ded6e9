"""Turn verbal prior beliefs into beta hyperparameters.

Two mappings, both deterministic and seed-free:

* a location plus a pseudo-count of equivalent observations ("how many
  observations is your belief worth"), with the pseudo-count defined as
  alpha + beta so conjugate updating adds data counts one-for-one;
* two CDF constraints (q, theta), fitted by nested bisection over the
  (mean, pseudo-count) parameterization.
"""

from __future__ import annotations

import numpy as np

from .conjugate import density_grid
from .distributions import BetaParams
from .special import regularized_incomplete_beta

__all__ = [
    "QuantilePair",
    "NonConvergentFit",
    "fit_beta_from_mean_ess",
    "fit_beta_from_quantiles",
    "preview",
]

RESIDUAL_TARGET = 1e-8

# type alias; a pair is (cumulative probability q, threshold theta)
QuantilePair = tuple[float, float]


class NonConvergentFit(Exception):
    """No beta distribution matched the quantile constraints closely enough.

    Carries the best parameters found and their max CDF residual.
    """

    def __init__(self, best_params: BetaParams, residual: float):
        self.best_params = best_params
        self.residual = residual
        super().__init__(
            f"quantile fit did not converge: best residual {residual:.3g} "
            f"at Beta({best_params.alpha:.6g}, {best_params.beta:.6g})")


def fit_beta_from_mean_ess(mean: float, ess: float) -> BetaParams:
    """Beta(mean * ess, (1 - mean) * ess); ess is the prior pseudo-count alpha + beta."""
    if not 0.0 < mean < 1.0:
        raise ValueError("prior mean must lie strictly inside (0, 1)")
    if not ess > 0.0:
        raise ValueError("prior pseudo-count must be positive")
    return BetaParams(mean * ess, (1.0 - mean) * ess)


def _cdf(t: float, mean: float, ess: float) -> float:
    return regularized_incomplete_beta(t, mean * ess, (1.0 - mean) * ess)


def _solve_ess(mean: float, t: float, q: float, deep: bool = True) -> float:
    """Best ess matching F(t) = q at fixed mean, by log-space bisection."""
    grid = np.geomspace(1e-3, 1e8, 34)
    vals = [_cdf(t, mean, s) - q for s in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            return float(grid[i])
        if vals[i] * vals[i + 1] < 0.0:
            bracket = (grid[i], grid[i + 1])
            break
    if bracket is None:
        # no sign change: return the grid point with the smallest residual;
        # the caller's final residual check decides whether this is fatal
        return float(grid[int(np.argmin(np.abs(vals)))])
    lo, hi = bracket
    f_lo = _cdf(t, mean, lo) - q
    max_iter = 120 if deep else 48
    for _ in range(max_iter):
        mid = np.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = _cdf(t, mean, mid) - q
        if abs(f_mid) < 1e-14:
            return float(mid)
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return float(np.sqrt(lo * hi))


def fit_beta_from_quantiles(pairs: list[QuantilePair]) -> BetaParams:
    """Fit a beta to two (q, theta) CDF constraints by nested bisection.

    Outer bisection runs on the mean, the inner solve pins the pseudo-count
    to the first constraint, and the outer residual is taken on the second.
    Raises NonConvergentFit (carrying the best parameters and residual) when
    no beta meets the constraints within 1e-6; identical inputs always give
    bit-identical outputs.
    """
    if len(pairs) != 2:
        raise ValueError("exactly two (q, theta) pairs are required")
    (q1, t1), (q2, t2) = sorted(pairs, key=lambda p: p[1])
    for q, t in ((q1, t1), (q2, t2)):
        if not (0.0 < q < 1.0 and 0.0 < t < 1.0):
            raise ValueError("quantile pairs must lie strictly inside (0, 1)")
    if not (t1 < t2 and q1 < q2):
        raise ValueError(
            "quantile pairs must be strictly increasing in both coordinates "
            "(a CDF cannot decrease)")

    def outer_residual(mean: float, deep: bool = True) -> float:
        ess = _solve_ess(mean, t1, q1, deep=deep)
        return _cdf(t2, mean, ess) - q2

    means = np.linspace(1e-4, 1.0 - 1e-4, 121)
    vals = [outer_residual(float(m), deep=False) for m in means]
    bracket = None
    for i in range(len(means) - 1):
        if vals[i] * vals[i + 1] <= 0.0:
            bracket = (float(means[i]), float(means[i + 1]))
            break
    if bracket is None:
        best_i = int(np.argmin(np.abs(vals)))
        mean = float(means[best_i])
    else:
        lo, hi = bracket
        f_lo = outer_residual(lo)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            f_mid = outer_residual(mid)
            if abs(f_mid) < 1e-14:
                lo = hi = mid
                break
            if (f_mid < 0.0) == (f_lo < 0.0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        mean = 0.5 * (lo + hi)

    ess = _solve_ess(mean, t1, q1)
    params = BetaParams(mean * ess, (1.0 - mean) * ess)
    residual = max(abs(_cdf(t1, mean, ess) - q1), abs(_cdf(t2, mean, ess) - q2))
    if residual > 1e-6:
        raise NonConvergentFit(params, residual)
    return params


def preview(params: BetaParams, points: int = 512) -> list[tuple[float, float]]:
    """Density grid for interactive prior plotting; same layout as density_grid."""
    return density_grid(params, points)
