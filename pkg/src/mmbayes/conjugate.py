"""Conjugate posterior updates and summaries.

Beta-binomial: Beta(a, b) prior plus (y successes, n - y failures) gives
Beta(a + y, b + n - y). Dirichlet-multinomial: concentration plus counts,
componentwise. Updates are pure parameter arithmetic; no density is ever
evaluated, so batch and sequential updating agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import (
    BetaParams,
    CountVector,
    DirichletParams,
    beta_log_pdf,
    beta_quantile,
)

__all__ = [
    "BetaPosterior",
    "PosteriorSummary",
    "update_beta_binomial",
    "update_dirichlet_multinomial",
    "summarize_beta",
    "density_grid",
    "hpd_interval",
]

DEFAULT_CREDIBLE_LEVEL = 0.95


@dataclass(frozen=True)
class BetaPosterior:
    """Posterior beta parameters plus the prior and data that produced them."""

    params: BetaParams
    prior: BetaParams
    data: CountVector


@dataclass(frozen=True)
class PosteriorSummary:
    """Moments and equal-tailed credible interval of a beta distribution.

    ``mode`` is None when either shape parameter is <= 1 (the density has no
    interior maximum); it is never clamped to a boundary value.
    """

    mean: float
    mode: float | None
    variance: float
    interval: tuple[float, float]
    level: float


def update_beta_binomial(prior: BetaParams, data: CountVector) -> BetaPosterior:
    """Conjugate update of a beta prior with (successes, failures) counts."""
    if data.k != 2:
        raise ValueError("beta-binomial data must have exactly two categories")
    y, failures = int(data.counts[0]), int(data.counts[1])
    post = BetaParams(prior.alpha + y, prior.beta + failures)
    return BetaPosterior(params=post, prior=prior, data=data)


def update_dirichlet_multinomial(
    prior: DirichletParams, data: CountVector
) -> DirichletParams:
    """Conjugate update of a Dirichlet prior with category counts."""
    if data.k != prior.k:
        raise ValueError(
            f"dimension mismatch: counts K={data.k}, prior K={prior.k}")
    return DirichletParams(prior.concentration + data.counts)


def summarize_beta(p: BetaParams, level: float = DEFAULT_CREDIBLE_LEVEL) -> PosteriorSummary:
    """Mean, mode, variance, and equal-tailed interval at the given level."""
    if not 0.0 < level < 1.0:
        raise ValueError("credible level must lie in (0, 1)")
    total = p.alpha + p.beta
    mean = p.alpha / total
    variance = (p.alpha * p.beta) / (total * total * (total + 1.0))
    if p.alpha > 1.0 and p.beta > 1.0:
        mode = (p.alpha - 1.0) / (total - 2.0)
    else:
        mode = None
    tail = (1.0 - level) / 2.0
    interval = (beta_quantile(tail, p), beta_quantile(1.0 - tail, p))
    return PosteriorSummary(mean=mean, mode=mode, variance=variance,
                            interval=interval, level=level)


def density_grid(p: BetaParams, points: int) -> list[tuple[float, float]]:
    """Beta density on the open grid theta_i = i / (points + 1), i = 1..points.

    Endpoints 0 and 1 are excluded so infinite log densities never reach
    plot files.
    """
    if points < 2:
        raise ValueError("need at least 2 grid points")
    step = 1.0 / (points + 1)
    return [(i * step, math.exp(beta_log_pdf(i * step, p)))
            for i in range(1, points + 1)]


def hpd_interval(p: BetaParams, level: float = DEFAULT_CREDIBLE_LEVEL) -> tuple[float, float]:
    """Highest-posterior-density interval by golden-section width search.

    Minimizes the width of [Q(u), Q(u + level)] over the lower tail mass
    u in [0, 1 - level]. For symmetric or uniform densities this coincides
    with the equal-tailed interval.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("credible level must lie in (0, 1)")

    def width(u: float) -> float:
        return beta_quantile(u + level, p) - beta_quantile(u, p)

    lo, hi = 0.0, 1.0 - level
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - phi * (hi - lo)
    x2 = lo + phi * (hi - lo)
    f1, f2 = width(x1), width(x2)
    for _ in range(200):
        if hi - lo < 1e-12:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi * (hi - lo)
            f1 = width(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi - lo)
            f2 = width(x2)
    u = 0.5 * (lo + hi)
    return (beta_quantile(u, p), beta_quantile(u + level, p))
