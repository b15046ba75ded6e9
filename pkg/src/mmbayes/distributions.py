"""Distribution families used by the inference engine.

Five families only: beta, binomial, Dirichlet, multinomial, categorical.
Everything is evaluated in log space so large counts never overflow, and the
0 * log 0 = 0 convention applies in every pmf. Densities at measure-zero
boundary points return the limiting value (typically -inf) instead of
raising, so plotting and samplers never branch on domain edges.

Sampling goes through a single Marsaglia-Tsang gamma kernel (with the
standard u^(1/a) boost for shape < 1): a beta draw is two gamma draws, a
Dirichlet draw is a normalized gamma vector. Categorical sampling is
inverse-CDF on the cumulative weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import special
from .rng import RngState

__all__ = [
    "BetaParams",
    "DirichletParams",
    "CountVector",
    "as_simplex",
    "log_gamma",
    "log_beta_fn",
    "beta_log_pdf",
    "binomial_log_pmf",
    "dirichlet_log_pdf",
    "multinomial_log_pmf",
    "regularized_incomplete_beta",
    "beta_quantile",
    "standard_gamma",
    "sample_beta",
    "sample_dirichlet",
    "sample_categorical",
    "sample_multinomial",
]

log_gamma = special.log_gamma
log_beta_fn = special.log_beta_fn

_SIMPLEX_ATOL = 1e-12


@dataclass(frozen=True)
class BetaParams:
    """Beta hyperparameters: ``alpha`` pseudo-successes, ``beta`` pseudo-failures."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name, v in (("alpha", self.alpha), ("beta", self.beta)):
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"BetaParams.{name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class DirichletParams:
    """Dirichlet concentration vector over K >= 2 categories."""

    concentration: np.ndarray

    def __post_init__(self):
        conc = np.array(self.concentration, dtype=float)  # copy before freezing
        if conc.ndim != 1 or conc.size < 2:
            raise ValueError("DirichletParams needs a 1-D vector with K >= 2")
        if not np.all(np.isfinite(conc)) or np.any(conc <= 0):
            raise ValueError("Dirichlet concentrations must be finite and > 0")
        conc.flags.writeable = False
        object.__setattr__(self, "concentration", conc)

    @property
    def k(self) -> int:
        return self.concentration.size

    @property
    def total(self) -> float:
        return float(self.concentration.sum())


@dataclass(frozen=True)
class CountVector:
    """Per-category non-negative integer counts; ``total`` is their sum."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or counts.size < 1:
            raise ValueError("CountVector needs a 1-D vector of counts")
        if not np.issubdtype(counts.dtype, np.integer):
            as_int = counts.astype(np.int64)
            if not np.array_equal(as_int, counts):
                raise ValueError("counts must be integers")
            counts = as_int
        else:
            counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_successes(cls, y: int, n: int) -> "CountVector":
        """Two-category (success, failure) counts from y successes of n trials."""
        if y < 0 or n < 0 or y > n:
            raise ValueError("need 0 <= y <= n")
        return cls(np.array([y, n - y]))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def k(self) -> int:
        return self.counts.size


def as_simplex(weights) -> np.ndarray:
    """Validate a probability vector: non-negative, sums to 1 within 1e-12."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("simplex must be a 1-D vector")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("simplex weights must be non-negative and finite")
    if abs(float(w.sum()) - 1.0) > _SIMPLEX_ATOL:
        raise ValueError(f"simplex weights sum to {w.sum()!r}, not 1")
    return w


def _check_probability(theta: float) -> float:
    if not (0.0 <= theta <= 1.0):
        raise ValueError(f"probability must lie in [0, 1], got {theta!r}")
    return float(theta)


def _power_log_term(base: float, exponent: float) -> float:
    # limit of exponent * log(base) as base -> 0; 0 * log 0 == 0
    if base > 0.0:
        return exponent * math.log(base)
    if exponent > 0.0:
        return -math.inf
    if exponent == 0.0:
        return 0.0
    return math.inf


def beta_log_pdf(theta: float, p: BetaParams) -> float:
    """Log density of Beta(alpha, beta) at theta, normalized."""
    theta = _check_probability(theta)
    t1 = _power_log_term(theta, p.alpha - 1.0)
    t2 = _power_log_term(1.0 - theta, p.beta - 1.0)
    if math.isinf(t1) or math.isinf(t2):
        # +inf (integrable pole) dominates -inf at the opposite edge
        return math.inf if math.inf in (t1, t2) else -math.inf
    return t1 + t2 - log_beta_fn(p.alpha, p.beta)


def _count_log_term(count: int, prob: float) -> float:
    if count == 0:
        return 0.0
    if prob == 0.0:
        return -math.inf
    return count * math.log(prob)


def binomial_log_pmf(y: int, n: int, theta: float) -> float:
    """Log pmf of y successes in n trials at success probability theta."""
    if y < 0 or n < 0 or y > n:
        raise ValueError(f"need 0 <= y <= n, got y={y}, n={n}")
    theta = _check_probability(theta)
    if n == 0:
        return 0.0
    if y in (0, n):
        log_choose = 0.0  # C(n, 0) = C(n, n) = 1 exactly
    else:
        log_choose = log_gamma(n + 1.0) - log_gamma(y + 1.0) - log_gamma(n - y + 1.0)
    return log_choose + _count_log_term(y, theta) + _count_log_term(n - y, 1.0 - theta)


def dirichlet_log_pdf(x, p: DirichletParams) -> float:
    """Log density of Dirichlet(concentration) at a simplex point."""
    x = as_simplex(x)
    if x.size != p.k:
        raise ValueError(f"dimension mismatch: point has K={x.size}, params K={p.k}")
    terms = [_power_log_term(float(xi), float(ai) - 1.0)
             for xi, ai in zip(x, p.concentration)]
    if any(math.isinf(t) for t in terms):
        return math.inf if math.inf in terms else -math.inf
    return sum(terms) - special.log_multivariate_beta(p.concentration)


def multinomial_log_pmf(c: CountVector, x) -> float:
    """Log pmf of category counts c under category probabilities x."""
    x = as_simplex(x)
    if c.k != x.size:
        raise ValueError(f"dimension mismatch: counts K={c.k}, simplex K={x.size}")
    n = c.total
    if n == 0:
        return 0.0
    log_coeff = log_gamma(n + 1.0) - float(np.sum(log_gamma(c.counts + 1.0)))
    return log_coeff + sum(
        _count_log_term(int(ci), float(xi)) for ci, xi in zip(c.counts, x))


def regularized_incomplete_beta(theta: float, p: BetaParams) -> float:
    """CDF of Beta(alpha, beta) at theta."""
    return special.regularized_incomplete_beta(
        _check_probability(theta), p.alpha, p.beta)


def beta_quantile(q: float, p: BetaParams) -> float:
    """Quantile of Beta(alpha, beta) at level q; exact boundaries at q in {0, 1}."""
    return special.beta_quantile(q, p.alpha, p.beta)


def standard_gamma(shape, rng: RngState, size: int | None = None):
    """Gamma(shape, 1) draws via Marsaglia-Tsang squeeze rejection.

    ``shape`` may be a scalar or vector; with a vector, one draw per entry is
    returned. ``size`` applies only to scalar shape. Shapes below 1 use the
    Gamma(shape + 1) * U^(1/shape) boost.
    """
    a = np.asarray(shape, dtype=float)
    if np.any(a <= 0) or not np.all(np.isfinite(a)):
        raise ValueError("gamma shape must be finite and > 0")
    scalar = a.ndim == 0 and size is None
    if a.ndim == 0:
        a = np.full(size if size is not None else 1, float(a))
    small = a < 1.0
    d = np.where(small, a + 1.0, a) - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty_like(d)
    pending = np.ones(d.shape, dtype=bool)
    while pending.any():
        idx = np.nonzero(pending)[0]
        x = rng.normal(idx.size)
        step = 1.0 + c[idx] * x
        v = step * step * step
        u = rng.uniform(idx.size)
        ok = v > 0.0
        logv = np.log(np.where(ok, v, 1.0))
        accept = ok & (np.log(u) < 0.5 * x * x + d[idx] - d[idx] * v + d[idx] * logv)
        hit = idx[accept]
        out[hit] = d[hit] * v[accept]
        pending[hit] = False
    if small.any():
        boost = rng.uniform(int(small.sum())) ** (1.0 / a[small])
        out[small] *= boost
    return float(out[0]) if scalar else out


def sample_beta(p: BetaParams, rng: RngState, size: int | None = None):
    """Beta draw(s) as G(alpha) / (G(alpha) + G(beta))."""
    if size is None:
        g = standard_gamma(np.array([p.alpha, p.beta]), rng)
        return float(g[0] / (g[0] + g[1]))
    ga = standard_gamma(p.alpha, rng, size=size)
    gb = standard_gamma(p.beta, rng, size=size)
    return ga / (ga + gb)


def sample_dirichlet(p: DirichletParams, rng: RngState) -> np.ndarray:
    """One Dirichlet draw: normalized per-component gamma draws."""
    g = standard_gamma(p.concentration, rng)
    return g / g.sum()


def sample_categorical(x, rng: RngState, size: int | None = None):
    """Category index drawn by inverse CDF on the cumulative weights."""
    x = as_simplex(x)
    cum = np.cumsum(x)
    cum[-1] = 1.0
    if size is None:
        return int(np.searchsorted(cum, rng.uniform(), side="right"))
    return np.searchsorted(cum, rng.uniform(size), side="right").astype(np.int64)


def sample_multinomial(n: int, x, rng: RngState) -> CountVector:
    """Counts of n categorical draws from the simplex x."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = as_simplex(x)
    if n == 0:
        return CountVector(np.zeros(x.size, dtype=np.int64))
    idx = sample_categorical(x, rng, size=n)
    return CountVector(np.bincount(idx, minlength=x.size))
