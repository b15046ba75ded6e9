"""Two-factory mixture model over bags of colour counts.

Generative model: mixture weights theta ~ Dirichlet(alpha); per-factory
colour distributions beta_f ~ Dirichlet(eta) with eta shared across
factories; each bag's latent factory z_b ~ Categorical(theta); the bag's
counts c_b ~ Multinomial(n_b, beta_{z_b}) with the bag size n_b observed.

Inference is blocked Gibbs over (z, theta, beta) using the conjugate full
conditionals:

* z_b given the rest: categorical with log weights
  ln theta_f + sum_k c_bk ln beta_fk (the multinomial coefficient cancels),
  normalized by log-sum-exp;
* theta given z: Dirichlet(alpha + assignment counts);
* beta_f given z: Dirichlet(eta + pooled counts of factory f); a factory
  with no assigned bags draws from its prior, which is the exact
  conditional.

Mixture labels are not identifiable (the priors are label-symmetric), so
every recorded state is relabeled canonically by descending blue share
beta_f[0]. For F = 2 and small B, ``exact_posterior`` integrates theta and
beta out analytically and enumerates all 2^B assignments, yielding the
exact law of the same relabeled quantities the Gibbs summary estimates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import chain_kernel, sweep_kernel
from .distributions import CountVector, DirichletParams
from .rng import RngState
from .special import log_gamma, prob_beta_greater

__all__ = [
    "HierarchicalPriors",
    "BagTally",
    "MixtureState",
    "ChainConfig",
    "ChainOutput",
    "MixturePosteriorSummary",
    "ChainDiagnostic",
    "simulate_bags",
    "gibbs_step",
    "run_chain",
    "summarize_chain",
    "exact_posterior",
    "diagnostics",
    "canonical_relabel",
]

EXACT_ENUMERATION_MAX_BAGS = 12
BLUE = 0  # canonical colour order puts blue first


@dataclass(frozen=True)
class HierarchicalPriors:
    """Dirichlet hyperparameters: alpha over factories, eta over colours."""

    alpha: DirichletParams
    eta: DirichletParams

    @property
    def n_factories(self) -> int:
        return self.alpha.k

    @property
    def n_colours(self) -> int:
        return self.eta.k


@dataclass(frozen=True)
class BagTally:
    """One bag's per-colour counts plus identity metadata."""

    bag_id: str
    counts: CountVector
    lot_code: str | None = None


@dataclass
class MixtureState:
    """One Gibbs state: assignments z, mixture weights theta, colour dists beta."""

    z: np.ndarray       # (B,) factory indices
    theta: np.ndarray   # (F,)
    beta: np.ndarray    # (F, K)


@dataclass(frozen=True)
class ChainConfig:
    seed: int
    iterations: int = 10_000
    burn_in: int = 2_000
    thin: int = 1

    def __post_init__(self):
        if self.burn_in < 0 or self.iterations <= self.burn_in:
            raise ValueError("need iterations > burn_in >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")

    @property
    def n_recorded(self) -> int:
        return (self.iterations - self.burn_in) // self.thin


@dataclass
class ChainOutput:
    states: list[MixtureState]
    seed: int
    burn_in: int
    thin: int
    total_iterations: int


@dataclass
class MixturePosteriorSummary:
    assignment_probs: np.ndarray  # (B, F), rows sum to 1
    theta_mean: np.ndarray        # (F,)
    beta_means: np.ndarray        # (F, K)


@dataclass(frozen=True)
class ChainDiagnostic:
    effective_sample_size: float
    split_r_hat: float


def _counts_matrix(bags: list[BagTally], n_colours: int) -> np.ndarray:
    if not bags:
        return np.zeros((0, n_colours), dtype=np.int64)
    mat = np.stack([bag.counts.counts for bag in bags])
    if mat.shape[1] != n_colours:
        raise ValueError(
            f"bags have K={mat.shape[1]} colours, priors expect K={n_colours}")
    return mat


def _require_analysis_bags(bags: list[BagTally]) -> None:
    for bag in bags:
        if bag.counts.total < 1:
            raise ValueError(f"bag {bag.bag_id!r} is empty; analysis needs total >= 1")
    ids = [b.bag_id for b in bags]
    if len(set(ids)) != len(ids):
        raise ValueError("bag ids must be unique")


def simulate_bags(
    theta,
    beta,
    bag_sizes: list[int],
    rng: RngState,
) -> tuple[list[BagTally], np.ndarray]:
    """Draw bags from known mixture parameters; returns tallies and true z."""
    from .distributions import as_simplex, sample_categorical, sample_multinomial

    theta = as_simplex(theta)
    beta = np.asarray(beta, dtype=float)
    if beta.ndim != 2 or beta.shape[0] != theta.size:
        raise ValueError("beta must be an (F, K) matrix matching theta")
    for row in beta:
        as_simplex(row)
    width = max(2, len(str(len(bag_sizes))))
    bags = []
    true_z = np.empty(len(bag_sizes), dtype=np.int64)
    for i, size in enumerate(bag_sizes):
        if size < 0:
            raise ValueError("bag sizes must be non-negative")
        f = sample_categorical(theta, rng)
        counts = sample_multinomial(int(size), beta[f], rng)
        true_z[i] = f
        bags.append(BagTally(bag_id=f"bag-{i + 1:0{width}d}", counts=counts))
    return bags, true_z


def _conditional_assignment_probs(
    counts: np.ndarray, theta: np.ndarray, beta: np.ndarray
) -> np.ndarray:
    # (B, F) row-normalized; multinomial coefficients cancel across factories
    with np.errstate(divide="ignore"):
        logw = counts @ np.log(beta).T + np.log(theta)[None, :]
    logw -= logw.max(axis=1, keepdims=True)
    w = np.exp(logw)
    return w / w.sum(axis=1, keepdims=True)


def gibbs_step(
    state: MixtureState,
    bags: list[BagTally],
    priors: HierarchicalPriors,
    rng: RngState,
) -> MixtureState:
    """One full conditional sweep: z, then theta, then beta."""
    counts = _counts_matrix(bags, priors.n_colours).astype(np.float64)
    z, theta, beta = sweep_kernel(
        rng.generator, counts,
        np.ascontiguousarray(state.theta, dtype=np.float64),
        np.ascontiguousarray(state.beta, dtype=np.float64),
        priors.alpha.concentration, priors.eta.concentration)
    return MixtureState(z=z, theta=theta, beta=beta)


def canonical_relabel(state: MixtureState) -> MixtureState:
    """Permute factory labels so blue shares beta_f[0] are non-increasing.

    Idempotent; breaks the label symmetry of the mixture posterior so that
    chain summaries are meaningful.
    """
    order = np.argsort(-state.beta[:, BLUE], kind="stable")
    inverse = np.empty_like(order)
    inverse[order] = np.arange(order.size)
    return MixtureState(
        z=inverse[state.z] if state.z.size else state.z,
        theta=state.theta[order],
        beta=state.beta[order],
    )


def run_chain(
    bags: list[BagTally],
    priors: HierarchicalPriors,
    config: ChainConfig,
) -> ChainOutput:
    """Run the Gibbs sampler; every recorded state is canonically relabeled.

    Initialization draws theta and each beta_f from their priors; z is then
    produced by the first conditional sweep.
    """
    _require_analysis_bags(bags)
    counts = _counts_matrix(bags, priors.n_colours).astype(np.float64)
    rng = RngState(config.seed)
    z_rec, theta_rec, beta_rec = chain_kernel(
        rng.generator, counts,
        priors.alpha.concentration, priors.eta.concentration,
        config.iterations, config.burn_in, config.thin)
    # canonical relabeling, vectorized over all recorded states
    perm = np.argsort(-beta_rec[:, :, BLUE], axis=1, kind="stable")
    inverse = np.argsort(perm, axis=1, kind="stable")
    theta_rec = np.take_along_axis(theta_rec, perm, axis=1)
    beta_rec = np.take_along_axis(beta_rec, perm[:, :, None], axis=1)
    if counts.shape[0]:
        z_rec = np.take_along_axis(inverse, z_rec, axis=1)
    states = [
        MixtureState(z=z_rec[i], theta=theta_rec[i], beta=beta_rec[i])
        for i in range(theta_rec.shape[0])
    ]
    return ChainOutput(
        states=states, seed=config.seed, burn_in=config.burn_in,
        thin=config.thin, total_iterations=config.iterations)


def summarize_chain(chain: ChainOutput) -> MixturePosteriorSummary:
    """Empirical assignment frequencies and parameter means over the chain."""
    if not chain.states:
        raise ValueError("cannot summarize an empty chain")
    first = chain.states[0]
    n_factories = first.theta.size
    n_bags = first.z.size
    m = len(chain.states)
    theta_mean = np.stack([s.theta for s in chain.states]).mean(axis=0)
    beta_means = np.stack([s.beta for s in chain.states]).mean(axis=0)
    assign = np.zeros((n_bags, n_factories))
    if n_bags:
        z_all = np.stack([s.z for s in chain.states])      # (M, B)
        for f in range(n_factories):
            assign[:, f] = (z_all == f).mean(axis=0)
    return MixturePosteriorSummary(
        assignment_probs=assign, theta_mean=theta_mean, beta_means=beta_means)


def _log_dirichlet_multinomial_terms(conc: np.ndarray, pooled: np.ndarray) -> np.ndarray:
    # log B(conc + pooled) for each row of pooled, dropping z-constant terms
    # is not safe here: the row totals differ, so keep the full normalizer.
    totals = pooled.sum(axis=1) + conc.sum()
    return log_gamma(conc[None, :] + pooled).sum(axis=1) - log_gamma(totals)


def exact_posterior(
    bags: list[BagTally],
    priors: HierarchicalPriors,
    relabel: bool = True,
) -> MixturePosteriorSummary:
    """Exact posterior summary for F = 2 by enumerating all 2^B assignments.

    Integrating theta and the beta_f out of the joint analytically leaves a
    Dirichlet-multinomial marginal weight per assignment vector, normalized
    by log-sum-exp over the enumeration.

    With ``relabel`` (the default) the summary is the exact law of the
    blue-share-relabeled quantities that ``summarize_chain`` reports, which
    is what the Gibbs output must be compared against; the beta-ordering
    probabilities it needs are exact finite sums for integer counts. With
    ``relabel=False`` the raw label-symmetric posterior is returned instead
    (under symmetric priors every assignment probability is then 1/2 by
    exchangeability).
    """
    if priors.n_factories != 2:
        raise ValueError("exact enumeration is implemented for exactly 2 factories")
    n_bags = len(bags)
    if n_bags > EXACT_ENUMERATION_MAX_BAGS:
        raise ValueError(
            f"exact enumeration is limited to B <= {EXACT_ENUMERATION_MAX_BAGS} "
            f"bags (2^B assignments); got B={n_bags}")
    _require_analysis_bags(bags)
    counts = _counts_matrix(bags, priors.n_colours)
    alpha = priors.alpha.concentration
    eta = priors.eta.concentration
    n_colours = eta.size

    # all assignments as a (2^B, B) 0/1 matrix; column b is bag b's factory
    if n_bags:
        masks = np.array(list(itertools.product((0, 1), repeat=n_bags)), dtype=np.int64)
    else:
        masks = np.zeros((1, 0), dtype=np.int64)
    pooled_1 = masks @ counts                       # (M, K)
    pooled_0 = counts.sum(axis=0)[None, :] - pooled_1
    m_1 = masks.sum(axis=1)
    m_0 = n_bags - m_1

    log_w = (
        log_gamma(alpha[0] + m_0) + log_gamma(alpha[1] + m_1)
        + _log_dirichlet_multinomial_terms(eta, pooled_0)
        + _log_dirichlet_multinomial_terms(eta, pooled_1)
    )
    log_w -= log_w.max()
    w = np.exp(log_w)
    w /= w.sum()

    # per-assignment conditional means
    denom_theta = alpha.sum() + n_bags
    theta_1 = (alpha[1] + m_1) / denom_theta        # (M,)
    theta_0 = (alpha[0] + m_0) / denom_theta
    s_0 = eta.sum() + pooled_0.sum(axis=1)          # (M,)
    s_1 = eta.sum() + pooled_1.sum(axis=1)
    ebeta_0 = (eta[None, :] + pooled_0) / s_0[:, None]   # (M, K)
    ebeta_1 = (eta[None, :] + pooled_1) / s_1[:, None]

    if not relabel:
        assign = np.zeros((n_bags, 2))
        if n_bags:
            assign[:, 1] = masks.T @ w
            assign[:, 0] = 1.0 - assign[:, 1]
        return MixturePosteriorSummary(
            assignment_probs=assign,
            theta_mean=np.array([w @ theta_0, w @ theta_1]),
            beta_means=np.stack([w @ ebeta_0, w @ ebeta_1]),
        )

    # Relabeled law: within an assignment, the blue shares X = beta_0[blue]
    # and Y = beta_1[blue] are independent Beta variables (Dirichlet
    # aggregation), so ordering probabilities and the conditional moments
    # below are exact.
    a_0 = eta[BLUE] + pooled_0[:, BLUE]
    a_1 = eta[BLUE] + pooled_1[:, BLUE]
    assign = np.zeros((n_bags, 2))
    theta_mean = np.zeros(2)
    beta_means = np.zeros((2, n_colours))
    for i in range(masks.shape[0]):
        wi = w[i]
        if wi == 0.0:
            continue
        ax, bx = float(a_0[i]), float(s_0[i] - a_0[i])
        ay, by = float(a_1[i]), float(s_1[i] - a_1[i])
        p_xy = prob_beta_greater(ax, bx, ay, by)      # P(X > Y)
        p_yx = 1.0 - p_xy
        mean_x = ax / (ax + bx)
        mean_y = ay / (ay + by)
        # E[X 1{X>Y}] = E[X] P(X' > Y) with X' ~ Beta(ax+1, bx)
        ex_gt = mean_x * prob_beta_greater(ax + 1.0, bx, ay, by)
        ey_gt = mean_y * prob_beta_greater(ay + 1.0, by, ax, bx)
        if n_bags:
            in_1 = masks[i].astype(float)
            # bag lands in slot 1 iff its factory has the larger blue share
            assign[:, 0] += wi * ((1.0 - in_1) * p_xy + in_1 * p_yx)
        theta_mean[0] += wi * (theta_0[i] * p_xy + theta_1[i] * p_yx)
        theta_mean[1] += wi * (theta_0[i] * p_yx + theta_1[i] * p_xy)
        # blue component of the relabeled colour distributions
        blue_hi = ex_gt + ey_gt
        blue_lo = (mean_x - ex_gt) + (mean_y - ey_gt)
        beta_means[0, BLUE] += wi * blue_hi
        beta_means[1, BLUE] += wi * blue_lo
        # non-blue components: conditional on the blue share, the rest of a
        # Dirichlet splits proportionally, so E[beta_k 1{order}] factorizes
        rest_x = np.delete(eta + pooled_0[i], BLUE) / bx
        rest_y = np.delete(eta + pooled_1[i], BLUE) / by
        one_minus_x_gt = p_xy - ex_gt                 # E[(1-X) 1{X>Y}]
        one_minus_y_gt = p_yx - ey_gt
        one_minus_x_lt = (1.0 - mean_x) - one_minus_x_gt
        one_minus_y_lt = (1.0 - mean_y) - one_minus_y_gt
        hi_rest = rest_x * one_minus_x_gt + rest_y * one_minus_y_gt
        lo_rest = rest_x * one_minus_x_lt + rest_y * one_minus_y_lt
        not_blue = np.arange(n_colours) != BLUE
        beta_means[0, not_blue] += wi * hi_rest
        beta_means[1, not_blue] += wi * lo_rest
    if n_bags:
        assign[:, 1] = 1.0 - assign[:, 0]
    return MixturePosteriorSummary(
        assignment_probs=assign, theta_mean=theta_mean, beta_means=beta_means)


def _ess_initial_positive(x: np.ndarray) -> float:
    n = x.size
    if x.max() == x.min():
        return math.nan  # degenerate stream: variance undefined for our purposes
    x = x - x.mean()
    acov0 = float(np.dot(x, x)) / n
    if acov0 == 0.0:
        return math.nan
    # FFT autocovariances, then Geyer's initial positive sequence of pair sums
    size = 1
    while size < 2 * n:
        size <<= 1
    f = np.fft.rfft(x, size)
    acov = np.fft.irfft(f * np.conjugate(f), size)[:n].real / n
    rho = acov / acov[0]
    tau = -1.0
    for m in range(0, n // 2):
        pair = rho[2 * m] + (rho[2 * m + 1] if 2 * m + 1 < n else 0.0)
        if pair <= 0.0:
            break
        tau += 2.0 * pair
    tau = max(tau, 1e-12)
    return n / tau


def _split_r_hat(x: np.ndarray) -> float:
    if x.max() == x.min():
        return math.nan  # undefined-variance sentinel for a constant stream
    half = x.size // 2
    first, second = x[:half], x[half:2 * half]
    within = 0.5 * (first.var(ddof=1) + second.var(ddof=1))
    if within == 0.0:
        return math.nan
    means = np.array([first.mean(), second.mean()])
    between = half * means.var(ddof=1)
    var_plus = (half - 1) / half * within + between / half
    return math.sqrt(var_plus / within)


def diagnostics(chain: ChainOutput) -> dict[str, ChainDiagnostic]:
    """Classic per-scalar ESS and split R-hat for every theta and beta entry."""
    if len(chain.states) < 4:
        raise ValueError("diagnostics need a chain of at least 4 recorded states")
    first = chain.states[0]
    out: dict[str, ChainDiagnostic] = {}
    theta_draws = np.stack([s.theta for s in chain.states])
    beta_draws = np.stack([s.beta for s in chain.states])
    for f in range(first.theta.size):
        x = theta_draws[:, f]
        out[f"theta[{f}]"] = ChainDiagnostic(_ess_initial_positive(x), _split_r_hat(x))
    for f in range(first.beta.shape[0]):
        for k in range(first.beta.shape[1]):
            x = beta_draws[:, f, k]
            out[f"beta[{f}][{k}]"] = ChainDiagnostic(
                _ess_initial_positive(x), _split_r_hat(x))
    return out
