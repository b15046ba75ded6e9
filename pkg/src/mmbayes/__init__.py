"""Bayesian inference for candy colour counts.

Library layers: exact special functions and the five distribution families
(``distributions``), conjugate updating and summaries (``conjugate``), prior
elicitation (``elicitation``), the two-factory mixture model with a Gibbs
sampler and an exact enumeration oracle (``hierarchical``), factory
classification with lot-code verification (``classifier``), event-sourced
classroom sessions (``session``) behind a local HTTP API (``service``), and
the ``mmbayes`` CLI.
"""

__version__ = "0.1.0"

from .conjugate import (
    BetaPosterior,
    PosteriorSummary,
    density_grid,
    summarize_beta,
    update_beta_binomial,
    update_dirichlet_multinomial,
)
from .distributions import BetaParams, CountVector, DirichletParams
from .rng import RngState

__all__ = [
    "__version__",
    "BetaParams",
    "BetaPosterior",
    "CountVector",
    "DirichletParams",
    "PosteriorSummary",
    "RngState",
    "density_grid",
    "summarize_beta",
    "update_beta_binomial",
    "update_dirichlet_multinomial",
]
