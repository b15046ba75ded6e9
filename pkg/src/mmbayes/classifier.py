"""Which factory did a bag come from?

Two known factories print different colour distributions; given count data
and the two profiles, the posterior over factories is a two-point Bayes
update. ``classify_blue`` uses only the blue count (the lesson's focal
statistic); ``classify_full`` uses all six colours. Lot codes printed on the
packaging (HKP / CLV) provide ground truth for verification.

Factory profiles ship as a data file, not constants: only the blue shares
are quotable figures, the rest is chart transcription, and production lines
can change. See ``data/factories.json`` and its provenance note.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .distributions import (
    CountVector,
    as_simplex,
    binomial_log_pmf,
    multinomial_log_pmf,
)
from .special import log_sum_exp

__all__ = [
    "COLOURS",
    "FactoryProfile",
    "FactoryPosterior",
    "LotCodeResult",
    "load_profiles",
    "default_profiles",
    "classify_blue",
    "classify_full",
    "parse_lot_code",
    "collapse_to_blue",
]

logger = logging.getLogger(__name__)

COLOURS = ("blue", "orange", "green", "yellow", "red", "brown")
BLUE = 0  # index of blue in the canonical colour order

_PROFILE_SUM_TOL = 1e-6


@dataclass(frozen=True)
class FactoryProfile:
    name: str
    lot_code: str
    colour_proportions: np.ndarray  # canonical colour order

    def __post_init__(self):
        if not self.name:
            raise ValueError("factory profile needs a name")
        if not self.lot_code:
            raise ValueError("factory profile needs a lot code")
        props = as_simplex(self.colour_proportions).copy()
        props.flags.writeable = False
        object.__setattr__(self, "colour_proportions", props)

    @property
    def blue(self) -> float:
        return float(self.colour_proportions[BLUE])


@dataclass(frozen=True)
class FactoryPosterior:
    names: tuple[str, ...]
    probs: np.ndarray
    log_bayes_factor: float  # first profile vs second, likelihoods only

    @property
    def best(self) -> str:
        return self.names[int(np.argmax(self.probs))]


@dataclass(frozen=True)
class LotCodeResult:
    factory: str | None
    reason: str | None = None

    @property
    def known(self) -> bool:
        return self.factory is not None


def _profile_from_record(record: dict, colours: list[str]) -> FactoryProfile:
    raw = record["proportions"]
    unknown = set(raw) - set(colours)
    if unknown:
        raise ValueError(f"unknown colours in profile {record.get('name')!r}: {sorted(unknown)}")
    missing = set(colours) - set(raw)
    if missing:
        raise ValueError(f"profile {record.get('name')!r} missing colours: {sorted(missing)}")
    props = np.array([float(raw[c]) for c in colours])
    total = props.sum()
    if abs(total - 1.0) > _PROFILE_SUM_TOL:
        raise ValueError(
            f"profile {record.get('name')!r} proportions sum to {total}, not 1")
    if total != 1.0:
        logger.warning(
            "renormalizing profile %r: proportions summed to %.9f",
            record.get("name"), total)
        props = props / total
    return FactoryProfile(record["name"], record["lot_code"], props)


def load_profiles(path: str | Path) -> list[FactoryProfile]:
    """Read factory profiles from a JSON config; validates and renormalizes."""
    config = json.loads(Path(path).read_text())
    colours = list(config.get("colours", COLOURS))
    if colours != list(COLOURS):
        raise ValueError(f"profile config colour order must be {list(COLOURS)}")
    return [_profile_from_record(r, colours) for r in config["profiles"]]


def default_profiles() -> list[FactoryProfile]:
    """The two shipped factory profiles (see data/factories.json)."""
    ref = resources.files("mmbayes").joinpath("data/factories.json")
    config = json.loads(ref.read_text())
    return [_profile_from_record(r, list(config["colours"])) for r in config["profiles"]]


def _posterior(log_liks: np.ndarray, names: tuple[str, ...], prior_probs) -> FactoryPosterior:
    prior = as_simplex(prior_probs)
    if prior.size != log_liks.size:
        raise ValueError("prior must have one weight per profile")
    with np.errstate(divide="ignore"):
        log_weights = np.log(prior) + log_liks
    log_norm = log_sum_exp(log_weights)
    probs = np.exp(log_weights - log_norm)
    probs /= probs.sum()
    return FactoryPosterior(
        names=names, probs=probs,
        log_bayes_factor=float(log_liks[0] - log_liks[1]))


def classify_blue(
    data: CountVector,
    profiles: list[FactoryProfile] | None = None,
    prior_probs=None,
) -> FactoryPosterior:
    """Posterior over factories from (blue, not-blue) counts.

    P(factory | y, n) is proportional to prior * Binomial(y; n, blue share),
    normalized in log space.
    """
    if data.k != 2:
        raise ValueError("classify_blue expects (blue, not-blue) counts; "
                         "use collapse_to_blue for six-colour tallies")
    profiles = default_profiles() if profiles is None else list(profiles)
    if len(profiles) != 2:
        raise ValueError("exactly two factory profiles are required")
    if prior_probs is None:
        prior_probs = np.full(len(profiles), 1.0 / len(profiles))
    y, n = int(data.counts[0]), data.total
    log_liks = np.array([binomial_log_pmf(y, n, p.blue) for p in profiles])
    return _posterior(log_liks, tuple(p.name for p in profiles), prior_probs)


def classify_full(
    data: CountVector,
    profiles: list[FactoryProfile] | None = None,
    prior_probs=None,
) -> FactoryPosterior:
    """Posterior over factories from the full six-colour tally."""
    profiles = default_profiles() if profiles is None else list(profiles)
    if len(profiles) != 2:
        raise ValueError("exactly two factory profiles are required")
    if data.k != len(COLOURS):
        raise ValueError(f"classify_full expects K={len(COLOURS)} colour counts")
    if prior_probs is None:
        prior_probs = np.full(len(profiles), 1.0 / len(profiles))
    log_liks = np.array([
        multinomial_log_pmf(data, p.colour_proportions) for p in profiles])
    return _posterior(log_liks, tuple(p.name for p in profiles), prior_probs)


def collapse_to_blue(data: CountVector) -> CountVector:
    """Six-colour tally down to (blue, everything else)."""
    if data.k != len(COLOURS):
        raise ValueError(f"expected K={len(COLOURS)} colour counts")
    blue = int(data.counts[BLUE])
    return CountVector.from_successes(blue, data.total)


def parse_lot_code(text: str, profiles: list[FactoryProfile] | None = None) -> LotCodeResult:
    """Map packaging text to a factory by its printed lot code.

    Case-insensitive substring scan; finding both codes, or neither, yields
    an unknown result with the reason attached (never an error).
    """
    codes = ({p.lot_code.upper(): p.name for p in profiles}
             if profiles is not None
             else {"HKP": "New Jersey", "CLV": "Tennessee"})
    haystack = (text or "").upper()
    hits = [(code, name) for code, name in codes.items() if code in haystack]
    if len(hits) == 1:
        return LotCodeResult(factory=hits[0][1])
    if not hits:
        return LotCodeResult(factory=None, reason="no lot code found")
    return LotCodeResult(
        factory=None,
        reason="multiple lot codes found: " + ", ".join(sorted(c for c, _ in hits)))
