"""Classroom-run state, event-sourced.

A session moves through: create, set prior (repeatable), lock prior, add
bags, reveal. Bags can only be added once the prior is locked, which is the
whole point pedagogically: beliefs are committed before data is seen.

Every transition appends one JSON line to ``<session-id>.events.jsonl``
(fsync on write); replaying a file reconstructs the session exactly.
Per-session writes are serialized by a lock, so transitions are atomic at
session granularity.

Bag counts come in two shapes: the full six-colour tally, or a blue-only
(blue, total) pair stored as blue/other. Pooled posteriors only ever need
blue and total, so both shapes pool together.
"""

from __future__ import annotations

import csv
import io
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .classifier import COLOURS, FactoryProfile, classify_blue, parse_lot_code
from .conjugate import BetaPosterior, PosteriorSummary, density_grid, summarize_beta, update_beta_binomial
from .distributions import BetaParams, CountVector

__all__ = [
    "Session",
    "SessionBag",
    "SessionEvent",
    "SessionError",
    "SessionNotFound",
    "RuleViolation",
    "SessionStore",
    "PosteriorView",
    "RevealReport",
    "posterior_view",
    "reveal_report",
    "parse_tally_csv",
    "export_csv",
]

FULL_HEADER = ["bag_id", "blue", "orange", "green", "yellow", "red", "brown"]
BLUE_ONLY_HEADER = ["bag_id", "blue", "total"]


class SessionError(Exception):
    code = "error"

    def __init__(self, message: str, rule: str | None = None):
        super().__init__(message)
        self.rule = rule


class SessionNotFound(SessionError):
    code = "not_found"


class RuleViolation(SessionError):
    """A state transition violated a session invariant; ``rule`` names it."""

    code = "conflict"


@dataclass
class SessionBag:
    bag_id: str
    counts: dict[str, int]
    lot_code: str | None = None

    @property
    def blue(self) -> int:
        return int(self.counts.get("blue", 0))

    @property
    def total(self) -> int:
        return int(sum(self.counts.values()))


@dataclass
class SessionEvent:
    sequence: int
    kind: str
    payload: dict
    at: str

    def to_json(self) -> str:
        return json.dumps(
            {"sequence": self.sequence, "kind": self.kind,
             "payload": self.payload, "at": self.at},
            separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "SessionEvent":
        raw = json.loads(line)
        return cls(sequence=raw["sequence"], kind=raw["kind"],
                   payload=raw["payload"], at=raw["at"])


@dataclass
class Session:
    id: str
    created_at: str
    prior: BetaParams | None = None
    prior_locked: bool = False
    bags: list[SessionBag] = field(default_factory=list)
    revealed: bool = False
    sequence: int = 0  # last applied event sequence

    def bag_ids(self) -> set[str]:
        return {bag.bag_id for bag in self.bags}

    def pooled(self) -> tuple[int, int]:
        """Class-level (blue, total) over all bags."""
        return (sum(b.blue for b in self.bags), sum(b.total for b in self.bags))


def _apply(session: Session | None, event: SessionEvent) -> Session:
    if event.kind == "created":
        session = Session(id=event.payload["id"], created_at=event.at)
    elif session is None:
        raise ValueError("event log does not start with a created event")
    elif event.kind == "prior_set":
        session.prior = BetaParams(event.payload["alpha"], event.payload["beta"])
    elif event.kind == "prior_locked":
        session.prior_locked = True
    elif event.kind == "bag_added":
        session.bags.append(SessionBag(
            bag_id=event.payload["bag_id"],
            counts={k: int(v) for k, v in event.payload["counts"].items()},
            lot_code=event.payload.get("lot_code")))
    elif event.kind == "revealed":
        session.revealed = True
    else:
        raise ValueError(f"unknown event kind {event.kind!r}")
    session.sequence = event.sequence
    return session


def replay(events: list[SessionEvent]) -> Session:
    """Rebuild a session from its ordered event list."""
    session: Session | None = None
    for expected, event in enumerate(events):
        if event.sequence != expected:
            raise ValueError(
                f"event log has a gap: expected sequence {expected}, "
                f"got {event.sequence}")
        session = _apply(session, event)
    if session is None:
        raise ValueError("empty event log")
    return session


def normalize_counts(
    counts: dict[str, int] | None = None,
    blue: int | None = None,
    total: int | None = None,
) -> dict[str, int]:
    """Validate bag counts into the canonical six-colour or blue/other shape."""
    if counts is not None and (blue is not None or total is not None):
        raise ValueError("give either a counts map or (blue, total), not both")
    if counts is not None:
        keys = set(counts)
        if keys == set(COLOURS):
            order = COLOURS
        elif keys == {"blue", "other"}:
            order = ("blue", "other")
        elif keys == {"blue", "total"}:
            return normalize_counts(blue=counts["blue"], total=counts["total"])
        else:
            raise ValueError(
                f"counts must cover {list(COLOURS)} or be a blue-only pair; "
                f"got {sorted(keys)}")
        out = {}
        for key in order:
            value = counts[key]
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"count {key!r} must be a non-negative integer")
            out[key] = value
        return out
    if blue is None or total is None:
        raise ValueError("need either a counts map or both blue and total")
    if not isinstance(blue, int) or not isinstance(total, int):
        raise ValueError("blue and total must be integers")
    if blue < 0 or total < 0 or blue > total:
        raise ValueError("need 0 <= blue <= total")
    return {"blue": blue, "other": total - blue}


class SessionStore:
    """All live sessions plus their append-only event logs on disk."""

    def __init__(self, data_dir: str | Path, fsync: bool = True):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._fsync = fsync
        self._sessions: dict[str, Session] = {}
        self._events: dict[str, list[SessionEvent]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._load_existing()

    def _load_existing(self) -> None:
        for path in sorted(self.data_dir.glob("*.events.jsonl")):
            events = [SessionEvent.from_json(line)
                      for line in path.read_text().splitlines() if line.strip()]
            if not events:
                continue
            session = replay(events)
            self._sessions[session.id] = session
            self._events[session.id] = events
            self._locks[session.id] = threading.Lock()

    def _log_path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.events.jsonl"

    def _append(self, session_id: str, kind: str, payload: dict) -> SessionEvent:
        events = self._events[session_id]
        event = SessionEvent(
            sequence=len(events), kind=kind, payload=payload,
            at=datetime.now(timezone.utc).isoformat())
        with open(self._log_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(event.to_json() + "\n")
            fh.flush()
            if self._fsync:
                os.fsync(fh.fileno())
        events.append(event)
        return event

    def _transition(self, session_id: str, kind: str, payload: dict) -> Session:
        session = self._sessions[session_id]
        event = self._append(session_id, kind, payload)
        return _apply(session, event)

    def ids(self) -> list[str]:
        return sorted(self._sessions)

    def lock_for(self, session_id: str) -> threading.Lock:
        if session_id not in self._locks:
            raise SessionNotFound(f"no session {session_id!r}")
        return self._locks[session_id]

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionNotFound(f"no session {session_id!r}") from None

    def events(self, session_id: str) -> list[SessionEvent]:
        self.get(session_id)
        return list(self._events[session_id])

    def create_session(self) -> Session:
        session_id = uuid.uuid4().hex[:12]
        with self._registry_lock:
            self._sessions[session_id] = None  # type: ignore[assignment]
            self._events[session_id] = []
            self._locks[session_id] = threading.Lock()
        with self._locks[session_id]:
            event = self._append(session_id, "created", {"id": session_id})
            session = _apply(None, event)
            self._sessions[session_id] = session
        return session

    def set_prior(self, session_id: str, params: BetaParams) -> Session:
        with self.lock_for(session_id):
            session = self.get(session_id)
            if session.prior_locked:
                raise RuleViolation(
                    "the prior is locked and can no longer change",
                    rule="prior_locked")
            return self._transition(
                session_id, "prior_set",
                {"alpha": params.alpha, "beta": params.beta})

    def lock_prior(self, session_id: str) -> Session:
        with self.lock_for(session_id):
            session = self.get(session_id)
            if session.prior is None:
                raise RuleViolation(
                    "set a prior before locking it", rule="prior_not_set")
            if session.prior_locked:
                raise RuleViolation(
                    "the prior is already locked", rule="already_locked")
            return self._transition(session_id, "prior_locked", {})

    def add_bag(
        self,
        session_id: str,
        bag_id: str,
        counts: dict[str, int],
        lot_code: str | None = None,
    ) -> Session:
        counts = normalize_counts(counts)
        if not bag_id:
            raise ValueError("bag_id must be non-empty")
        with self.lock_for(session_id):
            session = self.get(session_id)
            if not session.prior_locked:
                raise RuleViolation(
                    "bags can only be added after the prior is locked",
                    rule="prior_not_locked")
            if bag_id in session.bag_ids():
                raise RuleViolation(
                    f"bag id {bag_id!r} was already submitted",
                    rule="duplicate_bag_id")
            if sum(counts.values()) < 1:
                raise RuleViolation(
                    "a bag must contain at least one candy",
                    rule="bag_total_positive")
            return self._transition(
                session_id, "bag_added",
                {"bag_id": bag_id, "counts": counts, "lot_code": lot_code})

    def reveal(self, session_id: str) -> Session:
        """Mark the session revealed; idempotent so clients can re-fetch."""
        with self.lock_for(session_id):
            session = self.get(session_id)
            if not session.bags:
                raise RuleViolation(
                    "nothing to reveal before any bag is submitted",
                    rule="no_bags")
            if session.revealed:
                return session
            return self._transition(session_id, "revealed", {})

    def replay_from_disk(self, session_id: str) -> Session:
        """Re-read the event log and rebuild the session from scratch."""
        path = self._log_path(session_id)
        if not path.exists():
            raise SessionNotFound(f"no event log for {session_id!r}")
        events = [SessionEvent.from_json(line)
                  for line in path.read_text().splitlines() if line.strip()]
        return replay(events)


@dataclass
class PosteriorView:
    scope: str
    prior: BetaParams
    posterior: BetaPosterior
    summary: PosteriorSummary
    grid: list[tuple[float, float]]


def posterior_view(
    session: Session,
    scope: str = "class",
    level: float = 0.95,
    grid_points: int = 512,
) -> PosteriorView:
    """Pooled (scope="class") or per-bag posterior against the session prior.

    A session with no matching data returns the prior itself as posterior.
    Read-only: never mutates session state.
    """
    if session.prior is None:
        raise RuleViolation("the session has no prior yet", rule="prior_not_set")
    if scope == "class":
        blue, total = session.pooled()
    else:
        match = [b for b in session.bags if b.bag_id == scope]
        if not match:
            raise SessionNotFound(f"no bag {scope!r} in session {session.id}")
        blue, total = match[0].blue, match[0].total
    posterior = update_beta_binomial(
        session.prior, CountVector.from_successes(blue, total))
    return PosteriorView(
        scope=scope,
        prior=session.prior,
        posterior=posterior,
        summary=summarize_beta(posterior.params, level),
        grid=density_grid(posterior.params, grid_points))


@dataclass
class RevealReport:
    factory_names: tuple[str, ...]
    probabilities: list[float]
    log_bayes_factor: float
    pooled_blue: int
    pooled_total: int
    lot_codes: list[dict]


def reveal_report(
    session: Session, profiles: list[FactoryProfile] | None = None
) -> RevealReport:
    """Factory classification of the pooled counts plus per-bag lot checks."""
    blue, total = session.pooled()
    result = classify_blue(CountVector.from_successes(blue, total), profiles)
    lots = []
    for bag in session.bags:
        parsed = parse_lot_code(bag.lot_code or "", profiles)
        lots.append({
            "bag_id": bag.bag_id,
            "lot_code": bag.lot_code,
            "factory": parsed.factory,
            "reason": parsed.reason,
        })
    return RevealReport(
        factory_names=result.names,
        probabilities=[float(p) for p in result.probs],
        log_bayes_factor=result.log_bayes_factor,
        pooled_blue=blue,
        pooled_total=total,
        lot_codes=lots)


def parse_tally_csv(text: str) -> list[tuple[str, dict[str, int]]]:
    """Parse a tally CSV into (bag_id, counts) rows.

    Accepts the full header ``bag_id,blue,orange,green,yellow,red,brown`` or
    the permissive blue-only header ``bag_id,blue,total``. Any other column
    set is rejected by name; there is no totals column in the full format
    (totals are derived).
    """
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames
    if header is None:
        raise ValueError("empty CSV: no header row")
    header = [h.strip() for h in header]
    if header == FULL_HEADER:
        colour_keys = FULL_HEADER[1:]
        blue_only = False
    elif header == BLUE_ONLY_HEADER:
        colour_keys = BLUE_ONLY_HEADER[1:]
        blue_only = True
    else:
        unknown = [h for h in header if h not in FULL_HEADER + BLUE_ONLY_HEADER]
        raise ValueError(
            f"unrecognized CSV header {header}; expected {FULL_HEADER} or "
            f"{BLUE_ONLY_HEADER}" + (f" (unknown columns: {unknown})" if unknown else ""))
    rows = []
    for line_no, row in enumerate(reader, start=2):
        bag_id = (row.get("bag_id") or "").strip()
        if not bag_id:
            raise ValueError(f"line {line_no}: missing bag_id")
        try:
            values = {k: int(row[k]) for k in colour_keys}
        except (TypeError, ValueError):
            raise ValueError(f"line {line_no}: counts must be integers") from None
        if blue_only:
            counts = normalize_counts(blue=values["blue"], total=values["total"])
        else:
            counts = normalize_counts(values)
        rows.append((bag_id, counts))
    return rows


def export_csv(session: Session) -> str:
    """Canonical CSV of the session's bags.

    Six-colour format when every bag carries full counts, otherwise the
    blue-only format (which is always derivable).
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if session.bags and all(set(b.counts) == set(COLOURS) for b in session.bags):
        writer.writerow(FULL_HEADER)
        for bag in session.bags:
            writer.writerow([bag.bag_id] + [bag.counts[c] for c in COLOURS])
    else:
        writer.writerow(BLUE_ONLY_HEADER)
        for bag in session.bags:
            writer.writerow([bag.bag_id, bag.blue, bag.total])
    return out.getvalue()
