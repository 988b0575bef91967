"""Sequential target type tracker.

Each scan the classifier's declared type becomes a simple-support bba (the
confusion matrix diagonal on the declared singleton, the rest on total
ignorance), which is fused into the running prior.  The decision is the
singleton with maximal belief or pignistic probability.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Sequence

from .belief import BBA, vacuous
from .errors import FrameMismatchError, SequencingError, TotalConflictError, ValidationError
from .fusion import Rule, combine
from .propositions import Frame

ROW_TOLERANCE = 1e-9

C1_ROWS = ((0.95, 0.05), (0.05, 0.95))
C2_ROWS = ((0.75, 0.25), (0.25, 0.75))


class Criterion(str, enum.Enum):
    MAX_BELIEF = "belief"
    MAX_PIGNISTIC = "pignistic"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ConfusionMatrix:
    """Row-stochastic matrix; ``rows[i][j]`` = P(declared j | true i)."""

    frame: Frame
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        m = self.frame.size
        if len(rows) != m or any(len(r) != m for r in rows):
            raise ValidationError(f"confusion matrix must be {m}x{m}")
        for i, row in enumerate(rows):
            if any(not 0.0 <= v <= 1.0 for v in row):
                raise ValidationError(f"row {i + 1}: entries must lie in [0, 1]")
            total = math.fsum(row)
            if abs(total - 1.0) > ROW_TOLERANCE:
                raise ValidationError(f"row {i + 1} sums to {total!r}, expected 1")

    @cached_property
    def observations(self) -> tuple[BBA, ...]:
        return tuple(_simple_support(self.frame, i, self.rows[i][i]) for i in range(self.frame.size))

    def diagonal(self, i: int) -> float:
        return self.rows[i][i]


def classifier_c1(frame: Frame) -> ConfusionMatrix:
    """Good classifier (0.95 on the diagonal)."""
    return ConfusionMatrix(frame, C1_ROWS)


def classifier_c2(frame: Frame) -> ConfusionMatrix:
    """Poor classifier (0.75 on the diagonal)."""
    return ConfusionMatrix(frame, C2_ROWS)


@dataclass(frozen=True)
class Declaration:
    k: int
    index: int


@dataclass(frozen=True)
class TrackerState:
    frame: Frame
    rule: Rule
    prior: BBA
    criterion: Criterion = Criterion.MAX_BELIEF
    last_decision: int | None = None
    k: int = 0


@dataclass(frozen=True)
class TraceRecord:
    """One scan of tracker output: masses are singletons in frame order then total ignorance."""

    k: int
    declared: int
    rule: Rule
    masses: tuple[float, ...]
    beliefs: tuple[float, ...]
    decision: int


def _simple_support(frame: Frame, index: int, mass: float) -> BBA:
    if not 0.0 <= mass <= 1.0:
        raise ValidationError(f"diagonal value {mass!r} outside [0, 1]")
    raw: dict[int, float] = {}
    single = 1 << index
    if mass > 0.0:
        raw[single] = mass
    if mass < 1.0:
        raw[frame.full_mask] = raw.get(frame.full_mask, 0.0) + (1.0 - mass)
    return BBA._from_raw(frame, raw)


def init_tracker(frame: Frame, rule: Rule | str, criterion: Criterion | str = Criterion.MAX_BELIEF) -> TrackerState:
    return TrackerState(frame, Rule(rule), vacuous(frame), Criterion(criterion))


def observation_bba(decl: Declaration, cm: ConfusionMatrix) -> BBA:
    if not 0 <= decl.index < cm.frame.size:
        raise ValidationError(f"declared index {decl.index} outside frame")
    return cm.observations[decl.index]


def decide(bba: BBA, criterion: Criterion | str = Criterion.MAX_BELIEF, previous: int | None = None) -> int:
    """Index of the best singleton; exact ties keep ``previous``, else the lowest index."""
    if Criterion(criterion) is Criterion.MAX_BELIEF:
        scores = bba.singleton_beliefs()
    else:
        scores = bba.pignistic()
    best = max(scores)
    if previous is not None and scores[previous] == best:
        return previous
    return scores.index(best)


def step(state: TrackerState, decl: Declaration, cm: ConfusionMatrix) -> tuple[TrackerState, int, BBA]:
    if decl.k != state.k + 1:
        raise SequencingError(f"expected scan {state.k + 1}, got {decl.k}")
    if cm.frame != state.frame:
        raise FrameMismatchError(f"{cm.frame} vs {state.frame}")
    obs = observation_bba(decl, cm)
    try:
        posterior = combine(state.rule, state.prior, obs)
    except TotalConflictError as exc:
        raise exc.at_step(decl.k) from exc
    decision = decide(posterior, state.criterion, state.last_decision)
    new_state = replace(state, prior=posterior, last_decision=decision, k=decl.k)
    return new_state, decision, posterior


def trace_record(decl: Declaration, rule: Rule, posterior: BBA, decision: int) -> TraceRecord:
    frame = posterior.frame
    masses = tuple(posterior.singleton_beliefs()) + (posterior[frame.full_mask],)
    return TraceRecord(decl.k, decl.index, rule, masses, tuple(posterior.singleton_beliefs()), decision)


def track(
    frame: Frame,
    rule: Rule | str,
    declarations: Sequence[int],
    cm: ConfusionMatrix,
    criterion: Criterion | str = Criterion.MAX_BELIEF,
) -> list[TraceRecord]:
    """Run the tracker over a declaration sequence (scans numbered from 1)."""
    state = init_tracker(frame, rule, criterion)
    out = []
    for k, idx in enumerate(declarations, 1):
        decl = Declaration(k, idx)
        state, decision, posterior = step(state, decl, cm)
        out.append(trace_record(decl, state.rule, posterior, decision))
    return out
