"""Two-source combination rules under Shafer's model.

Every accumulation goes through :func:`math.fsum`, which is exactly rounded
and therefore order independent; swapping the two sources yields
bit-identical results.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .belief import BBA
from .errors import FrameMismatchError, TotalConflictError
from .propositions import Proposition

DEMPSTER_GUARD = 1e-12
# PCR5 fractions whose denominator falls below this are discarded
PCR5_ZERO_DENOMINATOR = 1e-15


class Rule(str, enum.Enum):
    DEMPSTER = "dempster"
    PCR5 = "pcr5"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ConflictReport:
    """Total conflict k12 and its decomposition into partial conflicts.

    ``partial`` maps an unordered pair of disjoint focal elements (ordered by
    mask) to the summed product mass the two sources put on that pair.
    """

    total: float
    partial: Mapping[tuple[Proposition, Proposition], float]


def _same_frame(m1: BBA, m2: BBA) -> None:
    if m1.frame != m2.frame:
        raise FrameMismatchError(f"{m1.frame} vs {m2.frame}")


def _products(a: Mapping[int, float], b: Mapping[int, float]) -> dict[int, list[float]]:
    out: dict[int, list[float]] = {}
    for x, mx in a.items():
        for y, my in b.items():
            out.setdefault(x & y, []).append(mx * my)
    return out


def conjunctive(m1: BBA, m2: BBA) -> tuple[dict[Proposition, float], ConflictReport]:
    """Unnormalized conjunctive consensus, including the mass that lands on the empty set."""
    _same_frame(m1, m2)
    frame = m1.frame
    products = _products(m1.masses, m2.masses)
    combined = {Proposition(frame, k): math.fsum(v) for k, v in sorted(products.items())}
    combined.setdefault(frame.empty, 0.0)

    partial: dict[tuple[int, int], list[float]] = {}
    for x, mx in m1.masses.items():
        for y, my in m2.masses.items():
            if not x & y:
                partial.setdefault((min(x, y), max(x, y)), []).append(mx * my)
    report = ConflictReport(
        total=combined[frame.empty],
        partial={
            (Proposition(frame, x), Proposition(frame, y)): math.fsum(v)
            for (x, y), v in sorted(partial.items())
        },
    )
    return combined, report


def total_conflict(m1: BBA, m2: BBA) -> float:
    _same_frame(m1, m2)
    return math.fsum(
        mx * my for x, mx in m1.masses.items() for y, my in m2.masses.items() if not x & y
    )


def dempster(m1: BBA, m2: BBA) -> BBA:
    """Conjunctive consensus renormalized by 1 / (1 - k12).

    Raises :class:`TotalConflictError` when ``1 - k12`` is within 1e-12 of zero.
    """
    _same_frame(m1, m2)
    products = _products(m1.masses, m2.masses)
    conflict = math.fsum(products.pop(0, ()))
    kept = {k: math.fsum(v) for k, v in products.items()}
    if 1.0 - conflict <= DEMPSTER_GUARD or math.fsum(kept.values()) <= 0.0:
        raise TotalConflictError(conflict)
    return BBA._from_raw(m1.frame, kept)


def pcr5(m1: BBA, m2: BBA) -> BBA:
    """Proportional conflict redistribution, two-source form.

    Each partial conflict m1(X)m2(Y) with X and Y disjoint goes back to X and
    Y in proportion to m1(X) and m2(Y).  Defined for any conflict level.
    """
    _same_frame(m1, m2)
    a, b = m1.masses, m2.masses
    acc = _products(a, b)
    acc.pop(0, None)
    for x, mx in a.items():
        for y, my in b.items():
            if x & y:
                continue
            den = mx + my
            if den < PCR5_ZERO_DENOMINATOR:
                continue
            acc.setdefault(x, []).append(mx * mx * my / den)
            acc.setdefault(y, []).append(my * my * mx / den)
    return BBA._from_raw(m1.frame, {k: math.fsum(v) for k, v in acc.items()})


_RULES = {Rule.DEMPSTER: dempster, Rule.PCR5: pcr5}


def combine(rule: Rule | str, m1: BBA, m2: BBA) -> BBA:
    return _RULES[Rule(rule)](m1, m2)


def fold(rule: Rule | str, prior: BBA, stream: Iterable[BBA]) -> BBA:
    """Left fold of ``stream`` into ``prior`` in arrival order.

    A total-conflict failure is re-raised carrying the 1-based index of the
    observation that caused it.
    """
    fn = _RULES[Rule(rule)]
    current = prior
    for i, obs in enumerate(stream, 1):
        try:
            current = fn(current, obs)
        except TotalConflictError as exc:
            raise exc.at_step(i) from exc
    return current
