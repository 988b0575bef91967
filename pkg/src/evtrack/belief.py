"""Basic belief assignments over the power set of a frame."""

from __future__ import annotations

import math
import sys
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .errors import FrameMismatchError, ValidationError
from .propositions import Frame, Proposition

# Masses below the smallest normal double are pruned.  A larger floor makes
# long Dempster runs absorbing: under a 0.95 classifier the ignorance mass
# falls below 1e-15 after a dozen consistent scans and can never recover.
MASS_FLOOR = sys.float_info.min
INPUT_TOLERANCE = 1e-6
_SUM_SLACK = 4 * sys.float_info.epsilon


def _normalized(masses: Mapping[int, float], floor: float = MASS_FLOOR) -> dict[int, float]:
    kept = {k: v for k, v in masses.items() if v >= floor}
    total = math.fsum(kept.values())
    if total <= 0.0:
        raise ValidationError("no mass left after pruning")
    if abs(total - 1.0) <= _SUM_SLACK:
        # already normalized to machine precision; keeps text round-trips exact
        return dict(sorted(kept.items()))
    return {k: v / total for k, v in sorted(kept.items())}


class BBA:
    """Normalized mass function; keys are non-empty propositions.

    Instances are immutable.  Masses are stored as a read-only mapping from
    bit-set masks to floats, sorted by mask, with ``m(empty) = 0`` implied.
    """

    __slots__ = ("frame", "_masses")

    def __init__(self, frame: Frame, masses: Mapping[int, float], *, _trusted: bool = False):
        if not _trusted:
            full = frame.full_mask
            for mask, value in masses.items():
                if not 0 < mask <= full:
                    raise ValidationError(f"invalid focal mask {mask:#b}")
                if not value >= 0.0 or math.isinf(value):
                    raise ValidationError(f"invalid mass {value!r} on {frame.mask_text(mask)}")
            masses = _normalized(masses)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "_masses", MappingProxyType(dict(masses)))

    def __setattr__(self, name, value):
        raise AttributeError("BBA is immutable")

    def __reduce__(self):
        return _restore, (self.frame, dict(self._masses))

    @classmethod
    def _from_raw(cls, frame: Frame, raw: Mapping[int, float]) -> "BBA":
        """Prune, renormalize and wrap an internally computed mass map."""
        return cls(frame, _normalized(raw), _trusted=True)

    @property
    def masses(self) -> Mapping[int, float]:
        return self._masses

    def focal_elements(self) -> list[Proposition]:
        return [Proposition(self.frame, k) for k in self._masses]

    def items(self) -> Iterator[tuple[Proposition, float]]:
        for k, v in self._masses.items():
            yield Proposition(self.frame, k), v

    def _mask(self, x: Proposition | str | int) -> int:
        if isinstance(x, Proposition):
            if x.frame != self.frame:
                raise FrameMismatchError(f"{x.frame} vs {self.frame}")
            return x.mask
        if isinstance(x, str):
            return self.frame.parse(x).mask
        return int(x)

    def __getitem__(self, x: Proposition | str | int) -> float:
        return self._masses.get(self._mask(x), 0.0)

    def __len__(self):
        return len(self._masses)

    def __eq__(self, other):
        if not isinstance(other, BBA):
            return NotImplemented
        return self.frame == other.frame and dict(self._masses) == dict(other._masses)

    def __hash__(self):
        return hash((self.frame, tuple(self._masses.items())))

    def isclose(self, other: "BBA", tol: float = 1e-12) -> bool:
        if self.frame != other.frame:
            return False
        keys = set(self._masses) | set(other._masses)
        return all(abs(self._masses.get(k, 0.0) - other._masses.get(k, 0.0)) <= tol for k in keys)

    def belief(self, x: Proposition | str) -> float:
        mask = self._mask(x)
        if not mask:
            return 0.0
        return math.fsum(v for k, v in self._masses.items() if k & ~mask == 0)

    def plausibility(self, x: Proposition | str) -> float:
        mask = self._mask(x)
        return math.fsum(v for k, v in self._masses.items() if k & mask)

    def singleton_beliefs(self) -> list[float]:
        """Bel of each singleton in frame order (equals its own mass)."""
        return [self._masses.get(1 << i, 0.0) for i in range(self.frame.size)]

    def pignistic(self) -> list[float]:
        """BetP over singletons: each focal mass split equally among its members."""
        shares: list[list[float]] = [[] for _ in range(self.frame.size)]
        for k, v in self._masses.items():
            share = v / bin(k).count("1")
            for i in range(self.frame.size):
                if k >> i & 1:
                    shares[i].append(share)
        return [math.fsum(s) for s in shares]

    def discount(self, alpha: float) -> "BBA":
        return discount(self, alpha)

    def to_text(self) -> str:
        return "".join(f"{self.frame.mask_text(k)}\t{v:.17g}\n" for k, v in self._masses.items())

    def __repr__(self):
        body = ", ".join(f"{self.frame.mask_text(k)}: {v:.6g}" for k, v in self._masses.items())
        return f"BBA({{{body}}})"


def make_bba(frame: Frame, assignments: Iterable[tuple[Proposition | str, float]]) -> BBA:
    """Validate user-supplied masses; duplicates are summed.

    The raw total must be within 1e-6 of one; the result is renormalized exactly.
    """
    acc: dict[int, list[float]] = {}
    for prop, mass in assignments:
        if isinstance(prop, str):
            prop = frame.parse(prop)
        elif prop.frame != frame:
            raise FrameMismatchError(f"{prop.frame} vs {frame}")
        if prop.is_empty:
            raise ValidationError("the empty set cannot carry mass")
        mass = float(mass)
        if not mass >= 0.0 or math.isinf(mass):
            raise ValidationError(f"invalid mass {mass!r} on {prop}")
        acc.setdefault(prop.mask, []).append(mass)
    raw = {k: math.fsum(v) for k, v in acc.items()}
    total = math.fsum(raw.values())
    if abs(total - 1.0) > INPUT_TOLERANCE:
        raise ValidationError(f"masses sum to {total!r}, expected 1")
    return BBA(frame, raw)


def vacuous(frame: Frame) -> BBA:
    return BBA(frame, {frame.full_mask: 1.0}, _trusted=True)


def belief(bba: BBA, x: Proposition | str) -> float:
    return bba.belief(x)


def plausibility(bba: BBA, x: Proposition | str) -> float:
    return bba.plausibility(x)


def pignistic(bba: BBA) -> list[float]:
    return bba.pignistic()


def discount(bba: BBA, alpha: float) -> BBA:
    """Shafer discounting with reliability ``alpha``; lost mass goes to total ignorance."""
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"reliability must lie in [0, 1], got {alpha!r}")
    full = bba.frame.full_mask
    out = {k: alpha * v for k, v in bba.masses.items() if k != full}
    out[full] = (1.0 - alpha) + alpha * bba.masses.get(full, 0.0)
    return BBA._from_raw(bba.frame, out)


def parse_bba(frame: Frame, text: str) -> BBA:
    """Inverse of :meth:`BBA.to_text`: ``proposition<TAB>mass`` per line."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            prop_text, mass_text = line.rsplit("\t", 1)
            pairs.append((frame.parse(prop_text), float(mass_text)))
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    return make_bba(frame, pairs)


def _restore(frame: Frame, masses: dict[int, float]) -> BBA:
    return BBA(frame, masses, _trusted=True)
