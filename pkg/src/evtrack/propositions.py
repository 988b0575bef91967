"""Frames of discernment and the power-set proposition algebra.

A :class:`Proposition` is a subset of the frame stored as an integer bit-set
over singleton indices, so union and intersection are ``|`` and ``&`` on ints.
Text form joins labels with ``"|"`` (e.g. ``"Fighter|Cargo"``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import FrameMismatchError, ValidationError

EMPTY_TEXT = "∅"
UNION = "|"
MEET = "&"


@dataclass(frozen=True)
class Frame:
    """Ordered, exhaustive, exclusive set of singleton labels."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValidationError("frame needs at least one label")
        seen = set()
        for label in labels:
            if not isinstance(label, str) or not label.strip():
                raise ValidationError(f"blank or non-string label: {label!r}")
            if label != label.strip() or any(c in label for c in (UNION, MEET, "(", ")")):
                raise ValidationError(f"label contains reserved characters: {label!r}")
            if label in seen:
                raise ValidationError(f"duplicate label: {label!r}")
            seen.add(label)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown label {label!r} for frame {self.labels}") from None

    def singleton(self, i: int | str) -> Proposition:
        if isinstance(i, str):
            i = self.index(i)
        if not 0 <= i < self.size:
            raise ValidationError(f"singleton index {i} out of range for M={self.size}")
        return Proposition(self, 1 << i)

    def singletons(self) -> list[Proposition]:
        return [Proposition(self, 1 << i) for i in range(self.size)]

    @property
    def total(self) -> Proposition:
        """Total ignorance, the union of every singleton."""
        return Proposition(self, self.full_mask)

    @property
    def empty(self) -> Proposition:
        return Proposition(self, 0)

    def proposition(self, members: Iterable[int | str]) -> Proposition:
        mask = 0
        for m in members:
            mask |= self.singleton(m).mask
        return Proposition(self, mask)

    def parse(self, text: str) -> Proposition:
        """Parse ``"A|B"`` style text into a proposition."""
        text = text.strip()
        if text in (EMPTY_TEXT, "{}"):
            return self.empty
        if not text:
            raise ValidationError("empty proposition text")
        return self.proposition(part.strip() for part in text.split(UNION))

    def power_set(self, include_empty: bool = False) -> list[Proposition]:
        start = 0 if include_empty else 1
        return [Proposition(self, mask) for mask in range(start, self.full_mask + 1)]

    def mask_text(self, mask: int) -> str:
        if not mask:
            return EMPTY_TEXT
        return UNION.join(label for i, label in enumerate(self.labels) if mask >> i & 1)

    def __str__(self):
        return "{" + ", ".join(self.labels) + "}"


def make_frame(labels: Sequence[str]) -> Frame:
    return Frame(tuple(labels))


@dataclass(frozen=True)
class Proposition:
    """A subset of a frame under Shafer's model."""

    frame: Frame
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= self.frame.full_mask:
            raise ValidationError(f"mask {self.mask:#b} outside frame of size {self.frame.size}")

    def _check(self, other: Proposition) -> None:
        if not isinstance(other, Proposition):
            raise TypeError(f"expected Proposition, got {type(other).__name__}")
        if other.frame != self.frame:
            raise FrameMismatchError(f"{self.frame} vs {other.frame}")

    def __and__(self, other: Proposition) -> Proposition:
        self._check(other)
        return Proposition(self.frame, self.mask & other.mask)

    def __or__(self, other: Proposition) -> Proposition:
        self._check(other)
        return Proposition(self.frame, self.mask | other.mask)

    def __invert__(self) -> Proposition:
        return Proposition(self.frame, self.frame.full_mask & ~self.mask)

    def __le__(self, other: Proposition) -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other: Proposition) -> bool:
        return self <= other and self.mask != other.mask

    intersection = __and__
    union = __or__
    complement = __invert__
    issubset = __le__

    def isdisjoint(self, other: Proposition) -> bool:
        return (self & other).mask == 0

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def is_singleton(self) -> bool:
        return self.mask != 0 and self.mask & (self.mask - 1) == 0

    @property
    def is_total(self) -> bool:
        return self.mask == self.frame.full_mask

    @property
    def cardinality(self) -> int:
        return bin(self.mask).count("1")

    def __len__(self):
        return self.cardinality

    def members(self) -> Iterator[int]:
        mask, i = self.mask, 0
        while mask:
            if mask & 1:
                yield i
            mask >>= 1
            i += 1

    def labels(self) -> tuple[str, ...]:
        return tuple(self.frame.labels[i] for i in self.members())

    def __str__(self):
        return self.frame.mask_text(self.mask)

    def __repr__(self):
        return f"Proposition({self})"
