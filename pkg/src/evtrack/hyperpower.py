"""Hyper-power set (Dedekind lattice) elements for small frames.

An element is a union of intersection-terms.  Each term is a bit-set of
singleton indices read as the intersection of those singletons; the element
is stored as the minimal antichain of its terms, which is unique, so
structural equality is semantic equality.  A term ``t`` absorbs every term
that is a superset of ``t`` (``A | A&B == A``).

Exclusivity constraints are pairs of singleton indices whose intersection is
empty.  With none (the free model) every meet of singletons is a distinct
non-empty element; with all pairs the lattice collapses to the power set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .errors import CapacityError, FrameMismatchError, ValidationError
from .propositions import EMPTY_TEXT, MEET, UNION, Frame

MAX_HYPER_FRAME = 4


def _check_capacity(frame: Frame) -> None:
    if frame.size > MAX_HYPER_FRAME:
        raise CapacityError(
            f"hyper-power set supported for at most {MAX_HYPER_FRAME} singletons, got {frame.size}"
        )


def _pair_masks(frame: Frame, exclusive: Iterable) -> frozenset[int]:
    masks = set()
    for pair in exclusive:
        if isinstance(pair, int):
            if bin(pair).count("1") != 2 or pair & ~frame.full_mask:
                raise ValidationError(f"bad exclusivity mask {pair:#b}")
            masks.add(pair)
            continue
        a, b = pair
        ia = frame.index(a) if isinstance(a, str) else a
        ib = frame.index(b) if isinstance(b, str) else b
        if ia == ib or not (0 <= ia < frame.size and 0 <= ib < frame.size):
            raise ValidationError(f"bad exclusivity pair {pair!r}")
        masks.add((1 << ia) | (1 << ib))
    return frozenset(masks)


def shafer_constraints(frame: Frame) -> frozenset[int]:
    """Every pair of singletons exclusive."""
    return frozenset((1 << i) | (1 << j) for i, j in combinations(range(frame.size), 2))


def canonical_terms(terms: Iterable[int], exclusive: frozenset[int] = frozenset()) -> frozenset[int]:
    """Reduce a DNF term set to its minimal antichain, dropping contradictory terms."""
    live = {t for t in terms if t and not any(t & p == p for p in exclusive)}
    ordered = sorted(live, key=lambda t: (bin(t).count("1"), t))
    kept: list[int] = []
    for t in ordered:
        if not any(k & ~t == 0 for k in kept):
            kept.append(t)
    return frozenset(kept)


@dataclass(frozen=True)
class HyperProposition:
    """Element of D^Theta in canonical union-of-intersections form."""

    frame: Frame
    terms: frozenset[int]
    exclusive: frozenset[int] = field(default=frozenset())

    def __post_init__(self):
        _check_capacity(self.frame)
        full = self.frame.full_mask
        if any(t & ~full for t in self.terms):
            raise ValidationError("term references singleton outside frame")
        object.__setattr__(self, "terms", canonical_terms(self.terms, self.exclusive))

    @classmethod
    def singleton(cls, frame: Frame, i: int | str, exclusive: frozenset[int] = frozenset()):
        return cls(frame, frozenset([frame.singleton(i).mask]), exclusive)

    @classmethod
    def empty(cls, frame: Frame, exclusive: frozenset[int] = frozenset()):
        return cls(frame, frozenset(), exclusive)

    def _check(self, other: HyperProposition) -> None:
        if self.frame != other.frame:
            raise FrameMismatchError(f"{self.frame} vs {other.frame}")
        if self.exclusive != other.exclusive:
            raise FrameMismatchError("operands use different exclusivity constraints")

    def __or__(self, other: HyperProposition) -> HyperProposition:
        self._check(other)
        return HyperProposition(self.frame, self.terms | other.terms, self.exclusive)

    def __and__(self, other: HyperProposition) -> HyperProposition:
        self._check(other)
        return HyperProposition(
            self.frame, frozenset(a | b for a in self.terms for b in other.terms), self.exclusive
        )

    join = __or__
    meet = __and__

    def __le__(self, other: HyperProposition) -> bool:
        self._check(other)
        return all(any(u & ~t == 0 for u in other.terms) for t in self.terms)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def sort_key(self) -> tuple:
        return (len(self.terms), sorted((bin(t).count("1"), t) for t in self.terms))

    def __str__(self):
        if not self.terms:
            return EMPTY_TEXT
        labels = self.frame.labels
        parts = []
        for t in sorted(self.terms, key=lambda t: (bin(t).count("1"), t)):
            parts.append(MEET.join(labels[i] for i in range(self.frame.size) if t >> i & 1))
        return UNION.join(parts)

    def __repr__(self):
        return f"HyperProposition({self})"


def hyper_meet_join(a: HyperProposition, b: HyperProposition) -> tuple[HyperProposition, HyperProposition]:
    return a & b, a | b


_TOKEN = re.compile(r"\(|\)|\||&|[^()|&]+")


def parse_hyper(frame: Frame, text: str, exclusive: Iterable = ()) -> HyperProposition:
    """Parse ``"A&B|C"`` (``&`` binds tighter than ``|``; parentheses allowed)."""
    excl = _pair_masks(frame, exclusive)
    text = text.strip()
    if text in (EMPTY_TEXT, "{}"):
        return HyperProposition.empty(frame, excl)
    tokens = [t.strip() for t in _TOKEN.findall(text) if t.strip()]

    def expr(i):
        node, i = term(i)
        while i < len(tokens) and tokens[i] == UNION:
            rhs, i = term(i + 1)
            node = node | rhs
        return node, i

    def term(i):
        node, i = atom(i)
        while i < len(tokens) and tokens[i] == MEET:
            rhs, i = atom(i + 1)
            node = node & rhs
        return node, i

    def atom(i):
        if i >= len(tokens):
            raise ValidationError(f"unexpected end of {text!r}")
        tok = tokens[i]
        if tok == "(":
            node, i = expr(i + 1)
            if i >= len(tokens) or tokens[i] != ")":
                raise ValidationError(f"unbalanced parentheses in {text!r}")
            return node, i + 1
        if tok in (UNION, MEET, ")"):
            raise ValidationError(f"unexpected {tok!r} in {text!r}")
        return HyperProposition.singleton(frame, tok, excl), i + 1

    node, i = expr(0)
    if i != len(tokens):
        raise ValidationError(f"trailing tokens in {text!r}")
    return node


def enumerate_hyper_power_set(frame: Frame, exclusive: Iterable = ()) -> list[HyperProposition]:
    """All distinct elements of D^Theta (including the empty element).

    Built as the closure of the singletons and the empty element under
    meet and join.
    """
    _check_capacity(frame)
    excl = _pair_masks(frame, exclusive)
    found = {HyperProposition.empty(frame, excl)}
    found.update(HyperProposition.singleton(frame, i, excl) for i in range(frame.size))
    frontier = set(found)
    while frontier:
        new = set()
        snapshot = list(found)
        for a in frontier:
            for b in snapshot:
                for c in (a & b, a | b):
                    if c not in found:
                        new.add(c)
        found |= new
        frontier = new
    return sorted(found, key=HyperProposition.sort_key)
