"""Finite subsets of the naturals as bit-vectors, and families of them.

Every set is stored as a Python int whose bit ``n`` is set iff ``n`` belongs
to the set.  Families carry an explicit ground window ``[0, N)``; nothing
infinite is ever materialized, so results about families are always
relative to that window.
"""
from __future__ import annotations

from typing import Iterable, Iterator

from .errors import NotHereditary, ValidationError, WindowOverflow

DEFAULT_WINDOW = 64


# ---------------------------------------------------------------- mask helpers

def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        if e < 0:
            raise ValidationError(f"negative element {e}")
        m |= 1 << e
    return m


def elements_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_min(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def mask_max(mask: int) -> int:
    return mask.bit_length() - 1


def canonical_key(mask: int) -> tuple:
    """Sort key: cardinality first, then lexicographic on the element list."""
    return (mask.bit_count(), elements_of(mask))


def submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def prefixes(mask: int) -> Iterator[int]:
    """Initial segments of ``mask`` from the whole set down to the empty set."""
    while True:
        yield mask
        if mask == 0:
            return
        mask &= ~(1 << (mask.bit_length() - 1))


def is_prefix_mask(s: int, t: int) -> bool:
    if s & ~t:
        return False
    if s == 0:
        return True
    top = s.bit_length()
    return (t & ((1 << top) - 1)) == s


# ---------------------------------------------------------------------- FinSet

class FinSet:
    """An immutable finite set of naturals."""

    __slots__ = ("mask",)

    def __init__(self, elements: Iterable[int] = ()):
        object.__setattr__(self, "mask", mask_of(elements))

    @classmethod
    def from_mask(cls, mask: int) -> "FinSet":
        if mask < 0:
            raise ValidationError("mask must be nonnegative")
        s = cls.__new__(cls)
        object.__setattr__(s, "mask", mask)
        return s

    @classmethod
    def interval(cls, lo: int, hi: int) -> "FinSet":
        """The set ``[lo, hi)``."""
        if hi <= lo:
            return cls.from_mask(0)
        return cls.from_mask(((1 << (hi - lo)) - 1) << lo)

    @classmethod
    def parse(cls, text: str) -> "FinSet":
        body = text.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValidationError(f"not a set literal: {text!r}")
        body = body[1:-1].strip()
        if not body:
            return cls()
        return cls(int(tok) for tok in body.split(","))

    def __setattr__(self, name, value):
        raise AttributeError("FinSet is immutable")

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(elements_of(self.mask))

    def __iter__(self):
        return iter(elements_of(self.mask))

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __contains__(self, n: int) -> bool:
        return n >= 0 and bool(self.mask >> n & 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, FinSet) and other.mask == self.mask

    def __hash__(self) -> int:
        return hash(("FinSet", self.mask))

    def __lt__(self, other: "FinSet") -> bool:
        return canonical_key(self.mask) < canonical_key(other.mask)

    def issubset(self, other: "FinSet") -> bool:
        return self.mask & ~other.mask == 0

    def __or__(self, other: "FinSet") -> "FinSet":
        return FinSet.from_mask(self.mask | other.mask)

    def __and__(self, other: "FinSet") -> "FinSet":
        return FinSet.from_mask(self.mask & other.mask)

    def __sub__(self, other: "FinSet") -> "FinSet":
        return FinSet.from_mask(self.mask & ~other.mask)

    def min(self) -> int:
        if not self.mask:
            raise ValueError("min of empty set")
        return mask_min(self.mask)

    def max(self) -> int:
        if not self.mask:
            raise ValueError("max of empty set")
        return mask_max(self.mask)

    def rest(self) -> "FinSet":
        """The set without its minimum."""
        return FinSet.from_mask(self.mask & (self.mask - 1))

    def tail(self, n: int) -> "FinSet":
        """Elements strictly above ``n``."""
        return FinSet.from_mask(self.mask >> (n + 1) << (n + 1))

    def below(self, n: int) -> "FinSet":
        """Elements strictly below ``n``."""
        return FinSet.from_mask(self.mask & ((1 << n) - 1)) if n > 0 else FinSet()

    def precedes(self, other: "FinSet") -> bool:
        """``self < other`` blockwise: every element of self is below every element of other."""
        if not self.mask or not other.mask:
            return True
        return self.max() < other.min()

    def __repr__(self) -> str:
        return "FinSet(" + str(self) + ")"

    def __str__(self) -> str:
        return "{" + ",".join(map(str, elements_of(self.mask))) + "}"


def is_initial_segment(s: FinSet, t: FinSet) -> bool:
    """True iff ``s = t ∩ [0, n]`` for some ``n`` (the empty set is a prefix of everything)."""
    return is_prefix_mask(s.mask, t.mask)


# ------------------------------------------------------------------- families

SUBSET = "subset"
INITIAL_SEGMENT = "initial-segment"


class SetFamily:
    """A duplicate-free family of finite sets inside ``[0, window)``.

    Members are kept in canonical order (cardinality, then lexicographic).
    """

    def __init__(self, members: Iterable, window: int = DEFAULT_WINDOW):
        masks = set()
        for m in members:
            mk = m.mask if isinstance(m, FinSet) else (m if isinstance(m, int) else mask_of(m))
            masks.add(mk)
        limit = 1 << window
        for mk in masks:
            if mk >= limit:
                raise WindowOverflow(f"member {FinSet.from_mask(mk)} outside window [0,{window})")
        self.window = window
        self.masks: tuple[int, ...] = tuple(sorted(masks, key=canonical_key))
        self._set = frozenset(masks)

    @property
    def members(self) -> list[FinSet]:
        return [FinSet.from_mask(m) for m in self.masks]

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.masks)

    def __contains__(self, s) -> bool:
        mk = s.mask if isinstance(s, FinSet) else s
        return mk in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, SetFamily) and self._set == other._set

    def __hash__(self) -> int:
        return hash(self._set)

    def mask_set(self) -> frozenset:
        return self._set

    def max_cardinality(self) -> int:
        return max((m.bit_count() for m in self.masks), default=-1)

    def is_hereditary(self) -> bool:
        return all((m & ~(1 << e)) in self._set for m in self.masks for e in elements_of(m))

    def is_prefix_closed(self) -> bool:
        return all((m & ~(1 << (m.bit_length() - 1))) in self._set for m in self.masks if m)

    def to_text(self) -> str:
        return "\n".join(str(FinSet.from_mask(m)) for m in self.masks)

    def __repr__(self) -> str:
        body = ", ".join(str(FinSet.from_mask(m)) for m in self.masks[:8])
        more = ", ..." if len(self.masks) > 8 else ""
        return f"SetFamily([{body}{more}], window={self.window})"


class CompactFamily(SetFamily):
    """A family containing ∅ and closed under initial segments (a finite tree).

    Most families used downstream are also closed under arbitrary subsets;
    pass ``hereditary=True`` to insist on that, or query :meth:`is_hereditary`.
    """

    def __init__(self, members: Iterable, window: int = DEFAULT_WINDOW, check: bool = True,
                 hereditary: bool = False):
        super().__init__(members, window)
        if check:
            if 0 not in self._set:
                raise NotHereditary("a compact family must contain the empty set")
            if not self.is_prefix_closed():
                raise NotHereditary("family is not closed under initial segments")
            if hereditary and not self.is_hereditary():
                raise NotHereditary("family is not closed under subsets")

    @classmethod
    def downward_closure(cls, generators: Iterable, window: int = DEFAULT_WINDOW) -> "CompactFamily":
        fam = hereditary_sq_closure(SetFamily(generators, window), SUBSET)
        out = cls(fam.masks, window, check=False)
        if not out.masks:
            out = cls([0], window, check=False)
        return out

    @classmethod
    def from_predicate(cls, pred, window: int) -> "CompactFamily":
        """All subsets of the window satisfying a hereditary predicate on masks.

        Generated by extending sets upward one element at a time, so only members
        (and their one-step extensions) are ever visited.
        """
        found = []
        stack = [0]
        while stack:
            m = stack.pop()
            found.append(m)
            start = m.bit_length()
            for e in range(start, window):
                ext = m | (1 << e)
                if pred(ext):
                    stack.append(ext)
        fam = cls(found, window, check=False)
        return fam


def restrict(fam: SetFamily, A: FinSet) -> SetFamily:
    """The members of ``fam`` contained in ``A``."""
    keep = [m for m in fam.masks if m & ~A.mask == 0]
    cls = type(fam) if isinstance(fam, CompactFamily) else SetFamily
    if cls is CompactFamily:
        return CompactFamily(keep, fam.window, check=False)
    return SetFamily(keep, fam.window)


def hereditary_sq_closure(fam: SetFamily, mode: str = SUBSET) -> SetFamily:
    """Smallest superfamily closed under subsets (``mode='subset'``) or initial segments."""
    seen: set[int] = set()
    if mode == SUBSET:
        for m in fam.masks:
            if m in seen:
                continue
            for sub in submasks(m):
                seen.add(sub)
    elif mode == INITIAL_SEGMENT:
        for m in fam.masks:
            for p in prefixes(m):
                if p in seen:
                    break
                seen.add(p)
    else:
        raise ValidationError(f"unknown closure mode {mode!r}")
    if seen and max(seen).bit_length() > fam.window:
        raise WindowOverflow("closure left the ground window")
    return SetFamily(seen, fam.window)


def max_elements(fam: SetFamily, mode: str = SUBSET) -> SetFamily:
    """Members with no proper extension (superset, or end-extension) inside the family."""
    if mode == SUBSET:
        maximal = [m for m in fam.masks
                   if not any(o != m and m & ~o == 0 for o in fam.masks)]
    elif mode == INITIAL_SEGMENT:
        maximal = [m for m in fam.masks
                   if not any(o != m and is_prefix_mask(m, o) for o in fam.masks)]
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return SetFamily(maximal, fam.window)


def cb_rank_window(K: SetFamily) -> int:
    """Number of derivative steps (drop ⊑-maximal members) until the family is empty."""
    alive = set(K.masks)
    steps = 0
    while alive:
        # a member survives iff one of its one-element end-extensions is still alive
        has_ext = set()
        for m in alive:
            if m:
                has_ext.add(m & ~(1 << (m.bit_length() - 1)))
        alive = {m for m in alive if m in has_ext}
        steps += 1
    return steps


def power_set(A: FinSet) -> list[FinSet]:
    return [FinSet.from_mask(m) for m in sorted(submasks(A.mask), key=canonical_key)]


def cube(A: FinSet, d: int) -> SetFamily:
    """All ``d``-element subsets of ``A`` as a family (``[A]^d``)."""
    from itertools import combinations

    window = A.max() + 1 if A else 1
    return SetFamily((mask_of(c) for c in combinations(A.elements, d)), window)
