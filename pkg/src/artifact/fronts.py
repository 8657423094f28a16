"""Uniform fronts on the naturals, described by their residual-front recursion.

A front is never listed in full.  Each object knows its rank (an ordinal below
``ω^ω`` in Cantor normal form) and how to produce the residual front
``{t : n < t, {n} ∪ t ∈ 𝒜}`` for any ``n``; membership, the unique initial
segment of an infinite set, and window enumeration all follow from that.
"""
from __future__ import annotations

from functools import lru_cache, total_ordering
from typing import Iterator

from .core_sets import FinSet, SetFamily, elements_of, mask_of
from .errors import OrdinalOverflow, PrefixTooShort, ValidationError

MAX_EXPONENT = 64


@total_ordering
class Ordinal:
    """An ordinal ``< ω^ω`` as a tuple of (exponent, coefficient), exponents descending."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        clean = []
        for e, c in terms:
            if c < 0 or e < 0:
                raise ValidationError("ordinal terms must be nonnegative")
            if e > MAX_EXPONENT:
                raise OrdinalOverflow(f"exponent {e} beyond the supported cap ω^{MAX_EXPONENT}")
            if c:
                clean.append((e, c))
        for (e1, _), (e2, _) in zip(clean, clean[1:]):
            if e1 <= e2:
                raise ValidationError("terms must have strictly decreasing exponents")
        self.terms = tuple(clean)

    @classmethod
    def nat(cls, n: int) -> "Ordinal":
        return cls([(0, n)])

    @classmethod
    def omega_power(cls, e: int, c: int = 1) -> "Ordinal":
        return cls([(e, c)])

    def is_zero(self) -> bool:
        return not self.terms

    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] > 0

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    def as_int(self) -> int:
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def predecessor(self) -> "Ordinal":
        if not self.is_successor():
            raise ValueError(f"{self} has no predecessor")
        *head, (e, c) = self.terms
        return Ordinal(head + [(0, c - 1)])

    def fundamental(self, n: int) -> "Ordinal":
        """Standard fundamental sequence of a limit: ``β + ω^e`` gives ``β + ω^(e-1)·n``."""
        if not self.is_limit():
            raise ValueError(f"{self} is not a limit")
        *head, (e, c) = self.terms
        head = head + ([(e, c - 1)] if c > 1 else [])
        return Ordinal(head) + Ordinal([(e - 1, n)])

    def __add__(self, other: "Ordinal") -> "Ordinal":
        if not other.terms:
            return self
        lead = other.terms[0][0]
        kept = [(e, c) for e, c in self.terms if e > lead]
        same = [c for e, c in self.terms if e == lead]
        first = (lead, other.terms[0][1] + (same[0] if same else 0))
        return Ordinal(kept + [first] + list(other.terms[1:]))

    def __mul__(self, other: "Ordinal") -> "Ordinal":
        if not self.terms or not other.terms:
            return Ordinal()
        lead_e, lead_c = self.terms[0]
        total = Ordinal()
        for e, c in other.terms:
            if e == 0:
                piece = Ordinal([(lead_e, lead_c * c)] + list(self.terms[1:]))
            else:
                piece = Ordinal([(lead_e + e, c)])
            total = total + piece
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, Ordinal) and self.terms == other.terms

    def __lt__(self, other: "Ordinal") -> bool:
        for (e1, c1), (e2, c2) in zip(self.terms, other.terms):
            if (e1, c1) != (e2, c2):
                return (e1, c1) < (e2, c2)
        return len(self.terms) < len(other.terms)

    def __hash__(self):
        return hash(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
                continue
            base = "ω" if e == 1 else f"ω^{e}"
            parts.append(base if c == 1 else f"{base}·{c}")
        return " + ".join(parts)

    __repr__ = __str__


ZERO = Ordinal()
ONE = Ordinal.nat(1)
OMEGA = Ordinal.omega_power(1)


# ------------------------------------------------------------------- fronts

class UniformFront:
    """Base class.  Subclasses define ``rank`` and ``_residual(n)``."""

    rank: Ordinal
    name: str = "front"

    def residual(self, n: int) -> "UniformFront":
        if self.rank.is_zero():
            raise ValueError("the front {∅} has no residuals")
        return self._residual_cached(n)

    @lru_cache(maxsize=None)
    def _residual_cached(self, n: int) -> "UniformFront":
        return self._residual(n)

    def _residual(self, n: int) -> "UniformFront":
        raise NotImplementedError

    # membership and the front property -------------------------------------
    def is_member(self, s) -> bool:
        items = elements_of(s.mask if isinstance(s, FinSet) else mask_of(s))
        front = self
        for x in items:
            if front.rank.is_zero():
                return False
            front = front.residual(x)
        return front.rank.is_zero()

    def step(self, M) -> FinSet:
        """The unique initial segment of the (prefix of an) infinite set ``M`` lying in the front."""
        items = list(M.elements if isinstance(M, FinSet) else sorted(M))
        front = self
        taken = []
        for x in items:
            if front.rank.is_zero():
                break
            taken.append(x)
            front = front.residual(x)
        if not front.rank.is_zero():
            raise PrefixTooShort(f"prefix {items} exhausted before reaching a member")
        return FinSet(taken)

    # window enumeration -----------------------------------------------------
    def members(self, ground) -> Iterator[FinSet]:
        """Members contained in ``ground`` (a FinSet or a window size)."""
        pts = FinSet.interval(0, ground).elements if isinstance(ground, int) else ground.elements
        for mask in self._member_masks(pts, 0):
            yield FinSet.from_mask(mask)

    def member_masks(self, ground) -> list[int]:
        pts = FinSet.interval(0, ground).elements if isinstance(ground, int) else ground.elements
        return list(self._member_masks(pts, 0))

    def _member_masks(self, pts, start) -> Iterator[int]:
        if self.rank.is_zero():
            yield 0
            return
        for i in range(start, len(pts)):
            x = pts[i]
            for m in self.residual(x)._member_masks(pts, i + 1):
                yield m | (1 << x)

    def closure_masks(self, ground) -> set[int]:
        """Initial segments of members inside ``ground``."""
        out = set()
        for m in self.member_masks(ground):
            while True:
                out.add(m)
                if not m:
                    break
                m &= ~(1 << (m.bit_length() - 1))
        return out

    def check_thin(self, ground) -> bool:
        masks = set(self.member_masks(ground))
        for m in masks:
            p = m
            while p:
                p &= ~(1 << (p.bit_length() - 1))
                if p in masks:
                    return False
        return True

    def check_uniform(self, window: int, depth: int = 3) -> bool:
        """Check the rank relation between this front and its residuals on ``[0, window)``."""
        return _check_uniform(self, 0, window, depth)

    def __str__(self):
        return self.name

    __repr__ = __str__


def _check_uniform(front: UniformFront, lo: int, window: int, depth: int) -> bool:
    if front.rank.is_zero() or depth == 0:
        return True
    prev = None
    for n in range(lo, window):
        sub = front.residual(n)
        r = sub.rank
        if front.rank.is_successor():
            if r + ONE != front.rank:
                return False
        else:
            if not r < front.rank:
                return False
            if prev is not None and r < prev:
                return False
            prev = r
        if not _check_uniform(sub, n + 1, window, depth - 1):
            return False
    return True


class TrivialFront(UniformFront):
    """The rank-0 front ``{∅}``."""

    rank = ZERO
    name = "{∅}"

    def __eq__(self, other):
        return isinstance(other, TrivialFront)

    def __hash__(self):
        return hash("trivial")


TRIVIAL = TrivialFront()


class CubeFront(UniformFront):
    """``[ℕ]^d``: all ``d``-element sets."""

    def __init__(self, d: int):
        if d < 0:
            raise ValidationError("cube dimension must be nonnegative")
        self.d = d
        self.rank = Ordinal.nat(d)
        self.name = f"cube({d})"

    def _residual(self, n):
        return cube_front(self.d - 1)

    def __eq__(self, other):
        return isinstance(other, CubeFront) and other.d == self.d

    def __hash__(self):
        return hash(("cube", self.d))


def cube_front(d: int) -> UniformFront:
    return TRIVIAL if d == 0 else CubeFront(d)


class SchreierFront(UniformFront):
    """Sets whose size is one more than their minimum."""

    rank = OMEGA
    name = "schreier"

    def _residual(self, n):
        return cube_front(n)

    def __eq__(self, other):
        return isinstance(other, SchreierFront)

    def __hash__(self):
        return hash("schreier")


def schreier_front() -> UniformFront:
    return SchreierFront()


class SizeFront(UniformFront):
    """Sets ``s`` with ``#s = size(min s)`` for a positive size function.

    The Schreier front is the case ``size(n) = n + 1``.
    """

    rank = OMEGA

    def __init__(self, size, name: str = "size-front"):
        self.size = size
        self.name = name

    def _residual(self, n):
        k = self.size(n)
        if k < 1:
            raise ValidationError("size function must be positive")
        return cube_front(k - 1)


class OplusFront(UniformFront):
    """``{s ∪ t : s ∈ ℬ, t ∈ 𝒜, s < t}``: a member of ``ℬ`` followed by one of ``𝒜``."""

    def __init__(self, a: UniformFront, b: UniformFront):
        self.a, self.b = a, b
        self.rank = a.rank + b.rank
        self.name = f"oplus({a},{b})"

    def _residual(self, n):
        return oplus(self.a, self.b.residual(n))

    def __eq__(self, other):
        return isinstance(other, OplusFront) and (other.a, other.b) == (self.a, self.b)

    def __hash__(self):
        return hash(("oplus", self.a, self.b))


def oplus(a: UniformFront, b: UniformFront) -> UniformFront:
    if b.rank.is_zero():
        return a
    if a.rank.is_zero():
        return b
    out = OplusFront(a, b)
    assert out.rank == a.rank + b.rank
    return out


class OtimesFront(UniformFront):
    """Unions ``s_1 < ... < s_k`` of members of ``𝒜`` whose minima form a member of ``ℬ``."""

    def __init__(self, a: UniformFront, b: UniformFront):
        self.a, self.b = a, b
        self.rank = a.rank * b.rank
        self.name = f"otimes({a},{b})"

    def _residual(self, n):
        # finish the block of 𝒜 that starts at n, then continue with blocks whose
        # minima extend {n} inside ℬ
        rest = otimes(self.a, self.b.residual(n))
        return oplus(rest, self.a.residual(n))

    def __eq__(self, other):
        return isinstance(other, OtimesFront) and (other.a, other.b) == (self.a, self.b)

    def __hash__(self):
        return hash(("otimes", self.a, self.b))


def otimes(a: UniformFront, b: UniformFront) -> UniformFront:
    if b.rank.is_zero() or a.rank.is_zero():
        return TRIVIAL
    if a == cube_front(1):
        return b
    if b == cube_front(1):
        return a
    return OtimesFront(a, b)


class EnvelopeFront(UniformFront):
    """A uniform front whose ⊑-closure contains a given finite hereditary family.

    Built by the residual recursion: for each ``n`` the residual is the envelope
    of ``𝒢_{n} = {t : n < t, {n} ∪ t ∈ 𝒢}``, padded with a cube front so every
    residual has rank ``ρ - 1`` (``ρ`` = height of the tree ``(𝒢, ⊏)``).
    """

    def __init__(self, masks: frozenset, base: FinSet | None = None):
        self.masks = masks
        self.base = base
        height = max((m.bit_count() for m in masks), default=0)
        self.rank = Ordinal.nat(height)
        self.name = "envelope"

    def _residual(self, n):
        if self.base is not None and n not in self.base:
            # points outside the base set are never used by members on the base
            return cube_front(self.rank.as_int() - 1)
        bit = 1 << n
        sub = frozenset((m & ~bit) for m in self.masks
                        if m & bit and (m & ((bit << 1) - 1)) == bit)
        target = self.rank.as_int() - 1
        if not sub:
            return cube_front(target)
        inner = envelope_from_masks(sub, self.base)
        pad = target - inner.rank.as_int()
        return oplus(cube_front(pad), inner) if pad else inner

    def __eq__(self, other):
        return isinstance(other, EnvelopeFront) and other.masks == self.masks and other.base == self.base

    def __hash__(self):
        return hash(("envelope", self.masks, self.base))


def envelope_from_masks(masks: frozenset, base: FinSet | None = None) -> UniformFront:
    if max((m.bit_count() for m in masks), default=0) == 0:
        return TRIVIAL
    return EnvelopeFront(frozenset(masks), base)


def uniform_envelope(G: SetFamily, M: FinSet | None = None) -> UniformFront:
    """A uniform front on ``M`` whose closure contains every member of ``G`` inside ``M``.

    ``G`` must be closed under initial segments.  The rank equals the height of ``(G, ⊏)``, i.e. its
    largest member size.
    """
    if not G.is_prefix_closed():
        raise ValidationError("the envelope needs a family closed under initial segments")
    masks = frozenset(G.masks) if M is None else frozenset(m for m in G.masks if m & ~M.mask == 0)
    front = envelope_from_masks(masks, M)
    assert front.rank == Ordinal.nat(max((m.bit_count() for m in masks), default=0))
    return front


# ------------------------------------------------------------ tiny language

def parse_front(text: str, envelopes: dict | None = None) -> UniformFront:
    """Parse ``schreier``, ``cube(d)``, ``oplus(a,b)``, ``otimes(a,b)``, ``envelope(name)``."""
    text = text.replace(" ", "")
    pos = 0

    def parse() -> UniformFront:
        nonlocal pos
        start = pos
        while pos < len(text) and (text[pos].isalnum() or text[pos] in "_-./"):
            pos += 1
        word = text[start:pos]
        if word == "schreier":
            return schreier_front()
        if word == "trivial":
            return TRIVIAL
        if pos >= len(text) or text[pos] != "(":
            raise ValidationError(f"malformed front expression near {text[start:]!r}")
        pos += 1
        if word == "cube":
            s = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            if s == pos:
                raise ValidationError(f"cube needs a size in {text!r}")
            d = int(text[s:pos])
            expect(")")
            return cube_front(d)
        if word == "envelope":
            s = pos
            while pos < len(text) and text[pos] != ")":
                pos += 1
            key = text[s:pos]
            expect(")")
            if envelopes is None or key not in envelopes:
                raise ValidationError(f"unknown envelope source {key!r}")
            return uniform_envelope(envelopes[key])
        if word in ("oplus", "otimes"):
            a = parse()
            expect(",")
            b = parse()
            expect(")")
            return oplus(a, b) if word == "oplus" else otimes(a, b)
        raise ValidationError(f"unknown front constructor {word!r}")

    def expect(ch):
        nonlocal pos
        if pos >= len(text) or text[pos] != ch:
            raise ValidationError(f"expected {ch!r} at position {pos} in {text!r}")
        pos += 1

    front = parse()
    if pos != len(text):
        raise ValidationError(f"trailing input in {text!r}")
    return front
