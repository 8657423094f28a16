"""Exact rational measures, suprema of measures, and covering numbers.

All arithmetic here is done with :class:`fractions.Fraction`; no floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from .core_sets import FinSet, SetFamily, elements_of, mask_of
from .errors import NegativeFunction, NotACovering, Unbounded, ValidationError


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats are taken at face value of their decimal repr, e.g. 0.3 -> 3/10
        return Fraction(repr(x))
    return Fraction(x)


def _as_mask(A) -> int:
    if isinstance(A, FinSet):
        return A.mask
    if isinstance(A, int):
        return A
    return mask_of(A)


class RationalMeasure:
    """A finitely supported measure on the naturals with rational point weights."""

    __slots__ = ("_weights",)

    def __init__(self, weights: Mapping[int, object] | None = None):
        clean = {}
        for n, w in (weights or {}).items():
            w = as_fraction(w)
            if w < 0:
                raise ValidationError(f"negative weight at {n}")
            if w:
                clean[int(n)] = w
        self._weights = dict(sorted(clean.items()))

    @classmethod
    def point_mass(cls, n: int, weight=1) -> "RationalMeasure":
        return cls({n: weight})

    @property
    def weights(self) -> dict[int, Fraction]:
        return dict(self._weights)

    def point(self, n: int) -> Fraction:
        return self._weights.get(n, Fraction(0))

    def support(self) -> FinSet:
        return FinSet(self._weights)

    def __call__(self, A) -> Fraction:
        m = _as_mask(A)
        return sum((w for n, w in self._weights.items() if m >> n & 1), Fraction(0))

    def scaled(self, c) -> "RationalMeasure":
        c = as_fraction(c)
        return RationalMeasure({n: w * c for n, w in self._weights.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMeasure) and self._weights == other._weights

    def __hash__(self):
        return hash(tuple(self._weights.items()))

    def to_json(self) -> dict[str, str]:
        return {str(n): f"{w.numerator}/{w.denominator}" for n, w in self._weights.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "RationalMeasure":
        return cls({int(k): Fraction(v) for k, v in data.items()})

    def __repr__(self):
        inner = ", ".join(f"{n}: {w}" for n, w in self._weights.items())
        return f"RationalMeasure({{{inner}}})"


@dataclass(frozen=True)
class SupSubmeasure:
    """``φ(A) = max_k μ_k(A)`` for a finite list of measures on ``[0, window)``."""

    measures: tuple
    window: int

    def __init__(self, measures: Iterable[RationalMeasure], window: int):
        object.__setattr__(self, "measures", tuple(measures))
        object.__setattr__(self, "window", window)

    def __call__(self, A) -> Fraction:
        return phi_eval(self, A)


def phi_eval(phi: SupSubmeasure, A) -> Fraction:
    m = _as_mask(A)
    if m >> phi.window:
        raise ValidationError("set leaves the submeasure window")
    return max((mu(m) for mu in phi.measures), default=Fraction(0))


@dataclass
class Profile:
    kind: str
    window: int
    value: Fraction | None = None
    tail: list = field(default_factory=list)
    verdict: str = ""
    bound: Fraction | None = None


def membership_profile(phi: SupSubmeasure, A, kind: str, bound=None) -> Profile:
    """Window-relative evidence for membership of ``A`` in Fin, Exh or Sum of ``φ``.

    Fin reports ``φ(A)``; Exh the tail values ``φ(A ∖ [0,n))``; Sum the series of
    singleton values.  With a ``bound`` the verdict compares against it; without
    one the verdict describes growth over the windows ``N/4, N/2, N``.
    """
    m = _as_mask(A)
    N = phi.window
    bound = None if bound is None else as_fraction(bound)
    prof = Profile(kind=kind, window=N, bound=bound)
    if kind == "Fin":
        prof.value = phi_eval(phi, m)
        if bound is not None:
            prof.verdict = "bounded" if prof.value <= bound else "exceeds bound"
        else:
            marks = [max(1, N // 4), max(1, N // 2), N]
            vals = [phi_eval(phi, m & ((1 << w) - 1)) for w in marks]
            prof.tail = vals
            growing = vals[0] < vals[1] < vals[2]
            prof.verdict = "unbounded growth under doubling windows" if growing else "stable under doubling windows"
    elif kind == "Exh":
        prof.tail = [phi_eval(phi, m >> n << n) for n in range(N + 1)]
        prof.value = prof.tail[-1] if prof.tail else Fraction(0)
        last = prof.tail[N // 2:] if N else [Fraction(0)]
        if bound is not None:
            prof.verdict = "vanishing" if max(last) <= bound else "not vanishing"
        else:
            prof.verdict = "decreasing tail" if all(a >= b for a, b in zip(last, last[1:])) else "irregular tail"
    elif kind == "Sum":
        terms = [phi_eval(phi, 1 << n) for n in elements_of(m)]
        prof.tail = terms
        prof.value = sum(terms, Fraction(0))
        if bound is not None:
            prof.verdict = "summable within bound" if prof.value <= bound else "exceeds bound"
        else:
            prof.verdict = "partial sum reported"
    else:
        raise ValidationError(f"unknown profile kind {kind!r}")
    return prof


def normalize_measures(ms: Sequence[RationalMeasure], window: int) -> list[RationalMeasure]:
    """Interleave capped copies of ``ms`` with the point masses ``δ_k/(k+1)``.

    Position ``2k`` holds ``μ_k`` with every singleton value capped at 1, position
    ``2k+1`` holds ``δ_k/(k+1)`` (only for ``k < window``).
    """
    out = []
    for k in range(max(len(ms), window)):
        if k < len(ms):
            out.append(RationalMeasure({n: min(w, Fraction(1)) for n, w in ms[k].weights.items()
                                        if n < window}))
        if k < window:
            out.append(RationalMeasure.point_mass(k, Fraction(1, k + 1)))
    return out


def quantize_value(value: Fraction, n: int) -> Fraction:
    """Round ``value`` down onto the grid ``2^-n``, strictly below unless zero."""
    if value == 0:
        return Fraction(0)
    scale = 1 << n
    i = math.ceil(value * scale) - 1
    return Fraction(i, scale)


def quantize_measures(ms: Sequence[RationalMeasure]) -> list[RationalMeasure]:
    return [RationalMeasure({n: quantize_value(w, n) for n, w in mu.weights.items()}) for mu in ms]


# ------------------------------------------------------------ covering numbers

def _index_cover(X: FinSet, cover) -> list[int]:
    masks = list(cover.masks) if isinstance(cover, SetFamily) else [_as_mask(c) for c in cover]
    union = 0
    for c in masks:
        union |= c
    missing = X.mask & ~union
    if missing:
        raise NotACovering(f"points {FinSet.from_mask(missing)} are not covered")
    return masks


def kelley_number(X: FinSet, cover) -> Fraction:
    """``(1/#cover) · min_x #{S in cover : x ∈ S}``.

    ``cover`` may be a :class:`SetFamily` or any sequence of sets; a sequence is
    treated as an indexed family, so repeated sets count with multiplicity.
    """
    masks = _index_cover(X, cover)
    if not masks:
        raise NotACovering("empty cover")
    if not X:
        return Fraction(1)
    least = min(sum(1 for c in masks if c >> x & 1) for x in X)
    return Fraction(least, len(masks))


def kelley_witness(X: FinSet, cover, mu: RationalMeasure) -> FinSet:
    """A member ``S`` of the cover with ``μ(S) ≥ δ(X, cover)·μ(X)``."""
    delta = kelley_number(X, cover)
    masks = _index_cover(X, cover)
    target = delta * mu(X)
    best = max(masks, key=lambda c: (mu(c & X.mask), -c))
    if mu(best & X.mask) < target:
        raise AssertionError("no member reaches the Kelley bound; averaging argument violated")
    return FinSet.from_mask(best)


def _min_hitting_set(universe: int, sets: list[int]) -> int:
    """Size of the smallest subset of ``universe`` meeting every mask in ``sets``."""
    sets = sorted(set(sets), key=lambda s: s.bit_count())
    if any(s & universe == 0 for s in sets):
        raise Unbounded("some member cannot be hit")

    def search(remaining: list[int], budget: int) -> bool:
        if not remaining:
            return True
        if budget == 0:
            return False
        pick = min(remaining, key=lambda s: s.bit_count())
        for x in elements_of(pick):
            bit = 1 << x
            if search([s for s in remaining if not s & bit], budget - 1):
                return True
        return False

    k = 0
    while not search(sets, k):
        k += 1
    return k


def _min_non_covering_rank(X: FinSet, family: list[int]) -> int:
    """Least ``r`` such that some ``r``-subset of ``X`` lies in no member of ``family``."""
    pts = X.elements
    for r in range(len(pts) + 1):
        for combo in combinations(pts, r):
            s = mask_of(combo)
            if not any(s & ~a == 0 for a in family):
                return r
    raise Unbounded("every subset of X is covered; the family contains X")


def covering_submeasure(X: FinSet, interval, family) -> int:
    """``ψ_X(𝒜)``: least ``#F`` such that each member of ``𝒜`` misses some point of ``F``.

    Computed twice, as a minimum hitting set of complements and as the least
    ``r`` for which ``𝒜`` fails to be an ``r``-covering, and the two must agree.
    ``interval`` (the ambient family of admissible sets) may be ``None``.
    """
    fam = list(family.masks) if isinstance(family, SetFamily) else [_as_mask(a) for a in family]
    if interval is not None:
        amb = interval.mask_set() if isinstance(interval, SetFamily) else {_as_mask(a) for a in interval}
        if X.mask in amb:
            raise Unbounded("the ambient interval contains X itself, so x-misses cannot cover it")
        stray = [a for a in fam if a not in amb]
        if stray:
            raise ValidationError(f"{FinSet.from_mask(stray[0])} is not in the interval")
    for a in fam:
        if a & ~X.mask:
            raise ValidationError("family member leaves X")
    if not fam:
        return 0
    if X.mask in fam:
        raise Unbounded("X itself belongs to the family")
    complements = [X.mask & ~a for a in fam]
    by_hitting = _min_hitting_set(X.mask, complements)
    by_rank = _min_non_covering_rank(X, fam)
    if by_hitting != by_rank:
        raise AssertionError(f"covering submeasure mismatch: {by_hitting} vs {by_rank}")
    return by_hitting


def amalgam_submeasure(blocks: Iterable[tuple]) -> int:
    """``max_n ψ_{X_n}(𝒜 ∩ 𝔛_n)`` over pairwise disjoint blocks ``(X_n, 𝒜_n)``."""
    blocks = list(blocks)
    seen = 0
    for X, _ in blocks:
        if seen & X.mask:
            raise ValidationError("blocks overlap")
        seen |= X.mask
    return max((covering_submeasure(X, None, fam) for X, fam in blocks), default=0)


# ------------------------------------------------- measures from functionals

StepFunction = Callable[[object], object]


def measures_from_functions(g: Sequence[StepFunction], alpha: Sequence, count: int | None = None
                            ) -> list[RationalMeasure]:
    """``μ_k({n}) = g_n(α_k)`` for ``n < k``, with the sample list cycled.

    ``count`` is the number of measures produced; by default enough that every
    sample point is used once with full support ``[0, len(g))``.
    """
    if not alpha:
        raise ValidationError("need at least one sample point")
    if count is None:
        count = len(g) + len(alpha)
    out = []
    for k in range(count):
        a = alpha[k % len(alpha)]
        weights = {}
        for n in range(min(k, len(g))):
            v = as_fraction(g[n](a))
            if v < 0:
                raise NegativeFunction(f"g_{n} is negative at sample {k}")
            weights[n] = v
        out.append(RationalMeasure(weights))
    return out


def summable_extension(g: Sequence[StepFunction], x: Sequence, check: bool = True) -> RationalMeasure:
    """``μ_x({n}) = Σ_k g_n(x_k)/2^k`` over the finitely many points ``x_k``.

    When ``check`` is set (and ``len(g) ≤ 12``) the bound
    ``μ_x(A) ≤ 2·max_k Σ_{n∈A} g_n(x_k)`` is verified for every ``A``.
    """
    table = []
    for n, gn in enumerate(g):
        row = [as_fraction(gn(p)) for p in x]
        if any(v < 0 for v in row):
            raise NegativeFunction(f"g_{n} takes a negative value")
        table.append(row)
    weights = {n: sum((v / (1 << k) for k, v in enumerate(row)), Fraction(0)) for n, row in enumerate(table)}
    mu = RationalMeasure(weights)
    if check and len(g) <= 12:
        for A in range(1 << len(g)):
            idx = elements_of(A)
            norm = max((sum((table[n][k] for n in idx), Fraction(0)) for k in range(len(x))), default=0)
            if mu(A) > 2 * norm:
                raise AssertionError("summable extension exceeds twice the sup norm")
    return mu
