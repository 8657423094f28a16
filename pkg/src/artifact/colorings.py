"""Colorings of pairs and of fronts, homogeneity queries, and a few named colorings."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

from .core_sets import FinSet, SetFamily, elements_of, submasks
from .errors import BudgetExceeded, InsufficientDensity, NotHereditary, Overflow, ValidationError
from .fronts import UniformFront, cube_front


def _as_finset(s) -> FinSet:
    return s if isinstance(s, FinSet) else FinSet(s)


class FrontColoring:
    """A map from the members of a front to colors ``0..r-1``."""

    def __init__(self, front: UniformFront, rule: Callable[[FinSet], int], r: int = 2, name: str = ""):
        self.front = front
        self.rule = rule
        self.r = r
        self.name = name or f"coloring on {front}"

    def __call__(self, *args) -> int:
        s = _as_finset(args[0] if len(args) == 1 else args)
        c = self.rule(s)
        if not 0 <= c < self.r:
            raise ValidationError(f"color {c} out of range for {s}")
        return c

    def members_ending_at(self, s_mask: int, x: int) -> list[int]:
        """Front members inside ``s ∪ {x}`` whose largest element is ``x`` (``s`` lies below ``x``)."""
        pts = elements_of(s_mask)
        out = []

        def walk(front, i, acc):
            if front.rank.is_zero():
                return
            r = front.residual(x)
            if r.rank.is_zero():
                out.append(acc | (1 << x))
            for j in range(i, len(pts)):
                walk(front.residual(pts[j]), j + 1, acc | (1 << pts[j]))

        walk(self.front, 0, 0)
        return out

    def colors_added(self, s_mask: int, x: int) -> set[int]:
        return {self(FinSet.from_mask(m)) for m in self.members_ending_at(s_mask, x)}


class PairColoring(FrontColoring):
    """A coloring of two-element sets ``{m < n}``."""

    def __init__(self, rule: Callable[[int, int], int], r: int = 2, name: str = ""):
        self.pair_rule = rule
        super().__init__(cube_front(2), lambda s: rule(*s.elements), r, name or "pair coloring")

    def __call__(self, *args) -> int:
        if len(args) == 1:
            m, n = _as_finset(args[0]).elements
        else:
            m, n = sorted(args)
        c = self.pair_rule(m, n)
        if not 0 <= c < self.r:
            raise ValidationError(f"color {c} out of range for {{{m},{n}}}")
        return c

    def colors_added(self, s_mask: int, x: int) -> set[int]:
        return {self.pair_rule(y, x) for y in elements_of(s_mask)}

    def table(self, ground: FinSet) -> dict[tuple[int, int], int]:
        pts = ground.elements
        return {(a, b): self.pair_rule(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]}


# ----------------------------------------------------------------- homogeneity

def hom_check(c: FrontColoring, A) -> set[int]:
    """Colors attained on the front members inside ``A``.

    ``A`` is ``i``-homogeneous iff the result is a subset of ``{i}``; an empty
    result means ``A`` is homogeneous for every color.
    """
    A = _as_finset(A)
    if isinstance(c, PairColoring):
        pts = A.elements
        return {c.pair_rule(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]}
    return {c(FinSet.from_mask(m)) for m in c.front.member_masks(A)}


def is_homogeneous(c: FrontColoring, A, color: int) -> bool:
    return hom_check(c, A) <= {color}


def homogeneous_sets(c: FrontColoring, color: int, ground) -> list[int]:
    """Masks of all ``color``-homogeneous subsets of ``ground`` (depth-first extension)."""
    pts = _as_finset(ground).elements
    out = []
    stack = [(0, 0)]
    while stack:
        mask, start = stack.pop()
        out.append(mask)
        for j in range(start, len(pts)):
            x = pts[j]
            if c.colors_added(mask, x) <= {color}:
                stack.append((mask | (1 << x), j + 1))
    return out


def cover_by_homogeneous(c: FrontColoring, M, k: int, size_limit: int = 400, node_budget: int = 2_000_000):
    """Split ``M`` into at most ``k`` homogeneous pieces, or return ``None`` if impossible.

    Exact backtracking; the ``None`` answer is a proof by exhaustion.
    """
    M = _as_finset(M)
    if k * len(M) > size_limit:
        raise BudgetExceeded(f"k·#M = {k * len(M)} exceeds the limit {size_limit}")
    pts = M.elements
    pieces: list[int] = []
    colors: list[set] = []
    nodes = 0

    def place(i: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded("node budget exhausted in homogeneous cover search")
        if i == len(pts):
            return True
        x = pts[i]
        for j in range(len(pieces)):
            new = colors[j] | c.colors_added(pieces[j], x)
            if len(new) <= 1:
                saved = (pieces[j], colors[j])
                pieces[j] |= 1 << x
                colors[j] = new
                if place(i + 1):
                    return True
                pieces[j], colors[j] = saved
        if len(pieces) < k:
            pieces.append(1 << x)
            colors.append(set())
            if place(i + 1):
                return True
            pieces.pop()
            colors.pop()
        return False

    if not pts:
        return []
    if place(0):
        return [FinSet.from_mask(p) for p in pieces]
    return None


def ramsey_extract(c: PairColoring, ground) -> tuple[FinSet, int]:
    """Greedy pivoting: take the least point, keep the majority color class of the rest.

    Each pivot records the color class it kept; pivots sharing a color are
    homogeneous in that color, and the last pivot may join either side.
    """
    ground = _as_finset(ground)
    if len(ground) < 2:
        raise ValidationError("need at least two points")
    rest = list(ground.elements)
    pivots = []
    while rest:
        p, rest = rest[0], rest[1:]
        classes = {0: [], 1: []}
        for y in rest:
            classes.setdefault(c.pair_rule(p, y), []).append(y)
        best = max(sorted(classes), key=lambda col: (len(classes[col]), -col))
        pivots.append((p, best if rest else None))
        rest = classes[best]
    counts = {}
    for _, col in pivots:
        if col is not None:
            counts[col] = counts.get(col, 0) + 1
    color = max(sorted(counts), key=lambda col: (counts[col], -col)) if counts else 0
    chosen = [p for p, col in pivots if col == color or col is None]
    out = FinSet(chosen)
    assert hom_check(c, out) <= {color}
    return out, color


# -------------------------------------------------------------- Galvin colorings

class GalvinColoring:
    """Color an infinite set 1 iff some initial segment of it falls outside ``K``."""

    def __init__(self, K: SetFamily):
        if 0 not in K.mask_set() or not K.is_hereditary():
            raise NotHereditary("Galvin coloring needs a hereditary family containing ∅")
        self.K = K

    def __call__(self, M) -> int:
        """Evaluate on a finite prefix; 0 means no prefix seen so far leaves ``K``."""
        M = _as_finset(M)
        m = 0
        for x in M.elements:
            m |= 1 << x
            if m not in self.K.mask_set():
                return 1
        return 0

    def hom0_window(self, window: int | None = None) -> set[int]:
        """Window sets all of whose subsets, taken as prefixes, color 0."""
        window = self.K.window if window is None else window
        out = set()
        for X in range(1 << window):
            if all(self(FinSet.from_mask(sub)) == 0 for sub in submasks(X)):
                out.add(X)
        return out

    def check_window(self, window: int | None = None) -> bool:
        window = self.K.window if window is None else window
        inside = {m for m in self.K.masks if m < (1 << window)}
        return self.hom0_window(window) == inside


def galvin_coloring(K: SetFamily) -> GalvinColoring:
    return GalvinColoring(K)


# ------------------------------------------------------ rational enumerations

class RationalEnumeration:
    """An injective listing of rationals in (0,1).

    The default lists reduced fractions by denominator, then numerator:
    1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ...  A custom finite list may be supplied.
    """

    def __init__(self, values: Sequence | None = None):
        self.custom = values is not None
        self._values: list[Fraction] = [Fraction(v) for v in values] if values is not None else []
        self._index: dict[Fraction, int] = {}
        for i, v in enumerate(self._values):
            if v in self._index:
                raise ValidationError(f"value {v} listed twice")
            self._index[v] = i
        self._next_den = 2

    def _extend(self, n: int):
        while len(self._values) <= n:
            q = self._next_den
            for p in range(1, q):
                if math.gcd(p, q) == 1:
                    self._index[Fraction(p, q)] = len(self._values)
                    self._values.append(Fraction(p, q))
            self._next_den += 1

    def __call__(self, i: int) -> Fraction:
        if i >= len(self._values):
            if self.custom:
                raise ValidationError(f"custom enumeration has no index {i}")
            self._extend(i)
        return self._values[i]

    def index(self, q) -> int:
        q = Fraction(q)
        if not 0 < q < 1:
            raise ValidationError("value outside (0,1)")
        if q not in self._index and not self.custom:
            self._extend(sum(1 for d in range(2, q.denominator + 1) for p in range(1, d)
                             if math.gcd(p, d) == 1))
        return self._index[q]


CANONICAL_THETA = RationalEnumeration()


def q_coloring(theta: RationalEnumeration | None = None) -> PairColoring:
    """``{m<n}`` gets 1 iff ``θ(m) < θ(n)``."""
    theta = theta or CANONICAL_THETA
    return PairColoring(lambda m, n: 1 if theta(m) < theta(n) else 0, name="q_coloring")


def conv_coloring(theta: RationalEnumeration | None = None) -> FrontColoring:
    """``{k<l<m}`` gets 1 iff ``|θ(l) − θ(m)| < 1/(k+1)``."""
    theta = theta or CANONICAL_THETA

    def rule(s: FinSet) -> int:
        k, l, m = s.elements
        return 1 if abs(theta(l) - theta(m)) < Fraction(1, k + 1) else 0

    col = FrontColoring(cube_front(3), rule, name="conv")

    def added(s_mask: int, x: int) -> set[int]:
        pts = elements_of(s_mask)
        out = set()
        tx = theta(x)
        for i, k in enumerate(pts):
            bound = Fraction(1, k + 1)
            for l in pts[i + 1:]:
                out.add(1 if abs(theta(l) - tx) < bound else 0)
                if len(out) == 2:
                    return out
        return out

    col.colors_added = added
    return col


def conv_zero_builder(A, r: int, theta: RationalEnumeration | None = None) -> FinSet:
    """Pick ``r`` points of ``A`` forming a 0-homogeneous set for the conv coloring.

    Chooses points ``a_0 < ... < a_{2r-1}`` of ``A`` with increasing ``θ``,
    then a threshold point ``a`` whose ``1/(a+1)`` is below every gap between
    consecutive ``θ(a_i)``, then ``d_k > a`` in ``A`` with ``θ(d_k)`` strictly
    between ``θ(a_{2k})`` and ``θ(a_{2k+1})``.
    """
    theta = theta or CANONICAL_THETA
    A = _as_finset(A)
    pts = list(A.elements)
    if r <= 0:
        return FinSet()
    if r == 1:
        if not pts:
            raise InsufficientDensity("empty set")
        return FinSet([pts[0]])
    need = 2 * r
    failure = "no θ-increasing run of length %d in A" % need
    for cutoff in range(need, len(pts) + 1):
        chain = _increasing_run(pts[:cutoff], theta, need)
        if chain is None:
            continue
        picks = _complete_picks(pts, chain, r, theta)
        if isinstance(picks, str):
            failure = picks
            continue
        threshold, picks = picks
        break
    else:
        raise InsufficientDensity(failure)
    D = FinSet(picks)
    col = conv_coloring(theta)
    assert hom_check(col, D) <= {0}
    assert hom_check(col, D | FinSet([threshold])) <= {0}
    return D


def _increasing_run(pts, theta, need):
    """First ``need`` points of a longest θ-increasing subsequence of ``pts``, or None."""
    chains: list[list[int]] = []
    best: list[int] = []
    for x in pts:
        tx = theta(x)
        prev = [ch for ch in chains if theta(ch[-1]) < tx]
        chain = (max(prev, key=len) if prev else []) + [x]
        chains.append(chain)
        if len(chain) > len(best):
            best = chain
    return best[:need] if len(best) >= need else None


def _complete_picks(pts, chain, r, theta):
    gap = min(theta(b) - theta(a) for a, b in zip(chain, chain[1:]))
    threshold = next((a for a in pts if a > chain[-1] and Fraction(1, a + 1) < gap), None)
    if threshold is None:
        return "no threshold point with 1/(a+1) below the gaps"
    picks = []
    last = threshold
    for k in range(r):
        lo, hi = theta(chain[2 * k]), theta(chain[2 * k + 1])
        d = next((x for x in pts if x > last and lo < theta(x) < hi), None)
        if d is None:
            return f"no point of A between θ-values {lo} and {hi}"
        picks.append(d)
        last = d
    return threshold, picks


# ---------------------------------------------------------- named colorings

def dyadic_block(n: int) -> int:
    """Index ``j`` with ``2^j − 1 ≤ n < 2^(j+1) − 1``."""
    return (n + 1).bit_length() - 1


def ed_fin() -> PairColoring:
    """1 iff the two points lie in different dyadic blocks ``[2^j−1, 2^(j+1)−1)``."""
    return PairColoring(lambda m, n: 0 if dyadic_block(m) == dyadic_block(n) else 1, name="ed_fin")


def value_bucket(v: Fraction) -> int | None:
    """0 for ``v ≥ 1``, ``j`` for ``2^-j ≤ v < 2^-(j-1)``, ``None`` for ``v = 0``."""
    v = Fraction(v)
    if v >= 1:
        return 0
    if v <= 0:
        return None
    j = 1
    while v < Fraction(1, 1 << j):
        j += 1
    return j


def submeasure_blocks(phi) -> PairColoring:
    """0 iff both points share the bucket of their singleton values under ``phi``."""
    cache: dict[int, int | None] = {}

    def bucket(n: int):
        if n not in cache:
            cache[n] = value_bucket(phi(FinSet([n])))
        return cache[n]

    def rule(m: int, n: int) -> int:
        bm, bn = bucket(m), bucket(n)
        return 0 if bm is not None and bm == bn else 1

    return PairColoring(rule, name="submeasure_blocks")


def canonical_colorings(name: str, phi=None) -> PairColoring:
    if name == "ed_fin":
        return ed_fin()
    if name == "submeasure_blocks":
        if phi is None:
            raise ValidationError("submeasure_blocks needs a submeasure")
        return submeasure_blocks(phi)
    if name == "q_coloring":
        return q_coloring()
    raise ValidationError(f"unknown coloring {name!r}")


# ----------------------------------------------------------- Devlin numbers

DEVLIN_CAP = 8


def tangent_numbers(count: int) -> list[int]:
    """``T_0 .. T_{count-1}`` from ``tan' = 1 + tan²`` on exact power-series coefficients."""
    coef = [Fraction(0)] * count
    for k in range(count - 1):
        conv = sum((coef[i] * coef[k - i] for i in range(k + 1)), Fraction(0))
        coef[k + 1] = ((1 if k == 0 else 0) + conv) / (k + 1)
    return [int(coef[n] * math.factorial(n)) for n in range(count)]


def devlin_number(d: int) -> int:
    if d < 1:
        raise ValidationError("d must be at least 1")
    if d > DEVLIN_CAP:
        raise Overflow(f"d = {d} beyond the supported cap {DEVLIN_CAP}")
    return tangent_numbers(2 * d)[2 * d - 1]
