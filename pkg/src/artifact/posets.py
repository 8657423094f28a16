"""Finite strict partial orders: width, Dilworth chain covers, Mirsky antichain covers.

Also builds the order ``m ≺ n iff m < n and c{m,n} = i`` from a pair coloring
and checks, on a finite window, that chains and antichains of that order
decompose the window into homogeneous pieces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .colorings import PairColoring, hom_check, homogeneous_sets
from .core_sets import CompactFamily, FinSet, elements_of
from .errors import NotComparability, ValidationError


class Poset:
    """A strict order on a finite ground set, stored as successor bitmasks."""

    def __init__(self, ground: Iterable[int], relation: Iterable[tuple[int, int]], check: bool = True):
        self.points: tuple[int, ...] = tuple(sorted(set(ground)))
        self.pos = {p: i for i, p in enumerate(self.points)}
        n = len(self.points)
        up = [0] * n
        for a, b in relation:
            if a not in self.pos or b not in self.pos:
                raise ValidationError(f"pair ({a},{b}) leaves the ground set")
            up[self.pos[a]] |= 1 << self.pos[b]
        self.up = up  # up[i] = bitmask of indices j with points[i] ≺ points[j]
        if check:
            self._verify()

    def _verify(self):
        n = len(self.points)
        for i in range(n):
            if self.up[i] >> i & 1:
                raise ValidationError(f"relation is not irreflexive at {self.points[i]}")
            for j in elements_of(self.up[i]):
                extra = self.up[j] & ~self.up[i]
                if extra:
                    k = elements_of(extra)[0]
                    raise NotComparability(
                        "relation is not transitive",
                        witness=(self.points[i], self.points[j], self.points[k]))

    def __len__(self):
        return len(self.points)

    def less(self, a: int, b: int) -> bool:
        return bool(self.up[self.pos[a]] >> self.pos[b] & 1)

    def comparable_mask(self, i: int) -> int:
        down = 0
        for j, u in enumerate(self.up):
            if u >> i & 1:
                down |= 1 << j
        return self.up[i] | down

    def relation(self) -> list[tuple[int, int]]:
        return [(self.points[i], self.points[j]) for i, u in enumerate(self.up) for j in elements_of(u)]

    def is_chain(self, pts) -> bool:
        idx = [self.pos[p] for p in pts]
        return all(self.up[a] >> b & 1 or self.up[b] >> a & 1 for x, a in enumerate(idx) for b in idx[x + 1:])

    def is_antichain(self, pts) -> bool:
        idx = [self.pos[p] for p in pts]
        return all(not (self.up[a] >> b & 1 or self.up[b] >> a & 1) for x, a in enumerate(idx) for b in idx[x + 1:])


def divisibility_poset(ground: Iterable[int]) -> Poset:
    g = sorted(ground)
    return Poset(g, [(a, b) for a in g for b in g if a != b and b % a == 0])


def poset_from_coloring(c: PairColoring, i: int, window) -> Poset:
    """``m ≺ n`` iff ``m < n`` and ``c{m,n} = i``; raises with a witness triple if not transitive."""
    pts = window.elements if isinstance(window, FinSet) else tuple(sorted(window))
    rel = [(a, b) for x, a in enumerate(pts) for b in pts[x + 1:] if c.pair_rule(a, b) == i]
    return Poset(pts, rel)


# ------------------------------------------------------------------- matching

def _max_matching(n: int, adj: list[int]) -> list[int]:
    """Maximum bipartite matching left ``i`` -> right ``j`` for ``j`` in ``adj[i]``.

    Returns ``match_right`` with ``match_right[j]`` the left partner of ``j`` or -1.
    Simple augmenting paths; the graphs here have at most a few dozen vertices.
    """
    match_right = [-1] * n

    def augment(i: int, seen: list[bool]) -> bool:
        for j in elements_of(adj[i]):
            if seen[j]:
                continue
            seen[j] = True
            if match_right[j] < 0 or augment(match_right[j], seen):
                match_right[j] = i
                return True
        return False

    for i in range(n):
        augment(i, [False] * n)
    return match_right


@dataclass
class DilworthResult:
    width: int
    chains: list[list[int]]
    antichain: list[int] = field(default_factory=list)


def width_and_dilworth(P: Poset) -> DilworthResult:
    """Minimum chain cover via matching, plus a maximum antichain from König's theorem."""
    n = len(P)
    match_right = _max_matching(n, P.up)
    match_left = [-1] * n
    for j, i in enumerate(match_right):
        if i >= 0:
            match_left[i] = j
    chains = []
    for start in range(n):
        if match_right[start] >= 0:
            continue
        chain = [start]
        while match_left[chain[-1]] >= 0:
            chain.append(match_left[chain[-1]])
        chains.append([P.points[k] for k in chain])
    # König: unmatched left vertices and everything reachable by alternating paths
    reach_left = [False] * n
    reach_right = [False] * n
    stack = [i for i in range(n) if match_left[i] < 0]
    for i in stack:
        reach_left[i] = True
    while stack:
        i = stack.pop()
        for j in elements_of(P.up[i]):
            if not reach_right[j]:
                reach_right[j] = True
                k = match_right[j]
                if k >= 0 and not reach_left[k]:
                    reach_left[k] = True
                    stack.append(k)
    # minimum vertex cover = (left not reached) ∪ (right reached); antichain = points in neither
    antichain = [P.points[x] for x in range(n) if reach_left[x] and not reach_right[x]]
    width = len(chains)
    assert len(antichain) == width, "Dilworth duality failed"
    assert P.is_antichain(antichain)
    assert all(P.is_chain(ch) for ch in chains)
    return DilworthResult(width, chains, antichain)


def mirsky_cover(P: Poset) -> list[list[int]]:
    """Antichains by height: level ``h`` holds points whose longest chain ending there has ``h+1`` points."""
    n = len(P)
    height = [0] * n
    order = _topological(P)
    down = [0] * n
    for i, u in enumerate(P.up):
        for j in elements_of(u):
            down[j] |= 1 << i
    for i in order:
        height[i] = 1 + max((height[j] for j in elements_of(down[i])), default=0)
    levels: list[list[int]] = [[] for _ in range(max(height, default=0))]
    for i in range(n):
        levels[height[i] - 1].append(P.points[i])
    return levels


def _topological(P: Poset) -> list[int]:
    n = len(P)
    indeg = [0] * n
    for u in P.up:
        for j in elements_of(u):
            indeg[j] += 1
    ready = [i for i in range(n) if indeg[i] == 0]
    out = []
    while ready:
        i = ready.pop()
        out.append(i)
        for j in elements_of(P.up[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    return out


def longest_chain(P: Poset) -> int:
    return len(mirsky_cover(P))


# -------------------------------------------------------------- duality check

@dataclass
class DualityReport:
    color: int
    window: list[int]
    longest_chain: int
    antichain_pieces: list[list[int]]
    width: int
    chain_pieces: list[list[int]]
    norm_hom_i: int | None = None
    norm_hom_other: int | None = None
    passed: bool = False


def window_duality_check(c: PairColoring, i: int, M, with_norms: bool = True) -> DualityReport:
    """Decompose ``M`` by Mirsky into ``(1-i)``-homogeneous pieces and by Dilworth into ``i``-homogeneous ones.

    The number of Mirsky pieces equals the largest ``i``-homogeneous subset of
    ``M`` and the number of Dilworth pieces the largest ``(1-i)``-homogeneous
    subset; with ``with_norms`` both sizes are recomputed as evaluation norms
    over the families of homogeneous sets.
    """
    M = M if isinstance(M, FinSet) else FinSet(M)
    P = poset_from_coloring(c, i, M)
    levels = mirsky_cover(P)
    dil = width_and_dilworth(P)
    ok = True
    for piece in levels:
        ok &= hom_check(c, FinSet(piece)) <= {1 - i}
    for piece in dil.chains:
        ok &= hom_check(c, FinSet(piece)) <= {i}
    report = DualityReport(i, list(M.elements), len(levels), levels, dil.width, dil.chains)
    if with_norms:
        from .banach import eval_norm

        window = (M.max() + 1) if M else 1
        fam_i = CompactFamily(homogeneous_sets(c, i, M), window, check=False)
        fam_o = CompactFamily(homogeneous_sets(c, 1 - i, M), window, check=False)
        report.norm_hom_i = int(eval_norm(fam_i, None, M))
        report.norm_hom_other = int(eval_norm(fam_o, None, M))
        ok &= report.norm_hom_i == len(levels)
        ok &= report.norm_hom_other == dil.width
    report.passed = bool(ok)
    return report
