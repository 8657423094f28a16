"""Cardinal intervals, covering hypergraphs, Mazur colorings and the finite probes around them."""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .core_sets import FinSet, mask_of
from .errors import (BudgetExceeded, DegenerateInterval, EmptySpace, NotIndependentInput,
                     ValidationError)
from .measures import as_fraction


# ------------------------------------------------------------ intervals

class CardinalInterval:
    """All ``A ⊆ X`` with ``α·#X ≤ #A ≤ β·#X``, as masks in canonical order."""

    def __init__(self, X, alpha, beta):
        self.X = X if isinstance(X, FinSet) else FinSet(X)
        self.alpha, self.beta = as_fraction(alpha), as_fraction(beta)
        if not 0 <= self.alpha <= self.beta <= 1:
            raise ValidationError("need 0 ≤ α ≤ β ≤ 1")
        n = len(self.X)
        self.sizes = [k for k in range(n + 1) if self.alpha * n <= k <= self.beta * n]
        pts = self.X.elements
        self.members = [mask_of(c) for k in self.sizes for c in combinations(pts, k)]

    @classmethod
    def symmetric(cls, X, delta, p: int) -> "CardinalInterval":
        delta = as_fraction(delta)
        return cls(X, (1 - delta) / p, (1 + delta) / p)

    def __len__(self):
        return len(self.members)

    def __contains__(self, A) -> bool:
        m = A.mask if isinstance(A, FinSet) else (A if isinstance(A, int) else mask_of(A))
        return m & ~self.X.mask == 0 and m.bit_count() in self.sizes

    def hat(self, x: int) -> list[int]:
        """Members missing ``x``."""
        return [m for m in self.members if not m >> x & 1]


def covers(masks: Iterable[int], X: FinSet) -> bool:
    u = 0
    for m in masks:
        u |= m
    return u & X.mask == X.mask


# ------------------------------------------------------------ hypergraphs

@dataclass
class Hypergraph:
    vertices: list
    edges: list  # tuples of vertex indices
    uniform: int | None = None

    def __post_init__(self):
        n = len(self.vertices)
        self.edges = [tuple(sorted(set(e))) for e in self.edges]
        for e in self.edges:
            if any(not 0 <= v < n for v in e):
                raise ValidationError(f"edge {e} leaves the vertex set")
            if self.uniform is not None and len(e) != self.uniform:
                raise ValidationError(f"edge {e} is not {self.uniform}-uniform")
        self.incident = [[] for _ in range(n)]
        for k, e in enumerate(self.edges):
            for v in e:
                self.incident[v].append(k)

    def is_independent(self, idx: Iterable[int]) -> bool:
        s = set(idx)
        return not any(set(e) <= s for e in self.edges)

    def is_proper(self, coloring: Sequence[int]) -> bool:
        return all(len({coloring[v] for v in e}) > 1 for e in self.edges)

    def induced(self, idx: Sequence[int]) -> "Hypergraph":
        pos = {v: i for i, v in enumerate(idx)}
        edges = [tuple(pos[v] for v in e) for e in self.edges if all(v in pos for v in e)]
        return Hypergraph([self.vertices[v] for v in idx], edges, self.uniform)


@dataclass
class ChiResult:
    chi: int
    coloring: list
    nodes: int = 0


def _greedy(H: Hypergraph) -> list[int]:
    col = [-1] * len(H.vertices)
    for v in sorted(range(len(col)), key=lambda v: -len(H.incident[v])):
        c = 0
        while not _allowed(H, col, v, c):
            c += 1
        col[v] = c
    return col


def _allowed(H: Hypergraph, col: list[int], v: int, c: int) -> bool:
    for k in H.incident[v]:
        if all(u == v or col[u] == c for u in H.edges[k]):
            return False
    return True


def _graph_clique(H: Hypergraph) -> int:
    """Greedy clique size in the 2-uniform part, a lower bound for χ."""
    adj = [set() for _ in H.vertices]
    for e in H.edges:
        if len(e) == 2:
            adj[e[0]].add(e[1])
            adj[e[1]].add(e[0])
    best = 0
    for v in range(len(adj)):
        clique = [v]
        for u in sorted(adj[v], key=lambda u: -len(adj[u])):
            if all(u in adj[w] for w in clique):
                clique.append(u)
        best = max(best, len(clique))
    return best


def k_colorable(H: Hypergraph, k: int, node_budget: int = 5_000_000, deadline: float | None = None):
    """A proper ``k``-coloring or ``None``; saturation-style ordering, colors used in order."""
    n = len(H.vertices)
    col = [-1] * n
    nodes = 0
    if any(len(e) == 1 for e in H.edges):
        return None, 0

    def pick():
        best, best_key = -1, None
        for v in range(n):
            if col[v] >= 0:
                continue
            banned = sum(1 for c in range(k) if not _allowed(H, col, v, c))
            key = (banned, len(H.incident[v]))
            if best_key is None or key > best_key:
                best, best_key = v, key
        return best

    def search(assigned: int, used: int) -> bool:
        nonlocal nodes
        if assigned == n:
            return True
        nodes += 1
        if nodes > node_budget or (deadline is not None and nodes % 4096 == 0 and time.monotonic() > deadline):
            raise BudgetExceeded("colorability search budget exhausted")
        v = pick()
        for c in range(min(k, used + 1)):
            if _allowed(H, col, v, c):
                col[v] = c
                if search(assigned + 1, max(used, c + 1)):
                    return True
                col[v] = -1
        return False

    ok = search(0, 0)
    return (list(col) if ok else None), nodes


def chromatic_number(H: Hypergraph, max_vertices: int = 40, node_budget: int = 5_000_000) -> ChiResult:
    """Exact χ: proper colorings may not make any hyperedge monochromatic."""
    n = len(H.vertices)
    if n == 0:
        return ChiResult(0, [])
    upper = _greedy(H)
    hi = max(upper) + 1
    lo = max(1 if not H.edges else 2, _graph_clique(H))
    if n > max_vertices:
        raise BudgetExceeded(f"{n} vertices beyond the exact cap {max_vertices}", bounds=(lo, hi))
    best = upper
    total = 0
    for k in range(lo, hi):
        try:
            col, nodes = k_colorable(H, k, node_budget)
        except BudgetExceeded as exc:
            raise BudgetExceeded(str(exc), bounds=(k, hi)) from exc
        total += nodes
        if col is not None:
            best = col
            break
    chi = max(best) + 1
    assert H.is_proper(best)
    return ChiResult(chi, best, total)


# ------------------------------------------------------------ Mazur colorings

Block = tuple  # (X: FinSet, alpha, beta)


def _blocks(blocks: Sequence) -> list[CardinalInterval]:
    return [b if isinstance(b, CardinalInterval) else CardinalInterval(*b) for b in blocks]


def mazur_coloring(blocks: Sequence, d: int):
    """Color of a ``d``-family of tagged members ``(block, mask)``: 1 iff no block is covered."""
    ivs = _blocks(blocks)

    def color(family) -> int:
        fam = [(n, m.mask if isinstance(m, FinSet) else (m if isinstance(m, int) else mask_of(m)))
               for n, m in family]
        if len(set(fam)) != d:
            raise ValidationError(f"expected {d} distinct members")
        for n, m in fam:
            if m not in ivs[n]:
                raise ValidationError(f"{FinSet.from_mask(m)} is not in block {n}")
        for n, iv in enumerate(ivs):
            if covers((m for k, m in fam if k == n), iv.X):
                return 0
        return 1

    color.blocks = ivs
    color.d = d
    return color


def covering_hypergraph(block, d: int) -> Hypergraph:
    """Vertices: members of one interval; edges: ``d``-families that cover ``X`` (color 0)."""
    iv = block if isinstance(block, CardinalInterval) else CardinalInterval(*block)
    idx = range(len(iv.members))
    edges = [e for e in combinations(idx, d) if covers((iv.members[i] for i in e), iv.X)]
    return Hypergraph(list(iv.members), edges, d)


def amalgam_hypergraph(blocks: Sequence, d: int) -> Hypergraph:
    ivs = _blocks(blocks)
    verts = [(n, m) for n, iv in enumerate(ivs) for m in iv.members]
    col = mazur_coloring(ivs, d)
    edges = [e for e in combinations(range(len(verts)), d) if col([verts[i] for i in e]) == 0]
    return Hypergraph(verts, edges, d)


def _min_cover_size(masks: Sequence[int], X: FinSet, limit: int):
    for k in range(1, limit + 1):
        for c in combinations(masks, k):
            if covers(c, X):
                return k, c
    return None, None


def zero_hom_max(block, d: int) -> int:
    """Largest family of members in which every ``d`` distinct members cover ``X``."""
    H = covering_hypergraph(block, d)
    n = len(H.vertices)
    edge_set = set(H.edges)
    best = min(n, d - 1)

    def ok(clique, v):
        return all(tuple(sorted(c + (v,))) in edge_set for c in combinations(clique, d - 1))

    def grow(clique, start):
        nonlocal best
        best = max(best, len(clique))
        for v in range(start, n):
            if len(clique) + (n - v) <= best:
                return
            if len(clique) < d - 1 or ok(clique, v):
                grow(clique + (v,), v + 1)

    grow((), 0)
    return best


@dataclass
class GillisResult:
    d: int
    alpha: Fraction
    beta: Fraction
    a: list
    m0: int
    k: int
    root_bound: Fraction = Fraction(0)


def surjection_counts(d: int) -> list[int]:
    """``a_l`` = number of surjections from a ``d``-set onto an ``l``-set, ``l = 0..d``."""
    return [sum((-1) ** j * math.comb(l, j) * (l - j) ** d for j in range(l + 1)) for l in range(d + 1)]


def _binom_poly(l: int) -> list[Fraction]:
    """Coefficients (constant first) of ``m(m−1)…(m−l+1)/l!``."""
    poly = [Fraction(1)]
    for j in range(l):
        nxt = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] += c
            nxt[i] -= j * c
        poly = nxt
    return [c / math.factorial(l) for c in poly]


def gillis_bound(d: int, alpha, beta) -> GillisResult:
    """Largest ``m`` with ``m^d (1−β)^d ≤ (1−α) Σ_{l<d} a_l C(m, l)``, and ``k = m·(d−1)``."""
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    if d < 2:
        raise ValidationError("d ≥ 2")
    if beta >= 1:
        raise DegenerateInterval("β must be below 1")
    if not 0 <= alpha <= beta:
        raise ValidationError("need 0 ≤ α ≤ β")
    a = surjection_counts(d)
    # P(m) = (1−β)^d m^d − (1−α) Σ a_l C(m,l); the inequality is P(m) ≤ 0
    P = [Fraction(0)] * (d + 1)
    P[d] += (1 - beta) ** d
    for l in range(1, d):
        for i, c in enumerate(_binom_poly(l)):
            P[i] -= (1 - alpha) * a[l] * c
    lead = P[d]
    bound = 1 + max(abs(c) / lead for c in P[:d])  # every real root is below this
    m0 = 0
    for m in range(1, math.floor(bound) + 1):
        if sum(c * m ** i for i, c in enumerate(P)) <= 0:
            m0 = m
    return GillisResult(d, alpha, beta, a[1:d], m0, m0 * (d - 1), bound)


# ------------------------------------------------------------ amalgamation

@dataclass
class Refinement:
    d: int
    r: int
    pieces: list  # pieces[i] = list of (block, mask)
    per_block: list  # per_block[n][i] = list of masks
    verified: bool = False


def amalgam_refinement(blocks: Sequence, partitions: Sequence[Sequence[Sequence[int]]], d: int) -> Refinement:
    """Turn per-block independent partitions into at most ``r·d`` pieces independent in the amalgam.

    Each piece ``P`` with ``#P ≥ d`` is split into ``d − 1`` singletons and the rest;
    smaller pieces are split into singletons.
    """
    ivs = _blocks(blocks)
    if len(partitions) != len(ivs):
        raise ValidationError("one partition per block")
    r = max((len(p) for p in partitions), default=0)
    per_block = []
    for n, (iv, parts) in enumerate(zip(ivs, partitions)):
        flat = sorted(m for piece in parts for m in piece)
        if flat != sorted(iv.members):
            raise ValidationError(f"block {n}: pieces do not partition the interval")
        for piece in parts:
            if len(piece) >= d:
                k, wit = _min_cover_size(list(piece), iv.X, d)
                if k is not None:
                    extra = [m for m in piece if m not in wit][: d - k]
                    edge = tuple(FinSet.from_mask(m) for m in (*wit, *extra))
                    raise NotIndependentInput(f"block {n}: piece contains a covering {d}-family", witness=edge)
        out: list[list[int]] = []
        for piece in parts:
            piece = sorted(piece, key=lambda m: (m.bit_count(), m))
            if len(piece) >= d:
                out.extend([m] for m in piece[: d - 1])
                out.append(piece[d - 1:])
            else:
                out.extend([m] for m in piece)
        out.extend([] for _ in range(r * d - len(out)))
        per_block.append(out)
    pieces = [[(n, m) for n in range(len(ivs)) for m in per_block[n][i]] for i in range(r * d)]
    ref = Refinement(d, r, pieces, per_block)
    ref.verified = _verify_amalgam_pieces(ivs, ref)
    assert ref.verified, "refined pieces are not independent"
    return ref


def _verify_amalgam_pieces(ivs: list[CardinalInterval], ref: Refinement) -> bool:
    d = ref.d
    for i, piece in enumerate(ref.pieces):
        if len(piece) < d:
            continue
        for n, iv in enumerate(ivs):
            k, _ = _min_cover_size(ref.per_block[n][i], iv.X, d)
            if k is not None:
                return False
    return True


def hat_partition(block, d: int) -> list[list[int]]:
    """Partition of an interval by the least missing point (the ``x̂`` pieces)."""
    iv = block if isinstance(block, CardinalInterval) else CardinalInterval(*block)
    parts: dict[int, list[int]] = {}
    for m in iv.members:
        miss = iv.X.mask & ~m
        if not miss:
            raise ValidationError("the interval contains X itself, which no piece can absorb")
        parts.setdefault((miss & -miss).bit_length() - 1, []).append(m)
    return [parts[k] for k in sorted(parts)]


# ------------------------------------------------------------ mono covers

@dataclass
class CoverVerdict:
    n: int
    p: int
    r: int
    verdict: str  # UNIVERSAL | COUNTEREXAMPLE | BUDGET
    vertices: int
    edges: int
    nodes: int = 0
    coloring: list | None = None
    witness: list | None = None
    runtime_ms: int = 0


def cover_hypergraph(n: int, p: int, r: int) -> Hypergraph:
    """Vertices: ``(n/p)``-subsets of ``[0,n)``; edges: ``(p+r)``-families covering ``[0,n)``."""
    if p <= 0 or n % p:
        raise ValidationError("p must divide n")
    verts = [mask_of(c) for c in combinations(range(n), n // p)]
    full = (1 << n) - 1
    edges = [e for e in combinations(range(len(verts)), p + r)
             if _union(verts[i] for i in e) == full]
    return Hypergraph(verts, edges, p + r)


def _union(masks) -> int:
    u = 0
    for m in masks:
        u |= m
    return u


def mono_cover_search(n: int, p: int, r: int, budget_ms: int | None = 600_000,
                      node_budget: int = 50_000_000) -> CoverVerdict:
    """Does every ``r``-coloring of the ``(n/p)``-subsets of ``[0,n)`` have ``p + r``
    distinct sets of one color covering ``[0,n)``?

    Equivalent to the covering hypergraph not being ``r``-colorable, which is
    decided by exhaustive backtracking with colors introduced in order.
    """
    t0 = time.monotonic()
    H = cover_hypergraph(n, p, r)
    deadline = t0 + budget_ms / 1000 if budget_ms else None
    try:
        col, nodes = k_colorable(H, r, node_budget, deadline)
    except BudgetExceeded:
        return CoverVerdict(n, p, r, "BUDGET", len(H.vertices), len(H.edges),
                            runtime_ms=int((time.monotonic() - t0) * 1000))
    ms = int((time.monotonic() - t0) * 1000)
    if col is not None:
        assert H.is_proper(col)
        coloring = [[str(FinSet.from_mask(H.vertices[v])), col[v]] for v in range(len(col))]
        return CoverVerdict(n, p, r, "COUNTEREXAMPLE", len(H.vertices), len(H.edges), nodes, coloring, runtime_ms=ms)
    return CoverVerdict(n, p, r, "UNIVERSAL", len(H.vertices), len(H.edges), nodes, runtime_ms=ms)


def mono_cover_oracle(n: int, p: int, r: int) -> str:
    """Independent check for ``r = 2`` (or 1) by a superset-closure transform over all color classes."""
    H = cover_hypergraph(n, p, r)
    V = len(H.vertices)
    if r == 1:
        return "UNIVERSAL" if H.edges else "COUNTEREXAMPLE"
    if r != 2 or V > 24:
        raise BudgetExceeded("oracle handles r ≤ 2 and at most 24 vertices")
    good = np.zeros(1 << V, dtype=bool)
    for e in H.edges:
        good[sum(1 << v for v in e)] = True
    idx = np.arange(1 << V, dtype=np.int64)
    for b in range(V):
        has = (idx >> b) & 1 == 1
        good[has] |= good[idx[has] ^ (1 << b)]
    comp = ((1 << V) - 1) ^ idx
    bad = ~good & ~good[comp]
    return "COUNTEREXAMPLE" if bad.any() else "UNIVERSAL"


# ------------------------------------------------------------ equi-surjections

def _size_window(n: int, p: int, delta) -> tuple[int, int]:
    delta = as_fraction(delta)
    lo = max(1, math.ceil(Fraction(n, p) * (1 - delta)))
    hi = math.floor(Fraction(n, p) * (1 + delta))
    return lo, hi


def _size_vectors(n: int, p: int, lo: int, hi: int):
    def rec(left, k):
        if k == 1:
            if lo <= left <= hi:
                yield (left,)
            return
        for s in range(lo, min(hi, left) + 1):
            for rest in rec(left - s, k - 1):
                yield (s,) + rest
    yield from rec(n, p)


def _multinomial(n: int, sizes) -> int:
    out, left = 1, n
    for s in sizes:
        out *= math.comb(left, s)
        left -= s
    return out


def equi_count(n: int, p: int, delta) -> int:
    lo, hi = _size_window(n, p, delta)
    return sum(_multinomial(n, v) for v in _size_vectors(n, p, lo, hi))


def hamming(F: Sequence[int], G: Sequence[int]) -> Fraction:
    return Fraction(sum(1 for a, b in zip(F, G) if a != b), len(F))


def sample_equi(n: int, p: int, delta, count: int, rng: random.Random) -> list[tuple[int, ...]]:
    """Uniform samples: a size vector drawn with weight equal to its number of maps, then a shuffle."""
    lo, hi = _size_window(n, p, delta)
    vecs = list(_size_vectors(n, p, lo, hi))
    if not vecs:
        raise EmptySpace(f"no δ-equi-surjections for n={n}, p={p}, δ={delta}")
    weights = [_multinomial(n, v) for v in vecs]
    out = []
    for _ in range(count):
        v = rng.choices(vecs, weights=weights)[0]
        word = [q for q, s in enumerate(v) for _ in range(s)]
        rng.shuffle(word)
        out.append(tuple(word))
    return out


@dataclass
class ConcentrationEstimate:
    n: int
    p: int
    delta: Fraction
    eta: Fraction
    eps: Fraction
    trials: int
    min_fattening: float
    deficit: float
    space_size: int


def equi_concentration(n: int, p: int, delta, eta, eps, trials: int, seed: int,
                       samples: int = 2000) -> ConcentrationEstimate:
    """Smallest observed ``μ(𝒮_ε)`` over ``trials`` ball-shaped sets ``𝒮`` of mass ``≥ η``.

    Each ``𝒮`` is a Hamming ball around a random map whose radius is the
    empirical ``η``-quantile of distances; its ``ε``-fattening is taken as the
    ball of radius enlarged by ``ε``.  Masses are estimated from ``samples``
    uniform draws, so the figures are Monte Carlo estimates.
    """
    eta, eps = as_fraction(eta), as_fraction(eps)
    rng = random.Random(seed)
    pool = np.array(sample_equi(n, p, delta, samples, rng), dtype=np.int16)
    centers = np.array(sample_equi(n, p, delta, trials, rng), dtype=np.int16)
    k = max(1, math.ceil(eta * samples))
    worst = 1.0
    for c in centers:
        dist = (pool != c).sum(axis=1)
        radius = np.sort(dist, kind="stable")[k - 1]
        near = float((dist <= radius + eps * n).mean())
        worst = min(worst, near)
    return ConcentrationEstimate(n, p, as_fraction(delta), eta, eps, trials, worst, 1.0 - worst,
                                 equi_count(n, p, delta))


# ------------------------------------------------------------ Schreier–Mazur family

@dataclass
class SchreierMazur:
    window: int
    order: list  # (n, mask) sorted by size then lexicographically
    position: dict = field(default_factory=dict)

    def __post_init__(self):
        self.position = {v: i for i, v in enumerate(self.order)}

    def is_member(self, s: Sequence) -> bool:
        """``#s = min_{A ∈ s} #A``."""
        s = list(s)
        return bool(s) and len(set(s)) == len(s) and len(s) == min(n for n, _ in s)

    def color(self, s: Sequence) -> int:
        """1 iff no ``[2n]^n`` part of ``s`` covers ``[0, 2n)``."""
        for n in {n for n, _ in s}:
            if covers((m for k, m in s if k == n), FinSet.interval(0, 2 * n)):
                return 0
        return 1

    def hat_selection(self, picks: dict[int, int]) -> list:
        """Union over ``n`` of the members of ``[2n]^n`` missing ``picks[n]``, in order."""
        return [v for v in self.order if v[0] in picks and not v[1] >> picks[v[0]] & 1]

    def members_inside(self, pts: Sequence, limit: int = 200_000):
        """``ℬ``-members inside ``pts`` (listed in ``≺`` order)."""
        pts = sorted(pts, key=self.position.__getitem__)
        count = 0
        for i, first in enumerate(pts):
            size = first[0]
            for rest in combinations(pts[i + 1:], size - 1):
                count += 1
                if count > limit:
                    raise BudgetExceeded("too many members to enumerate")
                yield (first,) + rest

    def check_hat_homogeneous(self, picks: dict[int, int]) -> bool:
        sel = self.hat_selection(picks)
        return all(self.color(s) == 1 for s in self.members_inside(sel))


def schreier_mazur_family(window: int) -> SchreierMazur:
    """``⋃_{1 ≤ n ≤ window} [2n]^n`` ordered by size, then lexicographically on sorted tuples."""
    order = []
    for n in range(1, window + 1):
        order.extend((n, mask_of(c)) for c in combinations(range(2 * n), n))
    return SchreierMazur(window, order)
