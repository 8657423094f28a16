"""Finite-dimensional norm computations behind evaluation sequences and block colorings.

Vectors are finitely supported maps ``coordinate -> Fraction``.  Two coordinate
systems are supported: plain sequence-space coordinates (sup, l1 or l2 norm),
and the node basis of ``C(𝓕)`` for a finite tree ``𝓕``, where coordinate ``k``
is the indicator of the cone above the ``k``-th node and the norm is the sup
over the nodes of the evaluated function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .colorings import PairColoring
from .core_sets import CompactFamily, FinSet, SetFamily, elements_of, mask_of, restrict
from .errors import BudgetExceeded, NotHomogeneous, NotInFront, ValidationError
from .fronts import UniformFront
from .measures import RationalMeasure, as_fraction, normalize_measures, quantize_measures

Vector = Mapping[int, Fraction]


def _frac_vec(v: Mapping) -> dict[int, Fraction]:
    return {int(k): as_fraction(c) for k, c in v.items() if c != 0}


def _add(acc: dict, v: Mapping, scale=1) -> dict:
    for k, c in v.items():
        acc[k] = acc.get(k, 0) + scale * c
        if acc[k] == 0:
            del acc[k]
    return acc


def _as_finset(s) -> FinSet:
    return s if isinstance(s, FinSet) else FinSet(s)


# -------------------------------------------------------- evaluation norms

def eval_norm(K: SetFamily, a=None, F=None):
    """``max_{A ∈ K} |Σ_{n ∈ F ∩ A} a_n|``; with ``a = None`` every coefficient is 1.

    For the all-ones case this is the largest trace ``#(F ∩ A)`` and is computed
    with vectorised popcounts; otherwise exact rational sums are used.
    """
    F = _as_finset(F) if F is not None else FinSet.interval(0, K.window)
    if a is None:
        if not K.masks:
            return 0
        if len(K.masks) > 64 and K.window <= 64:
            arr = np.array(K.masks, dtype=np.uint64)
            return int(np.bitwise_count(arr & np.uint64(F.mask)).max())
        return max((m & F.mask).bit_count() for m in K.masks)
    coeff = a if isinstance(a, Mapping) else dict(enumerate(a))
    coeff = {k: as_fraction(v) for k, v in coeff.items()}
    best = Fraction(0)
    for m in K.masks:
        total = sum((coeff.get(n, 0) for n in elements_of(m & F.mask)), Fraction(0))
        best = max(best, abs(total))
    return best


def eval_norms_all_ones(K: SetFamily, Fs: Sequence[int]) -> np.ndarray:
    """``eval_norm(K, None, F)`` for many ``F`` at once (masks in, ints out)."""
    arr = np.array(K.masks, dtype=np.uint64)
    out = np.empty(len(Fs), dtype=np.int64)
    for i, F in enumerate(Fs):
        out[i] = int(np.bitwise_count(arr & np.uint64(F)).max()) if len(arr) else 0
    return out


def schreier_family(window: int) -> CompactFamily:
    """Sets ``s ⊆ [0, window)`` with ``#s ≤ min s + 1`` (closed under subsets)."""
    def ok(m: int) -> bool:
        low = (m & -m).bit_length() - 1
        return m.bit_count() <= low + 1

    return CompactFamily.from_predicate(ok, window)


def schreier_lower_bound_audit(F, window: int | None = None) -> tuple[int, Fraction]:
    F = _as_finset(F)
    window = window if window is not None else (F.max() + 1 if F else 1)
    norm = eval_norm(schreier_family(window), None, F)
    bound = Fraction(len(F), 2)
    assert norm >= bound, f"Schreier norm {norm} below #F/2 for {F}"
    return norm, bound


# -------------------------------------------------------------- node basis

class NodeBasisSpace:
    """``C(𝓕)`` with the basis of cone indicators ``f_k(t) = 1 iff t_k ⊑ t``.

    ``enumeration`` lists the nodes (as FinSets or masks) with ``t_0 = ∅`` and
    proper initial segments appearing earlier; it defaults to canonical order.
    """

    def __init__(self, family: SetFamily, enumeration: Sequence | None = None):
        if 0 not in family.mask_set() or not family.is_prefix_closed():
            raise ValidationError("node basis needs a tree: ∅ plus closure under initial segments")
        self.family = family
        if enumeration is None:
            nodes = list(family.masks)
        else:
            nodes = [t.mask if isinstance(t, FinSet) else int(t) for t in enumeration]
            if sorted(nodes) != sorted(family.masks):
                raise ValidationError("enumeration must list each node exactly once")
        if nodes[0] != 0:
            raise ValidationError("the enumeration must start with the empty node")
        self.nodes = nodes
        self.theta = {t: k for k, t in enumerate(nodes)}
        for k, t in enumerate(nodes):
            if t:
                parent = t & ~(1 << (t.bit_length() - 1))
                if self.theta[parent] >= k:
                    raise ValidationError("initial segments must be enumerated first")
        # parent index for each node, used to evaluate all nodes in one pass
        self.parent = [-1] + [self.theta[t & ~(1 << (t.bit_length() - 1))] for t in nodes[1:]]

    def __len__(self):
        return len(self.nodes)

    def index(self, t) -> int:
        return self.theta[t.mask if isinstance(t, FinSet) else mask_of(t)]

    def evaluate_all(self, coeffs: Mapping[int, Fraction]) -> list[Fraction]:
        vals = [Fraction(0)] * len(self.nodes)
        for k in range(len(self.nodes)):
            base = vals[self.parent[k]] if k else Fraction(0)
            vals[k] = base + coeffs.get(k, 0)
        return vals

    def norm(self, coeffs: Mapping[int, Fraction]) -> Fraction:
        return max(abs(v) for v in self.evaluate_all(coeffs))

    def describe(self) -> str:
        return "node basis"


def node_eval(space: NodeBasisSpace, coeffs, t) -> Fraction:
    """``x(t) = Σ_{t_k ⊑ t} coefficient_k``."""
    coeffs = coeffs if isinstance(coeffs, Mapping) else dict(enumerate(coeffs))
    tm = t.mask if isinstance(t, FinSet) else mask_of(t)
    if tm not in space.theta:
        raise ValidationError(f"{FinSet.from_mask(tm)} is not a node")
    total = Fraction(0)
    m = tm
    while True:
        total += as_fraction(coeffs.get(space.theta[m], 0))
        if not m:
            break
        m &= ~(1 << (m.bit_length() - 1))
    return total


def sup_norm(space: NodeBasisSpace, coeffs) -> Fraction:
    coeffs = coeffs if isinstance(coeffs, Mapping) else dict(enumerate(coeffs))
    return space.norm({k: as_fraction(v) for k, v in coeffs.items()})


class CoordinateSpace:
    """Sequence-space coordinates with the sup, l1 or l2 norm.

    ``blocks_l2`` groups coordinates into dyadic blocks and takes the l2 norm
    of the block l1 norms.  The l2 variants return floats.
    """

    KINDS = ("sup", "l1", "l2", "blocks_l2")

    def __init__(self, kind: str = "sup"):
        if kind not in self.KINDS:
            raise ValidationError(f"unknown norm {kind!r}")
        self.kind = kind

    def norm(self, v: Mapping[int, Fraction]):
        if self.kind == "sup":
            return max((abs(c) for c in v.values()), default=Fraction(0))
        if self.kind == "l1":
            return sum((abs(c) for c in v.values()), Fraction(0))
        if self.kind == "l2":
            return math.sqrt(sum((c * c for c in v.values()), Fraction(0)))
        blocks: dict[int, Fraction] = {}
        for k, c in v.items():
            j = (k + 1).bit_length() - 1
            blocks[j] = blocks.get(j, Fraction(0)) + abs(c)
        return math.sqrt(sum((b * b for b in blocks.values()), Fraction(0)))

    def describe(self) -> str:
        return self.kind


@dataclass
class FinVectorSeq:
    """A finite sequence of finitely supported vectors over a coordinate system."""

    vectors: list
    space: object = field(default_factory=CoordinateSpace)
    nonneg: bool = False

    def __post_init__(self):
        self.vectors = [_frac_vec(v) for v in self.vectors]
        if self.nonneg:
            for n, v in enumerate(self.vectors):
                if isinstance(self.space, NodeBasisSpace):
                    if min(self.space.evaluate_all(v)) < 0:
                        raise ValidationError(f"x_{n} takes a negative value")
                elif any(c < 0 for c in v.values()):
                    raise ValidationError(f"x_{n} has a negative coordinate")

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, n):
        return self.vectors[n]

    def norm(self, v) -> Fraction:
        return self.space.norm(v)

    def combination(self, idx: Iterable[int], a=None) -> dict:
        acc: dict = {}
        for n in idx:
            _add(acc, self.vectors[n], 1 if a is None else a[n])
        return acc

    def sum_norm(self, idx: Iterable[int], a=None):
        return self.norm(self.combination(idx, a))

    def max_supp(self, n: int) -> int:
        return max(self.vectors[n], default=-1)

    def to_json(self) -> dict:
        return {str(n): {str(k): f"{c.numerator}/{c.denominator}" for k, c in v.items()}
                for n, v in enumerate(self.vectors)}


# ---------------------------------------------------- Cantor representation

@dataclass
class Representation:
    nodes: list  # tuples of prefix values, root first
    codes: dict  # node tuple -> binary code string
    g: list  # g[n] = {code: value}
    witness_points: list
    measures: list
    window: int
    certified_sets: int = 0

    def g_value(self, n: int, point: str) -> Fraction:
        return sum((v for c, v in self.g[n].items() if point.startswith(c)), Fraction(0))

    def sum_norm(self, F) -> Fraction:
        idx = elements_of(_as_finset(F).mask)
        return max(sum((self.g_value(n, p) for n in idx), Fraction(0)) for p in self.witness_points)


def build_representation(ms: Sequence[RationalMeasure], window: int, certify: bool = True) -> Representation:
    """Tree of measure prefixes, prefix-free binary codes, and the step functions ``g_n``.

    Node ``⟨μ_k({0}), ..., μ_k({n})⟩`` for every ``k`` and ``n < window``.  Children
    of a node are sorted by value and the ``i``-th child gets code ``parent + 0^i 1``.
    ``g_n`` takes the value ``s(n)`` on the cylinder of each level-``n+1`` node ``s``.
    With ``certify`` the sup norm of ``Σ_{n∈F} g_n`` (max over one point per cell)
    is checked against ``max_k μ_k(F)`` for every ``F ⊆ [0, window)``.
    """
    if window > 16:
        raise BudgetExceeded("representation certificate is exhaustive over subsets; window ≤ 16")
    seqs = [tuple(mu.point(n) for n in range(window)) for mu in ms]
    children: dict[tuple, set] = {(): set()}
    for seq in seqs:
        for n in range(window):
            children.setdefault(seq[:n], set()).add(seq[n])
            children.setdefault(seq[:n + 1], set())
    codes = {(): ""}
    order = [()]
    i = 0
    while i < len(order):
        node = order[i]
        i += 1
        for j, val in enumerate(sorted(children[node])):
            child = node + (val,)
            codes[child] = codes[node] + "0" * j + "1"
            order.append(child)
    g = [dict() for _ in range(window)]
    for node in order[1:]:
        n = len(node) - 1
        if node[n]:
            g[n][codes[node]] = node[n]
    points = []
    for node in order:
        kids = len(children[node])
        points.append(codes[node] + "0" * kids if kids else codes[node])
    rep = Representation(order, codes, g, points, list(ms), window)
    if certify:
        table = [[rep.g_value(n, p) for n in range(window)] for p in points]
        for F in range(1 << window):
            idx = elements_of(F)
            lhs = max(sum((row[n] for n in idx), Fraction(0)) for row in table)
            rhs = max((mu(F) for mu in ms), default=Fraction(0))
            if lhs != rhs:
                raise AssertionError(f"representation mismatch on {FinSet.from_mask(F)}: {lhs} vs {rhs}")
        rep.certified_sets = 1 << window
    return rep


def representation_pipeline(ms: Sequence[RationalMeasure], window: int, certify: bool = True) -> Representation:
    """Normalize, quantize, then build and certify the representation."""
    prepared = quantize_measures(normalize_measures(ms, window))
    return build_representation(prepared, window, certify)


def halving_subset(values: Sequence) -> list[int]:
    """Indices of the sign class (nonnegative or negative) carrying at least half the mass."""
    vals = [as_fraction(v) for v in values]
    pos = sum((v for v in vals if v > 0), Fraction(0))
    neg = -sum((v for v in vals if v < 0), Fraction(0))
    if pos >= neg:
        G = [i for i, v in enumerate(vals) if v >= 0]
    else:
        G = [i for i, v in enumerate(vals) if v < 0]
    total = sum((abs(v) for v in vals), Fraction(0))
    assert abs(sum((vals[i] for i in G), Fraction(0))) * 2 >= total
    return G


# ------------------------------------------------------------ sign averages

def _gray_sign_sums(vectors: list[dict], limit: int = 20):
    """Yield ``Σ θ_k v_k`` over all sign patterns with ``θ_0 = +1`` (Gray-code order)."""
    n = len(vectors)
    if n > limit:
        raise BudgetExceeded(f"{n} active terms exceed the sign-enumeration limit {limit}")
    if n == 0:
        yield {}
        return
    acc: dict = {}
    for v in vectors:
        _add(acc, v)
    signs = [1] * n
    yield dict(acc)
    for step in range(1, 1 << (n - 1)):
        j = (step & -step).bit_length()  # flip θ_j for j ≥ 1
        _add(acc, vectors[j], -2 * signs[j])
        signs[j] = -signs[j]
        yield dict(acc)


def unconditional_norm(x: FinVectorSeq, a: Sequence) -> Fraction:
    """``max(max_n |a_n|, max over signs θ of ‖Σ θ_n a_n x_n‖)``."""
    a = [as_fraction(c) for c in a]
    terms = [{k: a[n] * c for k, c in x.vectors[n].items()} for n in range(min(len(a), len(x)))
             if a[n] != 0]
    best = max((abs(c) for c in a), default=Fraction(0))
    for vec in _gray_sign_sums(terms):
        best = max(best, x.norm(vec))
    return best


@dataclass
class SignAverageReport:
    n: int
    E_sq: Fraction
    sum_sq: Fraction
    E_lin: float
    subset_avg: float
    E_lin_exact: dict = field(default_factory=dict)
    subset_avg_exact: dict = field(default_factory=dict)
    cotype: dict | None = None


def sign_average_report(vectors: Sequence[Sequence], q: float | None = None, C: float | None = None,
                        tol: float = 1e-12) -> SignAverageReport:
    """Averages over all signs and all subsets for vectors in rational Euclidean space.

    Exact: ``E_θ‖Σθ_k y_k‖² = Σ‖y_k‖²``.  The inequality ``E_θ‖Σθ y‖ ≤ 2·E_A‖Σ_A y‖``
    is checked exactly for the l1 and sup norms and to relative ``tol`` for l2.
    Entries are scaled to integers by their common denominator, so all sums
    except the square roots are exact.
    """
    vecs = [[as_fraction(c) for c in v] for v in vectors]
    n = len(vecs)
    if n > 16:
        raise BudgetExceeded("at most 16 vectors")
    dim = max((len(v) for v in vecs), default=0)
    vecs = [v + [Fraction(0)] * (dim - len(v)) for v in vecs]
    L = math.lcm(*(c.denominator for v in vecs for c in v)) if dim and n else 1
    V = np.array([[int(c * L) for c in v] for v in vecs], dtype=object).reshape(n, dim)
    rows = np.arange(1 << n)[:, None] >> np.arange(n)[None, :] & 1
    signs = (2 * rows - 1).astype(object)
    S = signs.dot(V) if n else np.zeros((1, dim), dtype=object)
    A = rows.astype(object).dot(V) if n else np.zeros((1, dim), dtype=object)
    count = 1 << n

    def stats(M):
        sq = [sum((c * c for c in row), 0) for row in M]
        l1 = sum(sum((abs(c) for c in row), 0) for row in M)
        sup = sum(max((abs(c) for c in row), default=0) for row in M)
        lin = sum(math.sqrt(x) for x in sq)
        return sq, Fraction(l1, L * count), Fraction(sup, L * count), lin / (L * count)

    sq_s, l1_s, sup_s, E_lin = stats(S)
    _, l1_a, sup_a, subset_avg = stats(A)
    E_sq = Fraction(sum(sq_s), L * L * count)
    sum_sq = sum((sum((c * c for c in v), Fraction(0)) for v in vecs), Fraction(0))
    assert E_sq == sum_sq, "parallelogram identity failed"
    assert E_lin <= 2 * subset_avg * (1 + tol) + tol, "sign average exceeds twice the subset average"
    lin_exact = {"l1": l1_s, "sup": sup_s}
    sub_exact = {"l1": l1_a, "sup": sup_a}
    for key in lin_exact:
        assert lin_exact[key] <= 2 * sub_exact[key], f"{key}: sign average exceeds twice the subset average"
    report = SignAverageReport(n, E_sq, sum_sq, E_lin, subset_avg, lin_exact, sub_exact)
    if q is not None and C is not None:
        report.cotype = cotype_check(vecs, q, C, E_lin)
    return report


def cotype_check(vectors, q: float, C: float, E_lin: float | None = None) -> dict:
    """Whether ``(Σ‖x_k‖^q)^(1/q) ≤ C·E_θ‖Σθ_k x_k‖`` in the Euclidean norm."""
    vecs = [[float(c) for c in v] for v in vectors]
    if E_lin is None:
        E_lin = sign_average_report(vectors).E_lin
    lhs = sum(math.sqrt(sum(c * c for c in v)) ** q for v in vecs) ** (1.0 / q)
    return {"q": q, "C": C, "lhs": lhs, "rhs": C * E_lin, "holds": lhs <= C * E_lin * (1 + 1e-12)}


# ------------------------------------------------------- example sequences

@dataclass
class ExampleSeq:
    name: str
    x: FinVectorSeq
    profile: dict = field(default_factory=dict)


def triangular(n: int) -> int:
    return n * (n + 1) // 2


def rademacher_vector(k: int) -> dict:
    """Coordinates of the ``k``-th vector of the Rademacher-type example.

    For ``Δ_n ≤ k < Δ_(n+1)`` (triangular numbers) the vector lives on the
    dyadic block ``[2^n − 1, 2^(n+1) − 1)`` with entries ``±1/(n 2^n)``; the
    sign at block position ``j`` is ``(−1)^⌊j / 2^(Δ_(n+1) − k − 1)⌋``.
    """
    if k == 0:
        return {0: Fraction(1)}
    n = 1
    while triangular(n + 1) <= k:
        n += 1
    scale = Fraction(1, n * (1 << n))
    width = 1 << (triangular(n + 1) - k - 1)
    start = (1 << n) - 1
    return {start + j: scale * (-1 if (j // width) % 2 else 1) for j in range(1 << n)}


def _c0_position(k: int) -> tuple[int, int]:
    """``k`` belongs to ``A_n = {2^n(2j+1) − 1}`` at position ``j``."""
    v = k + 1
    n = (v & -v).bit_length() - 1
    return n, (v >> (n + 1))


def c0_non_p_vector(k: int) -> tuple[int, int, dict]:
    n, j = _c0_position(k)
    m = 0
    while j >= (n + 1) * (n + m + 1):
        j -= (n + 1) * (n + m + 1)
        m += 1
    return n, m, {m: Fraction(1, n + m + 1)}


def examples_factory(name: str, window: int, A=None) -> ExampleSeq:
    if name == "rademacher":
        x = FinVectorSeq([rademacher_vector(k) for k in range(window)], CoordinateSpace("l1"))
        return ExampleSeq(name, x)
    if name == "c0_non_p":
        labels = [c0_non_p_vector(k) for k in range(window)]
        x = FinVectorSeq([v for _, _, v in labels], CoordinateSpace("sup"))
        groups: dict[tuple, list] = {}
        for k, (n, m, _) in enumerate(labels):
            groups.setdefault((n, m), []).append(k)
        rows = []
        for (n, m), ks in sorted(groups.items()):
            full = len(ks) == (n + 1) * (n + m + 1)
            rows.append({"n": n, "m": m, "size": len(ks), "complete": full,
                         "measured_sup": x.sum_norm(ks),
                         "stated_value": Fraction(1, n + m + 1),
                         "full_interval_value": Fraction(n + 1)})
        flagged = [r for r in rows if r["complete"] and r["measured_sup"] != r["stated_value"]]
        per_block: dict[int, Fraction] = {}
        for n in {n for n, _, _ in labels}:
            ks = [k for k, lab in enumerate(labels) if lab[0] == n]
            per_block[n] = x.sum_norm(ks)
        return ExampleSeq(name, x, {"intervals": rows, "discrepancies": len(flagged), "block_sums": per_block})
    if name == "dyadic_density":
        vecs = [{k: Fraction(1, 1 << ((k + 1).bit_length() - 1))} for k in range(window)]
        x = FinVectorSeq(vecs, CoordinateSpace("blocks_l2"))
        if A is None:
            A = [(1 << n) - 1 for n in range(1, window.bit_length() + 1) if (1 << n) - 1 < window]
        A = sorted(A)
        top = (window).bit_length()
        phis = []
        for n in range(top):
            lo, hi = (1 << n) - 1, (1 << (n + 1)) - 1
            phis.append(Fraction(sum(1 for a in A if lo <= a < hi), 1 << n))
        partial, acc = [], Fraction(0)
        for p in phis:
            acc += p * p
            partial.append(acc)
        return ExampleSeq(name, x, {"A": A, "phi": phis, "square_partial_sums": partial})
    raise ValidationError(f"unknown example {name!r}")


# ------------------------------------------------------------ block colorings

def bs_coloring(x: FinVectorSeq) -> PairColoring:
    """``{m<n}`` gets 1 iff ``max supp x_m ≤ max supp x_n`` and every coordinate
    ``k ≤ max supp x_m`` of ``x_n`` is at most ``1/(2^(k+1) 2^(m+1))`` in absolute value."""

    def rule(m: int, n: int) -> int:
        top = x.max_supp(m)
        if top > x.max_supp(n):
            return 0
        for k, c in x.vectors[n].items():
            if k <= top and abs(c) > Fraction(1, 1 << (k + 1 + m + 1)):
                return 0
        return 1

    return PairColoring(rule, name="bs")


def block_truncation(x: FinVectorSeq, s) -> dict[int, dict]:
    """``x_n^s``: drop coordinates of ``x_n`` at or below the largest support of earlier members of ``s``."""
    pts = _as_finset(s).elements
    out = {}
    cut = -1
    for n in pts:
        out[n] = {k: c for k, c in x.vectors[n].items() if k > cut}
        cut = max(cut, x.max_supp(n))
    last = -1
    for n in pts:
        if out[n]:
            assert min(out[n]) > last, "truncations are not successive"
            last = max(out[n])
    return out


def _require_bs_homogeneous(x: FinVectorSeq, H):
    bs = bs_coloring(x)
    pts = _as_finset(H).elements
    for i, m in enumerate(pts):
        for n in pts[i + 1:]:
            if bs.pair_rule(m, n) != 1:
                raise NotHomogeneous(f"pair {{{m},{n}}} has block-sequence color 0")


def bs_gap_audit(x: FinVectorSeq, H, a: Sequence | Mapping) -> tuple:
    """``|‖Σ a_n x_n‖ − ‖Σ a_n x_n^H‖|`` against ``max |a_n| / 2^(min H)``."""
    H = _as_finset(H)
    _require_bs_homogeneous(x, H)
    if not H:
        return Fraction(0), Fraction(0)
    coeff = a if isinstance(a, Mapping) else dict(enumerate(a))
    coeff = {n: as_fraction(coeff.get(n, 0)) for n in H.elements}
    full = x.combination(H.elements, coeff)
    trunc = block_truncation(x, H)
    cut: dict = {}
    for n, v in trunc.items():
        _add(cut, v, coeff[n])
    lhs = abs(x.norm(full) - x.norm(cut))
    rhs = max(abs(c) for c in coeff.values()) / (1 << H.min())
    assert lhs <= rhs, f"gap {lhs} exceeds {rhs}"
    return lhs, rhs


def c0_hom1_audit(x: FinVectorSeq, H, limit: int = 20) -> tuple:
    """``max_{F ⊆ H} ‖Σ_F x_n‖`` against ``max_n ‖x_n‖ + 1`` for a block-homogeneous ``H``."""
    H = _as_finset(H)
    if len(H) > limit:
        raise BudgetExceeded(f"#H = {len(H)} beyond the exhaustive limit {limit}")
    _require_bs_homogeneous(x, H)
    pts = H.elements
    best = Fraction(0)
    # accumulate coordinatewise sums over all subsets via Gray code
    acc: dict = {}
    inside = [False] * len(pts)
    for step in range(1, 1 << len(pts)):
        j = (step & -step).bit_length() - 1
        _add(acc, x.vectors[pts[j]], -1 if inside[j] else 1)
        inside[j] = not inside[j]
        best = max(best, x.norm(acc))
    bound = max((x.norm(x.vectors[n]) for n in pts), default=Fraction(0)) + 1
    assert best <= bound, f"subset sum norm {best} exceeds {bound}"
    return best, bound


def witness_family(x: FinVectorSeq, window: int | None = None) -> CompactFamily:
    """All ``s`` witnessed by a node ``t``: each ``n ∈ s`` has ``u ⊑ t`` with
    coefficient ``≥ 2^(−θ(u))`` in ``x_n`` and zero coefficient in earlier members.

    The returned family carries ``witnesses`` mapping each member mask to a node mask.
    """
    space = x.space
    if not isinstance(space, NodeBasisSpace):
        raise ValidationError("witness family needs vectors in a node basis")
    N = len(x) if window is None else min(window, len(x))
    found: dict[int, int] = {0: 0}
    for t in space.family.masks:
        us = []
        m = t
        while True:
            us.append(space.theta[m])
            if not m:
                break
            m &= ~(1 << (m.bit_length() - 1))
        big = [[u for u in us if x.vectors[n].get(u, 0) >= Fraction(1, 1 << u)] for n in range(N)]
        stack = [(0, 0)]
        while stack:
            s, start = stack.pop()
            if s not in found:
                found[s] = t
            members = elements_of(s)
            for n in range(start, N):
                if any(all(x.vectors[mm].get(u, 0) == 0 for mm in members) for u in big[n]):
                    stack.append((s | (1 << n), n + 1))
    fam = CompactFamily(found, max(N, 1), check=False)
    for s, t in found.items():
        assert s.bit_count() <= t.bit_count() + 1, "witness bound #s ≤ #t + 1 violated"
    assert fam.is_hereditary() and fam.is_prefix_closed()
    fam.witnesses = found
    return fam


def tall_colorings(x: FinVectorSeq, A: UniformFront, s) -> tuple[int, int]:
    """Color pair for ``s ∈ A ⊕ A``: the block-sequence bit of its two least points and
    whether ``‖Σ_{s[0]} x^{s[0]}‖ ≥ ½‖Σ_{s[1]} x^{s[1]}‖`` (1) or not (0)."""
    s = _as_finset(s)
    try:
        first = A.step(s)
    except Exception as exc:  # prefix too short
        raise NotInFront(f"{s} has no initial segment in the front") from exc
    second = s - first
    if not first or not A.is_member(second) or not second:
        raise NotInFront(f"{s} does not split as two successive members of the front")
    pts = s.elements
    bs_bit = bs_coloring(x).pair_rule(pts[0], pts[1])
    t0, t1 = block_truncation(x, first), block_truncation(x, second)
    left: dict = {}
    for v in t0.values():
        _add(left, v)
    right: dict = {}
    for v in t1.values():
        _add(right, v)
    b_bit = 1 if 2 * as_fraction(x.norm(left)) >= as_fraction(x.norm(right)) else 0
    return bs_bit, b_bit


@dataclass
class TallAudit:
    lhs: Fraction
    rhs: Fraction
    holds: bool
    proven_rhs: Fraction
    worst_node: int = 0


def tall_bound_audit(x: FinVectorSeq, R, G: SetFamily) -> TallAudit:
    """``‖Σ_{n∈R} x_n‖`` against ``1 + max_{s ∈ G↾R} ‖Σ_{n∈s} x_n‖``.

    The estimate that can actually be proven node by node adds
    ``Σ_{u ⊑ t} 2^(1−θ(u))`` rather than 1; that weaker bound is asserted and the
    stated one is reported in ``holds``.
    """
    space = x.space
    if not isinstance(space, NodeBasisSpace):
        raise ValidationError("tall bound audit needs vectors in a node basis")
    R = _as_finset(R)
    _require_bs_homogeneous(x, R)
    total = x.combination(R.elements)
    vals = space.evaluate_all(total)
    lhs = max(abs(v) for v in vals)
    sub = restrict(G, R)
    best = max((x.sum_norm(elements_of(m)) for m in sub.masks), default=Fraction(0))
    rhs = 1 + best
    slack_worst = Fraction(0)
    worst_node = 0
    for k, t in enumerate(space.nodes):
        slack = Fraction(0)
        m = t
        while True:
            slack += Fraction(2, 1 << space.theta[m])
            if not m:
                break
            m &= ~(1 << (m.bit_length() - 1))
        if vals[k] - best > slack_worst:
            slack_worst = vals[k] - best
            worst_node = t
        assert vals[k] <= best + slack, "node-wise estimate violated"
    return TallAudit(lhs, rhs, lhs <= rhs, best + 4, worst_node)
