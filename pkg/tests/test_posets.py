import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from artifact.colorings import PairColoring, ed_fin, hom_check, q_coloring
from artifact.core_sets import FinSet
from artifact.errors import NotComparability, ValidationError
from artifact.posets import (Poset, divisibility_poset, longest_chain, mirsky_cover, poset_from_coloring,
                             width_and_dilworth, window_duality_check)


def chain(n):
    return Poset(range(n), [(a, b) for a in range(n) for b in range(a + 1, n)])


def test_small_examples():
    anti = Poset(range(5), [])
    d = width_and_dilworth(anti)
    assert d.width == 5 and sorted(map(tuple, d.chains)) == [(k,) for k in range(5)]
    assert mirsky_cover(anti) == [list(range(5))]
    d = width_and_dilworth(chain(5))
    assert d.width == 1 and d.chains == [list(range(5))]
    assert mirsky_cover(chain(5)) == [[k] for k in range(5)]


def test_divisibility():
    P = divisibility_poset(range(1, 7))
    d = width_and_dilworth(P)
    assert d.width == 3
    assert sorted(map(sorted, d.chains)) == [[1, 2, 4], [3, 6], [5]]
    assert mirsky_cover(P) == [[1], [2, 3, 5], [4, 6]]


def test_construction_validates():
    with pytest.raises(ValidationError):
        Poset([0, 1], [(0, 0)])
    with pytest.raises(NotComparability):
        Poset([0, 1, 2], [(0, 1), (1, 2)])
    with pytest.raises(ValidationError):
        Poset([0], [(0, 3)])


def brute_width(P):
    pts = P.points
    for k in range(len(pts), 0, -1):
        if any(P.is_antichain(c) for c in combinations(pts, k)):
            return k
    return 0


def brute_height(P):
    pts = P.points
    for k in range(len(pts), 0, -1):
        if any(P.is_chain(c) for c in combinations(pts, k)):
            return k
    return 0


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10), st.integers(0, 10 ** 6), st.floats(0, 1))
def test_against_brute_force(n, seed, density):
    rng = random.Random(seed)
    label = list(range(n))
    rng.shuffle(label)
    pairs = {(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < density}
    # transitive closure in the natural order, then relabel
    for k in range(n):
        for a in range(k):
            for b in range(k + 1, n):
                if (a, k) in pairs and (k, b) in pairs:
                    pairs.add((a, b))
    P = Poset(range(n), [(label[a], label[b]) for a, b in pairs])
    d = width_and_dilworth(P)
    assert d.width == brute_width(P)
    assert sorted(x for c in d.chains for x in c) == list(range(n))
    levels = mirsky_cover(P)
    assert len(levels) == longest_chain(P) == brute_height(P)
    assert all(P.is_antichain(level) for level in levels)


def test_poset_from_colorings():
    P = poset_from_coloring(ed_fin(), 1, FinSet.interval(0, 7))
    assert not P.less(1, 2) and P.less(0, 1) and P.less(2, 3)
    Q = poset_from_coloring(q_coloring(), 1, FinSet.interval(0, 10))
    assert brute_width(Q) == width_and_dilworth(Q).width
    table = {(0, 1): 1, (1, 2): 1, (0, 2): 0}
    with pytest.raises(NotComparability) as err:
        poset_from_coloring(PairColoring(lambda m, n: table[m, n]), 1, FinSet.interval(0, 3))
    assert err.value.witness == (0, 1, 2)


@pytest.mark.parametrize("coloring,size", [(ed_fin(), 14), (q_coloring(), 12)])
def test_window_duality(coloring, size):
    for color in (0, 1):
        rep = window_duality_check(coloring, color, FinSet.interval(0, size))
        assert rep.passed
        for piece in rep.antichain_pieces:
            assert hom_check(coloring, FinSet(piece)) <= {1 - color}
        for piece in rep.chain_pieces:
            assert hom_check(coloring, FinSet(piece)) <= {color}


def test_duality_on_total_order():
    rep = window_duality_check(PairColoring(lambda m, n: 1), 1, FinSet.interval(0, 6))
    assert rep.passed and rep.width == 1 and rep.longest_chain == 6
