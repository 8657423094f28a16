import math
import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from artifact.colorings import (RationalEnumeration, canonical_colorings, conv_coloring, conv_zero_builder,
                                cover_by_homogeneous, devlin_number, ed_fin, galvin_coloring, hom_check,
                                homogeneous_sets, is_homogeneous, q_coloring, ramsey_extract)
from artifact.core_sets import CompactFamily, FinSet, SetFamily
from artifact.errors import InsufficientDensity, NotHereditary, Overflow
from artifact.fronts import cube_front
from artifact.colorings import FrontColoring, PairColoring
from artifact.measures import RationalMeasure, SupSubmeasure


def const(color):
    return PairColoring(lambda m, n: color)


def test_hom_check_basics():
    assert hom_check(const(1), FinSet([0, 3, 5])) == {1}
    assert hom_check(const(1), FinSet([4])) == set()
    assert hom_check(conv_coloring(), FinSet([2, 3, 4])) == {0}
    assert hom_check(conv_coloring(), FinSet([0, 1, 2])) == {1}


def test_homogeneous_sets_match_brute_force():
    rng = random.Random(2)
    table = {(a, b): rng.randint(0, 1) for a, b in combinations(range(9), 2)}
    c = PairColoring(lambda m, n: table[m, n])
    for color in (0, 1):
        got = set(homogeneous_sets(c, color, FinSet.interval(0, 9)))
        want = {m for m in range(1 << 9) if is_homogeneous(c, FinSet.from_mask(m), color)}
        assert got == want
    conv = conv_coloring()
    got = set(homogeneous_sets(conv, 0, FinSet.interval(0, 9)))
    assert got == {m for m in range(1 << 9) if hom_check(conv, FinSet.from_mask(m)) <= {0}}


def test_cover_by_homogeneous():
    M = FinSet.interval(0, 6)
    assert cover_by_homogeneous(const(0), M, 1) == [M]
    block = FinSet.interval(3, 7)  # the dyadic block [3,7)
    assert cover_by_homogeneous(ed_fin(), block, 1) == [block]
    # points from three different blocks form one 1-homogeneous piece
    assert cover_by_homogeneous(ed_fin(), FinSet([0, 1, 3]), 1) == [FinSet([0, 1, 3])]
    # {1,2} shares a block, 3 does not: both colors appear, so one piece is impossible
    assert cover_by_homogeneous(ed_fin(), FinSet([1, 2, 3]), 1) is None
    pieces = cover_by_homogeneous(ed_fin(), FinSet([1, 2, 3]), 2)
    assert len(pieces) == 2 and all(len(hom_check(ed_fin(), p)) <= 1 for p in pieces)
    # [0,3) with 0 < 1 < 2 is a single 1-colored triple for conv, so it needs two pieces
    assert cover_by_homogeneous(conv_coloring(), FinSet.interval(0, 3), 1) == [FinSet.interval(0, 3)]
    assert cover_by_homogeneous(conv_coloring(), FinSet.interval(0, 5), 1) is None


def test_ramsey_extract_examples():
    out, color = ramsey_extract(const(0), FinSet.interval(0, 8))
    assert out == FinSet.interval(0, 8) and color == 0
    blocks = PairColoring(lambda m, n: 0 if m // 2 == n // 2 else 1)
    out, color = ramsey_extract(blocks, FinSet.interval(0, 6))
    assert len(out) >= 1 and hom_check(blocks, out) <= {color}


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 128), st.integers(0, 10 ** 6))
def test_ramsey_extract_guarantee(size, seed):
    rng = random.Random(seed)
    table = {}

    def rule(m, n):
        if (m, n) not in table:
            table[m, n] = rng.randint(0, 1)
        return table[m, n]

    c = PairColoring(rule)
    out, color = ramsey_extract(c, FinSet.interval(0, size))
    assert hom_check(c, out) <= {color}
    assert len(out) >= math.floor(math.log2(size)) // 2


def test_rational_enumeration():
    theta = RationalEnumeration()
    assert [theta(i) for i in range(5)] == [Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4),
                                            Fraction(3, 4)]
    for i in range(60):
        assert theta.index(theta(i)) == i
    assert len({theta(i) for i in range(300)}) == 300


def test_q_coloring():
    c = q_coloring()
    assert c(0, 1) == 0 and c(1, 2) == 1
    mono = RationalEnumeration([Fraction(k + 1, 20) for k in range(19)])
    assert hom_check(q_coloring(mono), FinSet.interval(0, 19)) == {1}


def test_q_coloring_relations_are_transitive():
    c = q_coloring()
    for color in (0, 1):
        for a, b, d in combinations(range(40), 3):
            if c(a, b) == color and c(b, d) == color:
                assert c(a, d) == color


def test_conv_coloring_examples():
    conv = conv_coloring()
    assert conv(FinSet([0, 1, 2])) == 1
    assert conv(FinSet([2, 3, 4])) == 0


def test_conv_zero_builder():
    assert len(conv_zero_builder(FinSet([7, 9]), 1)) == 1
    for r in (2, 3, 4):
        D = conv_zero_builder(FinSet.interval(0, 300), r)
        assert len(D) == r and hom_check(conv_coloring(), D) <= {0}
        values = [RationalEnumeration()(x) for x in D]
        assert values == sorted(values)
    with pytest.raises(InsufficientDensity):
        conv_zero_builder(FinSet.interval(0, 8), 4)


def test_ed_fin_and_blocks():
    c = canonical_colorings("ed_fin")
    assert c(1, 2) == 0 and c(2, 3) == 1 and c(3, 6) == 0 and c(6, 7) == 1
    phi = SupSubmeasure([RationalMeasure({n: Fraction(1, 2 ** n) for n in range(10)})], 10)
    blocks = canonical_colorings("submeasure_blocks", phi)
    assert hom_check(blocks, FinSet.interval(0, 10)) == {1}


def test_galvin_coloring():
    K = CompactFamily.from_predicate(lambda m: m.bit_count() <= 2, 6)
    g = galvin_coloring(K)
    assert g(FinSet([1, 2, 3, 4])) == 1
    assert g(FinSet([1, 2])) == 0
    assert g.check_window()
    full = CompactFamily.from_predicate(lambda m: True, 5)
    assert all(galvin_coloring(full)(FinSet.from_mask(m)) == 0 for m in range(32))
    with pytest.raises(NotHereditary):
        galvin_coloring(SetFamily([FinSet([0, 1])], 4))


def test_galvin_window_equivalence_random():
    rng = random.Random(8)
    for _ in range(10):
        gens = [rng.randrange(1 << 8) for _ in range(rng.randint(1, 5))]
        K = CompactFamily.downward_closure([FinSet.from_mask(g) for g in gens], 8)
        assert galvin_coloring(K).check_window()


def test_devlin_numbers():
    assert [devlin_number(d) for d in range(1, 6)] == [1, 2, 16, 272, 7936]
    with pytest.raises(Overflow):
        devlin_number(9)


def test_front_coloring_on_cube3():
    col = FrontColoring(cube_front(3), lambda s: s.min() % 2)
    assert hom_check(col, FinSet([0, 2, 4, 5])) == {0}
    assert hom_check(col, FinSet([0, 1, 2, 3])) == {0, 1}
