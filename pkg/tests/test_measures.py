import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from artifact.banach import eval_norm
from artifact.core_sets import CompactFamily, FinSet, SetFamily, cube, mask_of
from artifact.errors import NegativeFunction, NotACovering, Unbounded
from artifact.measures import (RationalMeasure, SupSubmeasure, amalgam_submeasure, covering_submeasure,
                               kelley_number, kelley_witness, measures_from_functions, membership_profile,
                               normalize_measures, phi_eval, quantize_measures, quantize_value,
                               summable_extension)

weights = st.dictionaries(st.integers(0, 7), st.fractions(min_value=0, max_value=3, max_denominator=6), max_size=6)
subsets8 = st.integers(0, 255)


def test_phi_of_point_masses():
    phi = SupSubmeasure([RationalMeasure.point_mass(0), RationalMeasure.point_mass(1, Fraction(1, 2))], 4)
    assert phi_eval(phi, FinSet([0, 1])) == 1
    counting = SupSubmeasure([RationalMeasure({n: 1 for n in range(6)})], 6)
    assert phi_eval(counting, FinSet([1, 4, 5])) == 3


def test_measure_json_round_trip():
    mu = RationalMeasure({0: Fraction(1, 3), 4: 2})
    assert mu.to_json() == {"0": "1/3", "4": "2/1"}
    assert RationalMeasure.from_json(mu.to_json()) == mu


@given(weights, subsets8, subsets8)
def test_additivity_on_disjoint_sets(w, a, b):
    mu = RationalMeasure(w)
    b &= ~a
    assert mu(a | b) == mu(a) + mu(b)


@settings(max_examples=200)
@given(st.lists(weights, min_size=1, max_size=4), subsets8, subsets8)
def test_sup_is_monotone_and_subadditive(ws, a, b):
    phi = SupSubmeasure([RationalMeasure(w) for w in ws], 8)
    assert phi(0) == 0
    assert phi(a & b) <= phi(a)
    assert phi(a | b) <= phi(a) + phi(b)


def test_profiles():
    counting = SupSubmeasure([RationalMeasure({n: 1 for n in range(16)})], 16)
    prof = membership_profile(counting, FinSet.interval(0, 16), "Fin")
    assert prof.value == 16 and prof.verdict == "unbounded growth under doubling windows"
    scaled = SupSubmeasure([RationalMeasure({n: Fraction(1, n + 1)}) for n in range(10)], 10)
    tail = membership_profile(scaled, FinSet.interval(0, 10), "Exh").tail
    assert tail[:10] == [Fraction(1, n + 1) for n in range(10)] and tail[10] == 0
    geo = SupSubmeasure([RationalMeasure({n: Fraction(1, 2 ** n) for n in range(12)})], 12)
    assert membership_profile(geo, FinSet.interval(0, 12), "Sum").value < 2


def test_normalize_examples():
    out = normalize_measures([RationalMeasure({0: 3})], 1)
    assert out[0] == RationalMeasure.point_mass(0) and out[1] == RationalMeasure.point_mass(0)
    only = normalize_measures([], 3)
    assert only == [RationalMeasure.point_mass(k, Fraction(1, k + 1)) for k in range(3)]


def test_normalize_is_capped_plus_singletons():
    rng = random.Random(3)
    for _ in range(20):
        ms = [RationalMeasure({n: Fraction(rng.randint(0, 9), rng.randint(1, 3)) for n in range(6)}) for _ in range(3)]
        out = normalize_measures(ms, 6)
        nu = SupSubmeasure(out, 6)
        for A in range(64):
            capped = max(sum(min(m.point(n), 1) for n in range(6) if A >> n & 1) for m in ms)
            single = max((Fraction(1, n + 1) for n in range(6) if A >> n & 1), default=0)
            assert nu(A) == max(capped, single)
        assert all(w <= 1 for m in out for w in m.weights.values())


def test_quantize_examples():
    assert quantize_value(Fraction(3, 10), 2) == Fraction(1, 4)
    assert quantize_value(Fraction(0), 5) == 0
    assert quantize_value(Fraction(7, 10), 0) == 0
    assert quantize_value(Fraction(1, 2), 1) == 0  # strictly below unless zero


@given(st.fractions(min_value=0, max_value=2, max_denominator=50), st.integers(0, 8))
def test_quantize_bounds(v, n):
    q = quantize_value(v, n)
    assert q <= v and v - q <= Fraction(1, 2 ** n)
    assert (q * 2 ** n).denominator == 1


def test_quantize_measures_pointwise_below():
    ms = [RationalMeasure({n: Fraction(n + 1, 7) for n in range(8)})]
    (lam,) = quantize_measures(ms)
    for n in range(8):
        assert lam.point(n) <= ms[0].point(n) and ms[0].point(n) - lam.point(n) <= Fraction(1, 2 ** n)


def test_kelley_examples():
    X = FinSet.interval(0, 3)
    assert kelley_number(X, cube(X, 2)) == Fraction(2, 3)
    assert kelley_number(X, SetFamily([X], 3)) == 1
    with pytest.raises(NotACovering):
        kelley_number(X, [FinSet([0, 1])])


def test_kelley_number_of_hat_cover():
    # universe: the 6 members of [4]^2, indexed; x̂ = members missing x
    members = [mask_of(c) for c in combinations(range(4), 2)]
    hats = [sum(1 << i for i, a in enumerate(members) if not a >> x & 1) for x in range(4)]
    assert kelley_number(FinSet.interval(0, 6), hats) == Fraction(1, 2)


def test_kelley_witness_random():
    rng = random.Random(11)
    for _ in range(200):
        size = rng.randint(1, 8)
        X = FinSet.interval(0, size)
        cover = [FinSet(x for x in range(size) if rng.random() < 0.5) for _ in range(rng.randint(1, 6))]
        cover.append(FinSet(range(size)) - cover[0])  # make sure X is covered
        mu = RationalMeasure({x: Fraction(rng.randint(0, 5), rng.randint(1, 5)) for x in range(size)})
        S = kelley_witness(X, cover, mu)
        assert mu(S) >= kelley_number(X, cover) * mu(X)
        # an independent search finds the same best value
        assert mu(S) == max(mu(c) for c in cover)


def test_covering_submeasure_examples():
    X = FinSet.interval(0, 4)
    assert covering_submeasure(X, None, [FinSet([0, 1])]) == 1
    assert covering_submeasure(X, None, [FinSet([0, 1]), FinSet([2, 3])]) == 2
    assert covering_submeasure(X, cube(X, 2), cube(X, 2)) == 3
    assert covering_submeasure(X, None, []) == 0
    with pytest.raises(Unbounded):
        covering_submeasure(X, None, [X])


def test_covering_submeasure_of_full_interval_closed_form():
    # ψ_X(X^{[α,β]}) = ⌊β·#X⌋ + 1: an r-set fits in a member iff r ≤ the largest member size
    for size in range(1, 8):
        for top in range(size):
            fam = [FinSet(c) for k in range(top + 1) for c in combinations(range(size), k)]
            assert covering_submeasure(FinSet.interval(0, size), None, fam) == top + 1


def test_amalgam_submeasure():
    b1 = (FinSet([0, 1]), [FinSet([0])])
    b2 = (FinSet([2, 3, 4, 5]), [FinSet([2, 3]), FinSet([4, 5])])
    assert amalgam_submeasure([b1]) == 1
    assert amalgam_submeasure([b1, b2]) == 2
    assert amalgam_submeasure([(FinSet([0, 1]), [])]) == 0


def test_measures_from_functions_and_norm_bound():
    K = CompactFamily.from_predicate(lambda m: m.bit_count() <= 2, 5)
    points = list(K.masks)  # sample points are members of K; g_n evaluates coordinate n
    g = [lambda A, n=n: 1 if A >> n & 1 else 0 for n in range(5)]
    ms = measures_from_functions(g, points)
    for F in range(32):
        sup = max(mu(F) for mu in ms)
        assert sup <= eval_norm(K, None, FinSet.from_mask(F)) == min(F.bit_count(), 2)
    assert all(mu.weights == {} for mu in measures_from_functions([lambda a: 0] * 3, [0]))
    with pytest.raises(NegativeFunction):
        measures_from_functions([lambda a: -1], [0], count=2)


def test_summable_extension():
    mu = summable_extension([lambda p: 1] * 4, [0])
    assert mu(FinSet([0, 2, 3])) == 3
    sets = [0b011, 0b110, 0b101]
    g = [lambda A, n=n: 1 if A >> n & 1 else 0 for n in range(3)]
    mu = summable_extension(g, sets)
    assert mu.point(0) == 1 + Fraction(1, 4)
    assert summable_extension([lambda p: 0] * 3, [0, 1]).weights == {}
    with pytest.raises(NegativeFunction):
        summable_extension([lambda p: -1], [0])
