import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from artifact.banach import (CoordinateSpace, FinVectorSeq, NodeBasisSpace, bs_coloring, bs_gap_audit,
                             build_representation, c0_hom1_audit, eval_norm, examples_factory, halving_subset,
                             node_eval, rademacher_vector, representation_pipeline, schreier_family,
                             schreier_lower_bound_audit, sign_average_report, sup_norm, tall_bound_audit,
                             unconditional_norm, witness_family)
from artifact.core_sets import CompactFamily, FinSet, SetFamily
from artifact.errors import NotHomogeneous, ValidationError
from artifact.measures import RationalMeasure

F = FinSet


def test_eval_norm_examples():
    K = CompactFamily.from_predicate(lambda m: m.bit_count() <= 2, 6)
    assert eval_norm(K, None, F([0, 1, 2, 3])) == 2
    assert eval_norm(K, [1, -1, 1, 1], F([0, 1, 2, 3])) == 2
    single = CompactFamily.from_predicate(lambda m: m.bit_count() <= 1, 4)
    assert eval_norm(single, None, F([0, 2])) == 1


@settings(max_examples=100)
@given(st.integers(0, (1 << 10) - 1))
def test_eval_norm_numpy_matches_python(Fmask):
    K = schreier_family(10)
    assert len(K.masks) > 64
    assert eval_norm(K, None, F.from_mask(Fmask)) == max((m & Fmask).bit_count() for m in K.masks)


def test_schreier_bound():
    assert schreier_lower_bound_audit(F([3, 4, 5])) == (3, Fraction(3, 2))
    assert schreier_lower_bound_audit(F(range(10, 16)))[0] == 6
    assert schreier_lower_bound_audit(F()) == (0, 0)
    # the exhaustive version lives in the acceptance suite; spot-check here
    rng = random.Random(4)
    K = schreier_family(14)
    for _ in range(200):
        s = F(x for x in range(14) if rng.random() < 0.5)
        assert eval_norm(K, None, s) * 2 >= len(s)


def tree(*nodes, window=6):
    return SetFamily([F(n) for n in nodes], window)


def test_node_basis_examples():
    space = NodeBasisSpace(tree([], [0], [0, 1], [1]), [F(), F([0]), F([0, 1]), F([1])])
    coeffs = {0: 1, 1: 2, 2: 3}
    assert node_eval(space, coeffs, [0, 1]) == 6
    assert node_eval(space, coeffs, [1]) == 1
    assert sup_norm(space, coeffs) == 6
    with pytest.raises(ValidationError):
        NodeBasisSpace(tree([0], [0, 1]))
    with pytest.raises(ValidationError):
        NodeBasisSpace(tree([], [0, 1]))
    with pytest.raises(ValidationError):
        NodeBasisSpace(tree([], [0], [0, 1]), [F(), F([0, 1]), F([0])])


def test_representation_examples():
    rep = build_representation([RationalMeasure.point_mass(0), RationalMeasure.point_mass(1, Fraction(1, 2))], 2)
    assert rep.sum_norm(F([0, 1])) == 1
    assert rep.certified_sets == 4
    codes = list(rep.codes.values())
    # prefix-free on distinct leaves: no leaf code extends another leaf code
    leaves = [rep.codes[n] for n in rep.nodes if len(n) == rep.window]
    assert not any(a != b and b.startswith(a) for a in leaves for b in leaves)
    assert len(codes) == len(set(codes))
    one = build_representation([RationalMeasure({0: Fraction(1, 2), 2: Fraction(1, 4)})], 3)
    assert one.sum_norm(F([0, 1, 2])) == Fraction(3, 4)


def test_representation_pipeline_random():
    rng = random.Random(17)
    for _ in range(5):
        ms = [RationalMeasure({n: Fraction(rng.randint(0, 4), rng.randint(1, 4)) for n in range(6)})
              for _ in range(rng.randint(1, 4))]
        assert representation_pipeline(ms, 6).certified_sets == 64


def test_halving_subset():
    assert halving_subset([1, -1, 1]) == [0, 2]
    assert halving_subset([-3, 1, 1]) == [0]


@settings(max_examples=100)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), max_size=10))
def test_halving_property(vals):
    G = halving_subset(vals)
    assert 2 * abs(sum((vals[i] for i in G), Fraction(0))) >= sum((abs(v) for v in vals), Fraction(0))


def test_unconditional_norm():
    x = FinVectorSeq([{0: 1}, {1: 1}, {0: 1, 1: 1}], CoordinateSpace("sup"))
    assert unconditional_norm(x, [1, 1, 1]) == 2
    assert unconditional_norm(x, [Fraction(1, 2), 0, 0]) == Fraction(1, 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=1, max_size=4),
                min_size=1, max_size=6))
def test_sign_average_identities(vectors):
    rep = sign_average_report(vectors)
    dim = max(len(v) for v in vectors)
    padded = [v + [Fraction(0)] * (dim - len(v)) for v in vectors]
    assert rep.E_sq == sum(c * c for v in padded for c in v)
    assert rep.E_lin <= 2 * rep.subset_avg + 1e-9
    for key in ("l1", "sup"):
        assert rep.E_lin_exact[key] <= 2 * rep.subset_avg_exact[key]


def test_cotype_entry():
    rep = sign_average_report([[1, 0], [0, 1]], q=2, C=1)
    assert rep.cotype["holds"]
    assert rep.E_sq == 2


def test_rademacher_values():
    assert rademacher_vector(1) == {1: Fraction(1, 2), 2: Fraction(1, 2)}
    ex = examples_factory("rademacher", 6)
    assert ex.x.sum_norm([3, 4, 5]) == Fraction(3, 4)
    total = ex.x.combination([3, 4, 5])
    assert [total.get(k, 0) for k in range(3, 7)] == [Fraction(3, 8), Fraction(1, 8), Fraction(1, 8),
                                                       Fraction(-1, 8)]


def test_c0_and_dyadic_profiles():
    c0 = examples_factory("c0_non_p", 60)
    assert all(row["measured_sup"] <= row["full_interval_value"] for row in c0.profile["intervals"])
    dy = examples_factory("dyadic_density", 256)
    assert all(p < Fraction(1, 3) for p in dy.profile["square_partial_sums"])
    with pytest.raises(ValidationError):
        examples_factory("nope", 4)


def successive(n, scale=1):
    # x_k = scale·e_k: successive blocks, pairwise block-sequence color 1
    return FinVectorSeq([{k: Fraction(scale)} for k in range(n)], CoordinateSpace("sup"))


def test_bs_audits():
    x = successive(6)
    assert all(bs_coloring(x)(m, n) == 1 for m, n in combinations(range(6), 2))
    lhs, rhs = bs_gap_audit(x, F([1, 3, 4]), {1: 2, 3: -1, 4: 1})
    assert lhs == 0 and rhs == 1
    best, bound = c0_hom1_audit(x, F(range(6)))
    assert best == 1 and bound == 2
    bad = FinVectorSeq([{0: Fraction(1)}, {0: Fraction(1)}], CoordinateSpace("sup"))
    with pytest.raises(NotHomogeneous):
        bs_gap_audit(bad, F([0, 1]), [1, 1])


def test_bs_gap_with_small_overlap():
    x = FinVectorSeq([{0: Fraction(1)}, {0: Fraction(1, 2), 1: Fraction(1)}], CoordinateSpace("l1"))
    assert bs_coloring(x)(0, 1) == 0
    y = FinVectorSeq([{0: Fraction(1)}, {0: Fraction(1, 4), 1: Fraction(1)}], CoordinateSpace("l1"))
    assert bs_coloring(y)(0, 1) == 1
    lhs, rhs = bs_gap_audit(y, F([0, 1]), [1, 1])
    assert lhs == Fraction(1, 4) and rhs == 1


def test_witness_family_example():
    space = NodeBasisSpace(tree([], [0], [1]))
    x = FinVectorSeq([{1: Fraction(1)}, {2: Fraction(1)}], space)
    fam = witness_family(x)
    assert sorted(fam.masks) == [0, 1, 2]
    for s, t in fam.witnesses.items():
        assert s.bit_count() <= t.bit_count() + 1


def test_tall_bound_counterexample():
    # a single node; two vectors whose sum exceeds the stated bound 1 + max over G
    space = NodeBasisSpace(tree([]))
    x = FinVectorSeq([{0: Fraction(99, 100)}, {0: Fraction(1, 4)}], space)
    audit = tall_bound_audit(x, F([0, 1]), SetFamily([F()], 2))
    assert audit.lhs == Fraction(124, 100) and audit.rhs == 1
    assert not audit.holds
    assert audit.lhs <= audit.proven_rhs


def test_tall_bound_holds_when_single_terms_dominate():
    space = NodeBasisSpace(tree([], [0], [1], [2]))
    x = FinVectorSeq([{1: Fraction(1)}, {2: Fraction(1)}, {3: Fraction(1)}], space)
    G = SetFamily([F(), F([0]), F([1]), F([2])], 3)
    audit = tall_bound_audit(x, F([0, 1, 2]), G)
    assert audit.holds and audit.lhs == 1
