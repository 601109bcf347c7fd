"""Tree enumeration, factorials and the expansion engine."""

import random
from fractions import Fraction

import pytest

from ncinvert.freealg import NCSeries
from ncinvert.inversion import n_seq_recurrent
from ncinvert.randmaps import random_displacement, random_homogeneous_displacement
from ncinvert.rings import QQ, PrimeField
from ncinvert.trees import (
    LEAF,
    PBTree,
    chain_tree,
    enumerate_pbtrees,
    factorial_identity_check,
    factorial_reciprocal_sum,
    gf_identity_check,
    graft,
    invert_tree,
    reduced_factorial,
    reduced_tree,
    rooted_factorial,
    tree_expansion_term,
    tree_series,
)


def catalan_numbers(count):
    cats = [1]
    for k in range(1, count):
        cats.append(sum(cats[i] * cats[k - 1 - i] for i in range(k)))
    return cats


def ad_y_power(degree, m):
    out = NCSeries.variable(QQ, 2, degree, 0)
    y = NCSeries.variable(QQ, 2, degree, 1)
    for _ in range(m):
        out = y * out - out * y
    return out


# -- enumeration --------------------------------------------------------------


def test_single_leaf():
    assert enumerate_pbtrees(1) == [LEAF]
    with pytest.raises(ValueError):
        enumerate_pbtrees(0)


def test_three_leaves_enumerates_both_shapes():
    got = [t.serialize() for t in enumerate_pbtrees(3)]
    assert got == ["(o(oo))", "((oo)o)"]


def test_counts_match_catalan_recurrence():
    cats = catalan_numbers(10)
    for m in range(1, 11):
        assert len(enumerate_pbtrees(m)) == cats[m - 1]
    assert len(enumerate_pbtrees(10)) == 4862


def test_enumeration_has_no_duplicates():
    for m in range(1, 9):
        serials = [t.serialize() for t in enumerate_pbtrees(m)]
        assert len(set(serials)) == len(serials)


def test_vertex_and_leaf_counts():
    for m in range(1, 8):
        for t in enumerate_pbtrees(m):
            assert t.leaves == m
            assert t.vertices == 2 * m - 1
            assert t.reduced_vertices == m - 1


def test_malformed_node_rejected():
    with pytest.raises(ValueError):
        PBTree(LEAF, None)


# -- factorials ----------------------------------------------------------------


def test_reduced_factorial_base_cases():
    assert reduced_factorial(LEAF) == 1
    assert reduced_factorial(graft(LEAF, LEAF)) == 1
    assert [reduced_factorial(t) for t in enumerate_pbtrees(3)] == [2, 2]


def test_reduced_factorial_matches_general_factorial_of_reduced_tree():
    # deleting the leaves and taking the plain rooted factorial must agree
    # with the grafting recursion used everywhere else
    for m in range(2, 8):
        for t in enumerate_pbtrees(m):
            assert reduced_factorial(t) == rooted_factorial(reduced_tree(t))


def test_chains_have_ordinary_factorials():
    import math

    for m in range(1, 8):
        assert rooted_factorial(chain_tree(m)) == math.factorial(m)


def test_reciprocal_sums_are_one():
    assert factorial_reciprocal_sum(1) == 1
    assert factorial_reciprocal_sum(3) == Fraction(1, 2) + Fraction(1, 2)
    for m, total in factorial_identity_check(10):
        assert total == 1, m


def test_gf_identity():
    assert gf_identity_check(1)
    assert gf_identity_check(6)
    # mutation: a wrong sum must be caught
    sums = [factorial_reciprocal_sum(m) for m in range(1, 7)]
    sums[3] += Fraction(1, 7)
    assert not gf_identity_check(6, sums)


# -- the expansion --------------------------------------------------------------


def test_leaf_series_is_displacement():
    rng = random.Random(3)
    h = random_displacement(rng, QQ, 2, 5)
    assert tree_series(LEAF, h) == h


def test_tree_series_on_commutator_depends_only_on_leaves():
    D = 7
    h = (ad_y_power(D, 1), NCSeries.zero(QQ, 2, D))
    for m in range(1, 6):
        expect = ad_y_power(D, m)
        for t in enumerate_pbtrees(m):
            vec = tree_series(t, h)
            assert vec[0] == expect
            assert vec[1].is_zero()


def test_tree_series_homogeneity():
    rng = random.Random(8)
    d = 2
    h = random_homogeneous_displacement(rng, QQ, 2, 8, deg=d)
    for t in enumerate_pbtrees(4):
        for s in tree_series(t, h):
            if not s.is_zero():
                assert s.is_homogeneous()
                assert s.poly_degree() == (d - 1) * t.leaves + 1


def test_expansion_term_examples():
    D = 6
    h = (ad_y_power(D, 1), NCSeries.zero(QQ, 2, D))
    assert list(tree_expansion_term(h, 1)) == list(h)
    # m = 2: a single tree of weight 1, so N_[2] = [H d/dz] H
    assert tree_expansion_term(h, 2)[0] == ad_y_power(D, 2)
    # m = 3: weights 1/2 + 1/2
    assert tree_expansion_term(h, 3)[0] == ad_y_power(D, 3)


def test_expansion_matches_recurrence():
    rng = random.Random(12)
    for n in (1, 2, 3):
        h = random_displacement(rng, QQ, n, 6)
        nseq = n_seq_recurrent(h)
        memo = {}
        for m in range(1, len(nseq) + 1):
            assert list(tree_expansion_term(h, m, memo=memo)) == list(nseq.term(m))


def test_expansion_needs_characteristic_zero():
    field = PrimeField(3)
    h = (
        NCSeries.from_terms(field, 1, 5, [((0, 0), field.one())]),
    )
    with pytest.raises(ValueError):
        tree_expansion_term(h, 2)
    with pytest.raises(ValueError):
        invert_tree(h)


def test_threaded_sum_is_identical():
    rng = random.Random(99)
    h = random_displacement(rng, QQ, 2, 7)
    assert invert_tree(h, threads=4) == invert_tree(h, threads=1)


def test_engine_completes_through_429_trees():
    # D = 9 sums every leaf count up to m = 8, i.e. 429 trees at the top
    assert len(enumerate_pbtrees(8)) == 429
    D = 9
    h = (ad_y_power(D, 1), NCSeries.zero(QQ, 2, D))
    g = invert_tree(h)
    assert g.component(0).coefficient((1,) * 8 + (0,)) == 1  # y^8 x from ad^8
