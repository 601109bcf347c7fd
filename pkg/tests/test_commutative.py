"""Abelianization and the commutative specializations."""

import random
from fractions import Fraction

from ncinvert.commutative import (
    CommPoly,
    abelianize,
    abelianize_vector,
    compose_is_identity,
    inversion_pde_check,
    jacobian,
    jacobian_power_apply,
    substitute,
)
from ncinvert.freealg import Derivation, FormalMap, NCSeries
from ncinvert.inversion import c_sequence, invert_fixed_point
from ncinvert.randmaps import random_displacement, random_series
from ncinvert.rings import QQ


def nc(n, degree, *terms):
    return NCSeries.from_terms(QQ, n, degree, [(w, Fraction(c)) for w, c in terms])


def test_commutators_die():
    s = nc(2, 3, ((0, 1), 1), ((1, 0), -1))
    assert abelianize(s).is_zero()


def test_multidegree_collapse():
    s = nc(2, 3, ((0, 0), 1), ((0, 1), 2))
    ab = abelianize(s)
    assert ab.terms == {(2, 0): Fraction(1), (1, 1): Fraction(2)}


def test_iterated_commutator_dies():
    ad2 = nc(2, 4, ((1, 1, 0), 1), ((1, 0, 1), -2), ((0, 1, 1), 1))
    assert abelianize(ad2).is_zero()


def test_abelianize_is_ring_homomorphism():
    rng = random.Random(6)
    for _ in range(5):
        a = random_series(rng, QQ, 2, 6, 0, 3, terms=4)
        b = random_series(rng, QQ, 2, 6, 0, 3, terms=4)
        assert abelianize(a * b) == abelianize(a) * abelianize(b)
        assert abelianize(a + b) == abelianize(a) + abelianize(b)


def test_abelianize_commutes_with_slot_derivations():
    rng = random.Random(7)
    f = random_series(rng, QQ, 2, 5, 0, 4, terms=5)
    for i in range(2):
        delta = Derivation.coordinate(QQ, 2, 5, i)
        assert abelianize(delta.apply(f)) == abelianize(f).partial(i)


def test_jacobian_power_base_case():
    rng = random.Random(8)
    h_ab = abelianize_vector(random_displacement(rng, QQ, 2, 5))
    assert list(jacobian_power_apply(h_ab, 1)) == list(h_ab)


def test_jacobian_power_single_variable():
    # H = z^2: (JH)^(m-1) H = (2z)^(m-1) z^2 = 2^(m-1) z^(m+1)
    D = 8
    h = CommPoly.from_terms(QQ, 1, D, [((2,), Fraction(1))])
    for m in range(1, 6):
        out = jacobian_power_apply((h,), m)[0]
        assert out.terms == {(m + 1,): Fraction(2 ** (m - 1))}


def test_jacobian_power_matches_abelianized_iterates():
    rng = random.Random(9)
    h = random_displacement(rng, QQ, 2, 6)
    h_ab = abelianize_vector(h)
    for m, c_vec in enumerate(c_sequence(h, 5), start=1):
        assert list(abelianize_vector(c_vec)) == list(jacobian_power_apply(h_ab, m))


def test_quotient_compatibility_of_inversion():
    rng = random.Random(10)
    for n in (1, 2, 3):
        h = random_displacement(rng, QQ, n, 6)
        f = FormalMap.f_form(h)
        g = invert_fixed_point(h)
        assert compose_is_identity(
            abelianize_vector(f.components), abelianize_vector(g.components)
        )


def test_substitution_truncates():
    x = CommPoly.variable(QQ, 1, 3, 0)
    p = x * x
    out = substitute(p, (x + x * x,))
    # (z + z^2)^2 = z^2 + 2 z^3 + ... truncated at 3
    assert out.terms == {(2,): Fraction(1), (3,): Fraction(2)}


def test_commutative_pde_zero_and_catalan():
    zero = (CommPoly.zero(QQ, 1, 6),)
    assert inversion_pde_check(zero, torder=4)
    h = (CommPoly.from_terms(QQ, 1, 8, [((2,), Fraction(1))]),)
    assert inversion_pde_check(h, torder=5)


def test_commutative_pde_random_symmetric_words():
    rng = random.Random(11)
    for _ in range(3):
        h = abelianize_vector(random_displacement(rng, QQ, 2, 6))
        assert inversion_pde_check(h, torder=4)


def test_commpoly_json_schema():
    p = CommPoly.from_terms(
        QQ, 2, 4, [((1, 2), Fraction(-3, 7)), ((2, 0), Fraction(1))]
    )
    data = p.to_json_dict()
    assert data["arity"] == 2 and data["degree"] == 4
    assert data["terms"] == [
        {"exponents": [2, 0], "coeff": "1"},
        {"exponents": [1, 2], "coeff": "-3/7"},
    ]


def test_jacobian_entries():
    x = CommPoly.variable(QQ, 2, 4, 0)
    y = CommPoly.variable(QQ, 2, 4, 1)
    vec = (x * x + y, x * y)
    j = jacobian(vec)
    assert j[0][0].terms == {(1, 0): Fraction(2)}
    assert j[0][1].terms == {(0, 0): Fraction(1)}
    assert j[1][0].terms == {(0, 1): Fraction(1)}
    assert j[1][1].terms == {(1, 0): Fraction(1)}
