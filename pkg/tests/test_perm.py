from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from cayleyci.exceptions import DegreeMismatch, FormatError
from cayleyci.perm import Permutation, commutator, compose, conjugate, parse_cycles_line

import oracles


def perms(n):
    return st.permutations(list(range(n))).map(Permutation)


same_degree_pairs = st.integers(1, 9).flatmap(lambda n: st.tuples(perms(n), perms(n), perms(n)))


def test_compose_rightmost_first():
    p = Permutation.from_cycles([(0, 1)], 3)
    q = Permutation.from_cycles([(1, 2)], 3)
    assert compose(p, q).images == (1, 2, 0)
    assert compose(p, q) == p * q


def test_compose_identity_and_inverse():
    p = Permutation([2, 0, 3, 1])
    e = Permutation.identity(4)
    assert compose(p, e) == p == compose(e, p)
    assert compose(p, p.inverse()).is_identity()


def test_compose_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        compose(Permutation.identity(3), Permutation.identity(4))


def test_commutator_examples():
    g = Permutation.from_cycles([(0, 1)], 3)
    h = Permutation.from_cycles([(1, 2)], 3)
    assert commutator(g, h).order() == 3
    assert commutator(g, g).is_identity()
    a = Permutation.from_cycles([(0, 1)], 4)
    b = Permutation.from_cycles([(2, 3)], 4)
    assert commutator(a, b).is_identity()


@given(same_degree_pairs)
def test_group_axioms(triple):
    p, q, r = triple
    assert (p * q) * r == p * (q * r)
    assert p * p.inverse() == Permutation.identity(p.degree)
    assert (p * q).inverse() == q.inverse() * p.inverse()


@given(same_degree_pairs)
def test_commutator_matches_tuple_oracle(triple):
    g, h, _ = triple
    gi, hi = oracles.inv(g.images), oracles.inv(h.images)
    expected = oracles.mul(gi, oracles.mul(hi, oracles.mul(g.images, h.images)))
    assert commutator(g, h).images == expected
    assert conjugate(g, h).images == oracles.mul(hi, oracles.mul(g.images, h.images))


@given(st.integers(1, 9).flatmap(perms))
def test_cycle_string_round_trip(p):
    assert Permutation.parse(p.cycle_string(), p.degree) == p


@given(st.integers(1, 9).flatmap(perms))
def test_order_and_sign(p):
    k, q = 1, p
    while not q.is_identity():
        q, k = q * p, k + 1
    assert p.order() == k
    assert p.sign() == oracles.sign(p.images)
    assert p ** p.order() == Permutation.identity(p.degree)
    assert p ** -1 == p.inverse()


def test_parse_one_indexed_and_identity():
    assert Permutation.parse("(1,2)(3,4)").images == (1, 0, 3, 2)
    assert Permutation.parse("()", 3).is_identity()
    assert Permutation.parse("(1 3)", 4).images == (2, 1, 0, 3)
    assert str(Permutation.identity(2)) == "()"


def test_from_cycles_product_is_rightmost_first():
    # (0 1)(1 2): apply (1 2) first
    p = Permutation.from_cycles([(0, 1), (1, 2)], 3)
    assert p == Permutation.from_cycles([(0, 1)], 3) * Permutation.from_cycles([(1, 2)], 3)


@pytest.mark.parametrize("text", ["(1,2", "(0,1)", "(a,b)", "1,2"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        Permutation.parse(text, 3)


def test_parse_degree_too_small():
    with pytest.raises(ValueError):
        Permutation.parse("(1,5)", 3)


def test_parse_cycles_line_carries_line_number():
    with pytest.raises(FormatError, match="line 7"):
        parse_cycles_line("(1,2", 3, 7)


def test_invalid_image_table():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])
    with pytest.raises(ValueError):
        Permutation([])


def test_support_and_fixed_points():
    p = Permutation.parse("(2,4)", 5)
    assert p.support() == [1, 3]
    assert p.fixed_points() == [0, 2, 4]
    assert p.apply_tuple((1, 2, 3)) == (3, 2, 1)
