from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cayleyci.autgrp import aut_group, brute_force_aut
from cayleyci.exceptions import BudgetExceeded, DegreeMismatch, FormatError
from cayleyci.group import GroupSpec, cyclic_group, group_wreath, schreier_sims, trivial_group
from cayleyci.perm import Permutation, compose
from cayleyci.relstruct import (
    ColorRelStruct,
    ConnectionSet,
    apply_perm,
    cayley_structure,
    connection_set_of,
    digraph_wreath,
    edge_lookup,
    format_structure,
    is_automorphism,
    orbit_coloring,
    parse_structure,
    read_structure,
    write_structure,
)
from cayleyci.witness import WitnessSpec, theorem_main_construct

import oracles


def structures(max_n=6, arity=(2, 3)):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        k = draw(st.sampled_from(arity))
        tuples = st.tuples(*[st.integers(0, n - 1)] * k)
        edges = draw(st.dictionaries(tuples, st.integers(0, 2), max_size=20))
        return ColorRelStruct(n, k, edges)

    return build()


def cycle(n):
    return ColorRelStruct(n, 2, {(i, (i + 1) % n): 0 for i in range(n)})


def test_validation():
    with pytest.raises(ValueError):
        ColorRelStruct(3, 2, {(0, 3): 0})
    with pytest.raises(ValueError):
        ColorRelStruct(3, 2, {(0, 1, 2): 0})
    with pytest.raises(ValueError):
        ColorRelStruct(3, 2, {(0, 1): -1})
    X = ColorRelStruct(3, 2, [(0, 1), (1, 2)])
    assert X.colors() == {0} and len(X) == 2 and X.fresh_color() == 1
    assert ColorRelStruct(2, 2).fresh_color() == 0


@given(structures(), st.data())
@settings(max_examples=60)
def test_apply_perm_is_an_action(X, data):
    p = Permutation(data.draw(st.permutations(range(X.n))))
    q = Permutation(data.draw(st.permutations(range(X.n))))
    assert apply_perm(X, compose(p, q)) == apply_perm(apply_perm(X, q), p)
    assert apply_perm(X, Permutation.identity(X.n)) == X
    assert apply_perm(apply_perm(X, p), p.inverse()) == X
    Y = apply_perm(X, p)
    assert len(Y) == len(X) and Y.color_histogram() == X.color_histogram()
    assert is_automorphism(X, p) == (Y == X)


def test_apply_perm_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        apply_perm(cycle(3), Permutation.identity(4))
    with pytest.raises(DegreeMismatch):
        is_automorphism(cycle(3), Permutation.identity(4))


def test_cayley_examples():
    z5 = GroupSpec(5, 0)
    assert cayley_structure(ConnectionSet(z5, {(1,): 0}), 2) == cycle(5)
    empty = cayley_structure(ConnectionSet(GroupSpec(1, 2), {}), 2)
    assert len(empty) == 0 and brute_force_aut(empty).order == 24


@pytest.mark.parametrize("p,d", [(3, 2), (1, 3), (5, 1)])
def test_cayley_structure_is_translation_invariant(p, d):
    spec = GroupSpec(p, d)
    rng = random.Random(p * 10 + d)
    conn = ConnectionSet(spec, {(rng.randrange(spec.order), rng.randrange(spec.order)): rng.randrange(3) for _ in range(6)})
    X = cayley_structure(conn, 3)
    assert len(X) == spec.order * len(conn.tuples)
    for x in range(spec.order):
        assert is_automorphism(X, spec.translation(x))
    assert connection_set_of(X.with_cayley(None), spec) == conn


def test_connection_set_of_non_cayley():
    X = ColorRelStruct(4, 2, {(0, 1): 0})
    assert connection_set_of(X, GroupSpec(1, 2)) is None


def test_witness_structure_edge_count():
    b = theorem_main_construct(WitnessSpec.standard(3, 2))
    assert len(b.X) == 12 * len(b.S)
    # the regular group acts with trivial stabilizers on edges: translates are distinct
    assert len({t for t in b.X.edges}) == len(b.X)


def test_edge_lookup_matches_expanded_map():
    X = theorem_main_construct(WitnessSpec.standard(3, 2)).X
    rng = random.Random(0)
    hits = 0
    for _ in range(1000):
        t = tuple(rng.randrange(12) for _ in range(3))
        assert edge_lookup(X, t) == X.color(t)
        hits += X.color(t) is not None
    assert hits > 0
    for t, c in list(X.edges.items())[:50]:
        assert edge_lookup(X, t) == c
    with pytest.raises(ValueError):
        edge_lookup(cycle(3), (0, 1))


def test_digraph_wreath_counts():
    c3 = cycle(3)
    empty2 = ColorRelStruct(2, 2, {})
    W = digraph_wreath(c3, empty2)
    assert W.n == 6 and len(W) == 12
    empty3 = ColorRelStruct(3, 2, {})
    assert digraph_wreath(empty3, c3) == ColorRelStruct(9, 2, {(3 * x + a, 3 * x + b): 0 for x in range(3) for (a, b) in c3.edges})
    for G1, G2 in [(c3, cycle(2)), (cycle(2), c3), (cycle(4), empty2)]:
        W = digraph_wreath(G1, G2)
        assert W.n == G1.n * G2.n
        assert len(W) == G1.n * len(G2) + len(G1) * G2.n**2


def test_digraph_wreath_contains_group_wreath():
    cases = [(cycle(3), ColorRelStruct(2, 2, {})), (cycle(2), cycle(3)), (cycle(4), cycle(2))]
    for G1, G2 in cases:
        W = digraph_wreath(G1, G2)
        A = aut_group(W)
        assert group_wreath(aut_group(G1), aut_group(G2)).is_subgroup_of(A)


def test_digraph_wreath_rejects_bad_input():
    with pytest.raises(ValueError):
        digraph_wreath(ColorRelStruct(2, 3, {}), cycle(2))
    looped = ColorRelStruct(2, 2, {(0, 0): 1})
    with pytest.raises(ValueError):
        digraph_wreath(looped, cycle(2))


def test_orbit_coloring_examples():
    X = orbit_coloring(trivial_group(4), 1)
    assert X.color_histogram() == {0: 1, 1: 1, 2: 1, 3: 1}
    C = orbit_coloring(cyclic_group(3), 2)
    assert C.color_histogram() == {0: 3, 1: 3, 2: 3}
    # colors follow first lexicographic representatives
    assert C.color((0, 0)) == 0 and C.color((0, 1)) == 1 and C.color((0, 2)) == 2


@pytest.mark.parametrize("k", [1, 2, 3])
def test_orbit_coloring_matches_orbit_oracle(k):
    G = schreier_sims([Permutation.parse("(1,2,3)(4,5)", 5), Permutation.parse("(1,2)", 5)])
    X = orbit_coloring(G, k)
    elems = oracles.closure([g.images for g in G.generators], 5)
    label = oracles.tuple_orbits(elems, 5, k)
    assert {t: c for t, c in X.edges.items()} == label
    assert all(is_automorphism(X, g) for g in G.generators)


def test_orbit_coloring_a4_like():
    from cayleyci.witness import base_group

    G = base_group(WitnessSpec.standard(3, 2))
    assert G.order == 12
    assert aut_group(orbit_coloring(G, 3)).same_group(G)


def test_orbit_coloring_budget():
    with pytest.raises(BudgetExceeded):
        orbit_coloring(cyclic_group(10), 3, budget=999)


# -- text format ------------------------------------------------------------


@given(structures(max_n=8, arity=(1, 2, 3, 4)))
@settings(max_examples=60)
def test_format_round_trip(X):
    text = format_structure(X)
    assert parse_structure(text) == X
    body = text.splitlines()[1:]
    keys = [(int(ln.split(":")[0]), tuple(map(int, ln.split(":")[1].split()))) for ln in body]
    assert keys == sorted(keys)


def test_file_round_trip(tmp_path):
    X = theorem_main_construct(WitnessSpec.standard(3, 2)).X
    path = tmp_path / "x.rs"
    write_structure(path, X)
    assert read_structure(path) == X


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("relstruct n=3\n", 1),
        ("relstruct n=3 k=2\n0: 0 1\n0 1 2\n", 3),
        ("relstruct n=3 k=2\n0: 0 5\n", 2),
        ("relstruct n=3 k=2\n0: 0 1 2\n", 2),
        ("relstruct n=3 k=2\n0: 0 1\n1: 0 1\n", 3),
        ("relstruct n=3 k=2\n-1: 0 1\n", 2),
    ],
)
def test_parse_errors_name_lines(text, line):
    with pytest.raises(FormatError, match=f"line {line}"):
        parse_structure(text)


def test_parse_comments_and_blank_lines():
    X = parse_structure("# a 2-cycle\nrelstruct n=2 k=2\n\n0: 0 1\n0: 1 0\n")
    assert X == cycle(2)


def test_equality_and_hash():
    a = ColorRelStruct(3, 2, {(0, 1): 0, (1, 2): 1})
    b = ColorRelStruct(3, 2, {(1, 2): 1, (0, 1): 0})
    assert a == b and hash(a) == hash(b)
    assert a != ColorRelStruct(3, 2, {(0, 1): 1, (1, 2): 1})
    assert list(itertools.islice(a.edges, 1))
