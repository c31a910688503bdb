import random

import numpy as np
import pytest
from hypothesis import given, settings

from stablesets.completions import (
    Completion,
    canonical_extension,
    commuting_isomorphisms,
    completion_to_dot,
    completion_to_json,
    dense_witness,
    filter_ideal_witness,
    filters,
    ideals,
    is_compact,
    is_dense,
    is_filter,
    is_ideal,
    is_join_dense,
    is_meet_dense,
    lower_can_ext,
    lower_macneille_ext,
    macneille,
    normal_cuts,
    upper_can_ext,
    upper_macneille_ext,
)
from stablesets.errors import NotIsotone, NotMonotone, SizeCapExceeded
from stablesets.generators import random_isotone_map, random_isotone_op
from stablesets.order import (
    LatticeMap,
    boolean_lattice,
    chain,
    diamond,
    find_isomorphism,
    poset_from_pairs,
)
from strategies import lattices, rngs


def brute_filters(L, up=True):
    leq = L.leq if up else L.leq.T
    op = L.meet if up else L.join
    out = []
    for m in range(1, 1 << L.size):
        S = [a for a in range(L.size) if (m >> a) & 1]
        upward = all((m >> b) & 1 for a in S for b in range(L.size) if leq[a, b])
        closed = all((m >> int(op[a, b])) & 1 for a in S for b in S)
        if upward and closed:
            out.append(m)
    return out


@given(lattices())
def test_filters_and_ideals_match_brute_force(L):
    F, I = filters(L), ideals(L)
    assert F == brute_filters(L, True)
    assert I == brute_filters(L, False)
    assert all(is_filter(L, f) for f in F) and all(is_ideal(L, i) for i in I)
    full = (1 << L.size) - 1
    assert full not in filters(L, proper_only=True)
    # finite lattices: every filter is principal
    assert len(F) == L.size


@given(lattices())
def test_canonical_extension_is_dense_compact_and_iso(L):
    c = canonical_extension(L)
    assert c.is_embedding()
    assert is_dense(c) and dense_witness(c) is None
    assert is_compact(c)
    assert find_isomorphism(L, c.target, cap=64) is not None


@given(lattices())
def test_proper_only_variant(L):
    c = canonical_extension(L, proper_only=True)
    assert len(c.polarity.filters) == L.size - 1
    assert c.is_embedding() and is_dense(c) and is_compact(c)
    assert find_isomorphism(L, c.target, cap=64) is not None


@given(lattices())
def test_macneille_of_lattice(L):
    m = macneille(L)
    assert m.is_embedding() and is_join_dense(m) and is_meet_dense(m)
    assert m.target.size == L.size


def test_macneille_of_poset_adds_cuts():
    # 0 < a, b < c, d < 1 with a, b both below c and d: the cut {0, a, b} is new
    P = poset_from_pairs(6, [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (2, 3), (2, 4),
                             (1, 5), (2, 5), (3, 5), (4, 5)])
    m = macneille(P)
    assert m.target.size == 7
    assert len(normal_cuts(P)) == 7
    assert is_join_dense(m) and is_meet_dense(m)


def test_density_detects_bad_embedding():
    # chain(2) into M2 hits only the bounds, so the atoms are neither closed nor open
    c = Completion(chain(2), diamond(), [0, 3])
    assert not is_dense(c)
    c = Completion(chain(3), chain(3), LatticeMap(chain(3), chain(3), [0, 0, 2]))
    assert filter_ideal_witness(c) is not None and not is_compact(c)


def test_filter_cap():
    with pytest.raises(SizeCapExceeded):
        canonical_extension(boolean_lattice(3), cap=4)


@given(lattices(), rngs())
def test_unary_lifting_is_transport(L, rng):
    c = canonical_extension(L)
    f = random_isotone_map(rng, L, L)
    lo, hi = lower_can_ext(f, c, c), upper_can_ext(f, c, c)
    assert lo.table == hi.table
    for a in L.elements:
        assert lo(c.embed(a)) == c.embed(f(a))
    m = macneille(L)
    mb, mh = lower_macneille_ext(f, m, m), upper_macneille_ext(f, m, m)
    for a in L.elements:
        assert mb(m.embed(a)) == mh(m.embed(a)) == m.embed(f(a))
    assert all(m.target.leq[x, y] for x, y in zip(mb.table, mh.table))


@settings(max_examples=25)
@given(lattices(max_size=5), rngs())
def test_binary_lifting_is_transport(L, rng):
    c = canonical_extension(L)
    t = random_isotone_op(rng, L, 2)
    ext = lower_can_ext(t, c, c)
    th = c.embed.table
    for a in L.elements:
        for b in L.elements:
            assert ext[th[a], th[b]] == th[t[a, b]]


def test_antitone_coordinate():
    L = chain(3)
    c = canonical_extension(L)
    # f(a, b) = a meet (not b) on a 3-chain: isotone in a, antitone in b
    t = np.array([[min(a, 2 - b) for b in range(3)] for a in range(3)])
    ext = upper_can_ext(t, c, c)
    th = c.embed.table
    assert all(ext[th[a], th[b]] == th[t[a, b]] for a in range(3) for b in range(3))


def test_non_monotone_rejected():
    L = chain(3)
    c = canonical_extension(L)
    with pytest.raises(NotIsotone):
        lower_can_ext(LatticeMap(L, L, [2, 0, 1]), c, c)
    bad = np.array([[0, 2, 0], [2, 0, 2], [0, 2, 0]])
    with pytest.raises(NotMonotone):
        lower_can_ext(bad, c, c)


@given(lattices())
def test_uniqueness_up_to_commuting_iso(L):
    c1 = canonical_extension(L)
    c2 = macneille(L)
    ident = LatticeMap(L, L, range(L.size))
    isos = commuting_isomorphisms(c1, c2, ident)
    assert len(isos) == 1


def test_json_and_dot():
    c = canonical_extension(chain(2))
    doc = completion_to_json(c)
    assert doc["elements"] == 2 and doc["embedding"] == [0, 1] and doc["kind"] == "canonical"
    dot = completion_to_dot(macneille(diamond()))
    assert dot.startswith("digraph") and "doublecircle" in dot
