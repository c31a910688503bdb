from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablesets.errors import InputError, NotALattice, NotAPartialOrder, SizeCapExceeded
from stablesets.order import (
    FinPoset,
    LatticeMap,
    boolean_lattice,
    build_lattice,
    chain,
    covers,
    diamond,
    dual,
    find_homomorphism,
    find_isomorphism,
    is_homomorphism,
    is_isotone,
    iter_homomorphisms,
    lattice_from_json,
    lattice_from_pairs,
    lattice_to_json,
    poset_from_pairs,
    product_coords,
    product_lattice,
)
from strategies import lattices


def glb(leq, a, b):
    lower = [c for c in range(len(leq)) if leq[c][a] and leq[c][b]]
    best = [c for c in lower if all(leq[d][c] for d in lower)]
    return best[0] if best else None


def all_homs(L, M):
    return [t for t in product(range(M.size), repeat=L.size) if is_homomorphism(LatticeMap(L, M, t))]


def test_poset_axioms_rejected():
    with pytest.raises(NotAPartialOrder):
        FinPoset([[True, True], [True, True]])
    with pytest.raises(NotAPartialOrder):
        FinPoset([[False]])
    with pytest.raises(NotAPartialOrder) as exc:
        FinPoset([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    assert exc.value.witness == [0, 1, 2]


def test_non_lattice_rejected():
    # two incomparable maximal elements
    with pytest.raises(NotALattice):
        build_lattice(poset_from_pairs(3, [(0, 1), (0, 2)]))
    with pytest.raises(NotALattice):
        build_lattice(FinPoset(np.zeros((0, 0), dtype=bool)))
    with pytest.raises(InputError):
        poset_from_pairs(2, [(0, 5)])


@given(lattices())
def test_tables_match_brute_glb(L):
    leq = L.leq.tolist()
    for a in L.elements:
        for b in L.elements:
            assert L.meet[a, b] == glb(leq, a, b)
            assert L.join[a, b] == glb(L.leq.T.tolist(), a, b)
    L.check_tables()


@given(lattices())
def test_dual_swaps(L):
    D = dual(L)
    assert D.bot == L.top and D.top == L.bot
    D.check_tables()


def test_product_coordinates():
    A, B = chain(2), chain(3)
    P = product_lattice([A, B])
    coords = product_coords([A, B])
    assert P.size == 6
    for i, (a, b) in enumerate(coords):
        for j, (c, d) in enumerate(coords):
            assert P.leq[i, j] == (A.leq[a, c] and B.leq[b, d])
    P.check_tables()


def test_boolean_and_covers():
    B = boolean_lattice(2)
    assert B.size == 4
    assert sorted(covers(B)) == [(0, 1), (0, 2), (1, 3), (2, 3)]


@pytest.mark.parametrize("L,M", [(chain(2), diamond()), (diamond(), chain(3)), (chain(3), chain(3)),
                                 (diamond(), diamond()), (chain(2), chain(4))])
def test_homomorphism_search_matches_brute_force(L, M):
    brute = sorted(all_homs(L, M))
    found = sorted(f.table for f in iter_homomorphisms(L, M))
    assert found == brute
    inj = sorted(f.table for f in iter_homomorphisms(L, M, injective=True))
    assert inj == [t for t in brute if len(set(t)) == len(t)]


def test_automorphisms_of_m2():
    assert len(list(iter_homomorphisms(diamond(), diamond(), injective=True))) == 2


def test_fixed_and_cap():
    f = find_homomorphism(chain(3), chain(3), fixed={1: 2})
    assert f is None or f.table[1] == 2
    with pytest.raises(SizeCapExceeded):
        find_isomorphism(boolean_lattice(4), boolean_lattice(4))
    assert find_isomorphism(boolean_lattice(4), boolean_lattice(4), cap=16) is not None


def test_isomorphism_respects_ops():
    L = chain(3)
    up = {"f": np.array([1, 2, 2])}
    other = {"f": np.array([0, 0, 1])}
    assert find_isomorphism(L, L, extra_ops=(up, up)) is not None
    assert find_isomorphism(L, L, extra_ops=(up, other)) is None


@given(lattices())
def test_json_round_trip(L):
    M = lattice_from_json(lattice_to_json(L))
    assert (M.leq == L.leq).all()


def test_isotone():
    L = chain(3)
    assert is_isotone(LatticeMap(L, L, [0, 0, 2]))
    assert not is_isotone(LatticeMap(L, L, [2, 0, 1]))
    with pytest.raises(InputError):
        LatticeMap(L, L, [0, 1])


@given(st.integers(1, 5))
def test_chain_is_total(n):
    L = chain(n)
    assert L.bot == 0 and L.top == n - 1
    if n > 2:
        with pytest.raises(NotAPartialOrder):
            poset_from_pairs(n, [(i, i + 1) for i in range(n - 1)])
    assert lattice_from_pairs(n, [(i, j) for i in range(n) for j in range(i, n)]).leq.tolist() == L.leq.tolist()
