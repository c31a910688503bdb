import random
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given

from stablesets.errors import InputError, NotClosed
from stablesets.expansions import (
    OmegaLattice,
    OperatorSymbol,
    all_families,
    build_p_plus_omega,
    check_operator,
    is_complete_dual_operator,
    is_complete_normal_dual_operator,
    is_complete_normal_operator,
    is_complete_operator,
    is_dual_operator,
    is_monotone_map,
    is_normal_operator,
    is_omega_homomorphism,
    is_operator,
    join_product_identity,
    omega_from_json,
    omega_to_json,
    product_omega,
)
from stablesets.formula import Signature, parse
from stablesets.generators import random_isotone_op, random_polarity
from stablesets.order import LatticeMap, big_join, boolean_lattice, chain, diamond, lattice_from_pairs
from strategies import lattices, rngs

N5 = lattice_from_pairs(5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4), (0, 2), (0, 4), (1, 4)])


def unary_complete_oracle(L, f, normal):
    """f preserves the join of every subset (the empty one too when normal)."""
    start = 0 if normal else 1
    for k in range(start, L.size + 1):
        for S in combinations(range(L.size), k):
            if f[big_join(L, S)] != big_join(L, [f[a] for a in S]):
                return False
    return True


@pytest.mark.parametrize("L", [chain(3), diamond(), N5, boolean_lattice(3)])
def test_join_and_meet_classes(L):
    # join preserves binary and arbitrary non-empty joins, but not the empty one
    assert is_operator(L, L.join) and is_complete_operator(L, L.join)
    assert not is_normal_operator(L, L.join)
    assert not is_complete_normal_operator(L, L.join)
    assert is_dual_operator(L, L.meet) and is_complete_dual_operator(L, L.meet)
    assert not is_complete_normal_dual_operator(L, L.meet)


def test_distributivity_shows_in_meet_as_operator():
    assert is_operator(boolean_lattice(2), boolean_lattice(2).meet)
    assert is_operator(diamond(), diamond().meet)
    assert not is_operator(N5, N5.meet)


@given(lattices(), rngs())
def test_unary_predicates_match_oracle(L, rng):
    f = np.array([rng.randrange(L.size) for _ in range(L.size)])
    assert is_complete_operator(L, f) == unary_complete_oracle(L, f, False)
    assert is_complete_normal_operator(L, f) == unary_complete_oracle(L, f, True)
    # finite lattices: binary preservation already gives every non-empty join
    assert is_operator(L, f) == is_complete_operator(L, f)


@given(lattices(max_size=4), rngs())
def test_binary_complete_matches_families(L, rng):
    t = random_isotone_op(rng, L, 2)
    fams = [fam for fam in all_families(L, 2) if all(fam)]
    assert is_complete_operator(L, t) == (join_product_identity(L, t, fams) is None)


def test_constant_bottom_is_complete_normal():
    L = diamond()
    zero = np.zeros((4, 4), dtype=int)
    assert is_complete_normal_operator(L, zero)
    top = np.full((4,), 3)
    assert is_complete_normal_dual_operator(L, top)


def test_sampled_mode_is_reported():
    L = boolean_lattice(3)
    res = check_operator(L, L.join, complete=True, exhaustive_limit=4, samples=20, seed=1)
    assert res.ok and res.mode == "sampled"
    res = check_operator(L, L.join, complete=True)
    assert res.ok and res.mode == "exhaustive"


def test_monotone_signatures():
    L = chain(3)
    anti = np.array([[min(a, 2 - b) for b in range(3)] for a in range(3)])
    assert is_monotone_map(L, anti).signature == ("isotone", "antitone")
    assert is_monotone_map(L, np.zeros(3, int)).signature == ("constant",)
    bad = is_monotone_map(L, np.array([0, 2, 1]))
    assert not bad.monotone and bad.witness["coordinate"] == 0


def test_omega_lattice_validation():
    L = chain(2)
    with pytest.raises(InputError):
        OmegaLattice(L, [OperatorSymbol("f", 1)], {"f": [0, 5]})
    with pytest.raises(InputError):
        OmegaLattice(L, [OperatorSymbol("f", 1)], {})
    with pytest.raises(InputError):
        OperatorSymbol("f", 4)
    with pytest.raises(InputError):
        OperatorSymbol("f", 1, "middle")


def test_product_and_homomorphisms():
    A = OmegaLattice(chain(2), [OperatorSymbol("f", 1)], {"f": [0, 0]})
    AA = product_omega([A, A])
    assert AA.size == 4 and (AA.ops["f"] == 0).all()
    diag = LatticeMap(A.base, AA.base, [0, 3])
    assert is_omega_homomorphism(diag, A, AA)
    B = OmegaLattice(chain(2), [OperatorSymbol("f", 1)], {"f": [0, 1]})
    assert not is_omega_homomorphism(LatticeMap(A.base, B.base, [0, 1]), A, B)


def test_json_round_trip():
    A = OmegaLattice(diamond(), [OperatorSymbol("g", 2, "upper")], {"g": diamond().meet})
    B = omega_from_json(omega_to_json(A))
    assert (B.ops["g"] == A.ops["g"]).all() and B.symbols["g"].side == "upper"


def test_p_plus_omega_and_not_closed():
    P = random_polarity(random.Random(4), 3, 3)
    sig = Signature((), 1)
    ident = OperatorSymbol("i", 1)
    A = build_p_plus_omega(P, {"i": parse("S0(v0)", sig)}, [ident])
    assert list(A.ops["i"]) == list(range(A.size))
    # complement relative to X leaves P+ unless it is Boolean
    comp = {"c": parse("X(v0) & !S0(v0)", sig)}
    P2 = random_polarity(random.Random(0), 3, 2, density=1.0)
    with pytest.raises(NotClosed):
        build_p_plus_omega(P2, comp, [OperatorSymbol("c", 1)])
