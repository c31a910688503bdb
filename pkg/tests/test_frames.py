import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stablesets import frames as fr
from stablesets.polarity import closure, is_subset, lam, members, non_identity_polarity, rho, stable_set_lattice


def fusion_oracle(F, A, B):
    T = F.relations["T"].tuples
    ys = {y for y in range(F.y_size) if all((a, b, y) in T for a in members(A) for b in members(B))}
    return {x for x in range(F.x_size) if all(F.R[x, y] for y in ys)}


def box_oracle(F, A):
    T = F.relations["T"].tuples
    r = members(rho(F, A))
    return {x for x in range(F.x_size) if all((x, y) in T for y in r)}


def diamond_oracle(F, A):
    T = F.relations["T"].tuples
    ys = {y for y in range(F.y_size) if all((x, y) in T for x in members(A))}
    return {x for x in range(F.x_size) if all(F.R[x, y] for y in ys)}


HANDCRAFTED = fr.handcrafted_lambek_frames()


def test_enumerated_counts():
    frames = fr.small_lambek_frames(2)
    assert len(frames) == 515
    assert all(fr.is_lambek_frame(F) for F in frames)


@pytest.mark.parametrize("name", sorted(HANDCRAFTED))
def test_handcrafted_frames_are_lambek(name):
    F = HANDCRAFTED[name]
    assert fr.is_lambek_frame(F) and fr.lambek_witness(F) is None
    assert fr.fo_conditions(F) == {"separating": True, "reduced": True, "sections": True}


@pytest.mark.parametrize("name", ["boolean3-skew", "m3-join", "m2-squared-join"])
def test_lambek_operations(name):
    F = HANDCRAFTED[name]
    S = stable_set_lattice(F).stables
    for A in S:
        for B in S:
            assert set(members(fr.fusion(F, A, B))) == fusion_oracle(F, A, B)
            assert fr.fusion(F, A, B) in S
            assert fr.fo_op(F, "fusion", A, B) == fr.fusion(F, A, B)
            assert fr.fo_op(F, "under", A, B) == fr.residual_left(F, A, B)
            assert fr.fo_op(F, "over", A, B) == fr.residual_right(F, A, B)
            for C in S:
                lhs = is_subset(fr.fusion(F, A, B), C)
                assert lhs == is_subset(B, fr.residual_left(F, A, C)) == is_subset(A, fr.residual_right(F, C, B))


def test_commutativity():
    assert fr.commutativity_check(HANDCRAFTED["boolean3-symmetric"])
    assert fr.fusion_commutes(HANDCRAFTED["boolean3-symmetric"])[0]
    skew = HANDCRAFTED["boolean3-skew"]
    assert not fr.commutativity_check(skew)
    ok, w = fr.fusion_commutes(skew)
    assert not ok and w is not None
    assert fr.commutativity_witness(skew) is not None


def test_non_frames_detected():
    P = non_identity_polarity(2)
    # T(0, 0, y) for one y only: the pair section {y} is not stable on the Boolean base
    F = fr.lambek_frame(P, [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)])
    assert fr.fo_conditions(F)["sections"] == fr.sections_stable(F)
    from stablesets.polarity import Polarity
    collapsed = fr.lambek_frame(Polarity(2, 1, [[1], [1]]), [])
    assert not fr.is_separating(collapsed) or not fr.is_reduced(collapsed)
    assert fr.fo_conditions(collapsed)["separating"] == fr.is_separating(collapsed)
    assert fr.fo_conditions(collapsed)["reduced"] == fr.is_reduced(collapsed)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_random_modal_frames(seed):
    F = fr.random_modal_frame(random.Random(seed), 4, 4)
    assert fr.is_modal_frame(F) and fr.fo_conditions(F)["sections"]
    SL = stable_set_lattice(F)
    for A in range(1 << F.x_size):
        assert set(members(fr.box(F, A))) == box_oracle(F, A)
        assert set(members(fr.diamond(F, A))) == diamond_oracle(F, A)
        assert fr.box(F, A) == fr.box_sections(F, A)
        assert fr.diamond(F, A) == fr.diamond_sections(F, A)
    for A in SL.stables:
        assert fr.box(F, A) in SL and fr.diamond(F, A) in SL
        for B in SL.stables:
            assert is_subset(fr.diamond(F, A), B) == is_subset(A, fr.box(F, B))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_identity_modal_frame(n):
    F = fr.identity_modal_frame(n)
    for A in range(1 << n):
        assert fr.box(F, A) == A == fr.diamond(F, A)


def test_omega_builders():
    F = HANDCRAFTED["m3-join"]
    O = fr.lambek_omega(F, residuals=True)
    assert set(O.ops) == {"fusion", "under", "over"}
    M = fr.modal_omega(fr.identity_modal_frame(2))
    assert list(M.ops["box"]) == list(range(4))


def test_reduced_polarity_recovers_lattice():
    from stablesets.order import diamond, find_isomorphism
    P, J, M = fr.reduced_polarity(diamond())
    assert find_isomorphism(diamond(), stable_set_lattice(P).lattice) is not None
