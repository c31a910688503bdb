import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablesets import _pykernels, kernels
from stablesets.errors import InputError, PreconditionViolated, SizeCapExceeded
from stablesets.polarity import (
    Polarity,
    closure,
    is_stable,
    lam,
    mask_of,
    members,
    non_identity_polarity,
    orthocomplement_check,
    polarity_from_json,
    polarity_from_pairs,
    polarity_to_json,
    rho,
    stable_set_lattice,
)
from strategies import polarities


def rho_oracle(P, A):
    return {y for y in range(P.y_size) if all(P.R[x, y] for x in A)}


def lam_oracle(P, B):
    return {x for x in range(P.x_size) if all(P.R[x, y] for y in B)}


def subsets(n):
    return range(1 << n)


@given(polarities())
def test_rho_lam_match_set_oracle(P):
    for A in subsets(P.x_size):
        assert set(members(rho(P, A))) == rho_oracle(P, members(A))
    for B in subsets(P.y_size):
        assert set(members(lam(P, B))) == lam_oracle(P, members(B))


@given(polarities())
def test_galois_laws(P):
    for A in subsets(P.x_size):
        assert A & ~closure(P, A) == 0
        assert rho(P, closure(P, A)) == rho(P, A)
        assert closure(P, closure(P, A)) == closure(P, A)


@given(polarities(), st.data())
def test_antitone(P, data):
    A = data.draw(st.integers(0, P.full_x))
    A2 = A | data.draw(st.integers(0, P.full_x))
    assert rho(P, A2) & ~rho(P, A) == 0


@given(polarities())
def test_stables_are_lambda_images(P):
    brute = sorted(A for A in subsets(P.x_size) if closure(P, A) == A)
    assert stable_set_lattice(P).stables == brute
    assert stable_set_lattice(P, method="closure").stables == brute
    assert sorted({lam(P, B) for B in subsets(P.y_size)}) == brute


@given(polarities(max_x=4, max_y=4))
def test_stable_lattice_operations(P):
    SL = stable_set_lattice(P)
    L = SL.lattice
    assert SL.top == P.full_x
    assert SL.bottom == lam(P, P.full_y)
    for i, a in enumerate(SL.stables):
        for j, b in enumerate(SL.stables):
            assert SL.stables[L.meet[i, j]] == a & b
            assert SL.stables[L.join[i, j]] == closure(P, a | b)
            assert L.leq[i, j] == (a & ~b == 0)
    L.check_tables()


def test_y_cap():
    P = Polarity(1, 15, np.ones((1, 15), dtype=bool))
    with pytest.raises(SizeCapExceeded):
        stable_set_lattice(P)
    assert len(stable_set_lattice(P, method="closure")) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_non_identity_is_boolean(n):
    P = non_identity_polarity(n)
    SL = stable_set_lattice(P)
    assert len(SL) == 2**n
    for A in subsets(n):
        assert rho(P, A) == P.full_x & ~A
        assert is_stable(P, A)
    assert orthocomplement_check(P)


def test_ortho_preconditions():
    with pytest.raises(PreconditionViolated):
        orthocomplement_check(Polarity(1, 2, [[0, 0]]))
    with pytest.raises(PreconditionViolated):
        orthocomplement_check(Polarity(2, 2, np.eye(2, dtype=bool)))


def test_ortho_transitive_counterexample():
    # x0 R x1 only: irreflexive and transitive, yet {x1} meets its complement outside bottom
    P = polarity_from_pairs(2, 2, [(0, 1)])
    ok, w = orthocomplement_check(P, witness=True)
    assert not ok and w["law"]


def test_json_round_trip_and_errors():
    P = polarity_from_json({"X": 2, "Y": 3, "R": [[0, 1], [1, 2]], "class": "modal",
                            "relations": {"T": {"arity": 2, "tuples": [[0, 0]]}}})
    Q = polarity_from_json(polarity_to_json(P))
    assert (Q.R == P.R).all() and Q.relations == P.relations and Q.kind == "modal"
    with pytest.raises(InputError):
        polarity_from_json({"X": 2})
    with pytest.raises(InputError):
        polarity_from_json({"X": 1, "Y": 1, "R": [[0, 3]]})
    with pytest.raises(InputError):
        polarity_from_json({"X": 1, "Y": 1, "class": "modal",
                            "relations": {"T": {"arity": 2, "tuples": [[0, 4]]}}})
    with pytest.raises(InputError):
        polarity_from_json({"X": 1, "Y": 1, "relations": {"Q": {"arity": 1, "tuples": []}}})


def test_masks():
    assert mask_of([0, 2, np.int64(40)]) == (1 << 40) | 5
    assert members(0b1011) == [0, 1, 3]


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")
@given(polarities(max_x=6, max_y=6))
def test_backends_agree(P):
    import stablesets._ckernels as ck

    cols, rows = np.array(P.cols, dtype=np.uint64), np.array(P.rows, dtype=np.uint64)
    assert [int(v) for v in ck.lambda_all(cols, P.x_size)] == _pykernels.lambda_all(P.cols, P.x_size)
    st_c = [int(v) for v in ck.closure_stables(cols, P.x_size)]
    assert st_c == _pykernels.closure_stables(P.cols, P.x_size)
    tc = ck.stable_tables(np.array(st_c, dtype=np.uint64), rows, cols, P.x_size, P.y_size)
    tp = _pykernels.stable_tables(st_c, P.rows, P.cols, P.x_size, P.y_size)
    for a, b in zip(tc, tp):
        assert (np.asarray(a) == np.asarray(b)).all()
    for A in range(1 << P.x_size):
        assert int(ck.rho(rows, A, P.y_size)) == _pykernels.rho(P.rows, A, P.y_size)


def test_wide_masks_fall_back():
    n = 70
    P = Polarity(n, 2, np.ones((n, 2), dtype=bool))
    assert rho(P, (1 << n) - 1) == 3
    assert lam(P, 3) == (1 << n) - 1


def test_pure_fallback_selected_by_environment():
    import json
    import os
    import subprocess
    import sys

    code = ("import json; from stablesets import kernels; from stablesets.polarity import non_identity_polarity, "
            "stable_set_lattice; print(json.dumps([kernels.BACKEND, stable_set_lattice(non_identity_polarity(4)).stables]))")
    env = {**os.environ, "STABLESETS_PURE": "1"}
    pure = json.loads(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, check=True).stdout)
    assert pure[0] == "python"
    assert pure[1] == stable_set_lattice(non_identity_polarity(4)).stables
