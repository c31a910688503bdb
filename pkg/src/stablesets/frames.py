"""Lambek frames (polarities with a ternary T on X*X*Y) and modal frames
(polarities with a binary T on X*Y), their class predicates and the
operations they induce on subsets of X.

A frame is an ordinary :class:`~stablesets.polarity.Polarity` whose
``relations`` holds ``T``; the class predicates are computed, never assumed.
"""

from __future__ import annotations

import random
from itertools import product as iproduct

import numpy as np

from .errors import InputError
from .expansions import OperatorSymbol, OmegaLattice
from .formula import And, Forall, Implies, Signature, SortX, SortY, parse
from .order import covers, diamond as m2, lattice_from_pairs
from .polarity import (
    Polarity,
    Relation,
    is_subset,
    lam,
    mask_of,
    members,
    non_identity_polarity,
    rho,
    stable_set_lattice,
)
from .semantics import InterpretedStructure, define_set, evaluate, stability_formula, stability_formula_y

LAMBEK_SIG = Signature((("T", 3),), 2)
MODAL_SIG = Signature((("T", 2),), 1)

# A0 (x) A1, free variable v3
FUSION = parse("forall v2 ((Y(v2) & forall v0 forall v1 (S0(v0) & S1(v1) -> T(v0,v1,v2))) -> R(v3,v2))", LAMBEK_SIG)
# A0 \ A1 and A0 / A1, free variable v0
UNDER = parse("forall v1 forall v2 ((S0(v1) & Y(v2) & forall v3 (S1(v3) -> R(v3,v2))) -> T(v1,v0,v2))", LAMBEK_SIG)
OVER = parse("forall v1 forall v2 ((S1(v1) & Y(v2) & forall v3 (S0(v3) -> R(v3,v2))) -> T(v0,v1,v2))", LAMBEK_SIG)
COMMUTATIVITY = parse("forall v0 forall v1 forall v2 (T(v0,v1,v2) <-> T(v1,v0,v2))", LAMBEK_SIG)

# box and diamond, free variable v0
BOX = parse("forall v1 ((Y(v1) & forall v2 (S0(v2) -> R(v2,v1))) -> T(v0,v1))", MODAL_SIG)
DIAMOND = parse("forall v1 ((Y(v1) & forall v2 (S0(v2) -> T(v2,v1))) -> R(v0,v1))", MODAL_SIG)

SEPARATING = parse(
    "forall v0 forall v1 (X(v0) & X(v1) & forall v2 (R(v0,v2) <-> R(v1,v2)) -> v0 = v1)"
    " & forall v0 forall v1 (Y(v0) & Y(v1) & forall v2 (R(v2,v0) <-> R(v2,v1)) -> v0 = v1)"
)
# strict inclusion of sections is written as inclusion plus a point of difference
REDUCED = parse(
    "forall v0 (X(v0) -> exists v1 (Y(v1) & !R(v0,v1) & forall v2 ("
    "X(v2) & forall v3 (R(v0,v3) -> R(v2,v3)) & exists v3 (R(v2,v3) & !R(v0,v3)) -> R(v2,v1))))"
    " & forall v0 (Y(v0) -> exists v1 (X(v1) & !R(v1,v0) & forall v2 ("
    "Y(v2) & forall v3 (R(v3,v2) -> R(v3,v0)) & exists v3 (R(v3,v0) & !R(v3,v2)) -> R(v1,v2))))"
)


def _lambek_sections_sentence():
    pair = stability_formula_y(parse("T(v0,v1,v2)", LAMBEK_SIG), 2)
    mid = stability_formula(parse("T(v0,v2,v1)", LAMBEK_SIG), 2)
    left = stability_formula(parse("T(v2,v0,v1)", LAMBEK_SIG), 2)
    xx = parse("X(v0) & X(v1)")
    xy = parse("X(v0) & Y(v1)")

    def close(guard, body):
        return Forall(0, Forall(1, Implies(guard, body)))

    return And(close(xx, pair), And(close(xy, mid), close(xy, left)))


def _modal_sections_sentence():
    row = stability_formula_y(parse("T(v0,v1)", MODAL_SIG), 1)
    col = stability_formula(parse("T(v1,v0)", MODAL_SIG), 1)
    return And(Forall(0, Implies(SortX(0), row)), Forall(0, Implies(SortY(0), col)))


LAMBEK_SECTIONS = _lambek_sections_sentence()
MODAL_SECTIONS = _modal_sections_sentence()

LAMBEK_PHI = {"fusion": FUSION, "under": UNDER, "over": OVER}
MODAL_PHI = {"box": BOX, "diamond": DIAMOND}

FUSION_SYMBOL = OperatorSymbol("fusion", 2, "lower")
# residuals are dual operators once their antitone coordinate is reversed
UNDER_SYMBOL = OperatorSymbol("under", 2, "upper")
OVER_SYMBOL = OperatorSymbol("over", 2, "upper")
BOX_SYMBOL = OperatorSymbol("box", 1, "upper")
DIAMOND_SYMBOL = OperatorSymbol("diamond", 1, "lower")
MODAL_OMEGA = (DIAMOND_SYMBOL, BOX_SYMBOL)
LAMBEK_OMEGA = (FUSION_SYMBOL,)


# -- construction ---------------------------------------------------------------


def lambek_frame(P, T):
    """P expanded with T, given as (x0, x1, y) triples."""
    return P.with_relations({"T": Relation(("X", "X", "Y"), frozenset(map(tuple, T)))}, kind="lambek")


def modal_frame(P, T):
    """P expanded with T, given as (x, y) pairs."""
    return P.with_relations({"T": Relation(("X", "Y"), frozenset(map(tuple, T)))}, kind="modal")


def _T(P, arity):
    rel = P.relations.get("T")
    if rel is None or rel.arity != arity:
        raise InputError(f"structure needs a relation T of arity {arity}")
    return rel.tuples


def _lambek_sections(P):
    """(T[x0,x1,-], T[x0,-,y], T[-,x1,y]) as nested lists of masks, cached on P."""
    cached = P.__dict__.get("_lambek_sections")
    if cached is not None:
        return cached
    T = _T(P, 3)
    nx, ny = P.x_size, P.y_size
    pair = [[0] * nx for _ in range(nx)]
    mid = [[0] * ny for _ in range(nx)]
    left = [[0] * ny for _ in range(nx)]
    for x0, x1, y in T:
        pair[x0][x1] |= 1 << y
        mid[x0][y] |= 1 << x1
        left[x1][y] |= 1 << x0
    P._lambek_sections = (pair, mid, left)
    return P._lambek_sections


def _modal_sections(P):
    cached = P.__dict__.get("_modal_sections")
    if cached is not None:
        return cached
    T = _T(P, 2)
    row = [0] * P.x_size
    col = [0] * P.y_size
    for x, y in T:
        row[x] |= 1 << y
        col[y] |= 1 << x
    P._modal_sections = (row, col)
    return P._modal_sections


# -- class predicates --------------------------------------------------------------


def separating_witness(P):
    for a in range(P.x_size):
        for b in range(a + 1, P.x_size):
            if P.rows[a] == P.rows[b]:
                return {"sort": "X", "pair": [a, b]}
    for a in range(P.y_size):
        for b in range(a + 1, P.y_size):
            if P.cols[a] == P.cols[b]:
                return {"sort": "Y", "pair": [a, b]}
    return None


def is_separating(P):
    return separating_witness(P) is None


def _strict(a, b):
    return is_subset(a, b) and a != b


def reduced_witness(P):
    for x in range(P.x_size):
        ok = any(
            not P.R[x, y] and all(P.R[x2, y] for x2 in range(P.x_size) if _strict(P.rows[x], P.rows[x2]))
            for y in range(P.y_size)
        )
        if not ok:
            return {"sort": "X", "element": x}
    for y in range(P.y_size):
        ok = any(
            not P.R[x, y] and all(P.R[x, y2] for y2 in range(P.y_size) if _strict(P.cols[y2], P.cols[y]))
            for x in range(P.x_size)
        )
        if not ok:
            return {"sort": "Y", "element": y}
    return None


def is_reduced(P):
    return reduced_witness(P) is None


def _stable_x(P, A):
    return is_subset(lam(P, rho(P, A)), A)


def _stable_y(P, B):
    return is_subset(rho(P, lam(P, B)), B)


def sections_witness(P):
    """First unstable section of T (Lambek or modal, by the arity of T), or None."""
    if P.relations.get("T") is not None and P.relations["T"].arity == 2:
        row, col = _modal_sections(P)
        for x, B in enumerate(row):
            if not _stable_y(P, B):
                return {"section": "T[x,-]", "x": x, "set": members(B)}
        for y, A in enumerate(col):
            if not _stable_x(P, A):
                return {"section": "T[-,y]", "y": y, "set": members(A)}
        return None
    pair, mid, left = _lambek_sections(P)
    for x0, x1 in iproduct(range(P.x_size), repeat=2):
        if not _stable_y(P, pair[x0][x1]):
            return {"section": "T[x0,x1,-]", "x0": x0, "x1": x1, "set": members(pair[x0][x1])}
    for x, y in iproduct(range(P.x_size), range(P.y_size)):
        if not _stable_x(P, mid[x][y]):
            return {"section": "T[x0,-,y]", "x0": x, "y": y, "set": members(mid[x][y])}
        if not _stable_x(P, left[x][y]):
            return {"section": "T[-,x1,y]", "x1": x, "y": y, "set": members(left[x][y])}
    return None


def sections_stable(P):
    return sections_witness(P) is None


def lambek_witness(P):
    for law, fn in (("separating", separating_witness), ("reduced", reduced_witness), ("sections", sections_witness)):
        w = fn(P)
        if w is not None:
            return {"law": law, **w}
    return None


def is_lambek_frame(P):
    _T(P, 3)
    return lambek_witness(P) is None


def is_modal_frame(P):
    _T(P, 2)
    return sections_witness(P) is None


def lambek_frame_fo(P):
    """The same three Lambek conditions, decided by evaluating their first-order sentences."""
    M = InterpretedStructure(P)
    return all(evaluate(M, s) for s in (SEPARATING, REDUCED, LAMBEK_SECTIONS))


def fo_conditions(P):
    """Per-condition verdicts of the first-order sentences (keys match the set-level predicates)."""
    M = InterpretedStructure(P)
    sections = LAMBEK_SECTIONS if P.relations["T"].arity == 3 else MODAL_SECTIONS
    return {"separating": evaluate(M, SEPARATING), "reduced": evaluate(M, REDUCED), "sections": evaluate(M, sections)}


# -- Lambek operations --------------------------------------------------------------


def fusion(P, A0, A1):
    """Intersection of lam{y} over the y with T(x0, x1, y) for all x0 in A0, x1 in A1."""
    pair, _, _ = _lambek_sections(P)
    ys = P.full_y
    for x0 in members(A0):
        for x1 in members(A1):
            ys &= pair[x0][x1]
    out = P.full_x
    for y in members(ys):
        out &= P.cols[y]
    return out


def residual_left(P, A0, A1):
    """A0 \\ A1: the x with T(x0, x, y) whenever x0 in A0 and y in rho(A1)."""
    T = _T(P, 3)
    ys = members(rho(P, A1))
    xs = members(A0)
    return mask_of(x for x in range(P.x_size) if all((x0, x, y) in T for x0 in xs for y in ys))


def residual_right(P, A0, A1):
    """A0 / A1: the x with T(x, x1, y) whenever x1 in A1 and y in rho(A0)."""
    T = _T(P, 3)
    ys = members(rho(P, A0))
    xs = members(A1)
    return mask_of(x for x in range(P.x_size) if all((x, x1, y) in T for x1 in xs for y in ys))


def residual_left_sections(P, A0, A1):
    """A0 \\ A1 as the intersection of the sections T[x0,-,y]."""
    _, mid, _ = _lambek_sections(P)
    out = P.full_x
    for x0 in members(A0):
        for y in members(rho(P, A1)):
            out &= mid[x0][y]
    return out


def residual_right_sections(P, A0, A1):
    """A0 / A1 as the intersection of the sections T[-,x1,y]."""
    _, _, left = _lambek_sections(P)
    out = P.full_x
    for x1 in members(A1):
        for y in members(rho(P, A0)):
            out &= left[x1][y]
    return out


def commutativity_check(P):
    """Evaluate the sentence saying T is symmetric in its first two places."""
    return evaluate(InterpretedStructure(P), COMMUTATIVITY)


def commutativity_witness(P):
    """A triple (x0, x1, y) with T(x0, x1, y) but not T(x1, x0, y), or None."""
    T = _T(P, 3)
    for x0, x1, y in sorted(T):
        if (x1, x0, y) not in T:
            return [x0, x1, y]
    return None


def fusion_commutes(P, SL=None):
    """Does A (x) B = B (x) A for all stable A, B?  Returns (ok, witness pair)."""
    SL = SL or stable_set_lattice(P)
    for A in SL.stables:
        for B in SL.stables:
            if fusion(P, A, B) != fusion(P, B, A):
                return False, [members(A), members(B)]
    return True, None


# -- modal operations --------------------------------------------------------------


def box(P, A):
    """The x with rho(A) contained in T[x,-]."""
    row, _ = _modal_sections(P)
    r = rho(P, A)
    return mask_of(x for x in range(P.x_size) if is_subset(r, row[x]))


def box_sections(P, A):
    _, col = _modal_sections(P)
    out = P.full_x
    for y in members(rho(P, A)):
        out &= col[y]
    return out


def diamond(P, A):
    """lam of the y with A contained in T[-,y]."""
    _, col = _modal_sections(P)
    return lam(P, mask_of(y for y in range(P.y_size) if is_subset(A, col[y])))


def diamond_sections(P, A):
    _, col = _modal_sections(P)
    out = P.full_x
    for y in range(P.y_size):
        if is_subset(A, col[y]):
            out &= P.cols[y]
    return out


SET_OPS = {
    "fusion": fusion,
    "under": residual_left,
    "over": residual_right,
    "box": box,
    "diamond": diamond,
}


def fo_op(P, name, *sets):
    """The same operation computed by define_set on its first-order formula."""
    phi = {**LAMBEK_PHI, **MODAL_PHI}[name]
    return define_set(InterpretedStructure(P, sets), phi)


def operation_table(SL, fn, arity):
    """Table of a set operation restricted to the stable sets (raises if an image is unstable)."""
    n = len(SL)
    t = np.empty((n,) * arity, dtype=np.int32)
    for args in iproduct(range(n), repeat=arity):
        out = fn(SL.base, *(SL.stables[a] for a in args))
        if out not in SL:
            raise InputError(f"image {members(out)} of {[members(SL.stables[a]) for a in args]} is not stable")
        t[args] = SL.index[out]
    return t


def lambek_omega(P, SL=None, residuals=False):
    """P+ with fusion (and optionally both residuals), computed set-theoretically."""
    SL = SL or stable_set_lattice(P)
    symbols = [FUSION_SYMBOL] + ([UNDER_SYMBOL, OVER_SYMBOL] if residuals else [])
    tables = {s.name: operation_table(SL, SET_OPS[s.name], 2) for s in symbols}
    out = OmegaLattice(SL.lattice, symbols, tables)
    out.stable_lattice = SL
    return out


def modal_omega(P, SL=None):
    SL = SL or stable_set_lattice(P)
    tables = {s.name: operation_table(SL, SET_OPS[s.name], 1) for s in MODAL_OMEGA}
    out = OmegaLattice(SL.lattice, MODAL_OMEGA, tables)
    out.stable_lattice = SL
    return out


# -- frame corpora -----------------------------------------------------------------


def _all_relations(nx, ny):
    cells = [(x, y) for x in range(nx) for y in range(ny)]
    for bits in range(1 << len(cells)):
        yield [c for k, c in enumerate(cells) if bits >> k & 1]


def enumerate_lambek_frames(nx, ny):
    """Every Lambek frame on the given carrier sizes (R and T ranging over all relations)."""
    triples = [(a, b, y) for a in range(nx) for b in range(nx) for y in range(ny)]
    for pairs in _all_relations(nx, ny):
        R = np.zeros((nx, ny), dtype=bool)
        for x, y in pairs:
            R[x, y] = True
        P = Polarity(nx, ny, R)
        if not (is_separating(P) and is_reduced(P)):
            continue
        for bits in range(1 << len(triples)):
            F = lambek_frame(P, [t for k, t in enumerate(triples) if bits >> k & 1])
            if sections_stable(F):
                yield F


def small_lambek_frames(max_size=2):
    """All Lambek frames with |X|, |Y| <= max_size."""
    out = []
    for nx in range(max_size + 1):
        for ny in range(max_size + 1):
            out.extend(enumerate_lambek_frames(nx, ny))
    return out


def _irreducibles(L):
    cov = covers(L)
    lower = {a: [b for b, c in cov if c == a] for a in L.elements}
    upper = {a: [c for b, c in cov if b == a] for a in L.elements}
    J = [a for a in L.elements if len(lower[a]) == 1]
    M = [a for a in L.elements if len(upper[a]) == 1]
    return J, M


def reduced_polarity(L):
    """(J(L), M(L), <=): join- against meet-irreducibles; its stable set lattice is L again.

    It is always separating, but the reduced condition can fail (chains of length three already fail it).
    """
    J, M = _irreducibles(L)
    R = np.array([[bool(L.leq[j, m]) for m in M] for j in J], dtype=bool).reshape(len(J), len(M))
    return Polarity(len(J), len(M), R), J, M


def join_frame(L):
    """Reduced polarity of L with T(j0, j1, m) iff j0 <= m and j1 <= m (fusion is join away from 0)."""
    P, J, M = reduced_polarity(L)
    T = [(a, b, y) for a in range(len(J)) for b in range(len(J)) for y in range(len(M))
         if L.leq[J[a], M[y]] and L.leq[J[b], M[y]]]
    return lambek_frame(P, T)


def handcrafted_lambek_frames():
    """Named Lambek frames larger than the enumerated ones."""
    rng = random.Random(7)
    frames = {}
    P3 = non_identity_polarity(3)
    triples3 = [(a, b, y) for a in range(3) for b in range(3) for y in range(3)]
    frames["boolean3-total"] = lambek_frame(P3, triples3)
    frames["boolean3-empty"] = lambek_frame(P3, [])
    sym = {t for t in triples3 if rng.random() < 0.5}
    sym |= {(b, a, y) for a, b, y in sym}
    frames["boolean3-symmetric"] = lambek_frame(P3, sym)
    frames["boolean3-skew"] = lambek_frame(P3, [(a, b, y) for a, b, y in triples3 if a <= b and y != a])
    P4 = non_identity_polarity(4)
    frames["boolean4-random"] = lambek_frame(
        P4, [(a, b, y) for a in range(4) for b in range(4) for y in range(4) if rng.random() < 0.4])
    m3 = lattice_from_pairs(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)] + [(i, i) for i in range(5)]
                            + [(0, 4)])
    frames["m3-join"] = join_frame(m3)
    frames["m3-diagonal"] = lambek_frame(reduced_polarity(m3)[0], [(a, a, a) for a in range(3)])
    sym4 = {(a, b, y) for a in range(4) for b in range(a, 4) for y in range(4) if rng.random() < 0.5}
    frames["boolean4-commutative"] = lambek_frame(P4, sym4 | {(b, a, y) for a, b, y in sym4})
    frames["m2-squared-join"] = join_frame(m2())
    return frames


def random_modal_frame(rng, max_x=4, max_y=4, tries=200):
    """A random modal frame: random R, T built column by column from stable sets, rejected until rows are stable."""
    for _ in range(tries):
        nx, ny = rng.randint(1, max_x), rng.randint(1, max_y)
        R = np.array([[rng.random() < 0.5 for _ in range(ny)] for _ in range(nx)], dtype=bool)
        P = Polarity(nx, ny, R)
        SL = stable_set_lattice(P)
        cols = [rng.choice(SL.stables) for _ in range(ny)]
        T = [(x, y) for y in range(ny) for x in members(cols[y])]
        F = modal_frame(P, T)
        if is_modal_frame(F):
            return F
    raise RuntimeError("no modal frame found; raise tries")


def random_modal_frames(count, seed=0, max_x=4, max_y=4):
    rng = random.Random(seed)
    return [random_modal_frame(rng, max_x, max_y) for _ in range(count)]


def random_lambek_frame(rng, base=None, density=0.5):
    """Random T over a separating reduced polarity (the non-identity one by default), rejected until sections are stable."""
    P = base or non_identity_polarity(rng.randint(1, 3))
    for _ in range(500):
        T = [(a, b, y) for a in range(P.x_size) for b in range(P.x_size) for y in range(P.y_size)
             if rng.random() < density]
        F = lambek_frame(P, T)
        if is_lambek_frame(F):
            return F
    raise RuntimeError("no Lambek frame found on this base")


def identity_modal_frame(n):
    """The non-identity polarity with T = R, on which box and diamond are both the identity."""
    P = non_identity_polarity(n)
    return modal_frame(P, [(x, y) for x in range(n) for y in range(n) if x != y])
