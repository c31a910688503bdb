"""Completions of finite lattices: MacNeille (normal cuts), canonical
extensions (stable sets of the filter-ideal polarity), density and
compactness checks, and the lifting of maps to completions.
"""

from __future__ import annotations

from itertools import product as iproduct

import numpy as np

from .errors import NotIsotone, SizeCapExceeded
from .expansions import OmegaLattice, antitone_coords
from .order import (
    FinLattice,
    FinPoset,
    LatticeMap,
    big_join,
    big_meet,
    build_lattice,
    is_homomorphism,
    is_injective,
    is_isotone,
    iter_homomorphisms,
    lattice_to_json,
    to_dot,
)
from .polarity import Polarity, mask_of, members, stable_set_lattice

DEFAULT_FILTER_CAP = 32
COMPACT_CAP = 12


class Completion:
    """A completion (embed, target) of ``source`` with its closed and open elements.

    ``closed`` holds the meets of sets of image elements (the empty meet
    included) and ``open`` the joins.
    """

    def __init__(self, source, target, embed, kind="", stable_lattice=None, polarity=None):
        self.source = source
        self.target = target
        self.embed = embed if isinstance(embed, LatticeMap) else LatticeMap(source, target, embed)
        self.kind = kind
        self.stable_lattice = stable_lattice
        self.polarity = polarity
        image = sorted(set(self.embed.table))
        self.closed = frozenset(_closure(target, image, target.meet, target.top))
        self.open = frozenset(_closure(target, image, target.join, target.bot))

    def __repr__(self):
        return f"Completion({self.kind}, source={self.source.size}, target={self.target.size})"

    def theta(self, a):
        return self.embed.table[a]

    def is_embedding(self):
        return is_injective(self.embed) and is_homomorphism(self.embed)


def _closure(L, gens, op, unit):
    """All values of op over finite subsets of gens (the empty one giving ``unit``)."""
    out = {int(unit)}
    frontier = list(out)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = int(op[v, g])
                if w not in out:
                    out.add(w)
                    nxt.append(w)
        frontier = nxt
    return out


def completion_to_json(c):
    out = lattice_to_json(c.target)
    out["embedding"] = list(c.embed.table)
    out["closed"] = sorted(c.closed)
    out["open"] = sorted(c.open)
    out["kind"] = c.kind
    return out


def completion_to_dot(c, name="completion"):
    """Hasse diagram of the target; image elements are doubled, closed-only boxes, open-only diamonds."""
    image = set(c.embed.table)
    ann = {}
    for e in c.target.elements:
        if e in image:
            ann[e] = {"shape": "doublecircle"}
        elif e in c.closed and e not in c.open:
            ann[e] = {"shape": "box"}
        elif e in c.open and e not in c.closed:
            ann[e] = {"shape": "diamond"}
    labels = {e: f"{e}" + (f"=t({c.embed.table.index(e)})" if e in image else "") for e in c.target.elements}
    return to_dot(c.target, labels=labels, name=name, annotate=ann)


# -- MacNeille ---------------------------------------------------------------------


def _leq_of(P):
    return P.leq if isinstance(P, (FinLattice, FinPoset)) else np.asarray(P, dtype=bool)


def upper_bounds(leq, A):
    n = leq.shape[0]
    return mask_of(b for b in range(n) if all(leq[a, b] for a in members(A)))


def lower_bounds(leq, B):
    n = leq.shape[0]
    return mask_of(a for a in range(n) if all(leq[a, b] for b in members(B)))


def normal_cuts(P):
    """All A with A = lower_bounds(upper_bounds(A)), sorted by mask value.

    Generated as the intersection closure of the principal downsets and the
    whole carrier; each is then verified to be a cut.
    """
    leq = _leq_of(P)
    n = leq.shape[0]
    full = (1 << n) - 1
    downs = [mask_of(np.flatnonzero(leq[:, b])) for b in range(n)]
    cuts = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for c in frontier:
            for d in downs:
                e = c & d
                if e not in cuts:
                    cuts.add(e)
                    nxt.append(e)
        frontier = nxt
    out = sorted(cuts)
    for c in out:
        assert lower_bounds(leq, upper_bounds(leq, c)) == c, "not a normal cut"
    return out


def macneille(L):
    """Dedekind-MacNeille completion by normal cuts, embedding a -> down-set of a.

    ``L`` may be a lattice or just a bounded poset (:class:`FinPoset`).
    """
    leq = _leq_of(L)
    n = leq.shape[0]
    cuts = normal_cuts(leq)
    index = {c: i for i, c in enumerate(cuts)}
    m = len(cuts)
    inc = np.array([[(a & ~b) == 0 for b in cuts] for a in cuts], dtype=bool).reshape(m, m)
    target = build_lattice(FinPoset(inc))
    downs = [mask_of(np.flatnonzero(leq[:, b])) for b in range(n)]
    table = [index[d] for d in downs]
    source = L if isinstance(L, FinLattice) else _PosetSource(leq)
    out = Completion(source, target, LatticeMap(source, target, table), kind="macneille")
    out.cuts = cuts
    return out


class _PosetSource:
    """Minimal lattice-like view of a poset, enough for LatticeMap and order checks."""

    def __init__(self, leq):
        self.leq = leq
        self.size = leq.shape[0]
        self.elements = range(self.size)


def is_join_dense(c):
    T = c.target
    image = set(c.embed.table)
    return all(big_join(T, [a for a in image if T.leq[a, e]]) == e for e in T.elements)


def is_meet_dense(c):
    T = c.target
    image = set(c.embed.table)
    return all(big_meet(T, [a for a in image if T.leq[e, a]]) == e for e in T.elements)


# -- filters and ideals ------------------------------------------------------------


def _up(L, e):
    return mask_of(np.flatnonzero(L.leq[e]))


def _down(L, e):
    return mask_of(np.flatnonzero(L.leq[:, e]))


def _generated(L, gens, op, hull):
    """Smallest filter (op = meet, hull = up-set) or ideal containing gens."""
    closed = _closure(L, gens, op, gens[0]) if gens else set()
    out = 0
    for v in closed:
        out |= hull(L, v)
    return out


def filters(L, proper_only=False, cap=DEFAULT_FILTER_CAP):
    """All filters of L as element masks, sorted.

    A filter is non-empty, upward closed and closed under binary meets.
    Enumeration starts from the principal filters and adds one generator at
    a time, so it does not presuppose that every filter is principal.
    """
    return _enumerate(L, L.meet, _up, proper_only, cap)


def ideals(L, proper_only=False, cap=DEFAULT_FILTER_CAP):
    return _enumerate(L, L.join, _down, proper_only, cap)


def _enumerate(L, op, hull, proper_only, cap):
    if L.size > cap:
        raise SizeCapExceeded(f"lattice has {L.size} elements, filter cap is {cap}")
    found = {}
    frontier = []
    for e in L.elements:
        m = _generated(L, [e], op, hull)
        if m not in found:
            found[m] = True
            frontier.append(m)
    while frontier:
        nxt = []
        for m in frontier:
            for e in L.elements:
                if (m >> e) & 1:
                    continue
                g = _generated(L, members(m) + [e], op, hull)
                if g not in found:
                    found[g] = True
                    nxt.append(g)
        frontier = nxt
    full = (1 << L.size) - 1
    return sorted(m for m in found if not (proper_only and m == full))


def is_filter(L, m):
    S = members(m)
    if not S:
        return False
    return all(_up(L, a) & ~m == 0 for a in S) and all((m >> int(L.meet[a, b])) & 1 for a in S for b in S)


def is_ideal(L, m):
    S = members(m)
    if not S:
        return False
    return all(_down(L, a) & ~m == 0 for a in S) and all((m >> int(L.join[a, b])) & 1 for a in S for b in S)


class FilterIdealPolarity:
    """X = filters, Y = ideals, x R y iff x and y meet."""

    def __init__(self, L, proper_only=False, cap=DEFAULT_FILTER_CAP):
        self.lattice = L
        self.filters = filters(L, proper_only, cap)
        self.ideals = ideals(L, proper_only, cap)
        R = np.array([[(f & i) != 0 for i in self.ideals] for f in self.filters], dtype=bool)
        self.polarity = Polarity(len(self.filters), len(self.ideals), R.reshape(len(self.filters), len(self.ideals)))
        self.filter_index = {f: k for k, f in enumerate(self.filters)}
        self.ideal_index = {i: k for k, i in enumerate(self.ideals)}

    def theta_mask(self, a):
        """The set of filters containing a."""
        return mask_of(k for k, f in enumerate(self.filters) if (f >> a) & 1)


def canonical_extension(L, cap=DEFAULT_FILTER_CAP, proper_only=False):
    """The stable set lattice of the filter-ideal polarity, with a -> {filters containing a}."""
    FI = FilterIdealPolarity(L, proper_only, cap)
    SL = stable_set_lattice(FI.polarity, method="closure")
    table = []
    for a in L.elements:
        m = FI.theta_mask(a)
        if m not in SL:
            raise AssertionError(f"theta({a}) is not stable")
        table.append(SL.index[m])
    out = Completion(L, SL.lattice, LatticeMap(L, SL.lattice, table), kind="canonical",
                     stable_lattice=SL, polarity=FI)
    return out


# -- density and compactness ------------------------------------------------------------


def join_of_closed(c, e):
    T = c.target
    return big_join(T, [k for k in c.closed if T.leq[k, e]]) == e


def meet_of_open(c, e):
    T = c.target
    return big_meet(T, [o for o in c.open if T.leq[e, o]]) == e


def is_dense(c):
    """Every target element is a join of closed elements and a meet of open ones.

    ``e`` is a join of some set of closed elements exactly when it is the
    join of all closed elements below it, which is what is tested.
    """
    return all(join_of_closed(c, e) and meet_of_open(c, e) for e in c.target.elements)


def dense_witness(c):
    for e in c.target.elements:
        if not join_of_closed(c, e):
            return {"element": e, "law": "join of closed elements"}
        if not meet_of_open(c, e):
            return {"element": e, "law": "meet of open elements"}
    return None


def _subset_values(T, elems, op, unit):
    """op over every subset of elems, indexed by bitmask."""
    vals = np.full(1 << len(elems), unit, dtype=np.int64)
    for mask in range(1, 1 << len(elems)):
        low = (mask & -mask).bit_length() - 1
        vals[mask] = op[vals[mask & (mask - 1)], elems[low]]
    return vals


def compact_witness(c, cap=COMPACT_CAP):
    """Search for S of closed and T of open elements with meet S <= join T but no finite S', T' witnessing it.

    Every pair (S, T) is enumerated.  In a finite target S and T are
    themselves finite, so S' = S and T' = T are tried as the witnesses.
    """
    T = c.target
    K, O = sorted(c.closed), sorted(c.open)
    if len(K) > cap or len(O) > cap:
        raise SizeCapExceeded(f"{len(K)} closed / {len(O)} open elements exceed compactness cap {cap}")
    meets = _subset_values(T, K, T.meet, T.top)
    joins = _subset_values(T, O, T.join, T.bot)
    below = T.leq[meets[:, None], joins[None, :]]
    for s, t in np.argwhere(below):
        S2, T2 = members(int(s)), members(int(t))  # the finite subfamilies S' = S, T' = T
        if not T.leq[big_meet(T, [K[i] for i in S2]), big_join(T, [O[j] for j in T2])]:
            return {"S": [K[i] for i in members(int(s))], "T": [O[j] for j in members(int(t))]}
    return None


def filter_ideal_witness(c, cap=DEFAULT_FILTER_CAP):
    """A filter F and ideal I of the source with meet theta[F] <= join theta[I] but F and I disjoint, or None.

    This is the form of compactness that involves the embedding: the
    subset form above holds in any finite target.
    """
    L, T = c.source, c.target
    th = c.embed.table
    for F in filters(L, cap=cap):
        m = big_meet(T, [th[a] for a in members(F)])
        for I in ideals(L, cap=cap):
            if F & I:
                continue
            if T.leq[m, big_join(T, [th[a] for a in members(I)])]:
                return {"filter": members(F), "ideal": members(I)}
    return None


def is_compact(c, cap=COMPACT_CAP):
    """Compact in both the closed/open subset form and the filter/ideal form."""
    return compact_witness(c, cap) is None and filter_ideal_witness(c) is None


def commuting_isomorphisms(c1, c2, g, cap=64):
    """All isomorphisms h: c1.target -> c2.target with h(theta1(a)) = theta2(g(a)) for every a."""
    fixed = {c1.embed.table[a]: c2.embed.table[g.table[a]] for a in range(c1.source.size)}
    if c1.target.size != c2.target.size:
        return []
    return list(iter_homomorphisms(c1.target, c2.target, injective=True, cap=cap, fixed=fixed))


# -- lifting maps ---------------------------------------------------------------------


def _as_table(f):
    return np.asarray(f.table if isinstance(f, LatticeMap) else f)


def _tonicity(cL, f, antitone):
    table = _as_table(f)
    if antitone is not None:
        return tuple(antitone)
    if isinstance(f, LatticeMap):
        if not is_isotone(f):
            raise NotIsotone("map is not isotone")
        return ()
    return antitone_coords(cL.source, table)


def _finish(f, cL, cM, out):
    if isinstance(f, LatticeMap):
        return LatticeMap(cL.target, cM.target, out.tolist())
    return out


def _theta_images(cL, cM, table):
    """theta_M(f(a)) for every argument tuple a."""
    th = np.asarray(cM.embed.table)
    return th[table]


def lower_can_ext(f, cL, cM, antitone=None):
    """f-nabla: join over closed p <= x of the meet of theta_M(f a) over a with p <= theta_L(a).

    ``f`` is a :class:`LatticeMap` or an n-ary table on ``cL.source``.  In an
    antitone coordinate the order is reversed, so p ranges over open elements
    above x and a over elements with theta_L(a) <= p.
    """
    anti = _tonicity(cL, f, antitone)
    return _finish(f, cL, cM, _can_ext(_as_table(f), cL, cM, anti, lower=True))


def upper_can_ext(f, cL, cM, antitone=None):
    """f-delta: meet over open q >= x of the join of theta_M(f a) over a with theta_L(a) <= q."""
    anti = _tonicity(cL, f, antitone)
    return _finish(f, cL, cM, _can_ext(_as_table(f), cL, cM, anti, lower=False))


def _can_ext(table, cL, cM, anti, lower):
    T, M = cL.target, cM.target
    n = table.ndim
    th_L = np.asarray(cL.embed.table)
    images = _theta_images(cL, cM, table)
    src = range(cL.source.size)
    # lower: coordinate i ranges over closed p (open if antitone); upper: the reverse
    ranges = []
    for i in range(n):
        flip = i in anti
        use_closed = lower != flip
        ranges.append(sorted(cL.closed if use_closed else cL.open))
    inner = {}
    for ps in iproduct(*ranges):
        args = []
        for i, p in enumerate(ps):
            # "p <= theta(a)" in the coordinate's own order
            up = lower != (i in anti)
            args.append([a for a in src if (T.leq[p, th_L[a]] if up else T.leq[th_L[a], p])])
        vals = [images[a] for a in iproduct(*args)]
        inner[ps] = big_meet(M, vals) if lower else big_join(M, vals)
    out = np.empty((T.size,) * n, dtype=np.int32)
    for xs in iproduct(range(T.size), repeat=n):
        sel = []
        for ps, v in inner.items():
            ok = True
            for i, (x, p) in enumerate(zip(xs, ps)):
                below = lower != (i in anti)  # p <= x in the coordinate's order
                if not (T.leq[p, x] if below else T.leq[x, p]):
                    ok = False
                    break
            if ok:
                sel.append(v)
        out[xs] = big_join(M, sel) if lower else big_meet(M, sel)
    return out


def lower_macneille_ext(f, mL, mM, antitone=None):
    """f-bar(x) = join of theta_M(f(a)) over a with theta_L(a) <= x (coordinatewise)."""
    anti = _tonicity(mL, f, antitone)
    return _finish(f, mL, mM, _mac_ext(_as_table(f), mL, mM, anti, lower=True))


def upper_macneille_ext(f, mL, mM, antitone=None):
    """f-hat(x) = meet of theta_M(f(a)) over a with x <= theta_L(a) (coordinatewise)."""
    anti = _tonicity(mL, f, antitone)
    return _finish(f, mL, mM, _mac_ext(_as_table(f), mL, mM, anti, lower=False))


def _mac_ext(table, mL, mM, anti, lower):
    T, M = mL.target, mM.target
    n = table.ndim
    th_L = np.asarray(mL.embed.table)
    images = _theta_images(mL, mM, table)
    src = range(mL.source.size)
    out = np.empty((T.size,) * n, dtype=np.int32)
    for xs in iproduct(range(T.size), repeat=n):
        args = []
        for i, x in enumerate(xs):
            below = lower != (i in anti)  # theta(a) <= x in the coordinate's order
            args.append([a for a in src if (T.leq[th_L[a], x] if below else T.leq[x, th_L[a]])])
        vals = [images[a] for a in iproduct(*args)]
        out[xs] = big_join(M, vals) if lower else big_meet(M, vals)
    return out


# -- Omega expansions ------------------------------------------------------------


def _expand(A, c, lower_fn, upper_fn):
    tables = {}
    for name, sym in A.symbols.items():
        table = A.ops[name]
        anti = antitone_coords(A.base, table)
        fn = lower_fn if sym.side == "lower" else upper_fn
        tables[name] = fn(table, c, c, antitone=anti)
    out = OmegaLattice(c.target, list(A.symbols.values()), tables)
    out.completion = c
    return out


def sigma_expansion(A, cap=DEFAULT_FILTER_CAP, proper_only=False, completion=None):
    """A^sigma: lower symbols lifted by the lower canonical extension, upper ones by the upper."""
    c = completion or canonical_extension(A.base, cap, proper_only)
    return _expand(A, c, lower_can_ext, upper_can_ext)


def macneille_expansion(A, completion=None):
    """The MacNeille completion of A with lower/upper MacNeille extensions of its operations."""
    c = completion or macneille(A.base)
    return _expand(A, c, lower_macneille_ext, upper_macneille_ext)
