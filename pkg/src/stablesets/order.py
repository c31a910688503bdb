"""Finite posets, bounded lattices and maps between them.

Elements are the integers ``0..n-1``.  The order lives in a dense boolean
matrix and meet/join in dense ``int32`` tables; everything is validated
when it is built, so downstream code can trust the invariants.
"""

from __future__ import annotations

import json
from itertools import product as iproduct

import numpy as np

from . import kernels
from .errors import InputError, NotALattice, NotAPartialOrder, SizeCapExceeded

DEFAULT_MONO_CAP = 12


class FinPoset:
    """A finite partial order given by its ``leq`` matrix (checked on construction)."""

    def __init__(self, leq):
        leq = np.array(leq, dtype=bool)
        if leq.ndim != 2 or leq.shape[0] != leq.shape[1]:
            raise NotAPartialOrder("order matrix must be square")
        self.leq = leq
        self.leq.setflags(write=False)
        self.size = leq.shape[0]
        self._check()

    def _check(self):
        n, leq = self.size, self.leq
        if not leq.diagonal().all():
            a = int(np.flatnonzero(~leq.diagonal())[0])
            raise NotAPartialOrder("order is not reflexive", witness=[a])
        both = leq & leq.T & ~np.eye(n, dtype=bool)
        if both.any():
            a, b = map(int, np.argwhere(both)[0])
            raise NotAPartialOrder("order is not antisymmetric", witness=[a, b])
        if n:
            m = leq.astype(np.int64)
            trans = (m @ m) > 0
            bad = trans & ~leq
            if bad.any():
                a, c = map(int, np.argwhere(bad)[0])
                b = int(np.flatnonzero(leq[a] & leq[:, c])[0])
                raise NotAPartialOrder("order is not transitive", witness=[a, b, c])

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"FinPoset(size={self.size})"


def poset_from_pairs(n, pairs):
    """Build a poset on ``n`` elements from ``a <= b`` pairs; reflexivity is added, transitivity is checked."""
    leq = np.eye(n, dtype=bool)
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise InputError(f"pair ({a}, {b}) out of range for {n} elements")
        leq[a, b] = True
    return FinPoset(leq)


class FinLattice:
    """A finite bounded lattice.

    Attributes: ``size``, ``leq`` (bool matrix), ``meet``/``join`` (int tables),
    ``bot``, ``top``.  Use :func:`build_lattice` rather than calling this
    directly unless the tables are already known to be correct.
    """

    def __init__(self, poset, meet, join, bot, top):
        self.poset = poset
        self.leq = poset.leq
        self.size = poset.size
        self.meet = np.asarray(meet, dtype=np.int32)
        self.join = np.asarray(join, dtype=np.int32)
        self.meet.setflags(write=False)
        self.join.setflags(write=False)
        self.bot = int(bot)
        self.top = int(top)
        self._height = None

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"FinLattice(size={self.size}, bot={self.bot}, top={self.top})"

    @property
    def elements(self):
        return range(self.size)

    def le(self, a, b):
        return bool(self.leq[a, b])

    @property
    def height(self):
        """Length of the longest chain from ``bot`` to each element."""
        if self._height is None:
            h = [0] * self.size
            for a in sorted(self.elements, key=lambda e: int(self.leq[:, e].sum())):
                below = [b for b in np.flatnonzero(self.leq[:, a]) if b != a]
                h[a] = 1 + max((h[b] for b in below), default=-1)
            self._height = h
        return self._height

    def check_tables(self):
        """Exhaustively verify meet/join are glb/lub.  Raises NotALattice."""
        leq = self.leq
        for a in self.elements:
            for b in self.elements:
                m, j = self.meet[a, b], self.join[a, b]
                lower = leq[:, a] & leq[:, b]
                upper = leq[a] & leq[b]
                if not (lower[m] and leq[lower, m].all()):
                    raise NotALattice("meet table is not the glb", witness=[a, b])
                if not (upper[j] and leq[j, upper].all()):
                    raise NotALattice("join table is not the lub", witness=[a, b])
        if not (leq[self.bot].all() and leq[:, self.top].all()):
            raise NotALattice("bounds are wrong")


def build_lattice(poset):
    """Compute meet/join tables and bounds, or raise :class:`NotALattice`."""
    if isinstance(poset, FinLattice):
        return poset
    n = poset.size
    if n == 0:
        raise NotALattice("the empty poset has no bounds")
    meet, join = kernels.tables_from_leq(poset.leq)
    meet = np.asarray(meet)
    join = np.asarray(join)
    if (meet < 0).any():
        a, b = map(int, np.argwhere(meet < 0)[0])
        raise NotALattice(f"elements {a} and {b} have no greatest lower bound", witness=[a, b])
    if (join < 0).any():
        a, b = map(int, np.argwhere(join < 0)[0])
        raise NotALattice(f"elements {a} and {b} have no least upper bound", witness=[a, b])
    bots = np.flatnonzero(poset.leq.all(axis=1))
    tops = np.flatnonzero(poset.leq.all(axis=0))
    if not len(bots) or not len(tops):
        raise NotALattice("missing bottom or top")
    return FinLattice(poset, meet, join, bots[0], tops[0])


def lattice_from_leq(leq):
    return build_lattice(FinPoset(leq))


def lattice_from_pairs(n, pairs):
    return build_lattice(poset_from_pairs(n, pairs))


def big_meet(L, S):
    acc = L.top
    for s in S:
        acc = L.meet[acc, s]
    return int(acc)


def big_join(L, S):
    acc = L.bot
    for s in S:
        acc = L.join[acc, s]
    return int(acc)


def dual(L):
    """Order dual: swaps meet/join and bounds."""
    return FinLattice(FinPoset(L.leq.T), L.join, L.meet, L.top, L.bot)


# -- standard small lattices ------------------------------------------------

def chain(n):
    return lattice_from_leq(np.triu(np.ones((n, n), dtype=bool)))


def diamond():
    """M2: 0 < a, b < 1 with a, b incomparable (indices 0, 1, 2, 3 = 0, a, b, 1)."""
    return lattice_from_pairs(4, [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)])


def boolean_lattice(k):
    n = 1 << k
    leq = np.array([[(a & ~b) == 0 for b in range(n)] for a in range(n)])
    return lattice_from_leq(leq)


def product_lattice(lattices):
    """Direct product; element index is the row-major ravel of the coordinate tuple."""
    shape = tuple(L.size for L in lattices)
    N = int(np.prod(shape)) if shape else 1
    coords = np.array(np.unravel_index(np.arange(N), shape)).T if shape else np.zeros((1, 0), int)
    leq = np.ones((N, N), dtype=bool)
    meet_parts, join_parts = [], []
    for k, L in enumerate(lattices):
        ck = coords[:, k]
        leq &= L.leq[ck[:, None], ck[None, :]]
        meet_parts.append(L.meet[ck[:, None], ck[None, :]])
        join_parts.append(L.join[ck[:, None], ck[None, :]])
    if shape:
        meet = np.ravel_multi_index(tuple(meet_parts), shape)
        join = np.ravel_multi_index(tuple(join_parts), shape)
        bot = int(np.ravel_multi_index(tuple(L.bot for L in lattices), shape))
        top = int(np.ravel_multi_index(tuple(L.top for L in lattices), shape))
    else:
        meet = join = np.zeros((1, 1), dtype=np.int32)
        bot = top = 0
    return FinLattice(FinPoset(leq), meet, join, bot, top)


def product_coords(lattices):
    """Coordinate tuples of the product's elements, in index order."""
    shape = tuple(L.size for L in lattices)
    return [tuple(int(v) for v in c) for c in iproduct(*(range(s) for s in shape))]


# -- maps ----------------------------------------------------------------------

class LatticeMap:
    """An element-indexed map ``source -> target``."""

    def __init__(self, source, target, table):
        table = tuple(int(v) for v in table)
        if len(table) != source.size or any(not 0 <= v < target.size for v in table):
            raise InputError("map table must be total with values in the target")
        self.source = source
        self.target = target
        self.table = table

    def __call__(self, a):
        return self.table[a]

    def __repr__(self):
        return f"LatticeMap({list(self.table)})"

    def compose(self, other):
        """``self`` after ``other``."""
        return LatticeMap(other.source, self.target, [self.table[b] for b in other.table])


def identity_map(L):
    return LatticeMap(L, L, range(L.size))


def is_homomorphism(f):
    """Preserves binary meets, binary joins, 0 and 1."""
    L, M, t = f.source, f.target, np.asarray(f.table)
    if t[L.bot] != M.bot or t[L.top] != M.top:
        return False
    if not (t[L.meet] == M.meet[t[:, None], t[None, :]]).all():
        return False
    return bool((t[L.join] == M.join[t[:, None], t[None, :]]).all())


def is_injective(f):
    return len(set(f.table)) == len(f.table)


def is_surjective(f):
    return set(f.table) == set(range(f.target.size))


def is_isotone(f):
    t = np.asarray(f.table)
    return bool((~f.source.leq | f.target.leq[t[:, None], t[None, :]]).all())


def is_order_embedding(f):
    """a <= b iff f(a) <= f(b), for all a, b."""
    t = np.asarray(f.table)
    return bool((f.source.leq == f.target.leq[t[:, None], t[None, :]]).all())


def preserves_ops(f, ops_source, ops_target):
    """Check f(op(a..)) = op(f(a)..) for every named op table (dicts name -> ndarray)."""
    return op_violation(f, ops_source, ops_target) is None


def op_violation(f, ops_source, ops_target):
    t = f.table
    for name, table in ops_source.items():
        other = ops_target[name]
        arity = table.ndim
        for args in iproduct(range(f.source.size), repeat=arity):
            lhs = t[int(table[args])]
            rhs = int(other[tuple(t[a] for a in args)])
            if lhs != rhs:
                return {"op": name, "args": list(args), "image": lhs, "expected": rhs}
    return None


def find_homomorphism(L, M, ops=None, injective=False, surjective=False, cap=DEFAULT_MONO_CAP, fixed=None):
    """Backtracking search for a bounded-lattice (and Omega-) homomorphism L -> M.

    ``ops`` is an optional pair ``(ops_L, ops_M)`` of dicts mapping a symbol
    to its operation table.  Elements of L are assigned in order of height;
    each meet/join/op constraint is checked as soon as all of its elements
    are assigned, and a constraint whose result is assigned last forces the
    value.  ``fixed`` pins chosen elements to given images.  Returns a
    :class:`LatticeMap` or ``None``.
    """
    return next(iter_homomorphisms(L, M, ops, injective, surjective, cap, fixed), None)


def iter_homomorphisms(L, M, ops=None, injective=False, surjective=False, cap=DEFAULT_MONO_CAP, fixed=None):
    """Generate every homomorphism :func:`find_homomorphism` could return."""
    if L.size > cap:
        raise SizeCapExceeded(f"source has {L.size} elements, cap is {cap}")
    return _iter_homomorphisms(L, M, ops, injective, surjective, fixed)


def _iter_homomorphisms(L, M, ops, injective, surjective, fixed):
    ops_L, ops_M = ops if ops is not None else ({}, {})
    if set(ops_L) != set(ops_M):
        raise InputError("operation symbols differ between source and target")
    if injective and L.size > M.size:
        return
    if surjective and L.size < M.size:
        return

    h = L.height
    order = sorted(L.elements, key=lambda e: (h[e], e))
    pos = {e: i for i, e in enumerate(order)}

    # constraint: (target_table, args, result); the target value must equal target_table[f(args)]
    constraints = [[] for _ in order]
    forcing = [[] for _ in order]
    for a in L.elements:
        for b in L.elements:
            if b < a:
                continue
            for tab_L, tab_M in ((L.meet, M.meet), (L.join, M.join)):
                c = int(tab_L[a, b])
                args = (a, b)
                last = max(pos[a], pos[b], pos[c])
                constraints[order[last]].append((tab_M, args, c))
                if pos[c] > max(pos[a], pos[b]):
                    forcing[c].append((tab_M, args))
    for name, tab in ops_L.items():
        tab_M = ops_M[name]
        for args in iproduct(L.elements, repeat=tab.ndim):
            c = int(tab[args])
            last = max([pos[c]] + [pos[a] for a in args])
            constraints[order[last]].append((tab_M, args, c))
            if all(pos[c] > pos[a] for a in args):
                forcing[c].append((tab_M, args))

    f = [-1] * L.size
    used = set()
    pinned = {int(k): int(v) for k, v in (fixed or {}).items()}
    pinned.setdefault(L.bot, M.bot)
    pinned.setdefault(L.top, M.top)

    def candidates(e):
        if e in pinned:
            return [pinned[e]]
        for tab_M, args in forcing[e]:
            return [int(tab_M[tuple(f[a] for a in args)])]
        return range(M.size)

    def consistent(e):
        v = f[e]
        for tab_M, args, c in constraints[e]:
            if int(tab_M[tuple(f[a] for a in args)]) != f[c]:
                return False
        # isotone always; order-reflecting too when injective
        for b in order[: pos[e]]:
            if L.leq[b, e] and not M.leq[f[b], v]:
                return False
            if L.leq[e, b] and not M.leq[v, f[b]]:
                return False
            if injective and M.leq[f[b], v] and not L.leq[b, e]:
                return False
            if injective and M.leq[v, f[b]] and not L.leq[e, b]:
                return False
        return True

    def search(i):
        if i == len(order):
            if not surjective or len(set(f)) == M.size:
                yield LatticeMap(L, M, f)
            return
        e = order[i]
        for v in candidates(e):
            if injective and v in used:
                continue
            f[e] = v
            if consistent(e):
                used.add(v)
                yield from search(i + 1)
                used.discard(v)
            f[e] = -1

    if pinned.get(L.bot) != M.bot or pinned.get(L.top) != M.top:
        return
    yield from search(0)


def find_monomorphism(L, M, extra_ops=None, cap=DEFAULT_MONO_CAP):
    """Injective (Omega-)homomorphism L -> M, or None."""
    return find_homomorphism(L, M, ops=extra_ops, injective=True, cap=cap)


def find_isomorphism(L, M, extra_ops=None, cap=DEFAULT_MONO_CAP):
    if L.size != M.size:
        return None
    return find_homomorphism(L, M, ops=extra_ops, injective=True, cap=cap)


# -- I/O -----------------------------------------------------------------------

def covers(L):
    """Cover pairs (a, b): a < b with nothing strictly between."""
    lt = L.leq & ~np.eye(L.size, dtype=bool)
    out = []
    for a, b in np.argwhere(lt):
        between = lt[a] & lt[:, b]
        if not between.any():
            out.append((int(a), int(b)))
    return out


def to_dot(L, labels=None, name="lattice", annotate=None):
    """Graphviz source for the Hasse diagram (edges point upward).

    ``annotate`` maps an element to extra node attributes, e.g. ``{"shape": "box"}``.
    """
    labels = labels or {}
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=circle];"]
    for a in L.elements:
        attrs = {"label": str(labels.get(a, a))}
        if annotate and a in annotate:
            attrs.update(annotate[a])
        body = ", ".join(f'{k}="{v}"' for k, v in sorted(attrs.items()))
        lines.append(f"  n{a} [{body}];")
    for a, b in covers(L):
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def lattice_to_json(L):
    return {"elements": L.size, "leq": [list(map(int, p)) for p in np.argwhere(L.leq)]}


def lattice_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    try:
        n = int(data["elements"])
        pairs = [(int(a), int(b)) for a, b in data.get("leq", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed lattice JSON: {exc}") from exc
    return build_lattice(poset_from_pairs(n, pairs))
