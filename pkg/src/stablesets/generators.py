"""Seeded random instances: lattices, isotone maps and operations, polarities, formulas."""

from __future__ import annotations

import random
from itertools import product as iproduct

import numpy as np

from .formula import And, Eq, Exists, Forall, Implies, Not, Or, Rel, SetPred, SortX, SortY
from .order import FinPoset, LatticeMap, build_lattice
from .polarity import Polarity


def closure_lattice(family, ground):
    """The intersection closure of ``family`` plus the full ground set, ordered by inclusion."""
    full = (1 << ground) - 1
    sets = {full}
    frontier = [full]
    fam = set(family)
    while frontier:
        nxt = []
        for s in frontier:
            for t in fam:
                u = s & t
                if u not in sets:
                    sets.add(u)
                    nxt.append(u)
        frontier = nxt
    sets = sorted(sets)
    n = len(sets)
    leq = np.array([[(a & ~b) == 0 for b in sets] for a in sets], dtype=bool).reshape(n, n)
    return build_lattice(FinPoset(leq))


def random_lattice(rng, max_size=6, min_size=1, ground=4):
    """A random finite lattice with between min_size and max_size elements."""
    while True:
        k = rng.randint(0, 2 * ground)
        family = [rng.getrandbits(ground) for _ in range(k)]
        L = closure_lattice(family, ground)
        if min_size <= L.size <= max_size:
            return L


def random_lattices(count, seed=0, max_size=6, min_size=1):
    rng = random.Random(seed)
    return [random_lattice(rng, max_size, min_size) for _ in range(count)]


def _topological(L):
    return sorted(L.elements, key=lambda e: (int(L.leq[:, e].sum()), e))


def random_isotone_map(rng, L, M):
    """Assign elements bottom-up, each image chosen among values above the images of everything below."""
    f = [-1] * L.size
    for e in _topological(L):
        below = [f[b] for b in L.elements if b != e and L.leq[b, e]]
        options = [v for v in M.elements if all(M.leq[w, v] for w in below)]
        f[e] = rng.choice(options)
    return LatticeMap(L, M, f)


def random_isotone_op(rng, L, arity):
    """A random operation on L isotone in every coordinate."""
    n = L.size
    shape = (n,) * arity
    t = np.full(shape, -1, dtype=np.int32)
    order = sorted(iproduct(range(n), repeat=arity),
                   key=lambda a: (sum(int(L.leq[:, x].sum()) for x in a), a))
    for args in order:
        below = [t[b] for b in iproduct(*(np.flatnonzero(L.leq[:, x]) for x in args)) if b != args]
        options = [v for v in L.elements if all(L.leq[w, v] for w in below)]
        t[args] = rng.choice(options)
    return t


def random_polarity(rng, nx, ny, density=0.5):
    R = np.array([[rng.random() < density for _ in range(ny)] for _ in range(nx)], dtype=bool)
    return Polarity(nx, ny, R.reshape(nx, ny))


def all_polarities(nx, ny):
    """Every relation R on nx * ny, in bit order."""
    cells = nx * ny
    for bits in range(1 << cells):
        R = np.array([(bits >> k) & 1 for k in range(cells)], dtype=bool).reshape(nx, ny)
        yield Polarity(nx, ny, R)


def random_formula(rng, depth, free=(0,), relations=(("R", 2),), sets=0, max_var=6):
    """A random formula whose free variables lie within ``free``."""
    scope = list(free)

    def atom():
        choice = rng.randrange(4 + (1 if sets else 0))
        if not scope:
            return _closed_atom()
        if choice == 0:
            return SortX(rng.choice(scope))
        if choice == 1:
            return SortY(rng.choice(scope))
        if choice == 2:
            return Eq(rng.choice(scope), rng.choice(scope))
        if choice == 3:
            name, arity = rng.choice(relations)
            return Rel(name, tuple(rng.choice(scope) for _ in range(arity)))
        return SetPred(rng.randrange(sets), rng.choice(scope))

    def _closed_atom():
        v = rng.randrange(max_var)
        return Forall(v, Or(SortX(v), SortY(v)))

    def go(d):
        if d == 0:
            return atom()
        k = rng.randrange(6)
        if k == 0:
            return Not(go(d - 1))
        if k in (1, 2, 3):
            cls = (And, Or, Implies)[k - 1]
            return cls(go(d - 1), go(d - 1))
        v = rng.randrange(max_var)
        scope.append(v)
        body = go(d - 1)
        scope.pop()
        return (Forall if k == 4 else Exists)(v, body)

    return go(depth)
