"""Polarities, their Galois connection, and stable set lattices.

Subsets of X and Y are Python ints used as bitmasks (bit ``i`` set means
element ``i`` is a member).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InputError, PreconditionViolated, SizeCapExceeded
from .order import FinLattice, FinPoset

DEFAULT_Y_CAP = 14

# sort conventions for the extra relation of each structure class
CLASS_SORTS = {"lambek": {"T": ("X", "X", "Y")}, "modal": {"T": ("X", "Y")}}


def mask_of(elements):
    m = 0
    for e in elements:
        m |= 1 << int(e)
    return m


def members(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def is_subset(a, b):
    return a & ~b == 0


@dataclass(frozen=True)
class Relation:
    """A finitary relation on X + Y; ``sorts[k]`` is the sort of position k."""

    sorts: tuple
    tuples: frozenset = field(default_factory=frozenset)

    @property
    def arity(self):
        return len(self.sorts)

    def __contains__(self, t):
        return tuple(t) in self.tuples


class Polarity:
    """A polarity (X, Y, R), optionally expanded with named extra relations.

    ``R`` is an ``x_size`` by ``y_size`` boolean matrix.  ``relations`` maps a
    symbol to a :class:`Relation` whose tuples use sort-local indices.
    """

    def __init__(self, x_size, y_size, R, relations=None, kind=None):
        R = np.array(R, dtype=bool).reshape(x_size, y_size)
        R.setflags(write=False)
        self.x_size = int(x_size)
        self.y_size = int(y_size)
        self.R = R
        self.relations = dict(relations or {})
        self.kind = kind
        for name, rel in self.relations.items():
            if name in ("X", "Y", "R"):
                raise InputError(f"relation name {name!r} is reserved")
            for t in rel.tuples:
                if len(t) != rel.arity:
                    raise InputError(f"tuple {t} of {name} has wrong arity")
                for s, v in zip(rel.sorts, t):
                    bound = self.x_size if s == "X" else self.y_size
                    if not 0 <= v < bound:
                        raise InputError(f"tuple {t} of {name}: {v} is not in sort {s}")
        self.rows = [mask_of(np.flatnonzero(R[x])) for x in range(self.x_size)]
        self.cols = [mask_of(np.flatnonzero(R[:, y])) for y in range(self.y_size)]
        self.full_x = (1 << self.x_size) - 1
        self.full_y = (1 << self.y_size) - 1

    def __repr__(self):
        rel = ", ".join(sorted(self.relations))
        return f"Polarity(X={self.x_size}, Y={self.y_size}{', ' + rel if rel else ''})"

    def with_relations(self, relations, kind=None):
        return Polarity(self.x_size, self.y_size, self.R, relations, kind or self.kind)

    @property
    def signature(self):
        return {name: rel.sorts for name, rel in sorted(self.relations.items())}


PolarityStructure = Polarity


def rho(P, A):
    """Y-elements related to every member of A."""
    return kernels.rho(P.rows, A, P.y_size)


def lam(P, B):
    """X-elements related to every member of B."""
    return kernels.lam(P.cols, B, P.x_size)


def closure(P, A):
    return lam(P, rho(P, A))


def is_stable(P, A):
    return is_subset(closure(P, A), A)


def is_stable_y(P, B):
    return rho(P, lam(P, B)) == B


class StableSetLattice:
    """All stable subsets of X, sorted by mask value, with the inclusion lattice."""

    def __init__(self, base, stables, lattice):
        self.base = base
        self.stables = list(stables)
        self.lattice = lattice
        self.index = {s: i for i, s in enumerate(self.stables)}

    def __len__(self):
        return len(self.stables)

    def __iter__(self):
        return iter(self.stables)

    def __contains__(self, mask):
        return mask in self.index

    @property
    def bottom(self):
        return self.stables[self.lattice.bot]

    @property
    def top(self):
        return self.stables[self.lattice.top]

    def big_meet(self, family):
        acc = self.base.full_x
        for s in family:
            acc &= s
        return acc

    def big_join(self, family):
        union = 0
        for s in family:
            union |= s
        return closure(self.base, union)


def stable_set_lattice(P, cap=DEFAULT_Y_CAP, method="powerset", verify=True, max_stables=100_000):
    """Build P+ from the sets lam(B).

    ``method="powerset"`` evaluates lam(B) for every B subset of Y (so ``cap``
    bounds |Y|); ``method="closure"`` generates the same family as the
    intersection closure of the sets lam({y}) and X, which costs time
    proportional to the output; it is bounded by ``max_stables`` instead.
    """
    if method == "powerset":
        if P.y_size > cap:
            raise SizeCapExceeded(f"|Y| = {P.y_size} exceeds cap {cap}")
        stables = sorted(set(kernels.lambda_all(P.cols, P.x_size)))
    elif method == "closure":
        stables = kernels.closure_stables(P.cols, P.x_size)
        if len(stables) > max_stables:
            raise SizeCapExceeded(f"{len(stables)} stable sets exceed {max_stables}")
    else:
        raise ValueError(f"unknown method {method!r}")
    leq, meet, join = kernels.stable_tables(stables, P.rows, P.cols, P.x_size, P.y_size)
    meet, join = np.asarray(meet), np.asarray(join)
    if (meet < 0).any() or (join < 0).any():
        raise AssertionError("stable family not closed under intersection / closed union")
    lattice = FinLattice(FinPoset(leq), meet, join, 0, len(stables) - 1)
    out = StableSetLattice(P, stables, lattice)
    if verify:
        _verify_stable_lattice(out)
    return out


def _verify_stable_lattice(SL):
    P, st, L = SL.base, SL.stables, SL.lattice
    assert st[L.top] == P.full_x, "top must be X"
    assert st[L.bot] == lam(P, P.full_y), "bottom must be lam(Y)"
    n = len(st)
    if n <= 64:
        L.check_tables()
    for i in range(min(n, 64)):
        for j in range(min(n, 64)):
            assert st[L.meet[i, j]] == st[i] & st[j]
            assert st[L.join[i, j]] == closure(P, st[i] | st[j])


def is_irreflexive(P):
    return P.x_size == P.y_size and not P.R.diagonal().any()


def is_symmetric(P):
    return P.x_size == P.y_size and bool((P.R == P.R.T).all())


def is_transitive(P):
    if P.x_size != P.y_size:
        return False
    m = P.R.astype(np.int64)
    return bool((~((m @ m) > 0) | P.R).all())


def orthocomplement_check(P, cap=DEFAULT_Y_CAP, witness=False):
    """Does A -> rho(A) orthocomplement P+?

    Requires X = Y and R irreflexive, plus R symmetric or transitive (see
    README for why both readings are accepted).  Checks, on every stable
    set, that rho(A) is stable, A'' = A, A meet A' = 0, and
    A <= B iff B' <= A'.  With ``witness=True`` returns ``(ok, witness)``.
    """
    if P.x_size != P.y_size:
        raise PreconditionViolated("orthocomplementation needs X = Y")
    if not is_irreflexive(P) or not (is_symmetric(P) or is_transitive(P)):
        raise PreconditionViolated("R must be irreflexive and symmetric or transitive")
    SL = stable_set_lattice(P, cap=cap)
    bot = SL.bottom
    result = (True, None)
    for A in SL.stables:
        Ap = rho(P, A)
        if Ap not in SL:
            result = (False, {"law": "complement is stable", "A": members(A), "rhoA": members(Ap)})
            break
        if rho(P, Ap) != A:
            result = (False, {"law": "A'' = A", "A": members(A)})
            break
        if A & Ap != bot:
            result = (False, {"law": "A meet A' = 0", "A": members(A)})
            break
    if result[0]:
        for A in SL.stables:
            for B in SL.stables:
                if is_subset(A, B) != is_subset(rho(P, B), rho(P, A)):
                    result = (False, {"law": "antitone", "A": members(A), "B": members(B)})
                    break
            if not result[0]:
                break
    return result if witness else result[0]


# -- standard polarities ----------------------------------------------------

def non_identity_polarity(n):
    return Polarity(n, n, ~np.eye(n, dtype=bool))


def polarity_from_pairs(nx, ny, pairs, relations=None, kind=None):
    R = np.zeros((nx, ny), dtype=bool)
    for x, y in pairs:
        if not (0 <= x < nx and 0 <= y < ny):
            raise InputError(f"R pair ({x}, {y}) out of range")
        R[x, y] = True
    return Polarity(nx, ny, R, relations, kind)


# -- JSON -----------------------------------------------------------------------

def polarity_to_json(P):
    out = {"X": P.x_size, "Y": P.y_size, "R": [list(map(int, p)) for p in np.argwhere(P.R)]}
    if P.kind:
        out["class"] = P.kind
    if P.relations:
        out["relations"] = {
            name: {"arity": rel.arity, "sorts": list(rel.sorts), "tuples": [list(t) for t in sorted(rel.tuples)]}
            for name, rel in sorted(P.relations.items())
        }
    return out


def polarity_from_json(data):
    """Load a polarity (structure) from JSON text or a decoded dict.

    Tuple positions are sort-checked against ``sorts`` if given, else against
    the convention of the ``class`` hint (``lambek``: T on X*X*Y, ``modal``: T on X*Y).
    """
    if isinstance(data, str):
        data = json.loads(data)
    try:
        nx, ny = int(data["X"]), int(data["Y"])
        pairs = [(int(x), int(y)) for x, y in data.get("R", [])]
        kind = data.get("class")
        conv = CLASS_SORTS.get(kind, {})
        relations = {}
        for name, spec in (data.get("relations") or {}).items():
            arity = int(spec["arity"])
            sorts = spec.get("sorts") or conv.get(name)
            if sorts is None:
                raise InputError(f"relation {name}: no 'sorts' given and no class convention")
            sorts = tuple(sorts)
            if len(sorts) != arity or any(s not in ("X", "Y") for s in sorts):
                raise InputError(f"relation {name}: sorts {sorts} do not match arity {arity}")
            if name in conv and conv[name] != sorts:
                raise InputError(f"relation {name}: class {kind} requires sorts {conv[name]}")
            tuples = frozenset(tuple(int(v) for v in t) for t in spec.get("tuples", []))
            relations[name] = Relation(sorts, tuples)
        if kind in CLASS_SORTS:
            for name in CLASS_SORTS[kind]:
                relations.setdefault(name, Relation(CLASS_SORTS[kind][name], frozenset()))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed polarity JSON: {exc}") from exc
    return polarity_from_pairs(nx, ny, pairs, relations, kind)
