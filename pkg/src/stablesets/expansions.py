"""Omega-lattices and the operator taxonomy.

An n-ary operation on a lattice of size m is a dense ``int`` array of shape
``(m,) * n``.  All predicates here work on such tables.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import combinations, product as iproduct
from typing import NamedTuple

import numpy as np

from .errors import InputError, NotMonotone
from .order import big_join, dual, is_homomorphism, lattice_from_json, lattice_to_json, op_violation, product_lattice
from .polarity import members, stable_set_lattice
from .semantics import definable_op, require_sigma_phi

MAX_ARITY = 3
EXHAUSTIVE_LIMIT = 8
DEFAULT_SAMPLES = 300


@dataclass(frozen=True)
class OperatorSymbol:
    name: str
    arity: int
    side: str = "lower"  # "lower" (Lambda) or "upper" (Upsilon)

    def __post_init__(self):
        if self.side not in ("lower", "upper"):
            raise InputError(f"side of {self.name} must be 'lower' or 'upper'")
        if not 0 <= self.arity <= MAX_ARITY:
            raise InputError(f"arity of {self.name} must be between 0 and {MAX_ARITY}")


class OmegaLattice:
    """A bounded lattice with interpreted operation symbols."""

    def __init__(self, base, symbols=(), tables=None):
        self.base = base
        self.symbols = {s.name: s for s in symbols}
        self.ops = {}
        for name, table in (tables or {}).items():
            sym = self.symbols[name]
            t = np.asarray(table, dtype=np.int32).reshape((base.size,) * sym.arity)
            if t.size and (t.min() < 0 or t.max() >= base.size):
                raise InputError(f"table of {name} has values outside the lattice")
            t.setflags(write=False)
            self.ops[name] = t
        if set(self.ops) != set(self.symbols):
            raise InputError("every symbol needs exactly one table")

    def __repr__(self):
        return f"OmegaLattice(size={self.base.size}, ops={sorted(self.ops)})"

    @property
    def size(self):
        return self.base.size

    @property
    def lower_symbols(self):
        return [n for n, s in sorted(self.symbols.items()) if s.side == "lower"]

    @property
    def upper_symbols(self):
        return [n for n, s in sorted(self.symbols.items()) if s.side == "upper"]

    def tables(self):
        return dict(self.ops)


def plain(L):
    return OmegaLattice(L)


# -- operator predicates -------------------------------------------------------


class OperatorCheck(NamedTuple):
    ok: bool
    mode: str  # "exhaustive" or "sampled"
    checked: int
    witness: dict | None


def _coordinate_views(L, arity, coord_duals, dual_op):
    """Per-coordinate domain lattices and the codomain, arranged so the check is always 'preserves joins'."""
    Ld = dual(L)
    doms = []
    for i in range(arity):
        flipped = (i in coord_duals) != dual_op
        doms.append(Ld if flipped else L)
    return doms, (Ld if dual_op else L)


def _fixings(n, arity, i):
    """All argument tuples with coordinate i left as a placeholder (None)."""
    for rest in iproduct(range(n), repeat=arity - 1):
        yield rest[:i] + (None,) + rest[i:]


def _put(fix, i, a):
    return fix[:i] + (a,) + fix[i + 1:]


def check_operator(L, table, normal=False, complete=False, coord_duals=(), dual_op=False,
                   exhaustive_limit=EXHAUSTIVE_LIMIT, samples=DEFAULT_SAMPLES, seed=0):
    """Join preservation in each coordinate, with the other arguments fixed.

    ``dual_op`` checks meet preservation instead; ``coord_duals`` lists
    coordinates whose domain is the order dual (so an antitone coordinate
    that turns joins into meets counts as preserving).  ``complete`` checks
    every non-empty subset when ``|L| <= exhaustive_limit`` and ``samples``
    random subsets per fixing otherwise.
    """
    table = np.asarray(table)
    arity = table.ndim
    n = L.size
    doms, cod = _coordinate_views(L, arity, set(coord_duals), dual_op)
    rng = random.Random(seed)
    exhaustive = n <= exhaustive_limit
    checked = 0
    for i in range(arity):
        D = doms[i]
        for fix in _fixings(n, arity, i):
            if normal:
                checked += 1
                if table[_put(fix, i, D.bot)] != cod.bot:
                    return OperatorCheck(False, "exhaustive", checked,
                                         {"coordinate": i, "args": list(_put(fix, i, D.bot)), "law": "normal"})
            if complete:
                subsets = (
                    (S for k in range(1, n + 1) for S in combinations(range(n), k))
                    if exhaustive
                    else (tuple(rng.sample(range(n), rng.randint(1, n))) for _ in range(samples))
                )
            else:
                subsets = ((a, b) for a in range(n) for b in range(a, n))
            for S in subsets:
                checked += 1
                lhs = table[_put(fix, i, big_join(D, S))]
                rhs = big_join(cod, (table[_put(fix, i, s)] for s in S))
                if lhs != rhs:
                    return OperatorCheck(False, "exhaustive" if exhaustive or not complete else "sampled", checked,
                                         {"coordinate": i, "fixed": [a for a in fix if a is not None],
                                          "subset": list(S), "law": "complete" if complete else "binary"})
    mode = "exhaustive" if exhaustive or not complete else "sampled"
    return OperatorCheck(True, mode, checked, None)


def is_operator(L, f, **kw):
    return check_operator(L, f, **kw).ok


def is_normal_operator(L, f, **kw):
    return check_operator(L, f, normal=True, **kw).ok


def is_complete_operator(L, f, **kw):
    return check_operator(L, f, complete=True, **kw).ok


def is_complete_normal_operator(L, f, **kw):
    return check_operator(L, f, normal=True, complete=True, **kw).ok


def is_dual_operator(L, f, **kw):
    return check_operator(L, f, dual_op=True, **kw).ok


def is_normal_dual_operator(L, f, **kw):
    return check_operator(L, f, normal=True, dual_op=True, **kw).ok


def is_complete_dual_operator(L, f, **kw):
    return check_operator(L, f, complete=True, dual_op=True, **kw).ok


def is_complete_normal_dual_operator(L, f, **kw):
    return check_operator(L, f, normal=True, complete=True, dual_op=True, **kw).ok


def join_product_identity(L, f, families):
    """Check f(join A_0, ..., join A_{n-1}) = join{f(a) : a_i in A_i} for each family; returns first failure or None."""
    f = np.asarray(f)
    for fam in families:
        lhs = int(f[tuple(big_join(L, A) for A in fam)])
        rhs = big_join(L, (f[a] for a in iproduct(*fam)))
        if lhs != rhs:
            return {"family": [list(A) for A in fam], "lhs": lhs, "rhs": rhs}
    return None


def all_families(L, arity):
    subsets = [S for k in range(L.size + 1) for S in combinations(range(L.size), k)]
    return iproduct(subsets, repeat=arity)


def random_families(L, arity, count, rng):
    for _ in range(count):
        yield tuple(tuple(a for a in range(L.size) if rng.random() < 0.5) for _ in range(arity))


class MonotoneResult(NamedTuple):
    monotone: bool
    signature: tuple  # per coordinate: "isotone", "antitone", "constant" or None
    witness: dict | None


def is_monotone_map(L, f):
    """Classify each coordinate as isotone, antitone, both ("constant") or neither."""
    f = np.asarray(f)
    arity = f.ndim
    n = L.size
    sig = []
    witness = None
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b and L.leq[a, b]]
    for i in range(arity):
        iso = anti = True
        iso_w = anti_w = None
        for fix in _fixings(n, arity, i):
            for a, b in pairs:
                fa, fb = f[_put(fix, i, a)], f[_put(fix, i, b)]
                if iso and not L.leq[fa, fb]:
                    iso, iso_w = False, (_put(fix, i, a), _put(fix, i, b))
                if anti and not L.leq[fb, fa]:
                    anti, anti_w = False, (_put(fix, i, a), _put(fix, i, b))
            if not iso and not anti:
                break
        if iso and anti:
            sig.append("constant")
        elif iso:
            sig.append("isotone")
        elif anti:
            sig.append("antitone")
        else:
            sig.append(None)
            if witness is None:
                witness = {"coordinate": i, "isotone_fails": [list(iso_w[0]), list(iso_w[1])],
                           "antitone_fails": [list(anti_w[0]), list(anti_w[1])]}
    return MonotoneResult(all(s is not None for s in sig), tuple(sig), witness)


def antitone_coords(L, f):
    """Coordinates in which f is antitone (and not isotone); raises NotMonotone if f is not monotone."""
    res = is_monotone_map(L, f)
    if not res.monotone:
        raise NotMonotone("operation is not monotone", witness=res.witness)
    return tuple(i for i, s in enumerate(res.signature) if s == "antitone")


# -- Omega homomorphisms and products -----------------------------------------------


def omega_hom_violation(f, A, B):
    """First failure of f: A -> B to be an Omega-homomorphism (lattice part included), or None."""
    if not is_homomorphism(f):
        return {"law": "bounded lattice homomorphism"}
    return op_violation(f, A.ops, B.ops)


def is_omega_homomorphism(f, A, B):
    return omega_hom_violation(f, A, B) is None


def product_omega(factors):
    """Direct product of Omega-lattices with componentwise operations."""
    base = product_lattice([F.base for F in factors])
    if not factors:
        return OmegaLattice(base)
    symbols = list(factors[0].symbols.values())
    shape = tuple(F.size for F in factors)
    coords = np.array(np.unravel_index(np.arange(base.size), shape)).T
    tables = {}
    for sym in symbols:
        grids = np.meshgrid(*([np.arange(base.size)] * sym.arity), indexing="ij")
        parts = []
        for k, F in enumerate(factors):
            idx = tuple(coords[g, k] for g in grids)
            parts.append(F.ops[sym.name][idx] if sym.arity else np.asarray(F.ops[sym.name]))
        tables[sym.name] = np.ravel_multi_index(tuple(parts), shape)
    return OmegaLattice(base, symbols, tables)


# -- stable set Omega-lattices ---------------------------------------------------


def build_p_plus_omega(P, Phi, Omega, SL=None):
    """P+_Omega: P+ with each symbol interpreted by the restriction of its definable operation.

    ``Phi`` maps symbol -> formula, ``Omega`` is an iterable of
    :class:`OperatorSymbol`.  Raises NotClosed with a witness if some
    operation leaves P+.
    """
    SL = SL or stable_set_lattice(P)
    symbols = list(Omega)
    Phi_items = {s.name: (Phi[s.name], s.arity) for s in symbols}
    require_sigma_phi(P, Phi_items, SL)
    n = len(SL)
    tables = {}
    for s in symbols:
        op = definable_op(P, Phi[s.name])
        t = np.empty((n,) * s.arity, dtype=np.int32)
        for args in iproduct(range(n), repeat=s.arity):
            t[args] = SL.index[op(*(SL.stables[a] for a in args))]
        tables[s.name] = t
    out = OmegaLattice(SL.lattice, symbols, tables)
    out.stable_lattice = SL
    return out


# -- JSON ------------------------------------------------------------------------------


def omega_to_json(A):
    out = lattice_to_json(A.base)
    out["ops"] = {
        name: {"arity": A.symbols[name].arity, "side": A.symbols[name].side, "table": A.ops[name].tolist()}
        for name in sorted(A.ops)
    }
    return out


def omega_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    L = lattice_from_json(data)
    symbols, tables = [], {}
    try:
        for name, spec in (data.get("ops") or {}).items():
            symbols.append(OperatorSymbol(name, int(spec["arity"]), spec.get("side", "lower")))
            tables[name] = spec["table"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed ops block: {exc}") from exc
    return OmegaLattice(L, symbols, tables)


def describe_stables(A):
    """Member lists of the stable sets behind a P+_Omega, by element index."""
    return [members(s) for s in A.stable_lattice.stables]
