"""Ultrafilters on finite index sets, ultraproducts of structures and of
Omega-lattices, the map theta, and checks of the ultraproduct theorems.

On a finite index set every ultrafilter is principal, so every ultraproduct
here is isomorphic to one of its factors.  The quotients are nonetheless
built from choice functions modulo the ultrafilter, and the isomorphism with
the factor is checked rather than assumed.  Reports say so in their ``note``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from math import prod

import numpy as np

from .completions import (
    Completion,
    canonical_extension,
    is_join_dense,
    is_meet_dense,
    lower_can_ext,
    lower_macneille_ext,
    sigma_expansion,
    upper_macneille_ext,
)
from .errors import EmptyIndex, HypothesisFailed, SignatureMismatch, SizeCapExceeded
from .expansions import (
    OmegaLattice,
    build_p_plus_omega,
    is_complete_normal_dual_operator,
    is_complete_normal_operator,
    omega_hom_violation,
    product_omega,
)
from .order import FinPoset, LatticeMap, build_lattice, find_monomorphism, is_homomorphism, is_injective, is_surjective
from .polarity import Polarity, Relation, mask_of, members
from .semantics import InterpretedStructure, evaluate, sigma_phi_witness

DEFAULT_CHOICE_CAP = 4096
FINITE_NOTE = "finite index set: every ultrafilter is principal, so each ultraproduct is isomorphic to a factor"


@dataclass(frozen=True)
class FiniteUltrafilter:
    """The principal ultrafilter {S : j in S} on {0, ..., index_size - 1}."""

    index_size: int
    principal_at: int

    def __post_init__(self):
        if not 0 <= self.principal_at < self.index_size:
            raise EmptyIndex("principal point outside the index set")

    def __contains__(self, S):
        return self.principal_at in set(S)

    def to_json(self):
        return {"index_size": self.index_size, "principal_at": self.principal_at}


def enumerate_ultrafilters(index_size):
    if index_size < 1:
        raise EmptyIndex("the index set is empty, so it carries no ultrafilter")
    return [FiniteUltrafilter(index_size, j) for j in range(index_size)]


class UltraQuotient:
    """Choice functions over carriers of the given sizes, modulo agreement on a U-large set.

    ``classes[k]`` lists the members of class k; its first (lexicographically
    least) member is the representative.
    """

    def __init__(self, sizes, U, cap=DEFAULT_CHOICE_CAP):
        total = prod(sizes)
        if total > cap:
            raise SizeCapExceeded(f"{total} choice functions exceed cap {cap}")
        self.U = U
        self.sizes = tuple(sizes)
        self.classes = []
        self.class_of = {}
        n = len(sizes)
        for f in iproduct(*(range(s) for s in sizes)):
            for k, cls in enumerate(self.classes):
                g = cls[0]
                if [i for i in range(n) if f[i] == g[i]] in U:
                    cls.append(f)
                    self.class_of[f] = k
                    break
            else:
                self.class_of[f] = len(self.classes)
                self.classes.append([f])
        self.reps = [c[0] for c in self.classes]

    def __len__(self):
        return len(self.classes)

    def large(self, pred):
        """Is {i : pred(i)} in U?"""
        return [i for i in range(len(self.sizes)) if pred(i)] in self.U


class UltraproductStructure:
    """The ultraproduct of polarity structures, with R and every extra relation induced through U."""

    def __init__(self, factors, U, cap=DEFAULT_CHOICE_CAP):
        if not factors:
            raise EmptyIndex("no factors")
        if U.index_size != len(factors):
            raise SignatureMismatch(f"ultrafilter is on {U.index_size} indices but there are {len(factors)} factors")
        sig = factors[0].signature
        for i, P in enumerate(factors):
            if P.signature != sig:
                raise SignatureMismatch(f"factor {i} has signature {P.signature}, expected {sig}",
                                        witness={"factor": i})
        self.factors = list(factors)
        self.U = U
        self.xs = UltraQuotient([P.x_size for P in factors], U, cap)
        self.ys = UltraQuotient([P.y_size for P in factors], U, cap)
        nx, ny = len(self.xs), len(self.ys)
        R = np.zeros((nx, ny), dtype=bool)
        for a, f in enumerate(self.xs.reps):
            for b, g in enumerate(self.ys.reps):
                R[a, b] = self.xs.large(lambda i: factors[i].R[f[i], g[i]])
        relations = {}
        for name, sorts in sig.items():
            quotients = [self.xs if s == "X" else self.ys for s in sorts]
            tuples = set()
            for args in iproduct(*(range(len(q)) for q in quotients)):
                fs = [q.reps[a] for q, a in zip(quotients, args)]
                if self.xs.large(lambda i: tuple(f[i] for f in fs) in factors[i].relations[name].tuples):
                    tuples.add(args)
            relations[name] = Relation(sorts, frozenset(tuples))
        self.polarity = Polarity(nx, ny, R, relations, kind=factors[0].kind)
        self.collapse = self._collapse()

    def _collapse(self):
        """Class k of X (or Y) goes to its representative's value at the principal point; checked to be an iso."""
        j = self.U.principal_at
        P = self.factors[j]
        x_map = [f[j] for f in self.xs.reps]
        y_map = [g[j] for g in self.ys.reps]
        assert sorted(x_map) == list(range(P.x_size)), "collapse is not a bijection on X"
        assert sorted(y_map) == list(range(P.y_size)), "collapse is not a bijection on Y"
        Q = self.polarity
        assert all(Q.R[a, b] == P.R[x_map[a], y_map[b]] for a in range(Q.x_size) for b in range(Q.y_size)), \
            "collapse does not preserve R"
        for name, rel in Q.relations.items():
            maps = [x_map if s == "X" else y_map for s in rel.sorts]
            image = {tuple(m[v] for m, v in zip(maps, t)) for t in rel.tuples}
            assert image == set(P.relations[name].tuples), f"collapse does not preserve {name}"
        return x_map, y_map

    def x_class(self, f):
        return self.xs.class_of[tuple(f)]

    def y_class(self, g):
        return self.ys.class_of[tuple(g)]


def ultraproduct_structures(factors, U, cap=DEFAULT_CHOICE_CAP):
    return UltraproductStructure(factors, U, cap)


# -- Los ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LosResult:
    agree: bool
    quotient_side: bool
    index_set: tuple
    index_side: bool


def los_check(factors, U, phi, witnesses=None, sets=(), ultra=None):
    """Evaluate both sides of Los's biconditional independently.

    ``witnesses`` maps a variable to ``(sort, choice function)``; ``sets``
    is a list of choices alpha_m (one X-mask per factor) interpreting S_m,
    read on the quotient as theta(alpha_m).
    """
    ultra = ultra or UltraproductStructure(factors, U)
    witnesses = dict(witnesses or {})
    env_q = {v: (s, ultra.x_class(f) if s == "X" else ultra.y_class(f)) for v, (s, f) in witnesses.items()}
    q_sets = [theta(ultra, alpha) for alpha in sets]
    lhs = evaluate(InterpretedStructure(ultra.polarity, q_sets), phi, env_q)
    good = []
    for i, P in enumerate(factors):
        env_i = {v: (s, f[i]) for v, (s, f) in witnesses.items()}
        if evaluate(InterpretedStructure(P, [alpha[i] for alpha in sets]), phi, env_i):
            good.append(i)
    rhs = good in U
    return LosResult(lhs == rhs, lhs, tuple(good), rhs)


def theta(ultra, alpha, quotient=None):
    """theta(alpha^U): the classes f^U with {i : f(i) in alpha(i)} in U."""
    q = quotient or ultra.xs
    return mask_of(k for k, f in enumerate(q.reps) if q.large(lambda i: (alpha[i] >> f[i]) & 1))


def theta_well_defined(ultra, alpha, alpha2):
    """Do two choices of sets that agree on a U-large set give the same theta, for every class member?"""
    q = ultra.xs
    if not q.large(lambda i: alpha[i] == alpha2[i]):
        raise HypothesisFailed("alpha and alpha' are not U-equivalent")
    out = theta(ultra, alpha)
    for k, cls in enumerate(q.classes):
        for f in cls:
            for a in (alpha, alpha2):
                if q.large(lambda i: (a[i] >> f[i]) & 1) != bool((out >> k) & 1):
                    return False
    return theta(ultra, alpha2) == out


def lemma41_check(factors, U, phi, var, params=None, ultra=None):
    """alpha(i) = {x : P_i |= phi[x, params(i)]}; check theta(alpha^U) is the set phi defines on the quotient."""
    ultra = ultra or UltraproductStructure(factors, U)
    params = dict(params or {})
    alpha = []
    for i, P in enumerate(factors):
        M = InterpretedStructure(P)
        env = {v: (s, f[i]) for v, (s, f) in params.items()}
        alpha.append(mask_of(x for x in range(P.x_size) if evaluate(M, phi, {**env, var: ("X", x)})))
    lhs = theta(ultra, alpha)
    Mq = InterpretedStructure(ultra.polarity)
    env_q = {v: (s, ultra.x_class(f) if s == "X" else ultra.y_class(f)) for v, (s, f) in params.items()}
    rhs = mask_of(k for k in range(len(ultra.xs)) if evaluate(Mq, phi, {**env_q, var: ("X", k)}))
    return lhs == rhs


# -- ultraproducts of lattices -----------------------------------------------------------


class UltraproductLattice:
    """The ultraproduct of (Omega-)lattices: choice functions modulo U, order and operations through U."""

    def __init__(self, factors, U, cap=DEFAULT_CHOICE_CAP):
        if U.index_size != len(factors):
            raise SignatureMismatch("ultrafilter and factor list disagree in size")
        factors = [F if isinstance(F, OmegaLattice) else OmegaLattice(F) for F in factors]
        names = set(factors[0].symbols)
        if any(set(F.symbols) != names for F in factors):
            raise SignatureMismatch("factors interpret different operation symbols")
        self.factors = factors
        self.U = U
        q = self.quotient = UltraQuotient([F.size for F in factors], U, cap)
        n = len(q)
        leq = np.zeros((n, n), dtype=bool)
        for a, f in enumerate(q.reps):
            for b, g in enumerate(q.reps):
                leq[a, b] = q.large(lambda i: factors[i].base.leq[f[i], g[i]])
        base = build_lattice(FinPoset(leq))
        for a, f in enumerate(q.reps):
            for b, g in enumerate(q.reps):
                m = tuple(int(F.base.meet[f[i], g[i]]) for i, F in enumerate(factors))
                j = tuple(int(F.base.join[f[i], g[i]]) for i, F in enumerate(factors))
                assert base.meet[a, b] == q.class_of[m] and base.join[a, b] == q.class_of[j]
        tables = {}
        for name, sym in factors[0].symbols.items():
            t = np.empty((n,) * sym.arity, dtype=np.int32)
            for args in iproduct(range(n), repeat=sym.arity):
                fs = [q.reps[a] for a in args]
                val = tuple(int(F.ops[name][tuple(f[i] for f in fs)]) for i, F in enumerate(factors))
                t[args] = q.class_of[val]
            tables[name] = t
        self.omega = OmegaLattice(base, list(factors[0].symbols.values()), tables)

    @property
    def base(self):
        return self.omega.base

    def projection(self, product):
        """The quotient map from the direct product (row-major element order) onto this ultraproduct."""
        table = [self.quotient.class_of[f] for f in iproduct(*(range(s) for s in self.quotient.sizes))]
        return LatticeMap(product.base if isinstance(product, OmegaLattice) else product, self.base, table)


def ultraproduct_lattices(factors, U, cap=DEFAULT_CHOICE_CAP):
    return UltraproductLattice(factors, U, cap)


# -- reports ------------------------------------------------------------------------------


def _report(name, checks, **extra):
    status = "pass" if all(c["ok"] for c in checks.values()) else "fail"
    return {"check": name, "status": status, "mode": "exhaustive", "note": FINITE_NOTE, "checks": checks, **extra}


def _check(ok, **detail):
    return {"ok": bool(ok), **detail}


def _omega_items(Phi, Omega):
    return {s.name: (Phi[s.name], s.arity) for s in Omega}


def _require_sigma(P, Phi, Omega, what):
    w = sigma_phi_witness(P, _omega_items(Phi, Omega))
    if w is not None:
        raise HypothesisFailed(f"{what} is not in Sigma_Phi", witness=w)


def theta_map(ultra, source, target_SL):
    """theta as a LatticeMap from the ultraproduct of the factors' P+ into (ultraproduct)+."""
    SLs = [F.stable_lattice for F in source.factors]
    table = []
    for alpha in source.quotient.reps:
        m = theta(ultra, [SL.stables[a] for SL, a in zip(SLs, alpha)])
        if m not in target_SL:
            raise AssertionError(f"theta image {members(m)} is not stable")
        table.append(target_SL.index[m])
    return LatticeMap(source.base, target_SL.lattice, table)


def verify_theorem_Fhom(factors, U, Phi, Omega):
    """theta from the ultraproduct of the P_i+ (with Omega) into (ultraproduct of P_i)+ is an Omega-monomorphism."""
    for i, P in enumerate(factors):
        _require_sigma(P, Phi, Omega, f"factor {i}")
    ultra = UltraproductStructure(factors, U)
    _require_sigma(ultra.polarity, Phi, Omega, "the ultraproduct")
    plus = [build_p_plus_omega(P, Phi, Omega) for P in factors]
    source = UltraproductLattice(plus, U)
    target = build_p_plus_omega(ultra.polarity, Phi, Omega)
    th = theta_map(ultra, source, target.stable_lattice)
    violations = []
    for name, table in source.omega.ops.items():
        for args in iproduct(range(source.base.size), repeat=table.ndim):
            lhs = th(int(table[args]))
            rhs = int(target.ops[name][tuple(th(a) for a in args)])
            if lhs != rhs:
                violations.append({"op": name, "args": list(args), "theta_of_op": lhs, "op_of_theta": rhs})
    probes = 0
    probe_ok = True
    SLs = [F.stable_lattice for F in plus]
    for cls in source.quotient.classes:
        for alpha in cls[1:2]:
            a1 = [SL.stables[a] for SL, a in zip(SLs, cls[0])]
            a2 = [SL.stables[a] for SL, a in zip(SLs, alpha)]
            probes += 1
            probe_ok &= theta_well_defined(ultra, a1, a2)
    checks = {
        "injective": _check(is_injective(th)),
        "lattice_homomorphism": _check(is_homomorphism(th)),
        "operations_preserved": _check(not violations, violations=violations[:20]),
        "theta_well_defined": _check(probe_ok, probes=probes),
        "collapse_isomorphism": _check(True, principal_at=U.principal_at),
    }
    return _report("Fhom", checks, index_size=U.index_size, ultrafilter=U.to_json(),
                   sizes={"source": source.base.size, "target": target.size,
                          "factors": [F.size for F in plus]},
                   theta=list(th.table))


def verify_lemma_completeMac(P, U, symbol, Phi, Omega):
    """f on (P^U)+ equals the lower (upper) MacNeille extension of f on (P+)^U along theta."""
    sym = {s.name: s for s in Omega}[symbol]
    _require_sigma(P, Phi, Omega, "P")
    factors = [P] * U.index_size
    ultra = UltraproductStructure(factors, U)
    plus = build_p_plus_omega(P, Phi, Omega)
    source = UltraproductLattice([plus] * U.index_size, U)
    target = build_p_plus_omega(ultra.polarity, Phi, Omega)
    th = theta_map(ultra, source, target.stable_lattice)
    f_target = target.ops[symbol]
    if sym.side == "lower":
        hyp = is_complete_normal_operator(target.base, f_target)
    else:
        hyp = is_complete_normal_dual_operator(target.base, f_target)
    if not hyp:
        raise HypothesisFailed(f"{symbol} on (P^U)+ is not complete normal ({sym.side})")
    c = Completion(source.base, target.base, th, kind="theta")
    extend = lower_macneille_ext if sym.side == "lower" else upper_macneille_ext
    ext = extend(source.omega.ops[symbol], c, c, antitone=())
    diff = [list(map(int, a)) for a in np.argwhere(ext != f_target)]
    checks = {
        "theta_join_dense": _check(is_join_dense(c)),
        "theta_meet_dense": _check(is_meet_dense(c)),
        "theta_embedding": _check(is_injective(th) and is_homomorphism(th)),
        "pointwise_equal": _check(not diff, mismatches=diff[:20]),
    }
    return _report("completeMac", checks, symbol=symbol, side=sym.side, ultrafilter=U.to_json(),
                   sizes={"ultrapower_of_plus": source.base.size, "plus_of_ultrapower": target.size})


def _require_operator_hypotheses(A):
    for name, sym in A.symbols.items():
        t = A.ops[name]
        ok = is_complete_normal_operator(A.base, t) if sym.side == "lower" else \
            is_complete_normal_dual_operator(A.base, t)
        if not ok:
            raise HypothesisFailed(f"{name} is not a complete normal {'operator' if sym.side == 'lower' else 'dual operator'}")


def verify_theorem_ephienlarge(P, Phi, Omega, cap=64, filter_cap=32):
    """Exhibit an Omega-monomorphism from (P+_Omega)^sigma into (P^U)+_Omega for some U."""
    _require_sigma(P, Phi, Omega, "P")
    A = build_p_plus_omega(P, Phi, Omega)
    _require_operator_hypotheses(A)
    S = sigma_expansion(A, cap=filter_cap)
    tried = []
    for U in enumerate_ultrafilters(1):
        ultra = UltraproductStructure([P], U)
        B = build_p_plus_omega(ultra.polarity, Phi, Omega)
        f = find_monomorphism(S.base, B.base, extra_ops=(S.ops, B.ops), cap=cap)
        tried.append(U.to_json())
        if f is not None:
            checks = {
                "monomorphism_found": _check(True),
                "omega_homomorphism": _check(omega_hom_violation(f, S, B) is None),
                "injective": _check(is_injective(f)),
            }
            return _report("ephienlarge", checks, ultrafilter=U.to_json(), map=list(f.table),
                           sizes={"sigma": S.size, "plus_of_ultrapower": B.size})
    return _report("ephienlarge", {"monomorphism_found": _check(False, tried=tried)})


def _lift_check(f, A, B, cA, cB, SA, SB, want):
    g = lower_can_ext(f, cA, cB)
    hom = omega_hom_violation(g, SA, SB)
    prop = is_injective(g) if want == "injective" else is_surjective(g)
    return _check(hom is None and prop, violation=hom, map=list(g.table))


def _diagonal(A):
    AA = product_omega([A, A])
    return LatticeMap(A.base, AA.base, [a * A.size + a for a in range(A.size)]), AA


def _projection(A, B):
    AB = product_omega([A, B])
    return LatticeMap(AB.base, A.base, [e // B.size for e in range(AB.size)]), AB


def verify_axioms(factors, Phi, Omega, filter_cap=32):
    """Certify (A1)-(A4) on a family of structures in Sigma_Phi."""
    n = len(factors)
    Us = enumerate_ultrafilters(n)
    plus = [build_p_plus_omega(P, Phi, Omega) for P in factors]
    for A in plus:
        _require_operator_hypotheses(A)
    sections = {}

    # (A1): a diagonal embedding and a product projection, each lifted by the lower extension
    A = plus[0]
    B = plus[-1]
    cA = canonical_extension(A.base, filter_cap)
    SA = sigma_expansion(A, completion=cA)
    d, AA = _diagonal(A)
    assert omega_hom_violation(d, A, AA) is None and is_injective(d)
    cAA = canonical_extension(AA.base, filter_cap)
    SAA = sigma_expansion(AA, completion=cAA)
    p, AB = _projection(A, B)
    assert omega_hom_violation(p, AB, A) is None and is_surjective(p)
    cAB = canonical_extension(AB.base, filter_cap)
    SAB = sigma_expansion(AB, completion=cAB)
    a1 = {
        "injective_half": _lift_check(d, A, AA, cA, cAA, SA, SAA, "injective"),
        "surjective_half": _lift_check(p, AB, A, cAB, cA, SAB, SA, "surjective"),
    }
    sections["A1"] = _report("A1", a1)

    # (A2): theta for every ultrafilter on the index set
    sections["A2"] = _report("A2", {f"U={U.principal_at}": _check(verify_theorem_Fhom(factors, U, Phi, Omega)["status"] == "pass")
                                    for U in Us})
    # (A3)
    sections["A3"] = _report("A3", {f"P{i}": _check(verify_theorem_ephienlarge(P, Phi, Omega, filter_cap=filter_cap)["status"] == "pass")
                                    for i, P in enumerate(factors)})
    # (A4): x -> (pi_U-nabla(x))_U from the sigma of the product to the product of sigmas
    L = product_omega(plus)
    cL = canonical_extension(L.base, filter_cap)
    SL = sigma_expansion(L, completion=cL)
    parts, lifted = [], []
    for U in Us:
        M = UltraproductLattice(plus, U)
        cM = canonical_extension(M.base, filter_cap)
        SM = sigma_expansion(M.omega, completion=cM)
        pi = M.projection(L)
        lifted.append(lower_can_ext(pi, cL, cM))
        parts.append(SM)
    T = product_omega(parts)
    shape = tuple(S.size for S in parts)
    table = [int(np.ravel_multi_index(tuple(g(x) for g in lifted), shape)) for x in range(SL.size)]
    emb = LatticeMap(SL.base, T.base, table)
    a4 = {"embedding": _check(is_injective(emb) and omega_hom_violation(emb, SL, T) is None,
                              violation=omega_hom_violation(emb, SL, T), sizes=[SL.size, T.size])}
    sections["A4"] = _report("A4", a4)
    status = "pass" if all(s["status"] == "pass" for s in sections.values()) else "fail"
    return {"check": "axioms", "status": status, "note": FINITE_NOTE, "index_size": n, "axioms": sections}


verify_axioms_A1_to_A4 = verify_axioms

