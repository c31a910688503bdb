"""Satisfaction over polarity structures, definable set operations and the
stability sentence.

The evaluation domain is the disjoint union X + Y: global element ``e`` is
``x = e`` when ``e < |X|`` and ``y = e - |X|`` otherwise.  Set predicates are
interpreted by X-subsets, so ``S_m`` is false on every Y element.
"""

from __future__ import annotations

from itertools import product as iproduct

from .errors import FreeVariableCountMismatch, InputError, NotClosed, SizeCapExceeded, UnboundVariable
from .formula import (
    And,
    Eq,
    Exists,
    Falsum,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    Rel,
    SetPred,
    SortX,
    SortY,
    Verum,
    free_vars,
    fresh_var,
    parse,
    relation_names,
    rename_free,
    set_predicates,
)
from .polarity import members, stable_set_lattice

DEFAULT_TUPLE_CAP = 200_000

POLARITY_AXIOMS = (
    parse("forall v0 (X(v0) | Y(v0))"),
    parse("forall v0 forall v1 (R(v0,v1) -> X(v0) & Y(v1))"),
)


class InterpretedStructure:
    """A polarity structure together with X-subsets interpreting S0..S(n-1)."""

    def __init__(self, base, sets=()):
        self.base = base
        self.sets = tuple(int(s) for s in sets)
        full = base.full_x
        for s in self.sets:
            if s & ~full:
                raise InputError("set assignment has elements outside X")

    @property
    def domain_size(self):
        return self.base.x_size + self.base.y_size

    def x(self, i):
        return i

    def y(self, j):
        return self.base.x_size + j


def global_element(P, sort, i):
    return i if sort == "X" else P.x_size + i


def _relation_table(P):
    """Global-index tuple sets for R and every extra relation (cached on P)."""
    cached = getattr(P, "_global_relations", None)
    if cached is not None:
        return cached
    nx = P.x_size
    table = {"R": frozenset((int(x), nx + int(y)) for x in range(nx) for y in range(P.y_size) if P.R[x, y])}
    for name, rel in P.relations.items():
        table[name] = frozenset(
            tuple(v if s == "X" else nx + v for s, v in zip(rel.sorts, t)) for t in rel.tuples
        )
    P._global_relations = table
    return table


def compile_formula(P, phi):
    """Compile phi to ``fn(env, sets) -> bool`` for structure P.

    ``env`` is a mutable list indexed by variable number; quantifiers write
    into it and restore the previous value on exit.
    """
    cache = P.__dict__.setdefault("_compiled", {})
    if phi in cache:
        return cache[phi]
    nx = P.x_size
    domain = range(P.x_size + P.y_size)
    rels = _relation_table(P)
    missing = relation_names(phi) - set(rels)
    if missing:
        raise InputError(f"structure does not interpret {sorted(missing)}")

    def comp(f):
        if isinstance(f, Verum):
            return lambda env, sets: True
        if isinstance(f, Falsum):
            return lambda env, sets: False
        if isinstance(f, SortX):
            v = f.var
            return lambda env, sets: env[v] < nx
        if isinstance(f, SortY):
            v = f.var
            return lambda env, sets: env[v] >= nx
        if isinstance(f, SetPred):
            v, m = f.var, f.index
            return lambda env, sets: env[v] < nx and (sets[m] >> env[v]) & 1 == 1
        if isinstance(f, Eq):
            a, b = f.left, f.right
            return lambda env, sets: env[a] == env[b]
        if isinstance(f, Rel):
            tuples, args = rels[f.name], f.args
            if len(args) == 2:
                a, b = args
                return lambda env, sets: (env[a], env[b]) in tuples
            return lambda env, sets: tuple(env[v] for v in args) in tuples
        if isinstance(f, Not):
            g = comp(f.body)
            return lambda env, sets: not g(env, sets)
        if isinstance(f, And):
            g, h = comp(f.left), comp(f.right)
            return lambda env, sets: g(env, sets) and h(env, sets)
        if isinstance(f, Or):
            g, h = comp(f.left), comp(f.right)
            return lambda env, sets: g(env, sets) or h(env, sets)
        if isinstance(f, Implies):
            g, h = comp(f.left), comp(f.right)
            return lambda env, sets: (not g(env, sets)) or h(env, sets)
        if isinstance(f, Iff):
            g, h = comp(f.left), comp(f.right)
            return lambda env, sets: g(env, sets) == h(env, sets)
        if isinstance(f, (Forall, Exists)):
            g, v = comp(f.body), f.var
            want = isinstance(f, Exists)

            def quant(env, sets):
                old = env[v]
                try:
                    for e in domain:
                        env[v] = e
                        if g(env, sets) == want:
                            return want
                    return not want
                finally:
                    env[v] = old

            return quant
        raise TypeError(f)

    fn = comp(phi)
    cache[phi] = fn
    return fn


def _env_list(phi, env):
    size = fresh_var(phi, avoid=env.keys())
    out = [-1] * max(size, 1)
    for v, e in env.items():
        out[v] = e
    return out


def _normalize_env(M, phi, env):
    env = dict(env or {})
    for v, e in list(env.items()):
        if isinstance(e, tuple):
            sort, i = e
            env[v] = global_element(M.base, sort, i)
        if not 0 <= env[v] < M.domain_size:
            raise InputError(f"v{v} is bound to {e}, outside the domain")
    unbound = sorted(free_vars(phi) - set(env))
    if unbound:
        raise UnboundVariable(f"free variable(s) {['v%d' % v for v in unbound]} not bound",
                              witness={"variables": unbound})
    return env


def _check_sets(M, phi):
    needed = set_predicates(phi)
    if needed and max(needed) >= len(M.sets):
        raise InputError(f"formula uses S{max(needed)} but only {len(M.sets)} set(s) assigned")


def evaluate(M, phi, env=None):
    """M |= phi[env].  ``env`` maps variable -> global element or ("X"|"Y", i)."""
    env = _normalize_env(M, phi, env)
    _check_sets(M, phi)
    return compile_formula(M.base, phi)(_env_list(phi, env), M.sets)


def evaluate_reference(M, phi, env=None):
    """Naive recursive evaluator straight from the definitions; an oracle for :func:`evaluate`."""
    env = _normalize_env(M, phi, env)
    _check_sets(M, phi)
    P = M.base
    nx = P.x_size

    def local(e):
        return ("X", e) if e < nx else ("Y", e - nx)

    def holds(f, env):
        if isinstance(f, Verum):
            return True
        if isinstance(f, Falsum):
            return False
        if isinstance(f, SortX):
            return local(env[f.var])[0] == "X"
        if isinstance(f, SortY):
            return local(env[f.var])[0] == "Y"
        if isinstance(f, SetPred):
            sort, i = local(env[f.var])
            return sort == "X" and i in members(M.sets[f.index])
        if isinstance(f, Eq):
            return env[f.left] == env[f.right]
        if isinstance(f, Rel):
            locs = [local(env[v]) for v in f.args]
            if f.name == "R":
                (s0, a), (s1, b) = locs
                return s0 == "X" and s1 == "Y" and bool(P.R[a, b])
            rel = P.relations[f.name]
            if any(s != want for (s, _), want in zip(locs, rel.sorts)):
                return False
            return tuple(i for _, i in locs) in rel.tuples
        if isinstance(f, Not):
            return not holds(f.body, env)
        if isinstance(f, And):
            return holds(f.left, env) and holds(f.right, env)
        if isinstance(f, Or):
            return holds(f.left, env) or holds(f.right, env)
        if isinstance(f, Implies):
            return (not holds(f.left, env)) or holds(f.right, env)
        if isinstance(f, Iff):
            return holds(f.left, env) == holds(f.right, env)
        if isinstance(f, Forall):
            return all(holds(f.body, {**env, f.var: e}) for e in range(M.domain_size))
        if isinstance(f, Exists):
            return any(holds(f.body, {**env, f.var: e}) for e in range(M.domain_size))
        raise TypeError(f)

    return holds(phi, env)


def the_free_var(phi):
    fv = free_vars(phi)
    if len(fv) != 1:
        raise FreeVariableCountMismatch(f"expected exactly one free variable, found {len(fv)}",
                                        witness={"free": sorted(fv)})
    return next(iter(fv))


def define_set(M, phi):
    """{x in X : M |= phi[x]} as an X-mask."""
    v = the_free_var(phi)
    _check_sets(M, phi)
    fn = compile_formula(M.base, phi)
    env = _env_list(phi, {v: 0})
    out = 0
    for x in range(M.base.x_size):
        env[v] = x
        if fn(env, M.sets):
            out |= 1 << x
    return out


def definable_op(P, phi):
    """The function (A_0, ..., A_{n-1}) -> define_set(<P, A_0..>, phi) as a Python callable."""
    v = the_free_var(phi)
    fn = compile_formula(P, phi)
    env = _env_list(phi, {v: 0})
    nx = P.x_size

    def op(*sets):
        out = 0
        for x in range(nx):
            env[v] = x
            if fn(env, sets):
                out |= 1 << x
        return out

    return op


def op_arity(phi):
    """Number of set arguments: one more than the highest S index used."""
    return max(set_predicates(phi), default=-1) + 1


# -- stability ------------------------------------------------------------------


def rho_formula(phi, out_var, var=None):
    """Y(out) & forall z ((X(z) & phi(z)) -> R(z, out)): defines rho of the set phi defines.

    ``var`` is the defining variable (default: phi's only free variable);
    any other free variables of phi act as parameters.
    """
    u = the_free_var(phi) if var is None else var
    z = fresh_var(phi, avoid=(out_var,))
    body = Implies(And(SortX(z), rename_free(phi, u, z)), Rel("R", (z, out_var)))
    return And(SortY(out_var), Forall(z, body))


def lambda_formula_y(psi, out_var, var=None):
    """X(out) & forall z ((Y(z) & psi(z)) -> R(out, z)): lambda of the Y-set psi defines."""
    u = the_free_var(psi) if var is None else var
    z = fresh_var(psi, avoid=(out_var,))
    body = Implies(And(SortY(z), rename_free(psi, u, z)), Rel("R", (out_var, z)))
    return And(SortX(out_var), Forall(z, body))


def lambda_rho_formula(phi, out_var, var=None):
    """X(out) & forall w (rho-phi(w) -> R(out, w))."""
    w = fresh_var(phi, avoid=(out_var,))
    rho = rho_formula(phi, w, var)
    return And(SortX(out_var), Forall(w, Implies(rho, Rel("R", (out_var, w)))))


def stability_formula(phi, var):
    """forall v (lambda-rho-phi(v) -> phi(v)), with ``var`` the defining variable and other free variables as parameters."""
    v = fresh_var(phi)
    return Forall(v, Implies(lambda_rho_formula(phi, v, var), rename_free(phi, var, v)))


def stability_formula_y(psi, var):
    """Stability of the Y-set {y : psi(y)}: forall v ((Y(v) & forall x (lambda-psi(x) -> R(x, v))) -> psi(v))."""
    v = fresh_var(psi)
    x = fresh_var(psi, avoid=(v,))
    lam_x = lambda_formula_y(psi, x, var)
    rho_lam = And(SortY(v), Forall(x, Implies(lam_x, Rel("R", (x, v)))))
    return Forall(v, Implies(rho_lam, rename_free(psi, var, v)))


def stability_sentence(phi):
    """The sentence forall v (lambda-rho-phi(v) -> phi(v)); true iff the set phi defines is stable.

    Sort guards ``X``/``Y`` are part of the rho and lambda formulas: without
    them the quantifiers would also range over the wrong sort and the
    sentence would misjudge the empty set.
    """
    return stability_formula(phi, the_free_var(phi))


def stable_formula(index=0):
    """stable-S_index, the sentence expressing that S_index is stable."""
    return stability_sentence(SetPred(index, 0))


# -- Sigma_Phi ------------------------------------------------------------------


def _phi_items(Phi):
    """Normalize Phi to [(symbol, formula, arity)]."""
    out = []
    for name, spec in sorted(Phi.items()):
        if isinstance(spec, tuple):
            phi, arity = spec
        else:
            phi, arity = spec, op_arity(spec)
        the_free_var(phi)
        if op_arity(phi) > arity:
            raise InputError(f"{name}: formula uses more set predicates than its arity {arity}")
        out.append((name, phi, arity))
    return out


def sigma_phi_witness(P, Phi, SL=None, cap=DEFAULT_TUPLE_CAP):
    """None if P+ is closed under every f_phi, else the first offending instance."""
    SL = SL or stable_set_lattice(P)
    for name, phi, arity in _phi_items(Phi):
        if len(SL) ** arity > cap:
            raise SizeCapExceeded(f"{len(SL)}^{arity} argument tuples exceed cap {cap}")
        op = definable_op(P, phi)
        for args in iproduct(SL.stables, repeat=arity):
            out = op(*args)
            if out not in SL:
                return {"symbol": name, "args": [members(a) for a in args], "image": members(out)}
    return None


def check_sigma_phi(P, Phi, SL=None, cap=DEFAULT_TUPLE_CAP):
    """Is P in Sigma_Phi, i.e. is P+ closed under every operation defined by Phi?"""
    return sigma_phi_witness(P, Phi, SL, cap) is None


def require_sigma_phi(P, Phi, SL=None, cap=DEFAULT_TUPLE_CAP):
    w = sigma_phi_witness(P, Phi, SL, cap)
    if w is not None:
        raise NotClosed(f"P+ is not closed under {w['symbol']}", witness=w)
