"""Two-sorted first-order formulas over polarity signatures.

Variables are integers (``v0``, ``v1``, ...).  Atoms are the sort predicates
``X``/``Y``, the polarity relation ``R``, named extra relations, the set
predicates ``S0``, ``S1``, ... and equality.

Concrete syntax, loosest binding first::

    phi  := imp ('<->' phi)?            right associative
    imp  := or ('->' imp)?              right associative
    or   := and ('|' and)*
    and  := un ('&' un)*
    un   := '!' un | ('forall'|'exists') var un | '(' phi ')' | atom | 'true' | 'false'
    atom := var '=' var | NAME '(' var (',' var)* ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ArityMismatch, FormulaSyntaxError, UnknownSymbol


class Formula:
    """Base class of AST nodes."""

    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __rshift__(self, other):
        return Implies(self, other)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Verum(Formula):
    pass


@dataclass(frozen=True)
class Falsum(Formula):
    pass


@dataclass(frozen=True)
class SortX(Formula):
    var: int


@dataclass(frozen=True)
class SortY(Formula):
    var: int


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple


@dataclass(frozen=True)
class SetPred(Formula):
    index: int
    var: int


@dataclass(frozen=True)
class Eq(Formula):
    left: int
    right: int


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: int
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: int
    body: Formula


BINARY = (And, Or, Implies, Iff)
QUANT = (Forall, Exists)


def R(a, b):
    return Rel("R", (a, b))


def conj(parts):
    parts = list(parts)
    if not parts:
        return Verum()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def forall(vars_, body):
    for v in reversed(list(vars_)):
        body = Forall(v, body)
    return body


# -- structural helpers ------------------------------------------------------------


def atom_vars(phi):
    if isinstance(phi, (SortX, SortY, SetPred)):
        return (phi.var,)
    if isinstance(phi, Rel):
        return phi.args
    if isinstance(phi, Eq):
        return (phi.left, phi.right)
    return ()


def free_vars(phi):
    if isinstance(phi, (Verum, Falsum)):
        return frozenset()
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, BINARY):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, QUANT):
        return free_vars(phi.body) - {phi.var}
    return frozenset(atom_vars(phi))


def all_vars(phi):
    if isinstance(phi, Not):
        return all_vars(phi.body)
    if isinstance(phi, BINARY):
        return all_vars(phi.left) | all_vars(phi.right)
    if isinstance(phi, QUANT):
        return all_vars(phi.body) | {phi.var}
    return frozenset(atom_vars(phi))


def set_predicates(phi):
    """Indices m of the set predicates S_m occurring in phi."""
    if isinstance(phi, SetPred):
        return frozenset({phi.index})
    if isinstance(phi, Not):
        return set_predicates(phi.body)
    if isinstance(phi, BINARY):
        return set_predicates(phi.left) | set_predicates(phi.right)
    if isinstance(phi, QUANT):
        return set_predicates(phi.body)
    return frozenset()


def relation_names(phi):
    if isinstance(phi, Rel):
        return frozenset({phi.name})
    if isinstance(phi, Not):
        return relation_names(phi.body)
    if isinstance(phi, BINARY):
        return relation_names(phi.left) | relation_names(phi.right)
    if isinstance(phi, QUANT):
        return relation_names(phi.body)
    return frozenset()


def rename_free(phi, old, new):
    """Replace free occurrences of variable ``old`` by ``new`` (caller ensures ``new`` is not bound in phi)."""
    def r(v):
        return new if v == old else v

    if isinstance(phi, (Verum, Falsum)):
        return phi
    if isinstance(phi, SortX):
        return SortX(r(phi.var))
    if isinstance(phi, SortY):
        return SortY(r(phi.var))
    if isinstance(phi, SetPred):
        return SetPred(phi.index, r(phi.var))
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(r(v) for v in phi.args))
    if isinstance(phi, Eq):
        return Eq(r(phi.left), r(phi.right))
    if isinstance(phi, Not):
        return Not(rename_free(phi.body, old, new))
    if isinstance(phi, BINARY):
        return type(phi)(rename_free(phi.left, old, new), rename_free(phi.right, old, new))
    if isinstance(phi, QUANT):
        if phi.var == old:
            return phi
        return type(phi)(phi.var, rename_free(phi.body, old, new))
    raise TypeError(phi)


def fresh_var(*formulas, avoid=()):
    used = set(avoid)
    for f in formulas:
        used |= all_vars(f)
    return max(used, default=-1) + 1


def substitute_set(phi, index, psi):
    """Replace every atom S_index(v) by psi with its one free variable renamed to v.

    Bound variables of psi are renamed apart from phi's variables first so
    no capture can happen.
    """
    fv = sorted(free_vars(psi))
    if len(fv) > 1:
        raise ValueError("substituted formula must have at most one free variable")
    u = fv[0] if fv else None
    psi = _shift_bound(psi, fresh_var(phi))

    def go(f):
        if isinstance(f, SetPred) and f.index == index:
            return psi if u is None else rename_free(psi, u, f.var)
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, BINARY):
            return type(f)(go(f.left), go(f.right))
        if isinstance(f, QUANT):
            return type(f)(f.var, go(f.body))
        return f

    return go(phi)


def _shift_bound(phi, offset):
    """Rename every bound variable v to v + offset."""
    def go(f, bound):
        def r(v):
            return v + offset if v in bound else v

        if isinstance(f, (Verum, Falsum)):
            return f
        if isinstance(f, SortX):
            return SortX(r(f.var))
        if isinstance(f, SortY):
            return SortY(r(f.var))
        if isinstance(f, SetPred):
            return SetPred(f.index, r(f.var))
        if isinstance(f, Rel):
            return Rel(f.name, tuple(r(v) for v in f.args))
        if isinstance(f, Eq):
            return Eq(r(f.left), r(f.right))
        if isinstance(f, Not):
            return Not(go(f.body, bound))
        if isinstance(f, BINARY):
            return type(f)(go(f.left, bound), go(f.right, bound))
        if isinstance(f, QUANT):
            return type(f)(f.var + offset, go(f.body, bound | {f.var}))
        raise TypeError(f)

    free = free_vars(phi)
    offset = max(offset, max(free, default=-1) + 1)
    return go(phi, frozenset())


# -- signatures ---------------------------------------------------------------

RESERVED = {"X", "Y", "R", "forall", "exists", "true", "false"}


@dataclass(frozen=True)
class Signature:
    """Extra relation symbols with arities, plus the number of set predicates S0..S(n-1)."""

    extra_relations: tuple = ()
    set_predicate_count: int = 0
    arities: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        arities = {"R": 2}
        for name, arity in self.extra_relations:
            if name in RESERVED or re.fullmatch(r"S\d+", name) or re.fullmatch(r"v\d+", name):
                raise UnknownSymbol(f"relation name {name!r} is reserved")
            if name in arities:
                raise UnknownSymbol(f"duplicate relation name {name!r}")
            arities[name] = int(arity)
        object.__setattr__(self, "arities", arities)

    @classmethod
    def of(cls, P, set_predicates=0):
        return cls(tuple((n, r.arity) for n, r in sorted(P.relations.items())), set_predicates)

    def with_sets(self, n):
        return Signature(self.extra_relations, n)


# -- parser -----------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(<->|->|[()!&|,=])|([A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        out.append((m.group(1) or m.group(2), start))
        pos = m.end()
    out.append(("<eof>", len(text)))
    return out


class _Parser:
    def __init__(self, text, sig):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def var(self):
        tok, pos = self.toks[self.i]
        m = re.fullmatch(r"v(\d+)", tok)
        if not m:
            raise FormulaSyntaxError(f"expected a variable, found {tok!r}", pos)
        self.i += 1
        return int(m.group(1))

    def formula(self):
        left = self.implication()
        if self.peek() == "<->":
            self.take()
            return Iff(left, self.formula())
        return left

    def implication(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            self.take()
            v = self.var()
            body = self.unary()
            return Forall(v, body) if tok == "forall" else Exists(v, body)
        if tok == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        if tok == "true":
            self.take()
            return Verum()
        if tok == "false":
            self.take()
            return Falsum()
        return self.atom()

    def atom(self):
        tok, pos = self.toks[self.i]
        if re.fullmatch(r"v\d+", tok):
            left = self.var()
            self.take("=")
            return Eq(left, self.var())
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            raise FormulaSyntaxError(f"unexpected token {tok!r}", pos)
        self.take()
        set_m = re.fullmatch(r"S(\d+)", tok)
        if tok in ("X", "Y"):
            arity = 1
        elif set_m:
            if int(set_m.group(1)) >= self.sig.set_predicate_count:
                raise UnknownSymbol(f"set predicate {tok} not in signature (n = {self.sig.set_predicate_count})",
                                    witness={"symbol": tok, "position": pos})
            arity = 1
        elif tok in self.sig.arities:
            arity = self.sig.arities[tok]
        else:
            raise UnknownSymbol(f"unknown symbol {tok!r} at position {pos}", witness={"symbol": tok, "position": pos})
        self.take("(")
        args = [self.var()]
        while self.peek() == ",":
            self.take()
            args.append(self.var())
        self.take(")")
        if len(args) != arity:
            raise ArityMismatch(f"{tok} takes {arity} argument(s), got {len(args)}",
                                witness={"symbol": tok, "position": pos})
        if tok == "X":
            return SortX(args[0])
        if tok == "Y":
            return SortY(args[0])
        if set_m:
            return SetPred(int(set_m.group(1)), args[0])
        return Rel(tok, tuple(args))


def parse(text, sig=None):
    """Parse formula text against a :class:`Signature` (default: bare polarity language with S0..S9)."""
    sig = sig if sig is not None else Signature((), 10)
    p = _Parser(text, sig)
    out = p.formula()
    if p.peek() != "<eof>":
        raise FormulaSyntaxError(f"unexpected {p.peek()!r}", p.pos())
    return out


def parse_file(text, sig=None):
    """One formula per line; blank lines and ``#`` comments are skipped."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse(line, sig))
    return out


# -- printer ----------------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OP = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def to_text(phi):
    def go(f, ctx):
        if isinstance(f, Verum):
            return "true"
        if isinstance(f, Falsum):
            return "false"
        if isinstance(f, SortX):
            return f"X(v{f.var})"
        if isinstance(f, SortY):
            return f"Y(v{f.var})"
        if isinstance(f, SetPred):
            return f"S{f.index}(v{f.var})"
        if isinstance(f, Rel):
            return f"{f.name}(" + ",".join(f"v{v}" for v in f.args) + ")"
        if isinstance(f, Eq):
            return f"v{f.left} = v{f.right}"
        if isinstance(f, Not):
            return "!" + go(f.body, 5)
        if isinstance(f, QUANT):
            q = "forall" if isinstance(f, Forall) else "exists"
            return f"{q} v{f.var} " + go(f.body, 5)
        p = _PREC[type(f)]
        right_assoc = isinstance(f, (Implies, Iff))
        lhs = go(f.left, p + 1 if right_assoc else p)
        rhs = go(f.right, p if right_assoc else p + 1)
        s = f"{lhs} {_OP[type(f)]} {rhs}"
        return f"({s})" if p < ctx else s

    return go(phi, 0)
