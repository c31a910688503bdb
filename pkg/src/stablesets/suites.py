"""Verification suites: each builds a JSON-ready report with a pass/fail status.

Used by the command line and by the acceptance tests.  Reports never hold
timings or anything else that varies between runs with the same seed.
"""

from __future__ import annotations

import random
from itertools import product as iproduct

import numpy as np

from . import frames as fr
from .errors import InputError, SignatureMismatch
from .formula import free_vars, to_text
from .completions import canonical_extension, is_compact, is_dense, macneille, sigma_expansion
from .expansions import (
    EXHAUSTIVE_LIMIT,
    DEFAULT_SAMPLES,
    check_operator,
    is_monotone_map,
    omega_hom_violation,
)
from .generators import all_polarities, random_formula, random_polarity
from .order import find_isomorphism
from .polarity import (
    closure,
    is_irreflexive,
    is_subset,
    is_symmetric,
    is_transitive,
    lam,
    members,
    non_identity_polarity,
    orthocomplement_check,
    polarity_from_json,
    rho,
    stable_set_lattice,
)
from .ultra import (
    FiniteUltrafilter,
    UltraproductStructure,
    enumerate_ultrafilters,
    lemma41_check,
    los_check,
    theta_well_defined,
    verify_axioms,
    verify_lemma_completeMac,
    verify_theorem_Fhom,
    verify_theorem_ephienlarge,
)


class SuiteOptions:
    """How exhaustive the completeness checks are, and the seed for any sampling."""

    def __init__(self, mode="auto", seed=0, samples=DEFAULT_SAMPLES, cap=None):
        if mode not in ("auto", "exhaustive", "sampled"):
            raise ValueError(mode)
        self.mode = mode
        self.seed = seed
        self.samples = samples
        self.cap = cap

    @property
    def limit(self):
        return {"auto": EXHAUSTIVE_LIMIT, "exhaustive": 1 << 30, "sampled": 0}[self.mode]

    def op_check(self, L, table, **kw):
        return check_operator(L, table, exhaustive_limit=self.limit, samples=self.samples, seed=self.seed, **kw)

    def to_json(self):
        return {"mode": self.mode, "seed": self.seed, "samples": self.samples}


DEFAULT_OPTIONS = SuiteOptions()


def _status(checks):
    return "pass" if all(c["ok"] for c in checks.values()) else "fail"


def _check(ok, **detail):
    return {"ok": bool(ok), **detail}


def _op_check(opts, L, table, **kw):
    res = opts.op_check(L, table, **kw)
    return _check(res.ok, mode=res.mode, checked=res.checked, witness=res.witness)


# -- Galois connection --------------------------------------------------------------


def galois_witness(P):
    """First failure of the Galois laws on P, or None.  Every subset of X and Y is visited."""
    xs, ys = range(1 << P.x_size), range(1 << P.y_size)
    rhos = [rho(P, A) for A in xs]
    lams = [lam(P, B) for B in ys]
    for A in xs:
        if not is_subset(A, lam(P, rhos[A])):
            return {"law": "A <= lam rho A", "A": members(A)}
        if rho(P, lam(P, rhos[A])) != rhos[A]:
            return {"law": "rho lam rho = rho", "A": members(A)}
    for B in ys:
        if not is_subset(B, rho(P, lams[B])):
            return {"law": "B <= rho lam B", "B": members(B)}
        if lam(P, rho(P, lams[B])) != lams[B]:
            return {"law": "lam rho lam = lam", "B": members(B)}
    for A in xs:
        for A2 in xs:
            if is_subset(A, A2) and not is_subset(rhos[A2], rhos[A]):
                return {"law": "rho antitone", "A": members(A), "A2": members(A2)}
    for B in ys:
        for B2 in ys:
            if is_subset(B, B2) and not is_subset(lams[B2], lams[B]):
                return {"law": "lam antitone", "B": members(B), "B2": members(B2)}
    stables = sorted(A for A in xs if closure(P, A) == A)
    lam_family = sorted(set(lams))
    if stables != lam_family:
        return {"law": "stable sets are exactly the lam(B)"}
    SL = stable_set_lattice(P)
    if SL.stables != stables or stable_set_lattice(P, method="closure").stables != stables:
        return {"law": "stable set enumeration"}
    return None


def galois_report(P):
    w = galois_witness(P)
    return {"suite": "galois", "status": "pass" if w is None else "fail", "X": P.x_size, "Y": P.y_size,
            "checks": {"galois_laws": _check(w is None, witness=w)}}


def galois_sweep(max_x=3, max_y=3, min_size=1):
    """Every relation on every shape |X|, |Y| in [min_size, max]."""
    shapes = {}
    failures = []
    for nx in range(min_size, max_x + 1):
        for ny in range(min_size, max_y + 1):
            count = 0
            for P in all_polarities(nx, ny):
                count += 1
                w = galois_witness(P)
                if w is not None:
                    failures.append({"X": nx, "Y": ny, "R": np.argwhere(P.R).tolist(), **w})
            shapes[f"{nx}x{ny}"] = count
    return {"suite": "galois", "status": "pass" if not failures else "fail", "shapes": shapes,
            "polarities": sum(shapes.values()), "failures": failures[:20], "failure_count": len(failures)}


# -- ortholattices ---------------------------------------------------------------------


def boolean_report(n):
    P = non_identity_polarity(n)
    SL = stable_set_lattice(P)
    full = P.full_x
    comp_ok = all(rho(P, A) == full & ~A for A in range(1 << n))
    return {"n": n, "size": len(SL), "size_ok": len(SL) == 1 << n, "rho_is_complement": comp_ok,
            "ortho": orthocomplement_check(P)}


def _relations_with(n, keep):
    for P in all_polarities(n, n):
        if keep(P):
            yield P


def ortho_sweep(max_n=4, max_rel_n=3):
    """Boolean case on the non-identity relation, then every irreflexive relation that is transitive (or symmetric)."""
    checks = {}
    boolean = [boolean_report(n) for n in range(1, max_n + 1)]
    checks["non_identity_boolean"] = _check(
        all(b["size_ok"] and b["rho_is_complement"] and b["ortho"] for b in boolean), cases=boolean)
    for label, pred in (("irreflexive_transitive", is_transitive), ("irreflexive_symmetric", is_symmetric)):
        total, fails = 0, []
        for n in range(1, max_rel_n + 1):
            for P in _relations_with(n, lambda P: is_irreflexive(P) and pred(P)):
                total += 1
                ok, w = orthocomplement_check(P, witness=True)
                if not ok:
                    fails.append({"n": n, "R": np.argwhere(P.R).tolist(), **w})
        checks[label] = _check(not fails, relations=total, failure_count=len(fails), failures=fails[:5])
    return {"suite": "ortho", "status": _status(checks), "checks": checks}


def ortho_report(P):
    ok, w = orthocomplement_check(P, witness=True)
    checks = {"ortholattice_laws": _check(ok, witness=w)}
    return {"suite": "ortho", "status": _status(checks), "checks": checks}


# -- Lambek frames ------------------------------------------------------------------------


def lambek_report(F, opts=DEFAULT_OPTIONS, fo_limit=4):
    """Class predicates (set level against first-order), then the residuated structure on P+.

    First-order renderings of the operations are compared on every pair of
    stable sets when |X| <= fo_limit.
    """
    checks = {}
    set_level = {"separating": fr.is_separating(F), "reduced": fr.is_reduced(F), "sections": fr.sections_stable(F)}
    fo = fr.fo_conditions(F)
    checks["class_predicates_fo_agree"] = _check(set_level == fo, set_level=set_level, first_order=fo)
    is_frame = all(set_level.values())
    checks["lambek_frame"] = _check(is_frame, witness=fr.lambek_witness(F))
    out = {"suite": "lambek", "X": F.x_size, "Y": F.y_size}
    if not is_frame:
        out.update(status=_status(checks), checks=checks)
        return out
    SL = stable_set_lattice(F)
    S = SL.stables
    bad_res = None
    for A, B, C in iproduct(S, repeat=3):
        l = is_subset(B, fr.residual_left(F, A, C))
        m = is_subset(fr.fusion(F, A, B), C)
        r = is_subset(A, fr.residual_right(F, C, B))
        if not l == m == r:
            bad_res = {"A": members(A), "B": members(B), "C": members(C), "verdicts": [l, m, r]}
            break
    checks["residuation"] = _check(bad_res is None, triples=len(S) ** 3, witness=bad_res)
    bad_disp = None
    for A, B in iproduct(S, repeat=2):
        if fr.residual_left(F, A, B) != fr.residual_left_sections(F, A, B) or \
                fr.residual_right(F, A, B) != fr.residual_right_sections(F, A, B):
            bad_disp = [members(A), members(B)]
            break
    checks["residual_display_forms_agree"] = _check(bad_disp is None, witness=bad_disp)
    bad_fo = None
    if F.x_size <= fo_limit:
        for (A, B), name in iproduct(iproduct(S, repeat=2), ("fusion", "under", "over")):
            if fr.SET_OPS[name](F, A, B) != fr.fo_op(F, name, A, B):
                bad_fo = {"op": name, "args": [members(A), members(B)]}
                break
    checks["set_level_equals_first_order"] = _check(bad_fo is None, compared=F.x_size <= fo_limit, witness=bad_fo)
    O = fr.lambek_omega(F, SL, residuals=True)
    L = O.base
    checks["fusion_complete_normal_operator"] = _op_check(opts, L, O.ops["fusion"], normal=True, complete=True)
    checks["over_complete_normal_dual_operator"] = _op_check(
        opts, L, O.ops["over"], normal=True, complete=True, dual_op=True, coord_duals=(1,))
    checks["under_complete_normal_dual_operator"] = _op_check(
        opts, L, O.ops["under"], normal=True, complete=True, dual_op=True, coord_duals=(0,))
    sig_over = is_monotone_map(L, O.ops["over"]).signature
    sig_under = is_monotone_map(L, O.ops["under"]).signature
    checks["residual_tonicity"] = _check(
        sig_over[0] in ("isotone", "constant") and sig_over[1] in ("antitone", "constant")
        and sig_under[0] in ("antitone", "constant") and sig_under[1] in ("isotone", "constant"),
        over=list(sig_over), under=list(sig_under))
    eq9 = fr.commutativity_check(F)
    commutes, w = fr.fusion_commutes(F, SL)
    checks["commutativity_sentence_iff_fusion_commutes"] = _check(
        eq9 == commutes, sentence=eq9, fusion_commutes=commutes, witness=w, triple=fr.commutativity_witness(F))
    out.update(status=_status(checks), checks=checks, stable_sets=len(S), options=opts.to_json())
    return out


def lambek_sweep(max_size=2, opts=DEFAULT_OPTIONS, handcrafted=True):
    frames = [(f"enum-{F.x_size}x{F.y_size}-{k}", F) for k, F in enumerate(fr.small_lambek_frames(max_size))]
    if handcrafted:
        frames += sorted(fr.handcrafted_lambek_frames().items())
    failures = []
    for name, F in frames:
        rep = lambek_report(F, opts)
        if rep["status"] != "pass":
            failures.append({"frame": name, "failed": sorted(k for k, c in rep["checks"].items() if not c["ok"])})
    return {"suite": "lambek", "status": "pass" if not failures else "fail", "frames": len(frames),
            "enumerated": len(frames) - (len(fr.handcrafted_lambek_frames()) if handcrafted else 0),
            "failures": failures, "options": opts.to_json()}


# -- modal frames ---------------------------------------------------------------------------


def modal_report(F, opts=DEFAULT_OPTIONS, subsets_limit=4, sigma=True):
    checks = {}
    sections = fr.sections_stable(F)
    fo = fr.fo_conditions(F)["sections"]
    checks["sections_stable"] = _check(sections, witness=fr.sections_witness(F))
    checks["sections_fo_agree"] = _check(sections == fo, first_order=fo)
    out = {"suite": "modal", "X": F.x_size, "Y": F.y_size}
    if not sections:
        out.update(status=_status(checks), checks=checks)
        return out
    SL = stable_set_lattice(F)
    domain = range(1 << F.x_size) if F.x_size <= subsets_limit else SL.stables
    bad = None
    for A in domain:
        b, d = fr.box(F, A), fr.diamond(F, A)
        if b != fr.box_sections(F, A) or d != fr.diamond_sections(F, A) \
                or b != fr.fo_op(F, "box", A) or d != fr.fo_op(F, "diamond", A):
            bad = members(A)
            break
    checks["definitions_agree"] = _check(bad is None, witness=bad)
    bad = None
    for A, B in iproduct(SL.stables, repeat=2):
        if is_subset(fr.diamond(F, A), B) != is_subset(A, fr.box(F, B)):
            bad = [members(A), members(B)]
            break
    checks["adjunction"] = _check(bad is None, pairs=len(SL) ** 2, witness=bad)
    checks["diamond_empty_is_bottom"] = _check(fr.diamond(F, 0) == SL.bottom)
    O = fr.modal_omega(F, SL)
    L = O.base
    checks["diamond_complete_normal_operator"] = _op_check(opts, L, O.ops["diamond"], normal=True, complete=True)
    checks["box_complete_normal_dual_operator"] = _op_check(opts, L, O.ops["box"], normal=True, complete=True,
                                                           dual_op=True)
    checks["isotone"] = _check(all(is_monotone_map(L, O.ops[s]).signature[0] in ("isotone", "constant")
                                   for s in ("box", "diamond")))
    if sigma:
        S = sigma_expansion(O)
        d, b = S.ops["diamond"], S.ops["box"]
        adj = all(S.base.leq[d[a], c] == S.base.leq[a, b[c]] for a in S.base.elements for c in S.base.elements)
        checks["sigma_adjunction"] = _check(adj)
        checks["sigma_transport"] = _check(omega_hom_violation(S.completion.embed, O, S) is None)
    out.update(status=_status(checks), checks=checks, stable_sets=len(SL), options=opts.to_json())
    return out


def modal_sweep(count=20, seed=0, opts=DEFAULT_OPTIONS):
    frames = fr.random_modal_frames(count, seed=seed)
    failures = []
    for k, F in enumerate(frames):
        rep = modal_report(F, opts)
        if rep["status"] != "pass":
            failures.append({"frame": k, "failed": sorted(n for n, c in rep["checks"].items() if not c["ok"])})
    ident = fr.identity_modal_frame(3)
    ident_ok = all(fr.box(ident, A) == A == fr.diamond(ident, A) for A in range(1 << 3))
    checks = {
        "random_frames": _check(not failures, frames=count, seed=seed, failures=failures,
                                shapes=[[F.x_size, F.y_size] for F in frames]),
        "identity_frame": _check(ident_ok),
    }
    return {"suite": "modal", "status": _status(checks), "checks": checks, "options": opts.to_json()}


# -- completions ------------------------------------------------------------------------------


def completion_report(L, proper_only=False, cap=32):
    c = canonical_extension(L, cap=cap, proper_only=proper_only)
    m = macneille(L)
    checks = {
        "canonical_dense": _check(is_dense(c)),
        "canonical_compact": _check(is_compact(c)),
        "canonical_embedding": _check(c.is_embedding()),
        "canonical_iso": _check(find_isomorphism(L, c.target, cap=64) is not None),
        "macneille_dense": _check(is_dense(m)),
        "macneille_compact": _check(is_compact(m)),
        "macneille_iso": _check(find_isomorphism(L, m.target, cap=64) is not None),
    }
    return {"suite": "completions", "status": _status(checks), "checks": checks, "size": L.size}


# -- ultraproducts ----------------------------------------------------------------------------


def class_operations(P):
    """Phi and Omega for the structure class named by P.kind."""
    if P.kind == "modal":
        return fr.MODAL_PHI, fr.MODAL_OMEGA
    if P.kind == "lambek":
        return fr.LAMBEK_PHI, fr.LAMBEK_OMEGA
    raise InputError(f"structure class {P.kind!r} has no operations; use 'modal' or 'lambek'")


def _random_choice(rng, sizes):
    return tuple(rng.randrange(s) for s in sizes)


def los_trials(count=100, seed=0, max_index=3, max_carrier=3, depth=3):
    """Random formulas over random factors: both sides of Los's biconditional, Lemma-style set
    definitions through theta, and theta on pairs of set choices that agree at the principal index."""
    rng = random.Random(seed)
    los_fail, def_fail, wd_fail = [], [], []
    wd_probes = 0
    for t in range(count):
        n = rng.randint(1, max_index)
        if rng.random() < 0.5:
            factors = [random_polarity(rng, rng.randint(1, max_carrier), rng.randint(1, max_carrier))
                       for _ in range(n)]
            rels = (("R", 2),)
        else:
            factors = [fr.random_modal_frame(rng, max_carrier, max_carrier) for _ in range(n)]
            rels = (("R", 2), ("T", 2))
        U = FiniteUltrafilter(n, rng.randrange(n))
        ultra = UltraproductStructure(factors, U)
        free = list(range(rng.randint(0, 2)))
        nsets = rng.randint(0, 2)
        phi = random_formula(rng, depth, free=free, relations=rels, sets=nsets, max_var=4)
        witnesses = {}
        for v in free_vars(phi):
            sort = rng.choice("XY")
            sizes = [P.x_size if sort == "X" else P.y_size for P in factors]
            witnesses[v] = (sort, _random_choice(rng, sizes))
        sets = [[rng.getrandbits(P.x_size) for P in factors] for _ in range(nsets)]
        res = los_check(factors, U, phi, witnesses, sets, ultra=ultra)
        if not res.agree:
            los_fail.append({"trial": t, "formula": to_text(phi), "principal_at": U.principal_at,
                             "quotient_side": res.quotient_side, "index_set": list(res.index_set)})
        psi = random_formula(rng, depth, free=[0], relations=rels, max_var=4)
        params = {v: ("Y", _random_choice(rng, [P.y_size for P in factors]))
                  for v in free_vars(psi) if v != 0}
        if not lemma41_check(factors, U, psi, 0, params, ultra=ultra):
            def_fail.append({"trial": t, "formula": to_text(psi)})
        alpha = [rng.getrandbits(P.x_size) for P in factors]
        alpha2 = [a if i == U.principal_at else rng.getrandbits(P.x_size)
                  for i, (a, P) in enumerate(zip(alpha, factors))]
        wd_probes += 1
        if not theta_well_defined(ultra, alpha, alpha2):
            wd_fail.append({"trial": t})
    checks = {
        "los_biconditional": _check(not los_fail, trials=count, failures=los_fail[:10]),
        "definable_sets_through_theta": _check(not def_fail, trials=count, failures=def_fail[:10]),
        "theta_well_defined": _check(not wd_fail, probes=wd_probes, failures=wd_fail[:10]),
    }
    return {"suite": "los", "status": _status(checks), "checks": checks, "seed": seed,
            "max_index": max_index, "max_carrier": max_carrier}


def _one_class(factors):
    kinds = {P.kind for P in factors}
    if len(kinds) != 1:
        raise SignatureMismatch(f"factors mix structure classes {sorted(map(str, kinds))}")
    return class_operations(factors[0])


def fhom_report(factors, principal_at=None):
    """Theta as an Omega-monomorphism, for one ultrafilter or for every one on the index set."""
    Phi, Omega = _one_class(factors)
    Us = enumerate_ultrafilters(len(factors))
    if principal_at is not None:
        Us = [U for U in Us if U.principal_at == principal_at] or [FiniteUltrafilter(len(factors), principal_at)]
    reports = {f"U{U.principal_at}": verify_theorem_Fhom(factors, U, Phi, Omega) for U in Us}
    status = "pass" if all(r["status"] == "pass" for r in reports.values()) else "fail"
    return {"suite": "fhom", "status": status, "class": factors[0].kind, "ultrafilters": reports}


def completemac_report(P, index_size=2, principal_at=0, symbols=None):
    Phi, Omega = class_operations(P)
    names = symbols or [s.name for s in Omega]
    U = FiniteUltrafilter(index_size, principal_at)
    reports = {name: verify_lemma_completeMac(P, U, name, Phi, Omega) for name in names}
    status = "pass" if all(r["status"] == "pass" for r in reports.values()) else "fail"
    return {"suite": "completemac", "status": status, "class": P.kind, "symbols": reports}


def ephienlarge_report(frames_, filter_cap=32):
    reports = []
    for P in frames_:
        Phi, Omega = class_operations(P)
        reports.append(verify_theorem_ephienlarge(P, Phi, Omega, filter_cap=filter_cap))
    status = "pass" if all(r["status"] == "pass" for r in reports) else "fail"
    return {"suite": "ephienlarge", "status": status, "frames": reports}


def axioms_report(factors, filter_cap=32):
    Phi, Omega = _one_class(factors)
    out = verify_axioms(factors, Phi, Omega, filter_cap=filter_cap)
    return {"suite": "axioms", "class": factors[0].kind, **out}


# -- instances ---------------------------------------------------------------------------------


def _frames(data, key):
    items = data.get(key)
    if not isinstance(items, list) or not items:
        raise InputError(f"instance needs a non-empty list {key!r}")
    return [polarity_from_json(item) for item in items]


def _sweep(data):
    sw = data.get("sweep")
    if sw is None:
        return None
    if sw is True:
        return {}
    if not isinstance(sw, dict):
        raise InputError("'sweep' must be true or an object of parameters")
    return sw


def _kwargs(sw, allowed):
    extra = set(sw) - set(allowed)
    if extra:
        raise InputError(f"unknown sweep parameters {sorted(extra)}")
    try:
        return {k: type(allowed[k])(v) for k, v in sw.items()}
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad sweep parameter: {exc}") from exc


SUITES = ("galois", "ortho", "lambek", "modal", "fhom", "completemac", "ephienlarge", "axioms", "los")


def run_suite(name, data, opts=DEFAULT_OPTIONS, filter_cap=32):
    """Dispatch an instance document (decoded JSON) to the named suite.

    A document with a ``sweep`` key runs the built-in family for that suite
    with the given parameters; otherwise it describes the structures to check.
    """
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if not isinstance(data, dict):
        raise InputError("instance must be a JSON object")
    sw = _sweep(data)
    if name == "galois":
        if sw is not None:
            return galois_sweep(**_kwargs(sw, {"max_x": 3, "max_y": 3, "min_size": 1}))
        return galois_report(polarity_from_json(data))
    if name == "ortho":
        if sw is not None:
            return ortho_sweep(**_kwargs(sw, {"max_n": 4, "max_rel_n": 3}))
        return ortho_report(polarity_from_json(data))
    if name == "lambek":
        if sw is not None:
            return lambek_sweep(opts=opts, **_kwargs(sw, {"max_size": 2, "handcrafted": True}))
        F = polarity_from_json(data)
        if F.kind != "lambek":
            raise InputError("lambek suite needs a structure of class 'lambek'")
        return lambek_report(F, opts)
    if name == "modal":
        if sw is not None:
            return modal_sweep(seed=opts.seed, opts=opts, **_kwargs(sw, {"count": 20}))
        F = polarity_from_json(data)
        if F.kind != "modal":
            raise InputError("modal suite needs a structure of class 'modal'")
        return modal_report(F, opts)
    if name == "los":
        kw = _kwargs(sw or {}, {"count": 100, "max_index": 3, "max_carrier": 3, "depth": 3})
        return los_trials(seed=opts.seed, **kw)
    if name == "fhom":
        at = data.get("ultrafilter")
        return fhom_report(_frames(data, "factors"), None if at is None else int(at))
    if name == "completemac":
        P = polarity_from_json(data["frame"]) if "frame" in data else None
        if P is None:
            raise InputError("completemac instance needs 'frame'")
        return completemac_report(P, int(data.get("index_size", 2)), int(data.get("ultrafilter", 0)),
                                  data.get("symbols"))
    if name == "ephienlarge":
        return ephienlarge_report(_frames(data, "frames"), filter_cap)
    return axioms_report(_frames(data, "factors"), filter_cap)


__all__ = [
    "SuiteOptions",
    "galois_report",
    "galois_sweep",
    "ortho_sweep",
    "ortho_report",
    "lambek_report",
    "lambek_sweep",
    "modal_report",
    "modal_sweep",
    "completion_report",
    "los_trials",
    "fhom_report",
    "completemac_report",
    "ephienlarge_report",
    "axioms_report",
    "run_suite",
    "SUITES",
]
