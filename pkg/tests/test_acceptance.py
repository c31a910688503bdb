"""Acceptance criteria, one test each.  Each prints a single PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for just the summary
lines, or under pytest where the lines also appear in the terminal summary.
"""

import json
import random
import subprocess
import sys
from pathlib import Path

import pytest

from stablesets import frames as fr
from stablesets import suites
from stablesets.completions import (
    canonical_extension,
    is_compact,
    is_dense,
    is_join_dense,
    is_meet_dense,
    lower_can_ext,
    macneille,
    upper_can_ext,
)
from stablesets.generators import random_isotone_map, random_lattices
from stablesets.order import find_isomorphism
from stablesets.ultra import enumerate_ultrafilters, verify_lemma_completeMac, verify_theorem_Fhom

DATA = Path(__file__).resolve().parent.parent / "data"
SEED = 0
RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    if tr is not None:
        tr.write_line("")
        for n in sorted(RESULTS):
            tr.write_line(RESULTS[n])


def failed_checks(rep):
    return sorted(k for k, c in rep.get("checks", {}).items() if not c["ok"])


def test_criterion_1_galois():
    rep = suites.galois_sweep(3, 3)
    ok = rep["status"] == "pass" and rep["shapes"]["3x3"] == 512
    assert record(1, ok, f"{rep['polarities']} polarities over shapes 1..3 x 1..3, "
                         f"{rep['failure_count']} failures")


def test_criterion_2_boolean_and_ortho():
    rep = suites.ortho_sweep(max_n=4, max_rel_n=3)
    c = rep["checks"]
    detail = (f"boolean n<=4 {'ok' if c['non_identity_boolean']['ok'] else 'FAILED'}; "
              f"irreflexive transitive: {c['irreflexive_transitive']['failure_count']} of "
              f"{c['irreflexive_transitive']['relations']} fail; "
              f"irreflexive symmetric: {c['irreflexive_symmetric']['failure_count']} of "
              f"{c['irreflexive_symmetric']['relations']} fail")
    ok = c["non_identity_boolean"]["ok"] and c["irreflexive_transitive"]["ok"]
    assert record(2, ok, detail), json.dumps(c["irreflexive_transitive"]["failures"][:2])


def test_criterion_3_completions():
    rng = random.Random(SEED)
    lattices = random_lattices(20, seed=SEED, max_size=6)
    bad = []
    for k, L in enumerate(lattices):
        c = canonical_extension(L)
        m = macneille(L)
        if not (c.is_embedding() and is_dense(c) and is_compact(c) and find_isomorphism(L, c.target, cap=64)):
            bad.append((k, "canonical"))
        if not (m.is_embedding() and is_dense(m) and is_compact(m) and is_join_dense(m) and is_meet_dense(m)
                and find_isomorphism(L, m.target, cap=64)):
            bad.append((k, "macneille"))
        f = random_isotone_map(rng, L, L)
        lo, hi = lower_can_ext(f, c, c), upper_can_ext(f, c, c)
        if lo.table != hi.table or any(lo(c.embed(a)) != c.embed(f(a)) for a in L.elements):
            bad.append((k, "lifting"))
    sizes = sorted(L.size for L in lattices)
    assert record(3, not bad, f"20 lattices (sizes {sizes[0]}..{sizes[-1]}), 20 isotone maps, failures {bad}")


def test_criterion_4_lambek():
    rep = suites.lambek_sweep(max_size=2, handcrafted=True)
    hand = rep["frames"] - rep["enumerated"]
    ok = rep["status"] == "pass" and hand >= 5
    assert record(4, ok, f"{rep['enumerated']} enumerated + {hand} handcrafted frames, "
                         f"{len(rep['failures'])} failing: {rep['failures'][:3]}")


def test_criterion_5_modal():
    rep = suites.modal_sweep(count=20, seed=SEED)
    c = rep["checks"]["random_frames"]
    ok = rep["status"] == "pass" and all(x <= 4 and y <= 4 for x, y in c["shapes"])
    assert record(5, ok, f"{c['frames']} frames, identity frame "
                         f"{'ok' if rep['checks']['identity_frame']['ok'] else 'FAILED'}, failures {c['failures']}")


def test_criterion_6_los_theta():
    los = suites.los_trials(count=100, seed=SEED, max_index=3, max_carrier=3)
    modal = fr.random_modal_frames(2, seed=SEED + 1, max_x=3, max_y=3)
    hand = fr.handcrafted_lambek_frames()
    lambek = [hand["boolean3-skew"], hand["m2-squared-join"]]
    fhom = {}
    for label, factors, Phi, Omega in (("modal", modal, fr.MODAL_PHI, fr.MODAL_OMEGA),
                                        ("lambek", lambek, fr.LAMBEK_PHI, fr.LAMBEK_OMEGA)):
        for U in enumerate_ultrafilters(2):
            fhom[f"{label}/U{U.principal_at}"] = verify_theorem_Fhom(factors, U, Phi, Omega)["status"]
    ok = los["status"] == "pass" and all(s == "pass" for s in fhom.values())
    assert record(6, ok, f"Los {los['checks']['los_biconditional']['trials']} trials, "
                         f"theta probes {los['checks']['theta_well_defined']['probes']}, "
                         f"failing {failed_checks(los)}; Fhom |I|=2 {fhom}")


def test_criterion_7_completemac_ephienlarge():
    F = fr.random_modal_frames(1, seed=SEED + 2, max_x=4, max_y=4)[0]
    mac = {}
    for U in enumerate_ultrafilters(2):
        for sym in ("diamond", "box"):
            mac[f"{sym}/U{U.principal_at}"] = verify_lemma_completeMac(
                F, U, sym, fr.MODAL_PHI, fr.MODAL_OMEGA)["status"]
    frames_ = (fr.small_lambek_frames(2) + list(fr.handcrafted_lambek_frames().values())
               + fr.random_modal_frames(20, seed=SEED))
    rep = suites.ephienlarge_report(frames_)
    bad = [k for k, r in enumerate(rep["frames"]) if r["status"] != "pass"]
    ok = all(s == "pass" for s in mac.values()) and not bad
    assert record(7, ok, f"completeMac {mac}; monomorphism found for {len(frames_) - len(bad)} of "
                         f"{len(frames_)} frames")


def _cli(*argv):
    cmd = [sys.executable, "-c", "from stablesets.cli import main; main()", *map(str, argv)]
    return subprocess.run(cmd, capture_output=True)


def test_criterion_8_axioms():
    outcomes = {}
    for name in ("axioms_modal.json", "axioms_modal3.json"):
        proc = _cli("check", "axioms", DATA / name)
        doc = json.loads(proc.stdout)
        a1 = doc["axioms"]["A1"]["checks"]
        outcomes[name] = {
            "exit": proc.returncode,
            **{k: v["status"] for k, v in doc["axioms"].items()},
            "A1-injective": a1["injective_half"]["ok"],
            "A1-surjective": a1["surjective_half"]["ok"],
        }
    ok = all(o["exit"] == 0 and all(v in ("pass", True, 0) for v in o.values()) for o in outcomes.values())
    assert record(8, ok, json.dumps(outcomes, sort_keys=True))


DETERMINISM_RUNS = [
    ("galois", "galois_sweep.json"),
    ("ortho", "ortho_sweep.json"),
    ("lambek", "frame.json"),
    ("modal", "modal_sweep.json"),
    ("los", "los.json"),
    ("fhom", "fhom_modal.json"),
    ("completemac", "completemac_modal.json"),
    ("ephienlarge", "ephienlarge.json"),
    ("axioms", "axioms_modal.json"),
]


def test_criterion_9_determinism():
    differ = []
    for suite, inst in DETERMINISM_RUNS:
        for extra in ((), ("--sampled",)):
            args = ("--seed", 7, *extra, "check", suite, DATA / inst)
            a, b = _cli(*args), _cli(*args)
            if a.stdout != b.stdout or a.returncode != b.returncode or not a.stdout:
                differ.append(f"{suite}{''.join(extra)}")
    assert record(9, not differ, f"{2 * len(DETERMINISM_RUNS)} suite runs repeated, differing: {differ}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
