"""Command-line front end.

Every command prints one JSON document (sorted keys) to stdout, except
``export-dot`` which prints Graphviz source.  Exit status: 0 on success,
1 when a verification fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .completions import DEFAULT_FILTER_CAP, canonical_extension, completion_to_dot, completion_to_json, macneille
from .errors import (
    HypothesisFailed,
    InputError,
    NotClosed,
    NotIsotone,
    NotMonotone,
    WorkbenchError,
)
from .expansions import DEFAULT_SAMPLES
from .formula import Signature, parse_file, to_text
from .order import lattice_from_json, lattice_to_json, to_dot
from .polarity import DEFAULT_Y_CAP, members, polarity_from_json, stable_set_lattice
from .semantics import InterpretedStructure, define_set
from .suites import SUITES, SuiteOptions, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
VERIFICATION_ERRORS = (HypothesisFailed, NotClosed, NotMonotone, NotIsotone)


class JsonArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as error JSON on stdout instead of plain text."""

    def error(self, message):
        _emit({"error": "UsageError", "message": message}, None)
        sys.exit(EXIT_INPUT)


def _emit(doc, path):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc


def _read_text(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def parse_subsets(text):
    """``"0,1;1;"`` -> [[0, 1], [1], []]: semicolons separate sets, commas separate elements."""
    if text is None or text.strip() == "":
        return []
    out = []
    for part in text.split(";"):
        part = part.strip()
        try:
            out.append(sorted({int(e) for e in part.split(",") if e.strip()}) if part else [])
        except ValueError as exc:
            raise InputError(f"bad subset {part!r}: element indices must be integers") from exc
    return out


def bitset(mask, width):
    """Characteristic string, element 0 first."""
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(width))


def _mask(elements, size):
    m = 0
    for e in elements:
        if not 0 <= e < size:
            raise InputError(f"element {e} is outside X = {{0..{size - 1}}}")
        m |= 1 << e
    return m


# -- commands ----------------------------------------------------------------------------


def cmd_stable_lattice(args):
    P = polarity_from_json(_load_json(args.structure))
    SL = stable_set_lattice(P, cap=args.cap or DEFAULT_Y_CAP)
    return {
        "X": P.x_size,
        "Y": P.y_size,
        "size": len(SL),
        "stables": [members(s) for s in SL.stables],
        "bottom": SL.lattice.bot,
        "top": SL.lattice.top,
        "lattice": lattice_to_json(SL.lattice),
    }, True


def cmd_canonical_ext(args):
    L = lattice_from_json(_load_json(args.lattice))
    c = canonical_extension(L, cap=args.cap or DEFAULT_FILTER_CAP, proper_only=args.proper_only)
    out = completion_to_json(c)
    out["filters"] = len(c.polarity.filters)
    out["ideals"] = len(c.polarity.ideals)
    out["proper_only"] = args.proper_only
    return out, True


def cmd_macneille(args):
    L = lattice_from_json(_load_json(args.lattice))
    return completion_to_json(macneille(L)), True


def cmd_define(args):
    P = polarity_from_json(_load_json(args.structure))
    sets = [_mask(s, P.x_size) for s in parse_subsets(args.args)]
    sig = Signature.of(P, len(sets))
    formulas = parse_file(_read_text(args.formula), sig)
    if not formulas:
        raise InputError(f"{args.formula} holds no formula")
    M = InterpretedStructure(P, sets)
    results = []
    for phi in formulas:
        m = define_set(M, phi)
        results.append({"formula": to_text(phi), "mask": m, "bitset": bitset(m, P.x_size), "members": members(m)})
    return {"X": P.x_size, "args": [members(s) for s in sets], "results": results}, True


def cmd_check(args):
    opts = SuiteOptions(mode=args.mode, seed=args.seed, samples=args.samples)
    report = run_suite(args.suite, _load_json(args.instance), opts, filter_cap=args.cap or DEFAULT_FILTER_CAP)
    report["options"] = {**opts.to_json(), "cap": args.cap, "proper_only": args.proper_only}
    return report, report.get("status") == "pass"


def cmd_export_dot(args):
    data = _load_json(args.input)
    if not isinstance(data, dict):
        raise InputError("export-dot needs a JSON object")
    if args.completion:
        L = lattice_from_json(data)
        c = canonical_extension(L, cap=args.cap or DEFAULT_FILTER_CAP, proper_only=args.proper_only) \
            if args.completion == "canonical" else macneille(L)
        return completion_to_dot(c)
    if "X" in data:
        P = polarity_from_json(data)
        SL = stable_set_lattice(P, cap=args.cap or DEFAULT_Y_CAP)
        labels = {k: "{" + ",".join(map(str, members(s))) + "}" for k, s in enumerate(SL.stables)}
        return to_dot(SL.lattice, labels=labels, name="stables")
    L = lattice_from_json(data)
    if "embedding" in data:
        image = set(data["embedding"])
        closed, opened = set(data.get("closed", [])), set(data.get("open", []))
        ann = {}
        for e in L.elements:
            if e in image:
                ann[e] = {"shape": "doublecircle"}
            elif e in closed and e not in opened:
                ann[e] = {"shape": "box"}
            elif e in opened and e not in closed:
                ann[e] = {"shape": "diamond"}
        return to_dot(L, name="completion", annotate=ann)
    return to_dot(L)


# -- parser --------------------------------------------------------------------------------


def _common(defaults=True):
    """Global options.  The copy attached to each subcommand suppresses its
    defaults so a flag given before the subcommand is not overwritten."""
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--cap", type=int, default=d(None), help="size cap for the enumeration the command performs")
    g.add_argument("--seed", type=int, default=d(0), help="seed for sampled checks and random families")
    g.add_argument("--proper-only", action="store_true", default=d(False), help="drop the improper filter and ideal")
    g.add_argument("--json-out", metavar="PATH", default=d(None), help="also write the result to PATH")
    g.add_argument("--samples", type=int, default=d(DEFAULT_SAMPLES), help="subsets per fixing in sampled mode")
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", dest="mode", action="store_const", const="exhaustive", default=d("auto"))
    mode.add_argument("--sampled", dest="mode", action="store_const", const="sampled", default=d("auto"))
    return p


def build_parser():
    parser = JsonArgumentParser(prog="stablesets", description="Stable set lattices of polarities and their completions.",
                                parents=[_common()])
    common = _common(defaults=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=JsonArgumentParser)
    sub.required = True

    p = sub.add_parser("stable-lattice", parents=[common], help="the lattice of stable sets of a structure")
    p.add_argument("structure")
    p.set_defaults(func=cmd_stable_lattice)

    p = sub.add_parser("canonical-ext", parents=[common], help="canonical extension of a lattice")
    p.add_argument("lattice")
    p.set_defaults(func=cmd_canonical_ext)

    p = sub.add_parser("macneille", parents=[common], help="MacNeille completion of a lattice or poset")
    p.add_argument("lattice")
    p.set_defaults(func=cmd_macneille)

    p = sub.add_parser("define", parents=[common], help="subsets of X defined by the formulas in a file")
    p.add_argument("structure")
    p.add_argument("formula", help="file with one formula per line")
    p.add_argument("--args", default="", help='set arguments S0;S1;..., e.g. "0,1;1"')
    p.set_defaults(func=cmd_define)

    p = sub.add_parser("check", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("instance")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("export-dot", parents=[common], help="Graphviz source for a lattice, completion or P+")
    p.add_argument("input")
    p.add_argument("--completion", choices=("canonical", "macneille"),
                   help="draw this completion of the input lattice")
    p.set_defaults(func=cmd_export_dot)
    return parser


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.cap is not None and args.cap < 1:
            raise InputError("--cap must be positive")
        if args.samples < 1:
            raise InputError("--samples must be positive")
        result = args.func(args)
    except VERIFICATION_ERRORS as exc:
        _emit(exc.to_json(), args.json_out)
        return EXIT_FAIL
    except WorkbenchError as exc:
        _emit(exc.to_json(), args.json_out)
        return EXIT_INPUT
    except (KeyError, TypeError, ValueError) as exc:
        # a well-formed JSON document with the wrong shape
        _emit({"error": "InputError", "message": f"malformed instance: {exc!r}"}, args.json_out)
        return EXIT_INPUT
    if isinstance(result, str):
        if args.json_out:
            with open(args.json_out, "w") as fh:
                fh.write(result)
        sys.stdout.write(result)
        return EXIT_OK
    doc, ok = result
    _emit(doc, args.json_out)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
