"""Compare the compiled and pure-Python bitset kernels.

Each backend runs in its own interpreter (the pure one with
STABLESETS_PURE=1) so the import-time selection is what gets measured.

    python benchmarks/bench_kernels.py [--repeat 5] [--json]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, random, sys, timeit
import numpy as np
from stablesets import kernels
from stablesets.polarity import Polarity, stable_set_lattice
from stablesets.order import boolean_lattice

repeat = int(sys.argv[1])
rng = random.Random(0)
cases = {}
for nx, ny in ((8, 8), (12, 12), (16, 12)):
    R = np.array([[rng.random() < 0.6 for _ in range(ny)] for _ in range(nx)])
    P = Polarity(nx, ny, R)
    cases[f"lambda_all {nx}x{ny}"] = lambda P=P: kernels.lambda_all(P.cols, P.x_size)
    cases[f"closure {nx}x{ny}"] = lambda P=P: kernels.closure_stables(P.cols, P.x_size)
    cases[f"stable_lattice {nx}x{ny}"] = lambda P=P: stable_set_lattice(P, verify=False)
B = boolean_lattice(6).leq
cases["tables_from_leq 64"] = lambda: kernels.tables_from_leq(B)
out = {"backend": kernels.BACKEND}
for name, fn in cases.items():
    out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
print(json.dumps(out))
"""


def run(pure, repeat):
    env = dict(os.environ)
    if pure:
        env["STABLESETS_PURE"] = "1"
    else:
        env.pop("STABLESETS_PURE", None)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True,
                          text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="print raw timings as JSON")
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    if args.json:
        print(json.dumps({"compiled": fast, "pure": slow}, indent=2, sort_keys=True))
        return
    if fast["backend"] != "cython":
        print("compiled kernels are not built; both runs used the pure backend")
    print(f"{'case':28} {'compiled s':>12} {'pure s':>12} {'speedup':>8}")
    for name in fast:
        if name == "backend":
            continue
        a, b = fast[name], slow[name]
        print(f"{name:28} {a:12.5f} {b:12.5f} {b / a:8.1f}x")


if __name__ == "__main__":
    main()
