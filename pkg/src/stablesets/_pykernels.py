"""Pure-Python bitset kernels.

Same contracts as the compiled ``_ckernels`` module, but on Python ints so
masks of any width work.
"""

import numpy as np


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def rho(rows, a, ny):
    acc = (1 << ny) - 1
    for x in _bits(a):
        acc &= rows[x]
    return acc


def lam(cols, b, nx):
    acc = (1 << nx) - 1
    for y in _bits(b):
        acc &= cols[y]
    return acc


def lambda_all(cols, nx):
    ny = len(cols)
    out = [0] * (1 << ny)
    out[0] = (1 << nx) - 1
    for b in range(1, 1 << ny):
        low = b & -b
        out[b] = out[b ^ low] & cols[low.bit_length() - 1]
    return out


def closure_stables(cols, nx):
    full = (1 << nx) - 1
    seen = {full}
    queue = [full]
    for s in queue:
        for c in cols:
            t = s & c
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return sorted(seen)


def stable_tables(stables, rows, cols, nx, ny):
    n = len(stables)
    index = {s: i for i, s in enumerate(stables)}
    leq = np.zeros((n, n), dtype=bool)
    meet = np.empty((n, n), dtype=np.int32)
    join = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(stables):
        for j in range(i, n):
            b = stables[j]
            leq[i, j] = (a & ~b) == 0
            leq[j, i] = (b & ~a) == 0
            meet[i, j] = meet[j, i] = index.get(a & b, -1)
            closed = lam(cols, rho(rows, a | b, ny), nx)
            join[i, j] = join[j, i] = index.get(closed, -1)
    return leq, meet, join


def tables_from_leq(leq):
    leq = [[bool(v) for v in row] for row in np.asarray(leq)]
    n = len(leq)
    meet = np.empty((n, n), dtype=np.int32)
    join = np.empty((n, n), dtype=np.int32)
    for a in range(n):
        for b in range(a, n):
            lower = [c for c in range(n) if leq[c][a] and leq[c][b]]
            upper = [c for c in range(n) if leq[a][c] and leq[b][c]]
            glb = next((g for g in lower if all(leq[c][g] for c in lower)), -1)
            lub = next((u for u in upper if all(leq[u][c] for c in upper)), -1)
            meet[a, b] = meet[b, a] = glb
            join[a, b] = join[b, a] = lub
    return meet, join
