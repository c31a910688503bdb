# distutils: language = c++
"""Compiled bitset kernels (masks up to 64 bits wide).

Mirrors ``_pykernels`` exactly; ``kernels`` picks one at import.
"""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int32_t, uint8_t, uint64_t
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

cnp.import_array()


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline uint64_t full_mask(int n) noexcept nogil:
    if n >= 64:
        return <uint64_t>0xFFFFFFFFFFFFFFFF
    return ((<uint64_t>1) << n) - 1


cdef inline uint64_t meet_rows(const uint64_t[:] rows, uint64_t a, uint64_t start) noexcept nogil:
    cdef uint64_t acc = start
    while a:
        acc &= rows[__builtin_ctzll(a)]
        a &= a - 1
    return acc


cdef inline Py_ssize_t bsearch(const uint64_t[:] arr, uint64_t key) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = arr.shape[0] - 1, mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if arr[mid] == key:
            return mid
        if arr[mid] < key:
            lo = mid + 1
        else:
            hi = mid - 1
    return -1


def rho(const uint64_t[:] rows, uint64_t a, int ny):
    return meet_rows(rows, a, full_mask(ny))


def lam(const uint64_t[:] cols, uint64_t b, int nx):
    return meet_rows(cols, b, full_mask(nx))


def lambda_all(const uint64_t[:] cols, int nx):
    """lam(B) for every B subset of Y, indexed by the mask of B."""
    cdef Py_ssize_t ny = cols.shape[0]
    cdef Py_ssize_t total = (<Py_ssize_t>1) << ny
    out = np.empty(total, dtype=np.uint64)
    cdef uint64_t[:] o = out
    cdef Py_ssize_t b
    with nogil:
        o[0] = full_mask(nx)
        for b in range(1, total):
            o[b] = o[b & (b - 1)] & cols[__builtin_ctzll(<unsigned long long>b)]
    return out


def closure_stables(const uint64_t[:] cols, int nx):
    """Intersection closure of the column sets together with X; sorted."""
    cdef unordered_set[uint64_t] seen
    cdef vector[uint64_t] queue
    cdef Py_ssize_t head = 0, y, ny = cols.shape[0]
    cdef uint64_t s, t
    with nogil:
        s = full_mask(nx)
        seen.insert(s)
        queue.push_back(s)
        while head < <Py_ssize_t>queue.size():
            s = queue[head]
            head += 1
            for y in range(ny):
                t = s & cols[y]
                if seen.count(t) == 0:
                    seen.insert(t)
                    queue.push_back(t)
    out = np.empty(queue.size(), dtype=np.uint64)
    cdef uint64_t[:] o = out
    for y in range(<Py_ssize_t>queue.size()):
        o[y] = queue[y]
    out.sort()
    return out


def stable_tables(const uint64_t[:] stables, const uint64_t[:] rows, const uint64_t[:] cols,
                  int nx, int ny):
    """Order, meet and join tables of a sorted list of stable sets."""
    cdef Py_ssize_t n = stables.shape[0], i, j
    leq = np.zeros((n, n), dtype=np.bool_)
    meet = np.empty((n, n), dtype=np.int32)
    join = np.empty((n, n), dtype=np.int32)
    cdef uint8_t[:, :] lq = leq.view(np.uint8)
    cdef int32_t[:, :] mt = meet
    cdef int32_t[:, :] jn = join
    cdef uint64_t a, b, fy = full_mask(ny), fx = full_mask(nx), r
    with nogil:
        for i in range(n):
            a = stables[i]
            for j in range(i, n):
                b = stables[j]
                lq[i, j] = (a & ~b) == 0
                lq[j, i] = (b & ~a) == 0
                mt[i, j] = <int32_t>bsearch(stables, a & b)
                mt[j, i] = mt[i, j]
                r = meet_rows(rows, a | b, fy)
                jn[i, j] = <int32_t>bsearch(stables, meet_rows(cols, r, fx))
                jn[j, i] = jn[i, j]
    return leq, meet, join


def tables_from_leq(const uint8_t[:, :] leq):
    """glb/lub tables by scanning bounds; -1 where no glb/lub exists."""
    cdef Py_ssize_t n = leq.shape[0], a, b, c
    cdef int32_t best_m, best_j
    meet = np.empty((n, n), dtype=np.int32)
    join = np.empty((n, n), dtype=np.int32)
    cdef int32_t[:, :] mt = meet
    cdef int32_t[:, :] jn = join
    with nogil:
        for a in range(n):
            for b in range(a, n):
                best_m = -1
                best_j = -1
                for c in range(n):
                    if leq[c, a] and leq[c, b]:
                        if best_m < 0 or leq[best_m, c]:
                            best_m = <int32_t>c
                    if leq[a, c] and leq[b, c]:
                        if best_j < 0 or leq[c, best_j]:
                            best_j = <int32_t>c
                for c in range(n):
                    if best_m >= 0 and leq[c, a] and leq[c, b] and not leq[c, best_m]:
                        best_m = -1
                    if best_j >= 0 and leq[a, c] and leq[b, c] and not leq[best_j, c]:
                        best_j = -1
                mt[a, b] = best_m
                mt[b, a] = best_m
                jn[a, b] = best_j
                jn[b, a] = best_j
    return meet, join
