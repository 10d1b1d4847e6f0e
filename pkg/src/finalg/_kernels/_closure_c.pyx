# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled closure backend.

Scalar worklist closure over packed product indices.  Each admitted tuple
is processed once; processing index k enumerates exactly the argument
combinations whose maximum member index is k, so every combination over
the final member set is evaluated exactly once.  Semantics match the
numpy backend bit for bit, including the step budget and the abort on
leaving the ``allowed`` mask.
"""

import numpy as np

cimport cython


cdef inline long long _ev(int op, int r, const long long *args,
                          const int[::1] sizes, int nf,
                          const int[::1] table_flat, const long long[:, ::1] offs,
                          const int[::1] dig) noexcept nogil:
    # componentwise table lookup, result re-packed mixed-radix
    cdef long long out = 0, idx
    cdef int f, j, n
    for f in range(nf):
        n = sizes[f]
        idx = 0
        for j in range(r):
            idx = idx * n + dig[args[j] * nf + f]
        out = out * n + table_flat[offs[op, f] + idx]
    return out


cdef inline int _admit(long long p, const int[::1] sizes, int nf,
                       const unsigned char[::1] allowed,
                       unsigned char[::1] in_set, int[::1] dig,
                       long long *m) noexcept nogil:
    # 0 = already present or added, 1 = outside the allowed mask
    cdef long long q
    cdef int f
    if in_set[p]:
        return 0
    if not allowed[p]:
        return 1
    in_set[p] = 1
    q = p
    for f in range(nf - 1, -1, -1):
        dig[m[0] * nf + f] = <int>(q % sizes[f])
        q = q // sizes[f]
    m[0] += 1
    return 0


cdef int _run(const int[::1] sizes, const int[::1] arities,
              const int[::1] table_flat, const long long[:, ::1] offs,
              const unsigned char[::1] allowed,
              unsigned char[::1] in_set, int[::1] dig,
              long long *m, long long max_steps) noexcept nogil:
    cdef int nf = sizes.shape[0]
    cdef int n_ops = arities.shape[0]
    cdef long long k = 0, steps = 0, combos, c, rem, p
    cdef long long args[8]
    cdef long long bounds[8]
    cdef int op, r, pos, j, slot, violation

    while k < m[0]:
        for op in range(n_ops):
            r = arities[op]
            if r == 0:
                continue
            for pos in range(r):
                # slots before pos draw from [0, k), after from [0, k]
                combos = 1
                for j in range(r):
                    if j == pos:
                        continue
                    bounds[j] = k if j < pos else k + 1
                    combos *= bounds[j]
                if combos == 0:
                    continue
                steps += combos
                if steps > max_steps:
                    return 2
                args[pos] = k
                for c in range(combos):
                    rem = c
                    for j in range(r - 1, -1, -1):
                        if j == pos:
                            continue
                        args[j] = rem % bounds[j]
                        rem = rem // bounds[j]
                    p = _ev(op, r, args, sizes, nf, table_flat, offs, dig)
                    violation = _admit(p, sizes, nf, allowed, in_set, dig, m)
                    if violation:
                        return 1
        k += 1
    return 0


def _close(sizes, arities, table_flat, offs, seed, allowed, max_steps):
    cdef const int[::1] sizes_v = np.ascontiguousarray(sizes, dtype=np.int32)
    cdef const int[::1] ar_v = np.ascontiguousarray(arities, dtype=np.int32)
    cdef const int[::1] tf_v = np.ascontiguousarray(table_flat, dtype=np.int32)
    cdef const long long[:, ::1] offs_v = np.ascontiguousarray(offs, dtype=np.int64)
    cdef const unsigned char[::1] allow_v = np.ascontiguousarray(allowed, dtype=np.uint8)

    cdef int nf = sizes_v.shape[0]
    cdef long long total = 1
    cdef int f
    for f in range(nf):
        total *= sizes_v[f]

    in_set_arr = np.zeros(total, dtype=np.uint8)
    dig_arr = np.zeros(total * nf, dtype=np.int32)
    cdef unsigned char[::1] in_set = in_set_arr
    cdef int[::1] dig = dig_arr

    cdef long long m = 0
    cdef long long p
    cdef long long ms = max_steps
    cdef int status = 0

    seed_arr = np.ascontiguousarray(seed, dtype=np.int32)
    cdef const int[:, ::1] seed_v = seed_arr
    cdef long long i
    cdef int j
    for i in range(seed_v.shape[0]):
        p = 0
        for j in range(nf):
            p = p * sizes_v[j] + seed_v[i, j]
        if _admit(p, sizes_v, nf, allow_v, in_set, dig, &m):
            status = 1
            break

    if status == 0:
        with nogil:
            status = _run(sizes_v, ar_v, tf_v, offs_v, allow_v,
                          in_set, dig, &m, ms)

    if status != 0:
        return status, np.zeros((0, nf), dtype=np.int32)
    members = dig_arr[: m * nf].reshape(m, nf).copy()
    order = np.lexsort(members.T[::-1])
    return 0, np.ascontiguousarray(members[order])
