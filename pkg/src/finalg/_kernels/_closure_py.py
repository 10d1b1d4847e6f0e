"""Vectorized closure backend.

Frontier-batch generation: each round applies every operation to all
argument combinations that involve at least one tuple from the previous
round's frontier, evaluating whole batches with numpy fancy indexing.
Grids are chunked so peak memory stays bounded even for arity-3 operations
over a few thousand members.
"""

from __future__ import annotations

import numpy as np

# cap on grid cells materialized per evaluation batch
_CHUNK = 1 << 22


def _pack(rows: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    """Mixed-radix pack of coordinate rows into flat product indices."""
    out = np.zeros(rows.shape[0], dtype=np.int64)
    for f in range(rows.shape[1]):
        out = out * int(sizes[f]) + rows[:, f]
    return out


def _eval_batch(args, arity, nf, sizes, table_flat, offs, op):
    """Componentwise evaluation of one operation on stacked argument rows.

    ``args`` is a list of ``arity`` (m, nf) coordinate arrays.  Returns the
    (m, nf) array of result rows.
    """
    m = args[0].shape[0]
    out = np.empty((m, nf), dtype=np.int32)
    for f in range(nf):
        n = int(sizes[f])
        idx = np.zeros(m, dtype=np.int64)
        for j in range(arity):
            idx = idx * n + args[j][:, f]
        base = offs[op, f]
        out[:, f] = table_flat[base + idx]
    return out


def _close(sizes, arities, table_flat, offs, seed, allowed, max_steps):
    sizes = np.asarray(sizes, dtype=np.int32)
    nf = len(sizes)
    members = np.unique(np.asarray(seed, dtype=np.int32), axis=0)

    packed = _pack(members, sizes)
    if not np.all(allowed[packed]):
        return 1, np.zeros((0, nf), dtype=np.int32)
    total = int(np.prod(sizes.astype(np.int64)))
    seen = np.zeros(total, dtype=bool)
    seen[packed] = True

    frontier = members
    steps = 0
    n_ops = len(arities)
    while frontier.shape[0] > 0:
        new_packed: list[np.ndarray] = []
        m_all = members.shape[0]
        m_new = frontier.shape[0]
        for op in range(n_ops):
            ar = int(arities[op])
            if ar == 0:
                continue
            # argument grids where slot ``pos`` draws from the frontier and
            # every other slot from the full member snapshot; restricting
            # earlier slots to old members for pos > 0 avoids duplicates
            for pos in range(ar):
                dims = []
                for j in range(ar):
                    if j == pos:
                        dims.append(m_new)
                    elif j < pos:
                        dims.append(m_all - m_new)
                    else:
                        dims.append(m_all)
                count = 1
                for d in dims:
                    count *= d
                if count == 0:
                    continue
                steps += count
                if steps > max_steps:
                    return 2, np.zeros((0, nf), dtype=np.int32)
                old = members[: m_all - m_new]
                sources = [
                    frontier if j == pos else (old if j < pos else members)
                    for j in range(ar)
                ]
                for lo in range(0, count, _CHUNK):
                    hi = min(lo + _CHUNK, count)
                    flat = np.arange(lo, hi, dtype=np.int64)
                    args = []
                    rem = flat
                    for j in range(ar - 1, -1, -1):
                        d = dims[j]
                        args.append(sources[j][rem % d])
                        rem = rem // d
                    args.reverse()
                    res = _eval_batch(args, ar, nf, sizes, table_flat,
                                      offs, op)
                    pk = _pack(res, sizes)
                    fresh = pk[~seen[pk]]
                    if fresh.size:
                        fresh = np.unique(fresh)
                        if not np.all(allowed[fresh]):
                            return 1, np.zeros((0, nf), dtype=np.int32)
                        seen[fresh] = True
                        new_packed.append(fresh)
        if not new_packed:
            break
        flat_new = np.concatenate(new_packed)
        rows = np.empty((flat_new.size, nf), dtype=np.int32)
        rem = flat_new.copy()
        for f in range(nf - 1, -1, -1):
            n = int(sizes[f])
            rows[:, f] = rem % n
            rem = rem // n
        # frontier must sit at the tail of members for the grid split above
        members = np.concatenate([members, rows])
        frontier = rows

    order = np.lexsort(members.T[::-1])
    return 0, np.ascontiguousarray(members[order])
