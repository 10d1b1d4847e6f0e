"""Closure kernels for product subuniverse generation.

Two interchangeable backends compute the same closure: a Cython worklist
(``_closure_c``) and a vectorized numpy one (``_closure_py``).  Both accept
identical flattened inputs and return an identical sorted member list, so
every caller is backend-agnostic.  Selection happens once at import time,
honouring the ``FINALG_KERNEL`` environment variable:

* ``auto`` (default): compiled backend if importable, else numpy
* ``c``: compiled backend, raising if the extension is missing
* ``py``: numpy backend

The backend protocol is ``_close(sizes, arities, table_flat, offs, seed,
allowed, max_steps) -> (status, rows)`` over int32 coordinate rows, where
status 0 means the closure completed inside ``allowed``, 1 means some
produced tuple left ``allowed``, and 2 means the step budget ran out.
The public ``close_product`` speaks packed product indices on both ends.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import ResourceLimitError

_MODE = os.environ.get("FINALG_KERNEL", "auto").strip().lower()
if _MODE not in ("auto", "c", "py"):
    raise RuntimeError(f"FINALG_KERNEL must be auto, c or py, got {_MODE!r}")

_c_close = None
if _MODE in ("auto", "c"):
    try:
        from ._closure_c import _close as _c_close  # type: ignore[attr-defined]
    except ImportError:
        if _MODE == "c":
            raise RuntimeError(
                "FINALG_KERNEL=c but the compiled closure extension is not built"
            )

from ._closure_py import _close as _py_close

if _c_close is not None:
    KERNEL = "c"
    _default_close = _c_close
else:
    KERNEL = "py"
    _default_close = _py_close


def available_backends() -> tuple[str, ...]:
    """Names of the importable backends, compiled one first when present."""
    return ("c", "py") if _c_close is not None else ("py",)


def _prepare(sizes, arities, tables):
    """Flatten per-factor operation tables into the backend input layout.

    ``tables[op][f]`` is the row-major table of operation ``op`` interpreted
    in factor ``f``.  Returns int32/int64 arrays plus the factor count.
    """
    sizes = np.asarray(sizes, dtype=np.int32)
    arities = np.asarray(arities, dtype=np.int32)
    nf = len(sizes)
    n_ops = len(arities)
    if len(tables) != n_ops:
        raise ValueError("one table row per operation required")
    flat_parts: list[np.ndarray] = []
    offs = np.zeros((n_ops, nf), dtype=np.int64)
    pos = 0
    for i in range(n_ops):
        if len(tables[i]) != nf:
            raise ValueError("one table per factor required")
        for f in range(nf):
            tab = np.asarray(tables[i][f], dtype=np.int32)
            cells = int(sizes[f]) ** int(arities[i])
            if tab.shape != (cells,):
                raise ValueError(
                    f"table {i} factor {f}: expected {cells} cells, got {tab.shape}"
                )
            offs[i, f] = pos
            flat_parts.append(tab)
            pos += cells
    table_flat = (
        np.concatenate(flat_parts) if flat_parts else np.zeros(0, dtype=np.int32)
    )
    return sizes, arities, table_flat, offs, nf


def _unpack_rows(flat: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    rows = np.empty((flat.size, len(sizes)), dtype=np.int32)
    rem = flat.astype(np.int64, copy=True)
    for f in range(len(sizes) - 1, -1, -1):
        n = int(sizes[f])
        rows[:, f] = rem % n
        rem = rem // n
    return rows


def _pack_rows(rows: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    out = np.zeros(rows.shape[0], dtype=np.int64)
    for f in range(rows.shape[1]):
        out = out * int(sizes[f]) + rows[:, f]
    return out


def close_product(sizes, arities, tables, seed, allowed=None,
                  max_steps: int = 200_000_000, backend: str | None = None):
    """Close ``seed`` under the given operations acting coordinatewise.

    Members live in the product of universes ``range(sizes[f])`` and are
    exchanged as packed indices (factor 0 most significant).  ``allowed``,
    when given, is a uint8/bool mask over packed indices; producing a tuple
    outside it aborts with ``(False, empty)``.  Nullary operations add their
    constant tuples to the seed.  Returns ``(ok, members)`` with members an
    ascending int64 array of packed indices.
    """
    sizes, arities, table_flat, offs, nf = _prepare(sizes, arities, tables)

    total = 1
    for s in sizes:
        total *= int(s)
    seed_flat = np.asarray(seed, dtype=np.int64).ravel()
    if seed_flat.size and (seed_flat.min() < 0 or seed_flat.max() >= total):
        raise ValueError("seed index out of range")
    if allowed is None:
        allowed_arr = np.ones(total, dtype=np.uint8)
    else:
        allowed_arr = np.ascontiguousarray(allowed, dtype=np.uint8)
        if allowed_arr.shape != (total,):
            raise ValueError("allowed mask has wrong length")

    seed_rows = _unpack_rows(np.unique(seed_flat), sizes)

    # nullary operations seed their constant tuple
    const_rows = [
        [int(table_flat[offs[i, f]]) for f in range(nf)]
        for i in range(len(arities))
        if arities[i] == 0
    ]
    if const_rows:
        seed_rows = np.unique(
            np.concatenate([seed_rows, np.asarray(const_rows, dtype=np.int32)]),
            axis=0,
        )

    if seed_rows.shape[0] == 0:
        return True, np.zeros(0, dtype=np.int64)

    fn = _default_close
    if backend is not None:
        if backend == "c":
            if _c_close is None:
                raise RuntimeError("compiled closure backend not available")
            fn = _c_close
        elif backend == "py":
            fn = _py_close
        else:
            raise ValueError(f"unknown backend {backend!r}")

    status, rows = fn(sizes, arities, table_flat, offs, seed_rows,
                      allowed_arr, max_steps)
    if status == 2:
        raise ResourceLimitError(
            f"product closure exceeded {max_steps} evaluation steps"
        )
    if status == 1:
        return False, np.zeros(0, dtype=np.int64)
    return True, _pack_rows(rows, sizes)
