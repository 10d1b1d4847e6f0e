"""Closure backend agreement and selection."""

import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

from finalg._kernels import KERNEL, available_backends, close_product

HAVE_C = "c" in available_backends()


def _brute_close(sizes, arities, tables, seed, allowed=None):
    """Reference worklist closure over unpacked tuples."""
    def unpack(idx):
        out = []
        for s in reversed(sizes):
            out.append(idx % s)
            idx //= s
        return tuple(reversed(out))

    def pack(tup):
        idx = 0
        for s, v in zip(sizes, tup):
            idx = idx * s + v
        return idx

    members = {unpack(i) for i in seed}
    changed = True
    while changed:
        changed = False
        for op_i, ar in enumerate(arities):
            if ar == 0:
                tup = tuple(tables[op_i][f][0] for f in range(len(sizes)))
                if tup not in members:
                    members.add(tup)
                    changed = True
                continue
            for args in itertools.product(sorted(members), repeat=ar):
                tup = []
                for f, s in enumerate(sizes):
                    idx = 0
                    for a in args:
                        idx = idx * s + a[f]
                    tup.append(tables[op_i][f][idx])
                tup = tuple(tup)
                if allowed is not None and not allowed[pack(tup)]:
                    return False, []
                if tup not in members:
                    members.add(tup)
                    changed = True
    return True, sorted(pack(t) for t in members)


def _affine_tables(n):
    return [tuple((x - y + z) % n
                  for x in range(n) for y in range(n) for z in range(n))]


def test_close_product_matches_reference_affine():
    sizes = [2, 2]
    tables = [[_affine_tables(2)[0], _affine_tables(2)[0]]]
    seed = [0, 3]  # (0,0) and (1,1)
    ok, got = close_product(sizes, [3], tables, seed)
    ok2, want = _brute_close(sizes, [3], tables, seed)
    assert ok and ok2
    assert [int(x) for x in got] == want


def test_close_product_respects_mask():
    sizes = [2, 2]
    tables = [[_affine_tables(2)[0], _affine_tables(2)[0]]]
    allowed = np.zeros(4, dtype=np.uint8)
    allowed[[0, 3]] = 1  # the diagonal only
    ok, got = close_product(sizes, [3], tables, [0, 3], allowed=allowed)
    assert ok and [int(x) for x in got] == [0, 3]
    # force an escape: p((0,0),(0,1),(1,1)) = (1,0), outside the mask
    allowed2 = np.zeros(4, dtype=np.uint8)
    allowed2[[0, 1, 3]] = 1
    ok2, got2 = close_product(sizes, [3], tables, [0, 1, 3], allowed=allowed2)
    assert not ok2 and len(got2) == 0


def test_backends_agree_on_min3():
    # three-way min over three factors of mixed sizes
    sizes = [2, 3]
    t2 = tuple(min(x, y, z) for x in range(2) for y in range(2) for z in range(2))
    t3 = tuple(min(x, y, z) for x in range(3) for y in range(3) for z in range(3))
    tables = [[t2, t3]]
    for seed in ([0], [5], [1, 3], [2, 4, 5]):
        ok_py, got_py = close_product(sizes, [3], tables, seed, backend="py")
        ok_ref, want = _brute_close(sizes, [3], tables, seed)
        assert ok_py == ok_ref
        assert [int(x) for x in got_py] == want
        if HAVE_C:
            ok_c, got_c = close_product(sizes, [3], tables, seed, backend="c")
            assert ok_c == ok_py
            assert [int(x) for x in got_c] == [int(x) for x in got_py]


@pytest.mark.skipif(not HAVE_C, reason="compiled backend not built")
def test_backends_agree_on_random_tables():
    rng = np.random.default_rng(7)
    for _ in range(25):
        sizes = [int(rng.integers(2, 4)) for _ in range(int(rng.integers(1, 4)))]
        ar = int(rng.integers(1, 3))
        tables = [[
            tuple(int(rng.integers(0, s)) for _ in range(s ** ar))
            for s in sizes
        ]]
        total = int(np.prod(sizes))
        seed = sorted(set(int(rng.integers(0, total))
                          for _ in range(int(rng.integers(1, 4)))))
        ok_c, got_c = close_product(sizes, [ar], tables, seed, backend="c")
        ok_py, got_py = close_product(sizes, [ar], tables, seed, backend="py")
        assert ok_c == ok_py
        assert [int(x) for x in got_c] == [int(x) for x in got_py]


def test_step_budget_reported():
    from finalg.errors import ResourceLimitError
    sizes = [3, 3, 3]
    t3 = _affine_tables(3)[0]
    tables = [[t3, t3, t3]]
    with pytest.raises(ResourceLimitError):
        close_product(sizes, [3], tables, [0, 13, 26], max_steps=2)


def test_env_selection_py_subprocess():
    env = dict(os.environ, FINALG_KERNEL="py")
    out = subprocess.run(
        [sys.executable, "-c",
         "from finalg._kernels import KERNEL; print(KERNEL)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "py"


def test_env_selection_bad_value_rejected():
    env = dict(os.environ, FINALG_KERNEL="fortran")
    out = subprocess.run(
        [sys.executable, "-c", "import finalg._kernels"],
        capture_output=True, text=True, env=env,
    )
    assert out.returncode != 0
    assert "FINALG_KERNEL" in out.stderr


def test_default_backend_is_compiled_when_available():
    if HAVE_C:
        assert KERNEL == "c"
    else:
        assert KERNEL == "py"
