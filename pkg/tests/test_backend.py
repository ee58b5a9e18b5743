import os
import random
import subprocess
import sys

import numpy as np
import pytest

from connsys import _backend, _pykernels
from connsys.instances import cut_rank, edge_connectivity, vertex_connectivity

from _corpus import random_graph

try:
    from connsys import _kernels
except ImportError:  # extension not built
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


def _tables():
    rng = random.Random(17)
    out = []
    for _ in range(8):
        g = random_graph(rng, rng.randint(3, 7), 0.5)
        for make in (edge_connectivity, cut_rank, vertex_connectivity):
            s = make(g)
            if 0 < s.n <= 10:
                out.append((np.ascontiguousarray(s.table(), dtype=np.int64), s.n))
    # a table that breaks submodularity and posimodularity
    out.append((np.array([0, 2, 2, 0], dtype=np.int64), 2))
    out.append((np.array([0, 1, 1, 3], dtype=np.int64), 2))
    return out


def test_backend_is_selected():
    assert _backend.BACKEND in ("cython", "python")
    assert _backend.kernels.BACKEND == _backend.BACKEND


def test_pure_flag_forces_fallback():
    env = dict(os.environ, CONNSYS_PURE="1")
    proc = subprocess.run([sys.executable, "-c", "from connsys import _backend; print(_backend.BACKEND)"],
                          capture_output=True, text=True, env=env)
    assert proc.stdout.strip() == "python"


@needs_ext
def test_property_kernels_agree():
    for t, n in _tables():
        assert _kernels.local_submodular_ok(t, n) == _pykernels.local_submodular_ok(t, n)
        assert _kernels.first_submodular_violation(t, n) == _pykernels.first_submodular_violation(t, n)
        assert _kernels.first_posimodular_violation(t, n) == _pykernels.first_posimodular_violation(t, n)


@needs_ext
def test_dp_kernels_agree():
    rng = random.Random(5)
    for t, n in _tables():
        g1, c1 = _kernels.bw_dp(t, n)
        g2, c2 = _pykernels.bw_dp(t, n)
        assert np.array_equal(g1, g2) and np.array_equal(c1, c2)
        allowed = np.zeros(1 << n, dtype=np.uint8)
        for i in range(n):
            allowed[1 << i] = 1
        allowed[0] = 1
        for k in range(0, 4):
            assert np.array_equal(_kernels.over_dp(t, n, allowed, k), _pykernels.over_dp(t, n, allowed, k))
        w = rng.randrange(1 << n)
        assert _kernels.well_linked_violation(t, n, w) == _pykernels.well_linked_violation(t, n, w)


@needs_ext
def test_sparse_kernel_agrees():
    rng = random.Random(9)
    for _ in range(30):
        leaves = sorted({1 << rng.randrange(8) for _ in range(6)} | {rng.randrange(1, 256) for _ in range(6)})
        cands = sorted({rng.randrange(1, 256) for _ in range(20)}, key=lambda x: (bin(x).count("1"), x))
        a = _kernels.sparse_feasible(np.array(cands, dtype=np.int64), np.array(leaves, dtype=np.int64))
        b = _pykernels.sparse_feasible(np.array(cands, dtype=np.int64), np.array(leaves, dtype=np.int64))
        assert list(a) == list(b)
