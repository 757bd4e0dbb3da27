"""Benchmark: compiled separated-set kernel vs the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py
"""

import time
from fractions import Fraction as F

import numpy as np

from entrolab import star_exact, tent_family
from entrolab import _kernels_py
from entrolab._fast import FloatSystem, exact_grid, grid_arrays

try:
    from entrolab import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None

CASES = [
    ("tent(2)  n=10 eps=1/16", tent_family(2), 10, F(1, 16), F(1, 16384)),
    ("tent(2)  n=12 eps=1/32", tent_family(2), 12, F(1, 32), F(1, 65536)),
    ("star_exact(3,2) n=8 eps=1/16", star_exact(3, 2), 8, F(1, 16), F(1, 4096)),
]


def run(kernel, f, n, eps, spacing):
    fs = FloatSystem(f)
    pe, po = grid_arrays(fs, exact_grid(f.graph, spacing))
    oe, oo = fs.orbit_table(pe, po, n)
    k0 = fs.landmark_coords(oe[:, n - 1], oo[:, n - 1], 0)
    k1 = fs.landmark_coords(oe[:, n // 2], oo[:, n // 2], 0)
    t0 = time.perf_counter()
    sel = kernel.greedy_separated(oe, oo, float(eps), fs.edge_u, fs.edge_v,
                                  fs.edge_len, fs.vdist, k0, k1)
    return time.perf_counter() - t0, len(sel), oe.shape[0]


def main():
    print("%-32s %10s %10s %10s %10s %8s" %
          ("case", "grid", "count", "python", "cython", "speedup"))
    for name, f, n, eps, spacing in CASES:
        t_py, c_py, N = run(_kernels_py, f, n, eps, spacing)
        if _kernels_cy is not None:
            t_cy, c_cy, _ = run(_kernels_cy, f, n, eps, spacing)
            assert c_py == c_cy, "kernel twins disagree"
            print("%-32s %10d %10d %9.3fs %9.3fs %7.1fx"
                  % (name, N, c_py, t_py, t_cy, t_py / t_cy))
        else:
            print("%-32s %10d %10d %9.3fs %10s %8s"
                  % (name, N, c_py, t_py, "n/a", "n/a"))


if __name__ == "__main__":
    main()
