"""Kernel backend selection: compiled extension if available, else numpy.

The two implementations compute identical selected sets; the benchmark
script in ``benchmarks/`` compares their throughput.
"""

from __future__ import annotations

import os

if os.environ.get("ENTROLAB_FORCE_PY_KERNELS"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

IMPL = _impl.IMPL
greedy_separated = _impl.greedy_separated
cover_radius = _impl.cover_radius
