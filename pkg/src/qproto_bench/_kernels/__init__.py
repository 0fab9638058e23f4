"""Hot-loop kernels: compiled extension with a pure-Python fallback.

The compiled module is preferred when present; set QPROTO_BENCH_PURE_PY=1
to force the numpy fallback (used by the kernel benchmark and tests).
Both backends are bit-for-bit equivalent.
"""

import os

from . import _money_py

if os.environ.get("QPROTO_BENCH_PURE_PY"):
    simulate_pair_block = _money_py.simulate_pair_block
    BACKEND = "python"
else:
    try:
        from . import _money_cy

        simulate_pair_block = _money_cy.simulate_pair_block
        BACKEND = "cython"
    except ImportError:
        simulate_pair_block = _money_py.simulate_pair_block
        BACKEND = "python"

__all__ = ["simulate_pair_block", "BACKEND"]
