"""Kernel backend selection.

Imports the compiled Cython kernels when the extension was built, otherwise
the numpy fallback.  Set ``RATIOKIT_PURE_PYTHON=1`` to force the fallback
(used by the parity tests and the benchmark).  Both backends produce
bit-identical results for identical inputs.
"""

import os

if os.environ.get("RATIOKIT_PURE_PYTHON", "0") not in ("", "0"):
    from . import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as _impl

        BACKEND = "python"

ratio_r_values = _impl.ratio_r_values
ratio_q_values = _impl.ratio_q_values
count_between_closed = _impl.count_between_closed
pair_ratio_r_hits = _impl.pair_ratio_r_hits
pair_ratio_q_hits = _impl.pair_ratio_q_hits
bin_counts = _impl.bin_counts
sequence_r_bin_counts = _impl.sequence_r_bin_counts


def get_backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
