"""Kernel backend selection.

Imports the compiled LCS extension when present and falls back to the pure
Python implementation otherwise.  ``LCS_BACKEND`` records which one is live;
``benchmarks/bench_lcs.py`` compares the two.
"""

from array import array
from typing import Sequence

from ._lcs_py import lcs_length as _lcs_py

try:
    from ._lcs import lcs_length as _lcs_c

    LCS_BACKEND = "compiled"
except ImportError:
    _lcs_c = None
    LCS_BACKEND = "python"


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    """LCS length of two integer id sequences, via the fastest backend."""
    if _lcs_c is not None:
        return _lcs_c(array("i", a), array("i", b))
    return _lcs_py(a, b)


def lcs_length_python(a: Sequence[int], b: Sequence[int]) -> int:
    """Pure-Python LCS, exposed for benchmarks and backend-equivalence tests."""
    return _lcs_py(a, b)


def lcs_length_compiled(a: Sequence[int], b: Sequence[int]) -> int:
    """Compiled LCS; raises RuntimeError when the extension is not built."""
    if _lcs_c is None:
        raise RuntimeError("compiled LCS extension is not available")
    return _lcs_c(array("i", a), array("i", b))
