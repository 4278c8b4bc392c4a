"""Pure-Python fallback for the LCS kernel.

Same two-row dynamic program as lgmgc._lcs; used when the compiled extension
is unavailable.  Accepts any integer sequences.
"""

from typing import Sequence


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    """Length of the longest common subsequence of ``a`` and ``b``."""
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        return 0
    if n > m:
        a, b = b, a
        m, n = n, m

    prev = [0] * (n + 1)
    curr = [0] * (n + 1)
    for i in range(m):
        ai = a[i]
        for j in range(n):
            if ai == b[j]:
                curr[j + 1] = prev[j] + 1
            else:
                up = prev[j + 1]
                left = curr[j]
                curr[j + 1] = up if up >= left else left
        prev, curr = curr, prev
    return prev[n]
