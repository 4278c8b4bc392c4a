# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled longest-common-subsequence length over int token ids.

Two-row dynamic program; O(len(a) * len(b)) time, O(min) memory.  Must stay
in lockstep with lgmgc._lcs_py.lcs_length, which is the fallback used when
this extension is not built.
"""

from libc.stdlib cimport free, malloc


def lcs_length(int[:] a, int[:] b):
    """Length of the longest common subsequence of ``a`` and ``b``."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = b.shape[0]
    if m == 0 or n == 0:
        return 0
    # Keep the inner dimension small.
    if n > m:
        a, b = b, a
        m, n = n, m

    cdef Py_ssize_t i, j
    cdef int *prev = <int *> malloc((n + 1) * sizeof(int))
    cdef int *curr = <int *> malloc((n + 1) * sizeof(int))
    cdef int *tmp
    cdef int ai, up, left, diag
    if prev == NULL or curr == NULL:
        free(prev)
        free(curr)
        raise MemoryError()
    try:
        for j in range(n + 1):
            prev[j] = 0
        for i in range(m):
            ai = a[i]
            curr[0] = 0
            for j in range(n):
                if ai == b[j]:
                    curr[j + 1] = prev[j] + 1
                else:
                    up = prev[j + 1]
                    left = curr[j]
                    curr[j + 1] = up if up >= left else left
            tmp = prev
            prev = curr
            curr = tmp
        return prev[n]
    finally:
        free(prev)
        free(curr)
