"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports cleanly and the environment
variable ``CLAB_NUMBA`` is not set to ``0``.  Both paths return identical
results (up to floating-point summation order) and are exercised by the
test suite and by ``benchmarks/bench_kernels.py``.
"""
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("CLAB_NUMBA", "1") != "0"


# --- truncated bivariate polynomial product ---------------------------------

def jet_mul_numpy(a, b, I, J, starts):
    """Product of two coefficient blocks of shape (M, B).

    ``I``/``J`` index the factor coefficients of every monomial pair, grouped
    by output monomial; ``starts`` marks the first pair of each group.
    """
    return np.add.reduceat(a[I] * b[J], starts, axis=0)


if HAVE_NUMBA:

    @njit(cache=True)
    def jet_mul_numba(a, b, I, J, K, M):
        B = a.shape[1]
        out = np.zeros((M, B))
        for p in range(I.shape[0]):
            i = I[p]
            j = J[p]
            k = K[p]
            for t in range(B):
                out[k, t] += a[i, t] * b[j, t]
        return out

else:  # pragma: no cover
    jet_mul_numba = None


# --- marching squares --------------------------------------------------------

# Corner order: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); edges: 0:(0,1) 1:(1,2)
# 2:(3,2) 3:(0,3).  Each case lists up to two segments as edge pairs; the two
# ambiguous cases (5, 10) are resolved by the cell-centre sign.
_CASES = np.full((16, 2, 2), -1, dtype=np.int64)
for _case, _segs in {
    1: [(0, 3)], 2: [(0, 1)], 3: [(1, 3)], 4: [(1, 2)], 6: [(0, 2)],
    7: [(2, 3)], 8: [(2, 3)], 9: [(0, 2)], 11: [(1, 2)], 12: [(1, 3)],
    13: [(0, 1)], 14: [(0, 3)],
}.items():
    for _s, (_e0, _e1) in enumerate(_segs):
        _CASES[_case, _s] = (_e0, _e1)


def _cell_segments_numpy(vals, center):
    ni, nj = vals.shape
    s = vals > 0
    c0 = s[:-1, :-1]
    c1 = s[1:, :-1]
    c2 = s[1:, 1:]
    c3 = s[:-1, 1:]
    case = c0 * 1 + c1 * 2 + c2 * 4 + c3 * 8
    ii, jj = np.nonzero((case != 0) & (case != 15))
    out = []
    for i, j in zip(ii.tolist(), jj.tolist()):
        k = case[i, j]
        if k == 5 or k == 10:
            # centre agrees with corner 0 -> corners 0,2 connected
            if (center[i, j] > 0) == c0[i, j]:
                segs = ((0, 1), (2, 3))
            else:
                segs = ((0, 3), (1, 2))
            for e0, e1 in segs:
                out.append((i, j, e0, e1))
        else:
            for t in range(2):
                e0, e1 = _CASES[k, t]
                if e0 >= 0:
                    out.append((i, j, e0, e1))
    if not out:
        return np.zeros((0, 4), dtype=np.int64)
    return np.asarray(out, dtype=np.int64)


if HAVE_NUMBA:

    @njit(cache=True)
    def _cell_segments_numba(vals, center, cases):
        ni, nj = vals.shape
        buf = np.empty(((ni - 1) * (nj - 1) * 2, 4), dtype=np.int64)
        n = 0
        for i in range(ni - 1):
            for j in range(nj - 1):
                k = 0
                if vals[i, j] > 0:
                    k += 1
                if vals[i + 1, j] > 0:
                    k += 2
                if vals[i + 1, j + 1] > 0:
                    k += 4
                if vals[i, j + 1] > 0:
                    k += 8
                if k == 0 or k == 15:
                    continue
                if k == 5 or k == 10:
                    if (center[i, j] > 0) == (vals[i, j] > 0):
                        a0, a1, b0, b1 = 0, 1, 2, 3
                    else:
                        a0, a1, b0, b1 = 0, 3, 1, 2
                    buf[n, 0] = i
                    buf[n, 1] = j
                    buf[n, 2] = a0
                    buf[n, 3] = a1
                    n += 1
                    buf[n, 0] = i
                    buf[n, 1] = j
                    buf[n, 2] = b0
                    buf[n, 3] = b1
                    n += 1
                else:
                    for t in range(2):
                        if cases[k, t, 0] >= 0:
                            buf[n, 0] = i
                            buf[n, 1] = j
                            buf[n, 2] = cases[k, t, 0]
                            buf[n, 3] = cases[k, t, 1]
                            n += 1
        return buf[:n].copy()

else:  # pragma: no cover
    _cell_segments_numba = None


def cell_segments(vals, center, use_numba=None):
    """Marching-squares segments of the zero set of a sampled field.

    Returns an (S, 4) integer array of ``(i, j, edge0, edge1)`` rows; edge
    ids follow the table above.  ``center`` holds the field at cell centres
    and only matters for saddle cells.
    """
    if use_numba is None:
        use_numba = USE_NUMBA
    vals = np.ascontiguousarray(vals, dtype=float)
    center = np.ascontiguousarray(center, dtype=float)
    if use_numba:
        return _cell_segments_numba(vals, center, _CASES)
    return _cell_segments_numpy(vals, center)
