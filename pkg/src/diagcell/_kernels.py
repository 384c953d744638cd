"""Compiled inner loops for building diagram product tables."""

from __future__ import annotations

import numpy as np
from numba import njit

MAX_KEY_STRANDS = 8  # 2n vertices at 4 bits each must fit in 64 bits


def matching_keys(mats: np.ndarray) -> np.ndarray:
    """Pack each row of a ``(d, 2n)`` matching array into one ``uint64``."""
    d, m2 = mats.shape
    keys = np.zeros(d, dtype=np.uint64)
    for v in range(m2):
        keys |= mats[:, v].astype(np.uint64) << np.uint64(4 * v)
    return keys


@njit(cache=True)
def product_table(mats):
    """Concatenate every ordered pair of diagrams.

    ``mats`` holds one matching per row.  Returns packed keys of the outer
    diagrams and the number of closed loops, both of shape ``(d, d)``.
    """
    d, m2 = mats.shape
    n = m2 // 2
    keys = np.zeros((d, d), dtype=np.uint64)
    loops = np.zeros((d, d), dtype=np.int64)
    out = np.empty(m2, dtype=np.int64)
    seen = np.empty(n, dtype=np.bool_)
    for a in range(d):
        m1 = mats[a]
        for b in range(d):
            m2_ = mats[b]
            for v in range(m2):
                out[v] = -1
            for k in range(n):
                seen[k] = False
            for start in range(m2):
                if out[start] != -1:
                    continue
                # first step out of the outer boundary
                if start < n:
                    v = m1[start]
                    if v < n:
                        end = v
                        out[start] = end
                        out[end] = start
                        continue
                    k = v - n
                else:
                    w = m2_[start]
                    if w >= n:
                        end = w
                        out[start] = end
                        out[end] = start
                        continue
                    seen[w] = True
                    v = m1[n + w]
                    if v < n:
                        end = v
                        out[start] = end
                        out[end] = start
                        continue
                    k = v - n
                # at middle node k having arrived along an edge of d1
                while True:
                    seen[k] = True
                    w = m2_[k]
                    if w >= n:
                        end = w
                        break
                    seen[w] = True
                    v = m1[n + w]
                    if v < n:
                        end = v
                        break
                    k = v - n
                out[start] = end
                out[end] = start
            count = 0
            for k in range(n):
                if seen[k]:
                    continue
                count += 1
                cur = k
                while not seen[cur]:
                    seen[cur] = True
                    w = m2_[cur]
                    seen[w] = True
                    cur = m1[n + w] - n
            key = np.uint64(0)
            for v in range(m2):
                key |= np.uint64(out[v]) << np.uint64(4 * v)
            keys[a, b] = key
            loops[a, b] = count
    return keys, loops


@njit(cache=True)
def panel_pivots(S, p):
    """Pivot rows and columns of a narrow panel, by plain elimination mod ``p``.

    ``S`` is modified in place.  Returns two arrays of equal length.
    """
    rows, cols = S.shape
    free = np.ones(rows, dtype=np.bool_)
    prow = np.empty(min(rows, cols), dtype=np.int64)
    pcol = np.empty(min(rows, cols), dtype=np.int64)
    k = 0
    for c in range(cols):
        r = -1
        for i in range(rows):
            if free[i] and S[i, c] != 0:
                r = i
                break
        if r < 0:
            continue
        # inverse by Fermat
        inv = 1
        base = S[r, c] % p
        e = p - 2
        while e > 0:
            if e & 1:
                inv = inv * base % p
            base = base * base % p
            e >>= 1
        for j in range(c, cols):
            S[r, j] = S[r, j] * inv % p
        for i in range(r + 1, rows):
            if free[i] and S[i, c] != 0:
                f = S[i, c]
                for j in range(c, cols):
                    S[i, j] = (S[i, j] - f * S[r, j]) % p
        free[r] = False
        prow[k] = r
        pcol[k] = c
        k += 1
    return prow[:k], pcol[:k]
