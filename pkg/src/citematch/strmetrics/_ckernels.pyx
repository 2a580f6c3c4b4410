# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled edit-distance kernels; same contract as ``_pykernels``."""

from libc.stdlib cimport malloc, free


cdef Py_UCS4* _codepoints(str s, Py_ssize_t n) except NULL:
    cdef Py_UCS4* buf = <Py_UCS4*> malloc((n + 1) * sizeof(Py_UCS4))
    cdef Py_ssize_t i
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        buf[i] = s[i]
    return buf


def levenshtein(str a, str b):
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    cdef Py_ssize_t n = len(a), m = len(b), i, j
    if m == 0:
        return n
    cdef Py_UCS4* sa = _codepoints(a, n)
    cdef Py_UCS4* sb = _codepoints(b, m)
    cdef Py_ssize_t* row = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t diag, up, best
    cdef Py_UCS4 ca
    try:
        if row == NULL:
            raise MemoryError()
        for j in range(m + 1):
            row[j] = j
        for i in range(1, n + 1):
            ca = sa[i - 1]
            diag = row[0]
            row[0] = i
            for j in range(1, m + 1):
                up = row[j]
                best = diag + (ca != sb[j - 1])
                if up + 1 < best:
                    best = up + 1
                if row[j - 1] + 1 < best:
                    best = row[j - 1] + 1
                row[j] = best
                diag = up
        return row[m]
    finally:
        free(sa)
        free(sb)
        free(row)


def damerau_levenshtein(str a, str b):
    if a == b:
        return 0
    cdef Py_ssize_t n = len(a), m = len(b)
    if n == 0 or m == 0:
        return n + m
    # map characters to dense ids so the last-occurrence table is an array
    cdef dict ids = {}
    for ch in a:
        if ch not in ids:
            ids[ch] = len(ids)
    for ch in b:
        if ch not in ids:
            ids[ch] = len(ids)
    cdef Py_ssize_t sigma = len(ids)
    cdef Py_ssize_t w = m + 2
    cdef Py_ssize_t inf = n + m
    cdef Py_ssize_t* ia = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t* ib = <Py_ssize_t*> malloc(m * sizeof(Py_ssize_t))
    cdef Py_ssize_t* last_row = <Py_ssize_t*> malloc(sigma * sizeof(Py_ssize_t))
    cdef Py_ssize_t* d = <Py_ssize_t*> malloc((n + 2) * w * sizeof(Py_ssize_t))
    cdef Py_ssize_t i, j, i1, j1, last_col, cost, best, v
    try:
        if ia == NULL or ib == NULL or last_row == NULL or d == NULL:
            raise MemoryError()
        for i in range(n):
            ia[i] = ids[a[i]]
        for j in range(m):
            ib[j] = ids[b[j]]
        for i in range(sigma):
            last_row[i] = 0
        for j in range(w):
            d[j] = inf
        d[w] = inf
        for j in range(m + 1):
            d[w + j + 1] = j
        for i in range(1, n + 1):
            d[(i + 1) * w] = inf
            d[(i + 1) * w + 1] = i
        for i in range(1, n + 1):
            last_col = 0
            for j in range(1, m + 1):
                i1 = last_row[ib[j - 1]]
                j1 = last_col
                if ia[i - 1] == ib[j - 1]:
                    cost = 0
                    last_col = j
                else:
                    cost = 1
                best = d[i * w + j] + cost
                v = d[(i + 1) * w + j] + 1
                if v < best:
                    best = v
                v = d[i * w + j + 1] + 1
                if v < best:
                    best = v
                v = d[i1 * w + j1] + (i - i1 - 1) + 1 + (j - j1 - 1)
                if v < best:
                    best = v
                d[(i + 1) * w + j + 1] = best
            last_row[ia[i - 1]] = i
        return d[(n + 1) * w + m + 1]
    finally:
        free(ia)
        free(ib)
        free(last_row)
        free(d)
