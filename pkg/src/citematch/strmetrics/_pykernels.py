"""Pure-Python edit-distance kernels (fallback for the compiled extension)."""

from __future__ import annotations


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(
                min(
                    prev[j] + 1,
                    cur[j - 1] + 1,
                    prev[j - 1] + (ca != cb),
                )
            )
        prev = cur
    return prev[-1]


def damerau_levenshtein(a: str, b: str) -> int:
    """Unrestricted Damerau-Levenshtein distance (Lowrance-Wagner).

    Unlike the optimal-string-alignment variant this is a true metric: a
    substring may be edited again after a transposition.
    """
    if a == b:
        return 0
    n, m = len(a), len(b)
    if not n or not m:
        return n + m
    inf = n + m
    last_row: dict[str, int] = {}
    d = [[inf] * (m + 2), [inf, *range(m + 1)]]
    for i in range(1, n + 1):
        d.append([inf, i] + [0] * m)
    for i in range(1, n + 1):
        ca = a[i - 1]
        last_col = 0
        row, above = d[i + 1], d[i]
        for j in range(1, m + 1):
            cb = b[j - 1]
            i1 = last_row.get(cb, 0)
            j1 = last_col
            if ca == cb:
                cost = 0
                last_col = j
            else:
                cost = 1
            row[j + 1] = min(
                above[j] + cost,
                row[j] + 1,
                above[j + 1] + 1,
                d[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1),
            )
        last_row[ca] = i
    return d[n + 1][m + 1]
