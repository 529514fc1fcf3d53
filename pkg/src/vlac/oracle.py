"""Brute-force reference computations used by the test suite.

Everything here recomputes results from first principles with its own
plain-Python code: Gaussian elimination for field determinants and rank,
fraction-free Bareiss elimination for integer determinants, and Hankel
system solving for minimal generators.  None of it is shared with (or
called by) the certificate protocols; the whole point is an independent
second route to every certified quantity.
"""

from __future__ import annotations

from typing import Sequence

from .errors import NotSquare
from .ff import Poly, PrimeField


def _as_rows(a) -> list:
    """Copy any matrix-ish input into plain lists of Python ints."""
    if hasattr(a, "to_dense"):
        a = a.to_dense()
    if hasattr(a, "a"):
        a = a.a
    return [[int(v) for v in row] for row in a]


def brute_det_field(field: PrimeField, a) -> int:
    """Determinant over GF(p) by Gaussian elimination with pivoting."""
    m = _as_rows(a)
    n = len(m)
    if any(len(r) != n for r in m):
        raise NotSquare("determinant needs a square matrix")
    p = field.p
    m = [[v % p for v in row] for row in m]
    det = 1
    for c in range(n):
        pivot_row = None
        for i in range(c, n):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return 0
        if pivot_row != c:
            m[c], m[pivot_row] = m[pivot_row], m[c]
            det = -det % p
        piv = m[c][c]
        det = det * piv % p
        inv = pow(piv, -1, p)
        for i in range(c + 1, n):
            f = m[i][c] * inv % p
            if f:
                row_i, row_c = m[i], m[c]
                for j in range(c, n):
                    row_i[j] = (row_i[j] - f * row_c[j]) % p
    return det


def brute_rank(field: PrimeField, a) -> int:
    """Rank over GF(p) by row reduction."""
    m = _as_rows(a)
    if not m:
        return 0
    p = field.p
    m = [[v % p for v in row] for row in m]
    rows, cols = len(m), len(m[0])
    rank = 0
    for c in range(cols):
        pivot_row = None
        for i in range(rank, rows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        inv = pow(m[rank][c], -1, p)
        for i in range(rank + 1, rows):
            f = m[i][c] * inv % p
            if f:
                row_i, row_r = m[i], m[rank]
                for j in range(c, cols):
                    row_i[j] = (row_i[j] - f * row_r[j]) % p
        rank += 1
        if rank == rows:
            break
    return rank


def brute_det_int(a) -> int:
    """Integer determinant by fraction-free Bareiss elimination."""
    m = _as_rows(a)
    n = len(m)
    if any(len(r) != n for r in m):
        raise NotSquare("determinant needs a square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = None
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    swap = i
                    break
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # Bareiss update divides exactly by the previous pivot
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _solve_field(p: int, rows: list[list[int]], rhs: list[int]) -> list[int] | None:
    """Tiny dense solver over GF(p); None when inconsistent."""
    m = [row[:] + [b] for row, b in zip(rows, rhs)]
    n_rows = len(m)
    n_cols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        pr = None
        for i in range(r, n_rows):
            if m[i][c] % p:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(vi - f * vr) % p for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    for i in range(r, n_rows):
        if m[i][n_cols] % p:
            return None
    x = [0] * n_cols
    for row, c in enumerate(pivots):
        x[c] = m[row][n_cols]
    return x


def projected_powers(field: PrimeField, a, u: Sequence[int], v: Sequence[int], count: int) -> list[int]:
    """The sequence u^T A^i v for i = 0..count-1, by repeated plain matvec."""
    p = field.p
    m = _as_rows(a)
    uu = [int(x) % p for x in u]
    w = [int(x) % p for x in v]
    seq = []
    for _ in range(count):
        seq.append(sum(ui * wi for ui, wi in zip(uu, w)) % p)
        w = [sum(row[j] * w[j] for j in range(len(w))) % p for row in m]
    return seq


def brute_minpoly_fuv(
    field: PrimeField, a, u: Sequence[int], v: Sequence[int], bound: int | None = None
) -> Poly:
    """Minimal generator of (u^T A^i v) by solving Hankel systems.

    Tries degrees 0, 1, ... and returns the first monic polynomial whose
    recurrence is consistent with the whole 2*bound window.  This is a
    deliberately different algorithm from Berlekamp-Massey.
    """
    m = _as_rows(a)
    n = len(m)
    if bound is None:
        bound = n
    seq = projected_powers(field, a, u, v, 2 * bound)
    p = field.p
    for d in range(0, bound + 1):
        if d == 0:
            if all(s == 0 for s in seq):
                return Poly.one(field)
            continue
        n_eq = len(seq) - d
        rows = [[seq[k + j] for j in range(d)] for k in range(n_eq)]
        rhs = [-seq[k + d] % p for k in range(n_eq)]
        sol = _solve_field(p, rows, rhs)
        if sol is None:
            continue
        cand = Poly(field, sol + [1])
        ok = all(
            (seq[k + d] + sum(sol[j] * seq[k + j] for j in range(d))) % p == 0
            for k in range(n_eq)
        )
        if ok:
            return cand
    raise AssertionError("window admits no generator up to the bound")


def brute_det_poly(entries: list[list[Poly]], field: PrimeField) -> Poly:
    """Determinant of a small polynomial matrix by cofactor expansion."""
    n = len(entries)
    if any(len(r) != n for r in entries):
        raise NotSquare("determinant needs a square matrix")
    if n == 0:
        return Poly.one(field)
    if n == 1:
        return entries[0][0]
    acc = Poly.zero(field)
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in entries[1:]]
        term = entries[0][j] * brute_det_poly(minor, field)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc
