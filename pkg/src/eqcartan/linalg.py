"""Gaussian elimination over a Novikov field with valuation pivoting.

Matrices are dense lists of lists of NovikovElem.  Pivots are chosen with
minimal q-valuation (ties broken by row, then column position), which keeps
truncated inverses as benign as possible: any entry whose visible terms are
exhausted but whose truncation bound lies at or below the candidate pivot's
valuation makes the pivot choice undecidable, and we refuse to guess.

Entries that end up with no visible terms but a finite truncation bound are
treated as zero *to that order*; the minimal such bound is reported in the
reduction certificate so callers can say "rank r, verified to q-order T"
instead of overclaiming exactness.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional

from .novikov import NovikovElem, ScalarSetup, invert_truncated

__all__ = ["UndeterminedError", "Reduction", "row_reduce", "rank", "kernel_basis",
           "solve", "matrix_rank_certified", "DEFAULT_Q_ORDER"]


def DEFAULT_Q_ORDER() -> int:
    return int(os.environ.get("EQCARTAN_Q_ORDER", "64"))


class UndeterminedError(Exception):
    """Raised when truncation is exhausted before a decision can be made."""


def _min_trunc(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass
class Reduction:
    """Result of row reduction: reduced = transform @ original.

    ``pivots`` is a list of (row, col) pairs; pivot entries in ``reduced``
    are exactly 1 and are the only visible entries in their columns.
    ``verified_trunc`` is None when every zero-decision was exact, else the
    minimal truncation index at which a discarded entry was only known to
    vanish.
    """

    setup: ScalarSetup
    reduced: List[List[NovikovElem]]
    transform: List[List[NovikovElem]]
    pivots: list
    verified_trunc: Optional[int]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _identity(setup: ScalarSetup, n: int):
    one, zero = setup.one(), setup.zero()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def row_reduce(matrix: List[List[NovikovElem]], setup: ScalarSetup,
               q_order: Optional[int] = None) -> Reduction:
    if q_order is None:
        q_order = DEFAULT_Q_ORDER()
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    M = [list(row) for row in matrix]
    U = _identity(setup, m)
    free_rows = set(range(m))
    free_cols = set(range(n))
    pivots = []
    verified: Optional[int] = None

    while True:
        best = None  # (valuation_index, row, col)
        suspects = []  # (trunc, row, col) for termless truncated entries
        for r in sorted(free_rows):
            for c in sorted(free_cols):
                e = M[r][c]
                if e.has_terms():
                    key = (e.valuation_index(), r, c)
                    if best is None or key < best:
                        best = key
                elif e.trunc is not None:
                    suspects.append((e.trunc, r, c))
        if best is None:
            if suspects:
                verified = _min_trunc(verified, min(t for t, _, _ in suspects))
            break
        val, pr, pc = best
        bad = [(t, r, c) for t, r, c in suspects if t <= val]
        if bad:
            t, r, c = min(bad)
            raise UndeterminedError(
                f"pivot comparison undecidable at declared q-order: entry "
                f"({r},{c}) is only known to vanish below exponent index {t}, "
                f"candidate pivot valuation index is {val}"
            )
        inv = invert_truncated(M[pr][pc], q_order)
        M[pr] = [e * inv for e in M[pr]]
        U[pr] = [e * inv for e in U[pr]]
        for r in range(m):
            if r == pr:
                continue
            f = M[r][pc]
            if not f.has_terms():
                continue
            M[r] = [a - (f * b) for a, b in zip(M[r], M[pr])]
            U[r] = [a - (f * b) for a, b in zip(U[r], U[pr])]
        pivots.append((pr, pc))
        free_rows.discard(pr)
        free_cols.discard(pc)

    for row in M:
        for e in row:
            verified = _min_trunc(verified, e.trunc)
    return Reduction(setup, M, U, pivots, verified)


def rank(matrix, setup, q_order=None) -> int:
    return row_reduce(matrix, setup, q_order).rank


def matrix_rank_certified(matrix, setup, q_order=None):
    red = row_reduce(matrix, setup, q_order)
    return red.rank, red.verified_trunc


def kernel_basis(matrix, setup, q_order=None, reduction: Optional[Reduction] = None):
    """Basis of the right kernel, one vector per free column."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    if n == 0:
        return []
    red = reduction or row_reduce(matrix, setup, q_order)
    pivot_of_col = {c: r for r, c in red.pivots}
    free = [c for c in range(n) if c not in pivot_of_col]
    zero, one = setup.zero(), setup.one()
    out = []
    for fc in free:
        v = [zero] * n
        v[fc] = one
        for c, r in pivot_of_col.items():
            v[c] = -red.reduced[r][fc]
        out.append(v)
    return out


def solve(matrix, rhs, setup, q_order=None, reduction: Optional[Reduction] = None):
    """One solution of matrix @ x = rhs, or (None, residual_row) if inconsistent.

    Returns (x, None) on success.  Raises UndeterminedError if consistency
    cannot be decided at the truncation in force.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    red = reduction or row_reduce(matrix, setup, q_order)
    # b' = U @ rhs
    b = []
    for r in range(m):
        acc = setup.zero()
        for c in range(m):
            u = red.transform[r][c]
            if u.has_terms():
                acc = acc + (u * rhs[c])
        b.append(acc)
    pivot_rows = {r for r, _ in red.pivots}
    for r in range(m):
        if r in pivot_rows:
            continue
        if b[r].has_terms():
            return None, (r, b[r])
    zero = setup.zero()
    x = [zero] * n
    for r, c in red.pivots:
        x[c] = b[r]
    return x, None


def mat_apply(matrix, vec, setup):
    out = []
    for row in matrix:
        acc = setup.zero()
        for a, v in zip(row, vec):
            if a.has_terms() and v.has_terms():
                acc = acc + (a * v)
        out.append(acc)
    return out
