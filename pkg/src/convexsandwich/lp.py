"""Dense two-phase simplex for small standard-form programs.

Solves ``min c @ x  s.t.  A @ x == b, x >= 0``.  The problems in this
package have at most a dozen rows and a few hundred columns, so a tableau
kept as one numpy array is fast enough and keeps the package free of an
external solver.
"""
from __future__ import annotations

import numpy as np

from .errors import Infeasible, Unbounded

TOL = 1e-11
# Dantzig pricing until this many pivots, then Bland's rule (no cycling).
_DANTZIG_PIVOTS = 200
_MAX_PIVOTS = 20000


def _pivot(tab, row, col):
    tab[row] /= tab[row, col]
    piv = tab[row]
    colvals = tab[:, col].copy()
    colvals[row] = 0.0
    tab -= np.outer(colvals, piv)


def _iterate(tab, basis, ncols, tol):
    """Run simplex pivots on ``tab`` (last row = reduced costs, last col = rhs)."""
    for it in range(_MAX_PIVOTS):
        cost = tab[-1, :ncols]
        if it < _DANTZIG_PIVOTS:
            col = int(np.argmin(cost))
            if cost[col] >= -tol:
                return
        else:
            neg = np.flatnonzero(cost < -tol)
            if neg.size == 0:
                return
            col = int(neg[0])
        column = tab[:-1, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            raise Unbounded("objective unbounded below")
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        # smallest basic index among ties (Bland)
        row = int(ties[np.argmin([basis[r] for r in ties])])
        _pivot(tab, row, col)
        basis[row] = col
    raise RuntimeError("simplex pivot limit reached")


def solve(c, A, b, tol=TOL):
    """Minimise ``c @ x`` over ``{x >= 0 : A @ x == b}``.

    Returns ``(x, value)``.  Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float).ravel()
    c = np.array(c, dtype=float).ravel()
    m, n = A.shape
    if b.shape[0] != m or c.shape[0] != n:
        raise ValueError("shape mismatch in linear program")

    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    scale = max(1.0, float(np.abs(A).max(initial=0.0)), float(b.max(initial=0.0)))

    # phase 1: artificials n..n+m-1
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[-1, :n] = -A.sum(axis=0)
    tab[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    _iterate(tab, basis, n + m, tol * scale)
    if -tab[-1, -1] > 1e-9 * scale * max(1.0, m):
        raise Infeasible("no feasible point")

    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] < n:
            keep.append(r)
            continue
        cand = np.flatnonzero(np.abs(tab[r, :n]) > 1e-9 * scale)
        if cand.size:
            _pivot(tab, r, int(cand[0]))
            basis[r] = int(cand[0])
            keep.append(r)
    tab = np.vstack([tab[keep][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))])
    basis = [basis[r] for r in keep]

    # phase 2
    tab[-1, :n] = c
    for r, j in enumerate(basis):
        tab[-1] -= c[j] * tab[r]
    _iterate(tab, basis, n, tol * scale)

    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = tab[r, -1]
    np.maximum(x, 0.0, out=x)
    return x, float(c @ x)


def feasible_point(A, b):
    """Any ``x >= 0`` with ``A @ x == b`` (the first basic solution found)."""
    A = np.array(A, dtype=float, ndmin=2)
    return solve(np.zeros(A.shape[1]), A, b)[0]
