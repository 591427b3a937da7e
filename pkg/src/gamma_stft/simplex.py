"""Small dense two-phase simplex solver for max c.x subject to A x <= b.

Free variables are split as x = x+ - x-. Pivoting follows Bland's rule, so
degenerate problems terminate. Sizes here are tiny (d <= 3, m of order 10),
so a plain numpy tableau is all that is needed.
"""

from __future__ import annotations

import numpy as np

__all__ = ["LPError", "InfeasibleLP", "UnboundedLP", "lp_maximize"]

_TOL = 1e-11


class LPError(ValueError):
    pass


class InfeasibleLP(LPError):
    pass


class UnboundedLP(LPError):
    pass


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    col_vals = T[:, col].copy()
    col_vals[row] = 0.0
    T -= np.outer(col_vals, T[row])


def _iterate(T: np.ndarray, basis: list[int], ncols: int, max_iter: int = 10_000) -> None:
    """Run simplex pivots on tableau T (objective in the last row) until optimal.

    Only the first ``ncols`` columns may enter the basis.
    """
    m = T.shape[0] - 1
    for _ in range(max_iter):
        obj = T[-1, :ncols]
        entering = np.flatnonzero(obj < -_TOL)
        if entering.size == 0:
            return
        col = int(entering[0])
        column = T[:m, col]
        candidates = np.flatnonzero(column > _TOL)
        if candidates.size == 0:
            raise UnboundedLP("objective is unbounded above on the feasible set")
        ratios = T[candidates, -1] / column[candidates]
        best = ratios.min()
        ties = candidates[ratios <= best + _TOL * max(1.0, abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, row, col)
        basis[row] = col
    raise LPError("simplex iteration limit reached")


def lp_maximize(A, b, c) -> tuple[float, np.ndarray]:
    """Maximize ``c . x`` over the polyhedron ``{x : A x <= b}``.

    Returns the optimal value and one optimizer (the first optimal basis
    reached; the optimizer need not be unique). Raises ``InfeasibleLP`` or
    ``UnboundedLP``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    m, d = A.shape
    if b.size != m or c.size != d:
        raise ValueError(f"shape mismatch: A {A.shape}, b {b.shape}, c {c.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
        raise ValueError("LP data must be finite")

    norms = np.linalg.norm(A, axis=1)
    zero_rows = norms == 0
    if np.any(b[zero_rows] < 0):
        raise InfeasibleLP("a zero row has negative right-hand side")
    A, b = A[~zero_rows] / norms[~zero_rows, None], b[~zero_rows] / norms[~zero_rows]
    m = A.shape[0]

    # columns: x+ (d), x- (d), slack (m), artificial (n_art), rhs
    neg = b < 0
    n_art = int(neg.sum())
    nvar = 2 * d + m
    T = np.zeros((m + 1, nvar + n_art + 1))
    sign = np.where(neg, -1.0, 1.0)
    T[:m, :d] = A * sign[:, None]
    T[:m, d : 2 * d] = -A * sign[:, None]
    T[:m, 2 * d : nvar] = np.diag(sign)
    T[:m, -1] = b * sign
    basis = []
    art = 0
    for i in range(m):
        if neg[i]:
            T[i, nvar + art] = 1.0
            basis.append(nvar + art)
            art += 1
        else:
            basis.append(2 * d + i)

    if n_art:
        T[-1, nvar : nvar + n_art] = 1.0
        for i in range(m):
            if basis[i] >= nvar:
                T[-1] -= T[i]
        _iterate(T, basis, nvar + n_art)
        if T[-1, -1] < -1e-9:
            raise InfeasibleLP("feasible set is empty")
        for i in range(m):
            if basis[i] >= nvar:
                nz = np.flatnonzero(np.abs(T[i, :nvar]) > _TOL)
                if nz.size:
                    _pivot(T, i, int(nz[0]))
                    basis[i] = int(nz[0])
        keep = [i for i in range(m) if basis[i] < nvar]
        T = np.vstack([T[keep][:, list(range(nvar)) + [-1]], np.zeros(nvar + 1)])
        basis = [basis[i] for i in keep]
    T[-1, :] = 0.0
    T[-1, :d] = -c
    T[-1, d : 2 * d] = c
    for i, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[i]
    _iterate(T, basis, nvar)

    z = np.zeros(nvar)
    for i, j in enumerate(basis):
        z[j] = T[i, -1]
    x = z[:d] - z[d : 2 * d]
    return float(c @ x), x
