"""Dense two-phase simplex with Bland's rule.

Solves min c'x subject to A x <= b and 0 <= x <= ub. Problem sizes here are
tiny (tens of variables), so the implementation favors robustness: Bland's
anti-cycling pivot rule throughout, explicit artificial variables, and a hard
iteration cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 10_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float | None


def _pivot(tab: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    for i in range(tab.shape[0]):
        if i != row and tab[i, col] != 0.0:
            tab[i] -= tab[i, col] * tab[row]
    basis[row] = col


def _run_phase(tab: np.ndarray, basis: np.ndarray, cost: np.ndarray,
               allowed: np.ndarray, tol: float, max_iter: int) -> str:
    """Bland-rule pivoting to optimality for one phase. Mutates tab/basis."""
    m = tab.shape[0]
    for _ in range(max_iter):
        reduced = cost - cost[basis] @ tab[:, :-1]
        entering = -1
        for j in np.flatnonzero(allowed):
            if j not in basis and reduced[j] < -tol:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        # Ratio test; ties broken by smallest basis index (Bland).
        best_ratio, leave = None, -1
        for i in range(m):
            a = tab[i, entering]
            if a > tol:
                ratio = tab[i, -1] / a
                if (best_ratio is None or ratio < best_ratio - tol
                        or (abs(ratio - best_ratio) <= tol
                            and basis[i] < basis[leave])):
                    best_ratio, leave = ratio, i
        if leave < 0:
            return UNBOUNDED
        _pivot(tab, basis, leave, entering)
    raise NumericalFailure(f"simplex did not converge in {max_iter} iterations")


def solve_lp_arrays(c, a_ub, b_ub, upper=None,
                    tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> LpResult:
    c = np.asarray(c, dtype=float)
    a = np.atleast_2d(np.asarray(a_ub, dtype=float)).copy()
    b = np.asarray(b_ub, dtype=float).copy()
    n = c.size
    if upper is not None:
        rows = []
        rhs = []
        for j, u in enumerate(upper):
            if u is not None and np.isfinite(u):
                e = np.zeros(n)
                e[j] = 1.0
                rows.append(e)
                rhs.append(float(u))
        if rows:
            a = np.vstack([a, np.array(rows)])
            b = np.concatenate([b, np.array(rhs)])
    m = a.shape[0]

    # Rows with negative rhs become >= rows: surplus minus, artificial plus.
    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0
    n_art = int(neg.sum())

    ncols = n + m + n_art
    tab = np.zeros((m, ncols + 1))
    tab[:, :n] = a
    tab[:, -1] = b
    basis = np.zeros(m, dtype=int)
    art_cols = []
    k_art = 0
    for i in range(m):
        if neg[i]:
            tab[i, n + i] = -1.0  # surplus
            col = n + m + k_art
            tab[i, col] = 1.0
            basis[i] = col
            art_cols.append(col)
            k_art += 1
        else:
            tab[i, n + i] = 1.0  # slack
            basis[i] = n + i

    allowed = np.ones(ncols, dtype=bool)
    if n_art:
        phase1 = np.zeros(ncols)
        phase1[art_cols] = 1.0
        status = _run_phase(tab, basis, phase1, allowed, tol, max_iter)
        if status != OPTIMAL:
            return LpResult(status=INFEASIBLE, x=None, objective=None)
        value = phase1[basis] @ tab[:, -1]
        if value > np.sqrt(tol):
            return LpResult(status=INFEASIBLE, x=None, objective=None)
        # Drive any artificial still basic out of the basis.
        for i in range(m):
            if basis[i] in art_cols:
                pivot_col = -1
                for j in range(n + m):
                    if abs(tab[i, j]) > tol:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(tab, basis, i, pivot_col)
                else:
                    tab[i, :] = 0.0  # redundant row
        allowed[art_cols] = False

    cost = np.zeros(ncols)
    cost[:n] = c
    status = _run_phase(tab, basis, cost, allowed, tol, max_iter)
    if status != OPTIMAL:
        return LpResult(status=UNBOUNDED, x=None, objective=None)
    x = np.zeros(ncols)
    x[basis] = tab[:, -1]
    return LpResult(status=OPTIMAL, x=x[:n].copy(), objective=float(c @ x[:n]))
