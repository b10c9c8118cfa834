"""Dual solver for the soft-margin kernel SVM.

Sequential minimal optimization with second-order working-set selection:
each step picks the steepest-ascent index i among the box-feasible "up"
set and the partner j minimizing the two-variable subproblem objective,
then solves that subproblem analytically under the box and equality
constraints. Compiled with numba; the greedy candidate scans upstream
perform tens of thousands of fits.

Two entry points share the update logic: ``solve`` works from a cached
kernel matrix, ``solve_rows`` recomputes the two touched kernel rows per
step for training splits too large to cache densely.
"""

import numpy as np
from numba import njit

TAU = 1e-12

# debug-mode status codes
OK = 0
BOX_VIOLATED = 1
EQUALITY_DRIFTED = 2


@njit(cache=True)
def _select_i(y, grad, alpha, C):
    """Steepest ascent index over the set still allowed to increase y*alpha."""
    n = len(y)
    m_val = -1e300
    i = -1
    for t in range(n):
        if (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0):
            v = -y[t] * grad[t]
            if v > m_val:
                m_val = v
                i = t
    return i, m_val


@njit(cache=True)
def _select_j(y, grad, alpha, C, m_val, Kii, row_i, diag):
    """Second-order partner choice; also returns the stopping bound M."""
    n = len(y)
    M_val = 1e300
    j = -1
    best = 1e300
    for t in range(n):
        if (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C):
            v = -y[t] * grad[t]
            if v < M_val:
                M_val = v
            if v < m_val:
                b = m_val - v
                a = Kii + diag[t] - 2.0 * row_i[t]
                if a <= 0.0:
                    a = TAU
                gain = -(b * b) / a
                if gain < best:
                    best = gain
                    j = t
    return j, M_val


@njit(cache=True)
def _update_pair(alpha, grad, y, C, i, j, Kii, Kjj, Kij, row_i, row_j):
    """Analytic two-variable step with box clipping; returns the deltas."""
    n = len(y)
    old_ai = alpha[i]
    old_aj = alpha[j]
    quad = Kii + Kjj - 2.0 * Kij
    if quad <= 0.0:
        quad = TAU
    if y[i] * y[j] < 0:
        delta = (-grad[i] - grad[j]) / quad
        diff = alpha[i] - alpha[j]
        alpha[i] += delta
        alpha[j] += delta
        if diff > 0.0:
            if alpha[j] < 0.0:
                alpha[j] = 0.0
                alpha[i] = diff
            if alpha[i] > C:
                alpha[i] = C
                alpha[j] = C - diff
        else:
            if alpha[i] < 0.0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if alpha[j] > C:
                alpha[j] = C
                alpha[i] = C + diff
    else:
        delta = (grad[i] - grad[j]) / quad
        total = alpha[i] + alpha[j]
        alpha[i] -= delta
        alpha[j] += delta
        if total > C:
            if alpha[i] > C:
                alpha[i] = C
                alpha[j] = total - C
            if alpha[j] > C:
                alpha[j] = C
                alpha[i] = total - C
        else:
            if alpha[j] < 0.0:
                alpha[j] = 0.0
                alpha[i] = total
            if alpha[i] < 0.0:
                alpha[i] = 0.0
                alpha[j] = total
    dai = alpha[i] - old_ai
    daj = alpha[j] - old_aj
    for t in range(n):
        grad[t] += y[t] * (y[i] * row_i[t] * dai + y[j] * row_j[t] * daj)
    return dai, daj


@njit(cache=True)
def solve(K, y, C, tol, max_iter, debug=False):
    """Minimize 1/2 a'Qa - e'a with Q = yy' * K, s.t. 0 <= a <= C, y'a = 0.

    Returns (alpha, grad, gap_lo, gap_hi, n_iter, converged, status) where
    grad is the final dual gradient Q a - e and [gap_lo, gap_hi] are the
    final min/max violating values of the stopping test. In debug mode the
    box bounds and the equality constraint are re-checked after every step
    and a nonzero status reports the first breach.
    """
    n = K.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    diag = np.empty(n)
    for t in range(n):
        diag[t] = K[t, t]
    it = 0
    m_val = 0.0
    M_val = 0.0
    converged = False
    status = OK
    eq_sum = 0.0  # running y'a, updated incrementally
    while it < max_iter:
        i, m_val = _select_i(y, grad, alpha, C)
        if i == -1:
            converged = True
            break
        j, M_val = _select_j(y, grad, alpha, C, m_val, diag[i], K[i], diag)
        if j == -1 or m_val - M_val <= tol:
            converged = True
            break
        dai, daj = _update_pair(alpha, grad, y, C, i, j,
                                diag[i], diag[j], K[i, j], K[i], K[j])
        it += 1
        if debug:
            if not (0.0 <= alpha[i] <= C and 0.0 <= alpha[j] <= C):
                status = BOX_VIOLATED
                break
            eq_sum += y[i] * dai + y[j] * daj
            if abs(eq_sum) > 1e-6 * C:
                status = EQUALITY_DRIFTED
                break
    return alpha, grad, M_val, m_val, it, converged, status


@njit(cache=True)
def _rbf_row(X, sq, i, gamma, out):
    n, p = X.shape
    for t in range(n):
        dot = 0.0
        for c in range(p):
            dot += X[i, c] * X[t, c]
        d2 = sq[i] + sq[t] - 2.0 * dot
        if d2 < 0.0:
            d2 = 0.0
        out[t] = np.exp(-gamma * d2)


@njit(cache=True)
def solve_rows(X, y, gamma, C, tol, max_iter, debug=False):
    """Same optimization as ``solve`` but kernel rows are recomputed per step.

    Memory stays O(n): only the two touched rows exist at a time. The RBF
    diagonal is identically 1.
    """
    n = X.shape[0]
    sq = np.empty(n)
    for t in range(n):
        acc = 0.0
        for c in range(X.shape[1]):
            acc += X[t, c] * X[t, c]
        sq[t] = acc
    diag = np.ones(n)
    row_i = np.empty(n)
    row_j = np.empty(n)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    it = 0
    m_val = 0.0
    M_val = 0.0
    converged = False
    status = OK
    eq_sum = 0.0
    while it < max_iter:
        i, m_val = _select_i(y, grad, alpha, C)
        if i == -1:
            converged = True
            break
        _rbf_row(X, sq, i, gamma, row_i)
        j, M_val = _select_j(y, grad, alpha, C, m_val, 1.0, row_i, diag)
        if j == -1 or m_val - M_val <= tol:
            converged = True
            break
        _rbf_row(X, sq, j, gamma, row_j)
        dai, daj = _update_pair(alpha, grad, y, C, i, j,
                                1.0, 1.0, row_i[j], row_i, row_j)
        it += 1
        if debug:
            if not (0.0 <= alpha[i] <= C and 0.0 <= alpha[j] <= C):
                status = BOX_VIOLATED
                break
            eq_sum += y[i] * dai + y[j] * daj
            if abs(eq_sum) > 1e-6 * C:
                status = EQUALITY_DRIFTED
                break
    return alpha, grad, M_val, m_val, it, converged, status
