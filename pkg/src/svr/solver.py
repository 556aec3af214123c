"""Sequential minimal optimization for the epsilon-SVR dual on a precomputed kernel.

The dual is solved in its 2n-variable form: a[:n] are the alpha and a[n:] the
alpha* coefficients, with signs s = (+1, ..., -1, ...),
    min 1/2 a'Qa + p'a   s.t.  s'a = 0,  0 <= a <= C
where Q[i, j] = s_i s_j K[i % n, j % n] and p = (eps - y, eps + y).
Pairs are picked by second-order working-set selection.
"""
import numba as nb
import numpy as np

TAU = 1e-12

njit_kwargs = {
    "nogil": True,
    "fastmath": False,
    "cache": True,
}


@nb.njit(**njit_kwargs)
def _select_pair(k, s, a, grad, c, n):
    two_n = 2 * n
    g_max = -np.inf
    i = -1
    for t in range(two_n):
        if s[t] > 0:
            if a[t] < c and -grad[t] >= g_max:
                g_max = -grad[t]
                i = t
        else:
            if a[t] > 0 and grad[t] >= g_max:
                g_max = grad[t]
                i = t
    if i == -1:
        return -1, -1, 0.0

    ii = i % n
    g_max2 = -np.inf
    j = -1
    best = np.inf
    for t in range(two_n):
        tt = t % n
        if s[t] > 0:
            if a[t] > 0:
                diff = g_max + grad[t]
                if grad[t] >= g_max2:
                    g_max2 = grad[t]
            else:
                continue
        else:
            if a[t] < c:
                diff = g_max - grad[t]
                if -grad[t] >= g_max2:
                    g_max2 = -grad[t]
            else:
                continue
        if diff > 0:
            quad = k[ii, ii] + k[tt, tt] - 2.0 * k[ii, tt]
            if quad <= 0:
                quad = TAU
            obj = -(diff * diff) / quad
            if obj <= best:
                best = obj
                j = t
    return i, j, g_max + g_max2


@nb.njit(**njit_kwargs)
def _update_pair(k, s, a, grad, c, n, i, j):
    ii, jj = i % n, j % n
    old_ai, old_aj = a[i], a[j]
    quad = k[ii, ii] + k[jj, jj] - 2.0 * k[ii, jj]
    if quad <= 0:
        quad = TAU
    if s[i] != s[j]:
        delta = (-grad[i] - grad[j]) / quad
        diff = a[i] - a[j]
        a[i] += delta
        a[j] += delta
        if diff > 0:
            if a[j] < 0:
                a[j] = 0.0
                a[i] = diff
        else:
            if a[i] < 0:
                a[i] = 0.0
                a[j] = -diff
        if diff > 0:
            if a[i] > c:
                a[i] = c
                a[j] = c - diff
        else:
            if a[j] > c:
                a[j] = c
                a[i] = c + diff
    else:
        delta = (grad[i] - grad[j]) / quad
        total = a[i] + a[j]
        a[i] -= delta
        a[j] += delta
        if total > c:
            if a[i] > c:
                a[i] = c
                a[j] = total - c
        else:
            if a[j] < 0:
                a[j] = 0.0
                a[i] = total
        if total > c:
            if a[j] > c:
                a[j] = c
                a[i] = total - c
        else:
            if a[i] < 0:
                a[i] = 0.0
                a[j] = total

    d_i = a[i] - old_ai
    d_j = a[j] - old_aj
    for t in range(2 * n):
        tt = t % n
        grad[t] += s[t] * (s[i] * k[ii, tt] * d_i + s[j] * k[jj, tt] * d_j)


@nb.njit(**njit_kwargs)
def _offset(s, a, grad, c):
    upper = np.inf
    lower = -np.inf
    n_free = 0
    sum_free = 0.0
    for t in range(s.shape[0]):
        yg = s[t] * grad[t]
        if a[t] >= c:
            if s[t] < 0:
                upper = min(upper, yg)
            else:
                lower = max(lower, yg)
        elif a[t] <= 0:
            if s[t] > 0:
                upper = min(upper, yg)
            else:
                lower = max(lower, yg)
        else:
            n_free += 1
            sum_free += yg
    if n_free > 0:
        return sum_free / n_free
    return (upper + lower) / 2.0


@nb.njit(**njit_kwargs)
def smo_solve(k, y, c, eps, tol, max_iter):
    """Return (beta, rho, iterations, converged); the decision function is k_row . beta - rho."""
    n = y.shape[0]
    s = np.empty(2 * n)
    grad = np.empty(2 * n)
    for t in range(n):
        s[t] = 1.0
        s[t + n] = -1.0
        grad[t] = eps - y[t]
        grad[t + n] = eps + y[t]
    a = np.zeros(2 * n)

    converged = False
    iterations = 0
    while iterations < max_iter:
        i, j, gap = _select_pair(k, s, a, grad, c, n)
        if i == -1 or j == -1 or gap < tol:
            converged = True
            break
        _update_pair(k, s, a, grad, c, n, i, j)
        iterations += 1

    # max_iter may be hit exactly at the optimum
    if not converged:
        i, j, gap = _select_pair(k, s, a, grad, c, n)
        converged = i == -1 or j == -1 or gap < tol

    beta = a[:n] - a[n:]
    return beta, _offset(s, a, grad, c), iterations, converged
