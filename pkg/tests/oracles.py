"""Independent reference implementations used only by the tests.

Everything here favors clarity over speed: explicit double loops, full
matrices, np.linalg.inv, scipy.linalg.sqrtm. None of it shares code with the
package, so agreement is meaningful evidence.
"""

from __future__ import annotations

import itertools

import numpy as np
import scipy.linalg


# kernels, one scalar pair at a time


def k_linear(x, y, **_):
    return float(np.dot(x, y))


def k_poly(x, y, degree=2, gamma=1.0, coef=0.0):
    return float((gamma * np.dot(x, y) + coef) ** degree)


def k_rbf(x, y, gamma=1.0):
    return float(np.exp(-gamma * np.sum((x - y) ** 2)))


def k_lap(x, y, gamma=1.0):
    return float(np.exp(-gamma * np.sum(np.abs(x - y))))


def naive_mmd2_unbiased(x, y, kernel, **kw):
    """Textbook unbiased MMD^2 with explicit loops."""
    m, n = len(x), len(y)
    sxx = sum(
        kernel(x[i], x[j], **kw) for i in range(m) for j in range(m) if i != j
    )
    syy = sum(
        kernel(y[i], y[j], **kw) for i in range(n) for j in range(n) if i != j
    )
    sxy = sum(kernel(x[i], y[j], **kw) for i in range(m) for j in range(n))
    return sxx / (m * (m - 1)) + syy / (n * (n - 1)) - 2.0 * sxy / (m * n)


def naive_energy(x, y):
    m, n = len(x), len(y)
    dxy = sum(
        np.linalg.norm(x[i] - y[j]) for i in range(m) for j in range(n)
    )
    dxx = sum(
        np.linalg.norm(x[i] - x[j]) for i in range(m) for j in range(m)
    )
    dyy = sum(
        np.linalg.norm(y[i] - y[j]) for i in range(n) for j in range(n)
    )
    return 2.0 * dxy / (m * n) - dxx / (m * m) - dyy / (n * n)


def frechet_via_scipy(mu_a, cov_a, mu_b, cov_b):
    """Gaussian Frechet distance through scipy's general sqrtm (Schur
    method), the standard non-symmetrized product form."""
    diff = np.asarray(mu_a) - np.asarray(mu_b)
    prod = scipy.linalg.sqrtm(np.asarray(cov_a) @ np.asarray(cov_b))
    if np.iscomplexobj(prod):
        prod = prod.real
    return float(diff @ diff + np.trace(cov_a) + np.trace(cov_b)
                 - 2.0 * np.trace(prod))


def ot_bruteforce(cost, a, b):
    """Exact transport optimum by enumerating basis supports.

    Every vertex of the transport polytope is basic feasible with at most
    m + n - 1 nonzero cells, so checking all supports of that size finds the
    optimum. Only viable for tiny instances (m*n <= ~12).
    """
    cost = np.asarray(cost, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = cost.shape
    cells = list(itertools.product(range(m), range(n)))
    k = m + n - 1
    rhs = np.concatenate([a, b])
    best = None
    for support in itertools.combinations(cells, k):
        mat = np.zeros((m + n, k))
        for idx, (i, j) in enumerate(support):
            mat[i, idx] = 1.0
            mat[m + j, idx] = 1.0
        # the m+n constraints have rank m+n-1; drop the last
        sol, _, rank, _ = np.linalg.lstsq(mat[:-1], rhs[:-1], rcond=None)
        if rank < k:
            continue
        if np.any(sol < -1e-9):
            continue
        if not np.allclose(mat @ sol, rhs, atol=1e-9):
            continue
        val = float(sum(f * cost[i, j] for f, (i, j) in zip(sol, support)))
        if best is None or val < best:
            best = val
    return best


def finite_diff_grads(loss_fn, weights, eps=1e-6):
    """Central finite differences of a scalar loss over (W, b) layer pairs."""
    grads = []
    for li, (w, bias) in enumerate(weights):
        gw = np.zeros_like(w)
        gb = np.zeros_like(bias)
        for arr, g in ((w, gw), (bias, gb)):
            it = np.nditer(arr, flags=["multi_index"])
            while not it.finished:
                idx = it.multi_index
                orig = arr[idx]
                arr[idx] = orig + eps
                hi = loss_fn(weights)
                arr[idx] = orig - eps
                lo = loss_fn(weights)
                arr[idx] = orig
                g[idx] = (hi - lo) / (2 * eps)
                it.iternext()
        grads.append((gw, gb))
    return grads


def naive_mardia(x):
    """Mardia b1 and b2 with an explicit Gram matrix and matrix inverse."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / n
    g = xc @ np.linalg.inv(cov) @ xc.T
    b1 = float((g**3).sum()) / (n * n)
    b2 = float((np.diag(g) ** 2).sum()) / n
    return b1, b2


def naive_hz_statistic(x):
    """Henze-Zirkler statistic with full pairwise matrices."""
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / n
    sinv = np.linalg.inv(cov)
    beta2 = (((n * (2 * d + 1)) / 4.0) ** (1.0 / (d + 4)) / np.sqrt(2.0)) ** 2
    g = xc @ sinv @ xc.T
    gii = np.diag(g)
    dij = gii[:, None] + gii[None, :] - 2.0 * g
    term1 = float(np.exp(-0.5 * beta2 * dij).sum()) / (n * n)
    term2 = float(np.exp(-beta2 / (2.0 * (1.0 + beta2)) * gii).sum()) / n
    return n * (
        term1
        - 2.0 * (1.0 + beta2) ** (-d / 2.0) * term2
        + (1.0 + 2.0 * beta2) ** (-d / 2.0)
    )


def pearson(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    uc = u - u.mean()
    vc = v - v.mean()
    return float((uc * vc).sum() / np.sqrt((uc**2).sum() * (vc**2).sum()))
