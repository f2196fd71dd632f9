"""Direct-summation references for the optimised estimators.

Everything here follows the textbook formulas literally: every mirror image
of every sample, every ordered pair ``i != j``, every ``(k, k')`` pair. Only
suitable for small inputs; used by the test suite and ``divest validate``.
"""
import itertools
import math

import numpy as np

from .estimators import _snap, c1, c2, split_half
from .fourier import frequency_set
from .kde import as_points, bandwidth


def naive_phi(k, x):
    return complex(math.cos(2 * math.pi * sum(kj * xj for kj, xj in zip(k, x))),
                   math.sin(2 * math.pi * sum(kj * xj for kj, xj in zip(k, x))))


def naive_kde(samples, kernel, h, x):
    """KDE with all ``3^d`` reflections of every sample materialised."""
    samples = as_points(samples, kernel.d)
    x = as_points(x, kernel.d)
    images = []
    for shifts in itertools.product((0, 1, 2), repeat=kernel.d):
        img = samples.copy()
        for j, sh in enumerate(shifts):
            if sh == 1:
                img[:, j] = -img[:, j]
            elif sh == 2:
                img[:, j] = 2.0 - img[:, j]
        images.append(img)
    images = np.concatenate(images)
    out = np.empty(x.shape[0])
    for q in range(x.shape[0]):
        out[q] = kernel((x[q] - images) / h).sum()
    return out / (samples.shape[0] * h**kernel.d)


def naive_truncated_kde(samples, cfg, x):
    n = as_points(samples, cfg.d).shape[0]
    h = bandwidth(n, cfg.s, cfg.d, cfg.c_h)
    raw = naive_kde(samples, cfg.kernel, h, x)
    ok = (raw >= cfg.kappa_l - cfg.eps) & (raw <= cfg.kappa_u + cfg.eps)
    return np.where(ok, raw, 1.0)


def naive_bilinear(X, Y, psi_y, M):
    X = as_points(X, M.d)
    Y = as_points(Y, M.d)
    total = 0j
    for j, y in enumerate(Y):
        for k in M.members:
            a_k = sum(naive_phi(k, x).conjugate() for x in X) / len(X)
            total += a_k * naive_phi(k, y) * psi_y[j]
    return (total / len(Y)).real


def naive_b_matrix(psi_nodes, M, grid):
    nodes = grid.nodes
    members = [tuple(k) for k in M.members]
    out = np.empty((M.size, M.size), dtype=np.complex128)
    for a, k in enumerate(members):
        for b, kk in enumerate(members):
            s = np.asarray(k) + np.asarray(kk)
            out[a, b] = np.mean(np.exp(2j * np.pi * nodes @ s) * psi_nodes)
    return out


def naive_quadratic(X, psi_x, M, B):
    X = as_points(X, M.d)
    n = len(X)
    ph = np.array([[naive_phi(k, x) for k in M.members] for x in X])
    B = np.asarray(B)
    first = second = 0j
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            first += np.sum(ph[i].conj() * ph[j]) * psi_x[j]
            second += ph[i].conj() @ B @ ph[j].conj()
    return ((2 * first - second) / (n * (n - 1))).real


def naive_t_quadratic(X, Y, cfg):
    """Term-by-term assembly of the second-order estimator."""
    a, b = cfg.alpha, cfg.beta
    X, Y = as_points(X, cfg.d), as_points(Y, cfg.d)
    X1, X2 = split_half(X)
    Y1, Y2 = split_half(Y)
    M = frequency_set(min(len(X2), len(Y2)), cfg.s_prime, cfg.d, cfg.c_m, cfg.lattice_mode)
    nodes = cfg.grid.nodes
    pG, qG = naive_truncated_kde(X1, cfg, nodes), naive_truncated_kde(Y1, cfg, nodes)
    pX, qX = naive_truncated_kde(X1, cfg, X2), naive_truncated_kde(Y1, cfg, X2)
    pY, qY = naive_truncated_kde(X1, cfg, Y2), naive_truncated_kde(Y1, cfg, Y2)
    terms = {}
    coef = _snap(c2(a, b))
    if coef != 0.0:
        terms["plugin"] = coef * float(np.mean(pG**a * qG**b))
    lin = 2.0 - a - b
    terms["linear_p"] = a * lin * float(np.mean(pX ** (a - 1) * qX**b)) if a * lin else 0.0
    terms["linear_q"] = b * lin * float(np.mean(pY**a * qY ** (b - 1))) if b * lin else 0.0
    qp, qq = 0.5 * a * (a - 1), 0.5 * b * (b - 1)
    terms["quadratic_p"] = naive_quadratic(
        X2, qp * pX ** (a - 2) * qX**b, M, naive_b_matrix(qp * pG ** (a - 2) * qG**b, M, cfg.grid)
    ) if qp else 0.0
    terms["quadratic_q"] = naive_quadratic(
        Y2, qq * pY**a * qY ** (b - 2), M, naive_b_matrix(qq * pG**a * qG ** (b - 2), M, cfg.grid)
    ) if qq else 0.0
    terms["bilinear"] = naive_bilinear(X2, Y2, a * b * pY ** (a - 1) * qY ** (b - 1), M) if a * b else 0.0
    return sum(terms.values()), terms


def naive_t_linear(X, Y, cfg):
    a, b = cfg.alpha, cfg.beta
    X, Y = as_points(X, cfg.d), as_points(Y, cfg.d)
    X1, X2 = split_half(X)
    Y1, Y2 = split_half(Y)
    terms = {}
    coef = _snap(c1(a, b))
    if coef != 0.0:
        nodes = cfg.grid.nodes
        terms["plugin"] = coef * float(np.mean(
            naive_truncated_kde(X1, cfg, nodes) ** a * naive_truncated_kde(Y1, cfg, nodes) ** b))
    pX, qX = naive_truncated_kde(X1, cfg, X2), naive_truncated_kde(Y1, cfg, X2)
    pY, qY = naive_truncated_kde(X1, cfg, Y2), naive_truncated_kde(Y1, cfg, Y2)
    terms["linear_p"] = a * float(np.mean(pX ** (a - 1) * qX**b)) if a else 0.0
    terms["linear_q"] = b * float(np.mean(pY**a * qY ** (b - 1))) if b else 0.0
    return sum(terms.values()), terms


def naive_l2(X, Y, cfg):
    X, Y = as_points(X, cfg.d), as_points(Y, cfg.d)
    M = frequency_set(min(len(X), len(Y)), cfg.s_prime, cfg.d, cfg.c_m, cfg.lattice_mode)
    ident = np.zeros((M.size, M.size))
    for a, k in enumerate(M.members):
        for b, kk in enumerate(M.members):
            ident[a, b] = float(np.all(k + kk == 0))
    tp = naive_quadratic(X, np.ones(len(X)), M, ident)
    tq = naive_quadratic(Y, np.ones(len(Y)), M, ident)
    tpq = naive_bilinear(X, Y, np.full(len(Y), 2.0), M)
    return tp + tq - tpq, {"theta_p": tp, "theta_q": tq, "cross_2pq": tpq}
