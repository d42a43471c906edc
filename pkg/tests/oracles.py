"""Independent oracles used by the test suite.

These deliberately avoid the library's solution paths: the proximal-gradient
minimizer below is a different algorithm family from the coordinate descent
it checks, and the confusion-matrix and null-model helpers are brute force.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp


def prox_gradient_group_nnls(B, N, lam, max_iters=200_000, tol=1e-13):
    """Brute-force minimizer of the nonnegative group-lasso objective.

    ISTA with the exact proximal map of ``lam * ||row||_2`` plus the
    nonnegativity indicator (clip, then group-shrink), run to stagnation.
    Small instances only.
    """
    Bd = B.toarray() if sp.issparse(B) else np.asarray(B, dtype=np.float64)
    Nv = np.asarray(N, dtype=np.float64)
    n, m = Bd.shape
    gram = Bd.T @ Bd
    lip = float(np.linalg.eigvalsh(gram).max()) / n
    step = 1.0 / lip
    X = np.zeros((m, Nv.shape[1]))
    BtN = Bd.T @ Nv
    for _ in range(max_iters):
        grad = (gram @ X - BtN) / n
        V = np.maximum(X - step * grad, 0.0)
        norms = np.linalg.norm(V, axis=1)
        scale = np.where(norms > 0, np.maximum(0.0, 1.0 - step * lam / np.where(norms > 0, norms, 1.0)), 0.0)
        X_next = V * scale[:, None]
        if np.max(np.abs(X_next - X)) < tol:
            X = X_next
            break
        X = X_next
    return X


def group_objective(B, N, X, lam):
    """The nonnegative group-lasso objective, written independently."""
    Bd = B.toarray() if sp.issparse(B) else np.asarray(B, dtype=np.float64)
    Nv = np.asarray(N, dtype=np.float64)
    n = Bd.shape[0]
    resid = Nv - Bd @ X
    return float((resid * resid).sum()) / (2.0 * n) + lam * float(
        np.linalg.norm(X, axis=1).sum())


def confusion_rates(truth, got):
    """(FPR, TPR) by direct confusion-matrix count."""
    truth = np.asarray(truth, dtype=bool)
    got = np.asarray(got, dtype=bool)
    tp = int((truth & got).sum())
    fp = int((~truth & got).sum())
    fn = int((truth & ~got).sum())
    tn = int((~truth & ~got).sum())
    return fp / (fp + tn), tp / (tp + fn)


def simulate_per_timestep_null(g, s_t, draws=2000, seed=0):
    """Monte Carlo of the per-timestep activation null.

    For each draw and timestep, activates ``s_t`` distinct random edges and
    records which nodes are touched; returns per-node (mean fraction of
    timesteps active, standard error over draws).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    ends = np.asarray(g.edges, dtype=np.int64)
    m = g.m
    fractions = np.zeros((draws, g.n))
    for d in range(draws):
        hit = np.zeros((g.n,), dtype=np.int64)
        for s in s_t:
            if s == 0:
                continue
            picks = rng.choice(m, size=int(s), replace=False)
            active = np.zeros(g.n, dtype=bool)
            active[ends[picks, 0]] = True
            active[ends[picks, 1]] = True
            hit += active
        fractions[d] = hit / len(s_t)
    mean = fractions.mean(axis=0)
    stderr = fractions.std(axis=0, ddof=1) / np.sqrt(draws)
    return mean, stderr
