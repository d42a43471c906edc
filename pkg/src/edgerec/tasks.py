"""Downstream network tasks on true or recovered edge activity.

Tie strengths, the node-kernel baseline, the disparity-filter multiscale
backbone, ROC/AUC scoring of backbone agreement, and the correlation
measures used to compare true and recovered matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import rankdata

from .activity import as_values
from .errors import DataValidationError, DegenerateTruthError, ZeroVarianceError
from .graph import Graph

__all__ = [
    "BackboneLabels",
    "RocCurve",
    "tie_strengths",
    "kernel_baseline",
    "disparity_backbone",
    "roc_curve",
    "auc",
    "pearson",
    "spearman",
    "DEFAULT_ALPHA_GRID",
]

# Fixed log-spaced sweep of the backbone strength parameter used for ROC curves.
DEFAULT_ALPHA_GRID = np.geomspace(1e-4, 0.999, num=50)


@dataclass(frozen=True, eq=False)
class BackboneLabels:
    """Per-edge backbone membership flags at strength parameter `alpha`."""

    flags: np.ndarray
    alpha: float


@dataclass(frozen=True, eq=False)
class RocCurve:
    """ROC points sorted by false positive rate, including (0,0) and (1,1)."""

    fpr: np.ndarray
    tpr: np.ndarray
    sweep: np.ndarray


def tie_strengths(E) -> np.ndarray:
    """Total interaction weight per edge: the row sums of `E`."""
    return as_values(E).sum(axis=1)


def kernel_baseline(N, g: Graph) -> np.ndarray:
    """Tie-strength estimate straight from node activity, skipping recovery.

    For each edge ``(i, j)`` of `g`, the inner product of node rows
    ``N_i . N_j``. Non-edges are not scored.
    """
    vals = as_values(N)
    if vals.shape[0] != g.n:
        raise DataValidationError(
            f"node activity has {vals.shape[0]} rows but graph has {g.n} nodes")
    w = np.empty(g.m)
    for e, (u, v) in enumerate(g.edges):
        w[e] = float(vals[u] @ vals[v])
    return w


def disparity_backbone(g: Graph, w: np.ndarray, alpha: float) -> BackboneLabels:
    """Multiscale backbone of locally significant edges.

    Edge ``(i, j)`` is flagged when ``(1 - p_ij)^(k_i - 1) < alpha`` holds
    from at least one endpoint, with ``p_ij = w_ij / sum_j' w_ij'`` the
    locally normalized weight and ``k_i`` the static degree. Degree-1
    endpoints and endpoints with zero total strength never flag from their
    side, so the classifier stays total on recovered activity with zero rows.
    """
    if not 0.0 < alpha < 1.0:
        raise DataValidationError(f"alpha must lie in (0, 1), got {alpha}")
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (g.m,):
        raise DataValidationError(f"expected {g.m} edge weights, got shape {w.shape}")
    if np.any(w < 0):
        raise DataValidationError("tie strengths must be nonnegative")
    strength = np.zeros(g.n)
    for e, (u, v) in enumerate(g.edges):
        strength[u] += w[e]
        strength[v] += w[e]
    deg = g.degrees
    flags = np.zeros(g.m, dtype=bool)
    for e, (u, v) in enumerate(g.edges):
        for node in (u, v):
            if deg[node] < 2 or strength[node] <= 0.0:
                continue
            p = w[e] / strength[node]
            if (1.0 - p) ** (deg[node] - 1) < alpha:
                flags[e] = True
                break
    return BackboneLabels(flags=flags, alpha=float(alpha))


def roc_curve(truth: BackboneLabels,
              scored: Callable[[float], BackboneLabels],
              sweep: np.ndarray | None = None) -> RocCurve:
    """ROC of backbone labels from recovered data against a fixed truth.

    `scored` maps a strength parameter ``alpha'`` to labels; it is evaluated
    on `sweep` (default :data:`DEFAULT_ALPHA_GRID`). Points are sorted by
    FPR (stable, so equal-FPR points keep sweep order) with (0,0) and (1,1)
    attached.
    """
    truth_flags = np.asarray(truth.flags, dtype=bool)
    pos = int(truth_flags.sum())
    neg = int((~truth_flags).sum())
    if pos == 0 or neg == 0:
        raise DegenerateTruthError(
            f"truth labels are degenerate: {pos} positives, {neg} negatives")
    alphas = DEFAULT_ALPHA_GRID if sweep is None else np.asarray(sweep, dtype=np.float64)
    fprs, tprs = [], []
    for a in alphas:
        got = np.asarray(scored(float(a)).flags, dtype=bool)
        if got.shape != truth_flags.shape:
            raise DataValidationError("scored labels have mismatched length")
        tprs.append(float((got & truth_flags).sum()) / pos)
        fprs.append(float((got & ~truth_flags).sum()) / neg)
    order = np.argsort(np.asarray(fprs), kind="stable")
    fpr = np.concatenate(([0.0], np.asarray(fprs)[order], [1.0]))
    tpr = np.concatenate(([0.0], np.asarray(tprs)[order], [1.0]))
    return RocCurve(fpr=fpr, tpr=tpr, sweep=alphas)


def auc(curve: RocCurve) -> float:
    """Area under the ROC curve by trapezoidal integration over FPR."""
    return float(np.trapezoid(curve.tpr, curve.fpr))


def pearson(a: Sequence[float], b: Sequence[float]) -> float:
    """Product-moment correlation of two equal-length samples.

    Raises :class:`ZeroVarianceError` when either sample is constant, so an
    undefined correlation can never be confused with a numeric result.
    """
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    if x.shape != y.shape or x.size < 2:
        raise DataValidationError(
            f"correlation needs two equal-length samples of size >= 2, "
            f"got {x.size} and {y.size}")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(np.linalg.norm(dx))
    sy = float(np.linalg.norm(dy))
    if sx == 0.0 or sy == 0.0:
        raise ZeroVarianceError("correlation undefined: zero variance")
    return float(dx @ dy) / (sx * sy)


def spearman(a: Sequence[float], b: Sequence[float]) -> float:
    """Rank correlation: Pearson on average-ranked data (ties share the mean rank)."""
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    if x.shape != y.shape or x.size < 2:
        raise DataValidationError(
            f"correlation needs two equal-length samples of size >= 2, "
            f"got {x.size} and {y.size}")
    return pearson(rankdata(x, method="average"), rankdata(y, method="average"))
