"""Recover per-edge temporal activity from node activity and a static graph.

The package turns the projection ``B @ E = N`` (incidence matrix times edge
activity equals node activity) around: given ``N`` and the graph, estimate
``E`` by the classical least-norm pseudoinverse or by a nonnegative group
lasso that exploits dynamical sparsity, then score the result with the
downstream tasks and diagnostics in :mod:`edgerec.tasks` and
:mod:`edgerec.diagnostics`.
"""

__version__ = "0.1.0"

from .activity import (Event, EdgeActivityMatrix, NodeActivityMatrix, Window,
                       WindowedEvents, project, window_events)
from .benchgen import ScenarioSpec, gen_activity, gen_graph
from .diagnostics import (ActivityStats, ErrorSeries, ReVerdict,
                          activity_stats, degree_assortativity, error_series,
                          expected_active_nodes, expected_active_nodes_mc,
                          node_activation_nulls, re_check, re_check_series)
from .errors import (DataValidationError, DegenerateTruthError, EdgerecError,
                     ZeroVarianceError)
from .graph import (ActiveSubgraph, Graph, active_subgraph, build_graph,
                    incidence, line_graph, line_graph_adjacency, subgraph)
from .solvers import (AUTO, LambdaPathEntry, RecoveryResult, SolverConfig,
                      kkt_residual, lambda_max, least_norm, select_lambda,
                      sparse_recover)
from .tasks import (BackboneLabels, RocCurve, auc, disparity_backbone,
                    kernel_baseline, pearson, roc_curve, spearman,
                    tie_strengths)

__all__ = [
    "__version__",
    "AUTO",
    "ActiveSubgraph",
    "ActivityStats",
    "BackboneLabels",
    "DataValidationError",
    "DegenerateTruthError",
    "EdgeActivityMatrix",
    "EdgerecError",
    "ErrorSeries",
    "Event",
    "Graph",
    "LambdaPathEntry",
    "NodeActivityMatrix",
    "ReVerdict",
    "RecoveryResult",
    "RocCurve",
    "ScenarioSpec",
    "SolverConfig",
    "Window",
    "WindowedEvents",
    "ZeroVarianceError",
    "active_subgraph",
    "activity_stats",
    "auc",
    "build_graph",
    "degree_assortativity",
    "disparity_backbone",
    "error_series",
    "expected_active_nodes",
    "expected_active_nodes_mc",
    "gen_activity",
    "gen_graph",
    "incidence",
    "kernel_baseline",
    "kkt_residual",
    "lambda_max",
    "least_norm",
    "line_graph",
    "line_graph_adjacency",
    "node_activation_nulls",
    "pearson",
    "project",
    "re_check",
    "re_check_series",
    "roc_curve",
    "select_lambda",
    "sparse_recover",
    "spearman",
    "subgraph",
    "tie_strengths",
    "window_events",
]
