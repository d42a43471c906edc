"""Batch command-line surface.

Subcommands: synth, ingest, project, recover, evaluate, backbone, diagnose.
Every flag has a config-file equivalent (``--config file.json``, a flat JSON
object keyed by the long option name with dashes as underscores); flags
override the config. Each command writes one JSON report embedding the
resolved config and the library version, plus flat plot-ready CSV tables.

Exit codes: 0 success, 1 usage error, 2 data validation error, 3 internal
numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .activity import EdgeActivityMatrix, Window, project, window_events
from .benchgen import ScenarioSpec, gen_activity, gen_graph
from .diagnostics import (activity_stats, degree_assortativity, error_series,
                          expected_active_nodes, node_activation_nulls,
                          re_check, re_check_series)
from .errors import (DataValidationError, DegenerateTruthError, EdgerecError,
                     ZeroVarianceError)
from . import fileio
from .graph import active_subgraph, incidence
from .solvers import AUTO, SolverConfig, least_norm, sparse_recover
from .tasks import (auc, disparity_backbone, pearson, roc_curve, spearman,
                    tie_strengths)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _load_config(args)
        return args.handler(args, config)
    except (DataValidationError, DegenerateTruthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


def _build_parser() -> _Parser:
    parser = _Parser(prog="edgerec",
                     description="Recover edge activity from node activity "
                                 "and a static graph.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="JSON file of defaults")
        p.add_argument("--out", default=None, help="output directory")
        p.set_defaults(handler=fn)
        return p

    p = add("synth", cmd_synth, "generate a seeded synthetic graph + edge activity")
    p.add_argument("--topology", default=None,
                   choices=["tree", "cycle", "unicyclic", "erdos-renyi", "star"])
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--edges", type=int, default=None, help="edge count (erdos-renyi)")
    p.add_argument("--parity", default=None, choices=["odd", "even"])
    p.add_argument("--timesteps", type=int, default=None)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--values", default=None,
                   help="unit | uniform:A,B | geometric:P")
    p.add_argument("--seed", type=int, default=None)

    p = add("ingest", cmd_ingest, "bin an events CSV into graph + edge activity")
    p.add_argument("--events", default=None)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--windows", type=int, default=None, help="window count T")

    p = add("project", cmd_project, "aggregate edge activity onto nodes (N = B E)")
    p.add_argument("--graph", default=None)
    p.add_argument("--edge-activity", default=None)

    p = add("recover", cmd_recover, "solve B E_hat = N for the edge activity")
    p.add_argument("--graph", default=None)
    p.add_argument("--node-activity", default=None)
    p.add_argument("--method", default=None, choices=["least-norm", "sparse"])
    p.add_argument("--lambda", dest="lam", default=None,
                   help="penalty weight or 'auto'")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-sweeps", type=int, default=None)
    p.add_argument("--grid-size", type=int, default=None)
    p.add_argument("--svd-cutoff", type=float, default=None)
    p.add_argument("--init", default=None, choices=["least-norm", "zero"])
    p.add_argument("--seed", type=int, default=None)

    p = add("evaluate", cmd_evaluate, "score recovered against true edge activity")
    p.add_argument("--true", dest="true_path", default=None)
    p.add_argument("--recovered", default=None)
    p.add_argument("--graph", default=None, help="enables the error bound")

    p = add("backbone", cmd_backbone, "disparity-filter backbone labels and ROC/AUC")
    p.add_argument("--graph", default=None)
    p.add_argument("--edge-activity", default=None, help="truth activity")
    p.add_argument("--recovered", default=None, help="recovered activity to score")
    p.add_argument("--alpha", type=float, action="append", default=None,
                   help="backbone strength (repeatable)")

    p = add("diagnose", cmd_diagnose, "activity stats, nulls, recoverability checks")
    p.add_argument("--graph", default=None)
    p.add_argument("--edge-activity", default=None)
    p.add_argument("--recovered", default=None)
    p.add_argument("--activity-eps", type=float, default=None)

    return parser


def _load_config(args) -> dict:
    if getattr(args, "config", None) is None:
        return {}
    path = Path(args.config)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataValidationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataValidationError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DataValidationError(f"{path}: config must be a JSON object")
    return doc


def _opt(args, config, key, default=None, required=False):
    value = getattr(args, key, None)
    if value is None:
        value = config.get(key, default)
    if required and value is None:
        raise DataValidationError(f"missing required option --{key.replace('_', '-')}")
    return value


def _outdir(args, config) -> Path:
    out = Path(_opt(args, config, "out", required=True))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _report(out: Path, name: str, command: str, config: dict, **payload):
    doc = {"command": command, "config": config, "version": __version__}
    doc.update(payload)
    fileio.write_report(out / f"{name}.json", doc)


def _parse_values(spec: str):
    if spec == "unit":
        return "unit", ()
    kind, _, raw = spec.partition(":")
    if kind == "uniform":
        parts = raw.split(",")
        if len(parts) != 2:
            raise DataValidationError(f"uniform values need A,B, got {raw!r}")
        return "uniform", (float(parts[0]), float(parts[1]))
    if kind == "geometric":
        return "geometric-counts", (float(raw),)
    raise DataValidationError(f"unknown value distribution {spec!r}")


def cmd_synth(args, config) -> int:
    out = _outdir(args, config)
    values = _opt(args, config, "values", "unit")
    dist, params = _parse_values(values)
    resolved = {
        "out": str(out),
        "topology": _opt(args, config, "topology", required=True),
        "nodes": int(_opt(args, config, "nodes", required=True)),
        "edges": _opt(args, config, "edges"),
        "parity": _opt(args, config, "parity", "odd"),
        "timesteps": int(_opt(args, config, "timesteps", 1)),
        "density": float(_opt(args, config, "density", 0.0)),
        "values": values,
        "seed": int(_opt(args, config, "seed", 0)),
    }
    spec = ScenarioSpec(topology=resolved["topology"], n_nodes=resolved["nodes"],
                        n_edges=resolved["edges"], cycle_parity=resolved["parity"],
                        timesteps=resolved["timesteps"],
                        activity_density=resolved["density"],
                        value_dist=dist, dist_params=params, seed=resolved["seed"])
    g = gen_graph(spec)
    E = gen_activity(g, spec)
    fileio.write_graph(out / "graph.json", g)
    fileio.write_matrix(out / "E.csv", E.values, kind="edge", window=E.window,
                        graph_path=out / "graph.json")
    _report(out, "synth", "synth", resolved, n=g.n, m=g.m, T=E.T,
            nnz=int(np.count_nonzero(E.values)))
    return 0


def cmd_ingest(args, config) -> int:
    out = _outdir(args, config)
    resolved = {
        "out": str(out),
        "events": str(_opt(args, config, "events", required=True)),
        "t0": float(_opt(args, config, "t0", required=True)),
        "dt": float(_opt(args, config, "dt", required=True)),
        "windows": int(_opt(args, config, "windows", required=True)),
    }
    events = fileio.read_events(resolved["events"])
    g, E, dropped = window_events(events, resolved["t0"], resolved["dt"],
                                  resolved["windows"])
    fileio.write_graph(out / "graph.json", g)
    fileio.write_matrix(out / "E.csv", E.values, kind="edge", window=E.window,
                        graph_path=out / "graph.json")
    _report(out, "ingest", "ingest", resolved, n=g.n, m=g.m, T=E.T,
            events_total=len(events), events_dropped=dropped)
    return 0


def _load_graph_and_matrix(graph_path, matrix_path, expect_kind):
    g = fileio.read_graph(graph_path)
    values, meta = fileio.read_matrix(matrix_path, graph_path=graph_path,
                                      expect_kind=expect_kind)
    expected_rows = g.m if expect_kind == "edge" else g.n
    if values.shape[0] != expected_rows:
        raise DataValidationError(
            f"{matrix_path}: {values.shape[0]} rows but graph implies {expected_rows}")
    return g, values, meta


def cmd_project(args, config) -> int:
    out = _outdir(args, config)
    resolved = {
        "out": str(out),
        "graph": str(_opt(args, config, "graph", required=True)),
        "edge_activity": str(_opt(args, config, "edge_activity", required=True)),
    }
    g, values, meta = _load_graph_and_matrix(resolved["graph"],
                                             resolved["edge_activity"], "edge")
    window = Window(meta.get("t0", 0.0), meta.get("dt", 1.0))
    N = project(incidence(g), EdgeActivityMatrix(values, window=window))
    fileio.write_matrix(out / "N.csv", N.values, kind="node", window=N.window,
                        graph_path=resolved["graph"])
    _report(out, "project", "project", resolved, n=g.n, m=g.m, T=N.T)
    return 0


def cmd_recover(args, config) -> int:
    out = _outdir(args, config)
    lam_raw = _opt(args, config, "lam", AUTO)
    lam = AUTO if str(lam_raw).lower() == AUTO else float(lam_raw)
    resolved = {
        "out": str(out),
        "graph": str(_opt(args, config, "graph", required=True)),
        "node_activity": str(_opt(args, config, "node_activity", required=True)),
        "method": _opt(args, config, "method", "sparse"),
        "lambda": lam,
        "tol": float(_opt(args, config, "tol", 1e-6)),
        "max_sweeps": int(_opt(args, config, "max_sweeps", 1000)),
        "grid_size": int(_opt(args, config, "grid_size", 50)),
        "svd_cutoff": _opt(args, config, "svd_cutoff"),
        "init": _opt(args, config, "init", "least-norm"),
        "seed": int(_opt(args, config, "seed", 0)),
    }
    g, values, meta = _load_graph_and_matrix(resolved["graph"],
                                             resolved["node_activity"], "node")
    cfg = SolverConfig(method=resolved["method"], lam=lam, tol=resolved["tol"],
                       max_sweeps=resolved["max_sweeps"],
                       lambda_grid_size=resolved["grid_size"],
                       svd_cutoff=resolved["svd_cutoff"], init=resolved["init"],
                       seed=resolved["seed"])
    B = incidence(g)
    if cfg.method == "least-norm":
        result = least_norm(B, values, cfg)
    else:
        result = sparse_recover(B, values, cfg)
    window = Window(meta.get("t0", 0.0), meta.get("dt", 1.0))
    fileio.write_matrix(out / "E_hat.csv", result.e_hat, kind="edge",
                        window=window, graph_path=resolved["graph"])
    if result.lambda_path is not None:
        fileio.write_table(out / "lambda_path.csv",
                           ["lambda", "fit_residual", "active_groups", "criterion"],
                           result.lambda_path)
    _report(out, "recover", "recover", resolved, method=result.method,
            lambda_used=result.lambda_used, sweeps=result.sweeps,
            converged=result.converged, kkt_residual=result.kkt_residual,
            fit_residual=result.fit_residual)
    return 0


def _maybe_corr(fn, a, b):
    try:
        return fn(a, b)
    except (ZeroVarianceError, DataValidationError):
        return None


def cmd_evaluate(args, config) -> int:
    out = _outdir(args, config)
    resolved = {
        "out": str(out),
        "true": str(_opt(args, config, "true_path", required=True)),
        "recovered": str(_opt(args, config, "recovered", required=True)),
        "graph": _opt(args, config, "graph"),
    }
    graph_path = resolved["graph"]
    truth, meta_t = fileio.read_matrix(resolved["true"], graph_path=graph_path,
                                       expect_kind="edge")
    got, meta_r = fileio.read_matrix(resolved["recovered"], graph_path=graph_path,
                                     expect_kind="edge")
    if (meta_t.get("graph_sha256") and meta_r.get("graph_sha256")
            and meta_t["graph_sha256"] != meta_r["graph_sha256"]):
        raise DataValidationError(
            "true and recovered matrices were written against different graphs")
    if truth.shape != got.shape:
        raise DataValidationError(
            f"shape mismatch: true {truth.shape} vs recovered {got.shape}")
    n_nodes = fileio.read_graph(graph_path).n if graph_path else None
    err = error_series(truth, got, n_nodes=n_nodes)
    r = _maybe_corr(pearson, truth.ravel(), got.ravel())
    rho = _maybe_corr(spearman, truth.ravel(), got.ravel())
    fileio.write_table(out / "errors.csv",
                       ["t", "abs_err", "rel_err", "rel_defined"],
                       [(t, err.abs_err[t], err.rel_err[t], bool(err.rel_defined[t]))
                        for t in range(truth.shape[1])])
    _report(out, "evaluate", "evaluate", resolved, pearson_r=r, spearman_rho=rho,
            frob_error=err.frob_error, bound=err.bound,
            bound_satisfied=err.bound_satisfied)
    return 0


def cmd_backbone(args, config) -> int:
    out = _outdir(args, config)
    alphas = _opt(args, config, "alpha") or [0.125]
    resolved = {
        "out": str(out),
        "graph": str(_opt(args, config, "graph", required=True)),
        "edge_activity": str(_opt(args, config, "edge_activity", required=True)),
        "recovered": _opt(args, config, "recovered"),
        "alpha": [float(a) for a in alphas],
    }
    g, truth_vals, _ = _load_graph_and_matrix(resolved["graph"],
                                              resolved["edge_activity"], "edge")
    w = tie_strengths(truth_vals)
    labels = {a: disparity_backbone(g, w, a) for a in resolved["alpha"]}
    header = ["source", "target", "weight"] + [f"flagged_{a}" for a in resolved["alpha"]]
    rows = []
    for e, (u, v) in enumerate(g.edges):
        rows.append([g.node_ids[u], g.node_ids[v], w[e]]
                    + [bool(labels[a].flags[e]) for a in resolved["alpha"]])
    fileio.write_table(out / "labels.csv", header, rows)

    aucs = {}
    if resolved["recovered"]:
        _, got_vals, _ = _load_graph_and_matrix(resolved["graph"],
                                                resolved["recovered"], "edge")
        # least-norm output can be negative; strengths are clipped at zero
        w_hat = np.maximum(tie_strengths(got_vals), 0.0)
        roc_rows = []
        for a in resolved["alpha"]:
            try:
                curve = roc_curve(labels[a],
                                  lambda ap: disparity_backbone(g, w_hat, ap))
            except DegenerateTruthError as exc:
                aucs[str(a)] = None
                continue
            aucs[str(a)] = auc(curve)
            for i in range(curve.fpr.size):
                roc_rows.append([a, curve.fpr[i], curve.tpr[i]])
        fileio.write_table(out / "roc.csv", ["alpha_B", "fpr", "tpr"], roc_rows)
        fileio.write_table(out / "auc.csv", ["alpha_B", "auc"],
                           [[a, aucs[str(a)] if aucs[str(a)] is not None else float("nan")]
                            for a in resolved["alpha"]])
    _report(out, "backbone", "backbone", resolved,
            flagged_counts={str(a): int(labels[a].flags.sum()) for a in resolved["alpha"]},
            auc=aucs)
    return 0


def _expected_active_grid(m: int) -> list[int]:
    if m <= 200:
        return list(range(m + 1))
    grid = np.unique(np.linspace(0, m, 201).astype(int))
    return [int(s) for s in grid]


def cmd_diagnose(args, config) -> int:
    out = _outdir(args, config)
    resolved = {
        "out": str(out),
        "graph": str(_opt(args, config, "graph", required=True)),
        "edge_activity": str(_opt(args, config, "edge_activity", required=True)),
        "recovered": _opt(args, config, "recovered"),
        "activity_eps": float(_opt(args, config, "activity_eps", 0.0)),
    }
    eps = resolved["activity_eps"]
    g, vals, _ = _load_graph_and_matrix(resolved["graph"],
                                        resolved["edge_activity"], "edge")
    stats = activity_stats(g, vals, eps=eps)
    verdict = re_check(g)
    verdict_series = re_check_series(g, vals, eps=eps)
    nulls = node_activation_nulls(g, vals, eps=eps)

    err = None
    if resolved["recovered"]:
        _, got, _ = _load_graph_and_matrix(resolved["graph"], resolved["recovered"],
                                           "edge")
        err = error_series(vals, got, n_nodes=g.n)

    T = vals.shape[1]
    assort = []
    for t in range(T):
        sub = active_subgraph(g, vals, t, eps=eps)
        try:
            assort.append(degree_assortativity(g, sub.edge_subset))
        except (ZeroVarianceError, DataValidationError):
            assort.append(float("nan"))
    header = ["t", "s", "n_active", "s_frac", "n_frac", "mean_degree",
              "assortativity", "re_holds"]
    rows = [[t, stats.s[t], stats.n_active[t], stats.s_frac[t], stats.n_frac[t],
             stats.mean_degree[t], assort[t], verdict_series[t].holds]
            for t in range(T)]
    if err is not None:
        header += ["abs_err", "rel_err"]
        for t in range(T):
            rows[t] += [err.abs_err[t], err.rel_err[t]]
    fileio.write_table(out / "timeseries.csv", header, rows)

    fileio.write_table(out / "nodes.csv",
                       ["node", "degree", "frac_active", "null_overall",
                        "null_per_timestep"],
                       [[g.node_ids[i], g.degrees[i], stats.node_frac_active[i],
                         nulls.overall[i], nulls.per_timestep[i]]
                        for i in range(g.n)])
    fileio.write_table(out / "expected_active.csv", ["s", "expected_n_active"],
                       [[s, expected_active_nodes(g, s)]
                        for s in _expected_active_grid(g.m)])

    try:
        static_assort = degree_assortativity(g)
    except (ZeroVarianceError, DataValidationError):
        static_assort = None
    defined = ~np.isnan(np.array(assort))
    extras = {}
    if err is not None:
        ok = err.rel_defined
        extras["err_vs_nfrac_r"] = _maybe_corr(pearson, err.rel_err[ok],
                                               stats.n_frac[ok]) if ok.sum() >= 2 else None
        extras["err_vs_sfrac_r"] = _maybe_corr(pearson, err.rel_err[ok],
                                               stats.s_frac[ok]) if ok.sum() >= 2 else None
        extras["frob_error"] = err.frob_error
        extras["bound"] = err.bound
        extras["bound_satisfied"] = err.bound_satisfied
    _report(out, "diagnose", "diagnose", resolved,
            n=g.n, m=g.m, T=T, aspect_ratio=stats.aspect_ratio,
            mean_degree=g.mean_degree(),
            re_holds=verdict.holds, lambda_min=verdict.lambda_min,
            components={kind: sum(1 for c in verdict.components if c.kind == kind)
                        for kind in ("tree", "odd-unicyclic", "other")},
            re_holds_fraction=float(np.mean([v.holds for v in verdict_series])),
            assortativity_static=static_assort,
            assortativity_defined_fraction=float(defined.mean()) if T else 0.0,
            **extras)
    return 0


if __name__ == "__main__":
    sys.exit(main())
