""" End-to-end runs: anchor graphs, solve, evaluation and CSV / JSON exports.

Files written to the output folder:
    labels.csv        index,label
    view_labels.csv   index,view0,...,view{V-1}
    fused_H.csv       n rows of K values
    trace.csv         iter,res_q,res_j,objective[,acc]
    summary.json      configuration, per-repetition results, mean and variance of metrics
    sweep.csv         value,rep,acc,nmi,purity,seconds (run_sweep only)
"""

import csv
import io
import json
import os
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace
from typing import List
import numpy as np
from pytpc.anchor import AnchorConfig, align_anchor_graphs, build_view_graphs, resolve_sizes, \
    select_view_anchors, stack_anchor_tensor
from pytpc.common.parallel import num_threads, parallel_map
from pytpc.metrics import evaluate
from pytpc.solver import SolverConfig, TPSolver


class PipelineError(RuntimeError):
    """ Failure of one pipeline stage.

    Attributes:
        stage (str): standardize, anchors, graphs, solve, metrics or export.
        error (Exception): the original error.
    """

    def __init__(self, stage, error):
        self.stage = stage
        self.error = error
        super(PipelineError, self).__init__("stage {} failed: {}: {}".format(
            stage, type(error).__name__, error))


@contextmanager
def stage(name):
    try:
        yield
    except PipelineError:
        raise
    except Exception as e:
        raise PipelineError(name, e) from e


sweep_parameters = ("anchor_rate", "p", "lambda")


@dataclass
class SweepSpec:
    """ Hyperparameter sweep.

    Attributes:
        parameter (str): anchor_rate, p or lambda.
        values (list of float): values to try.
        repetitions (int): runs per value, seeds seed, seed + 1, ...
    """
    parameter: str
    values: List[float] = field(default_factory=list)
    repetitions: int = 10

    def __post_init__(self):
        if self.parameter not in sweep_parameters:
            raise ValueError("cannot sweep {!r}, choose from {}".format(
                self.parameter, ", ".join(sweep_parameters)))
        if not self.values:
            raise ValueError("sweep over {} has no values".format(self.parameter))
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")
        for v in self.values:
            if self.parameter in ("anchor_rate", "p") and not 0 < v <= 1:
                raise ValueError("{} = {} outside (0, 1]".format(self.parameter, v))
            if self.parameter == "lambda" and v < 0:
                raise ValueError("lambda = {} is negative".format(v))

    def configure(self, value, solver_cfg, anchor_cfg):
        """ Copies of the configurations with the swept parameter set to value. """
        if self.parameter == "anchor_rate":
            return solver_cfg, replace(anchor_cfg, anchor_rate=value, n_anchors=None)
        if self.parameter == "p":
            return replace(solver_cfg, p=value), anchor_cfg
        return replace(solver_cfg, lam=value), anchor_cfg


def default_output_path(name):
    return "./pytpc_outputs/{}/".format(name or "dataset")


def resolve_n_clusters(dataset, n_clusters):
    if n_clusters is not None:
        return n_clusters
    if dataset.labels is None:
        raise ValueError("number of clusters must be given for a dataset without labels")
    return dataset.n_clusters


def run_once(dataset, n_clusters, solver_cfg: SolverConfig, anchor_cfg: AnchorConfig,
             verbose=True):
    """ standardize -> anchors -> graphs -> tensor -> solve -> metrics for one seed. """
    start_time = time.time()
    with stage("standardize"):
        standardized = dataset.standardized()
    with stage("anchors"):
        m, k = resolve_sizes(standardized.n, anchor_cfg)
        anchors = select_view_anchors(standardized, m, anchor_cfg.seed)
    with stage("graphs"):
        graphs = build_view_graphs(standardized, anchors, k)
        if anchor_cfg.align:
            graphs = align_anchor_graphs(graphs)[0]
        S = stack_anchor_tensor(graphs)
    with stage("solve"):
        solver = TPSolver(S, n_clusters, solver_cfg, labels_true=dataset.labels,
                          verbose=verbose)
        result = solver.solve()
    with stage("metrics"):
        if dataset.labels is not None:
            result.metrics = evaluate(result.labels, dataset.labels)
    result.seconds = time.time() - start_time
    return result


def mean_variance(values):
    values = np.asarray(values, dtype=np.float64)
    return {"mean": float(values.mean()), "variance": float(values.var()),
            "values": [float(v) for v in values]}


def summarize(dataset, n_clusters, solver_cfg, anchor_cfg, results):
    summary = {
        "name": dataset.name,
        "n": dataset.n,
        "V": dataset.V,
        "K": n_clusters,
        "repetitions": len(results),
        "solver": solver_cfg.as_dict(),
        "anchor": asdict(anchor_cfg),
        "converged": [bool(r.converged) for r in results],
        "iterations": [int(r.n_iter) for r in results],
        "seconds": mean_variance([r.seconds for r in results]),
    }
    if results and results[0].metrics:
        summary["metrics"] = {k: mean_variance([r.metrics[k] for r in results])
                              for k in ("acc", "nmi", "purity")}
    return summary


def _fmt(x):
    return "{:.17g}".format(x)


def write_result(result, output_path):
    """ Write labels.csv, view_labels.csv, fused_H.csv and trace.csv. """
    os.makedirs(output_path, exist_ok=True)
    with io.open(os.path.join(output_path, "labels.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["index", "label"])
        for i, label in enumerate(result.labels):
            w.writerow([i, int(label)])

    with io.open(os.path.join(output_path, "view_labels.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["index"] + ["view{}".format(v) for v in range(result.view_labels.shape[0])])
        for i in range(result.view_labels.shape[1]):
            w.writerow([i] + [int(l) for l in result.view_labels[:, i]])

    np.savetxt(os.path.join(output_path, "fused_H.csv"), result.fused_H, delimiter=",",
               fmt="%.17g")

    with_acc = any(row[4] is not None for row in result.trace)
    with io.open(os.path.join(output_path, "trace.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["iter", "res_q", "res_j", "objective"] + (["acc"] if with_acc else []))
        for it, res_q, res_j, obj, acc in result.trace:
            w.writerow([it, _fmt(res_q), _fmt(res_j), _fmt(obj)] + ([_fmt(acc)] if with_acc else []))


def write_summary(summary, output_path):
    os.makedirs(output_path, exist_ok=True)
    with io.open(os.path.join(output_path, "summary.json"), "w", encoding="utf8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")


def read_fused_H(path):
    """ Read fused_H.csv back into an n x K array. """
    return np.loadtxt(path, delimiter=",", ndmin=2)


def run_pipeline(dataset, solver_cfg: SolverConfig = None, anchor_cfg: AnchorConfig = None,
                 n_clusters=None, output_path=None, repetitions=1, verbose=True):
    """ Cluster a dataset repetitions times (seeds seed, seed + 1, ...) and export the results.

    The CSV files describe the first repetition; summary.json covers all of them.

    Args:
        dataset (MultiViewDataset): raw (unstandardized) views, optional labels.
        solver_cfg (SolverConfig): solver parameters.
        anchor_cfg (AnchorConfig): anchor graph parameters.
        n_clusters (int): K, inferred from the labels when omitted.
        output_path (str): output folder, None to skip writing files.
        repetitions (int): number of runs.
        verbose (bool): print solver progress.

    Returns:
        (list of ClusteringResult, summary dict)
    """
    solver_cfg = solver_cfg or SolverConfig()
    anchor_cfg = anchor_cfg or AnchorConfig()
    if repetitions < 1:
        raise ValueError("repetitions must be positive")
    n_clusters = resolve_n_clusters(dataset, n_clusters)

    results = []
    for r in range(repetitions):
        if verbose:
            print("===================== Repetition {} / {} =====================".format(
                r + 1, repetitions))
        results.append(run_once(dataset, n_clusters,
                                replace(solver_cfg, seed=solver_cfg.seed + r),
                                replace(anchor_cfg, seed=anchor_cfg.seed + r),
                                verbose=verbose))
        if verbose and results[-1].metrics:
            print("  " + ", ".join("{} = {:.4f}".format(k.upper(), v)
                                   for k, v in sorted(results[-1].metrics.items())))

    summary = summarize(dataset, n_clusters, solver_cfg, anchor_cfg, results)
    if output_path is not None:
        with stage("export"):
            write_result(results[0], output_path)
            write_summary(summary, output_path)
    return results, summary


def run_sweep(dataset, sweep: SweepSpec, solver_cfg: SolverConfig = None,
              anchor_cfg: AnchorConfig = None, n_clusters=None, output_path=None,
              verbose=True):
    """ Run every (value, repetition) pair of a sweep and export sweep.csv.

    Jobs run in a thread pool when THREADS > 1.

    Returns:
        list of dict with keys value, rep, acc, nmi, purity, seconds.
    """
    solver_cfg = solver_cfg or SolverConfig()
    anchor_cfg = anchor_cfg or AnchorConfig()
    if dataset.labels is None:
        raise ValueError("a sweep needs ground-truth labels")
    n_clusters = resolve_n_clusters(dataset, n_clusters)
    jobs = [(value, r) for value in sweep.values for r in range(sweep.repetitions)]
    quiet = num_threads() > 1

    def one_job(job):
        value, r = job
        scfg, acfg = sweep.configure(value, solver_cfg, anchor_cfg)
        if verbose and not quiet:
            print("===================== {} = {}, repetition {} =====================".format(
                sweep.parameter, value, r))
        result = run_once(dataset, n_clusters, replace(scfg, seed=scfg.seed + r),
                          replace(acfg, seed=acfg.seed + r), verbose=verbose and not quiet)
        row = {"value": value, "rep": r, "seconds": result.seconds}
        row.update(result.metrics)
        return row

    rows = parallel_map(one_job, jobs)
    if output_path is not None:
        with stage("export"):
            os.makedirs(output_path, exist_ok=True)
            with io.open(os.path.join(output_path, "sweep.csv"), "w", newline="") as f:
                w = csv.writer(f, lineterminator="\n")
                w.writerow(["value", "rep", "acc", "nmi", "purity", "seconds"])
                for row in rows:
                    w.writerow([_fmt(row["value"]), row["rep"]]
                               + [_fmt(row[k]) for k in ("acc", "nmi", "purity", "seconds")])
    return rows
