""" Command line interface.

    pytpc cluster --manifest data/manifest.json --lambda 50 --p 0.9
    pytpc synth --seed 0 --output data/
    pytpc sweep --manifest data/manifest.json --parameter p --values 0.1,0.5,1.0
    pytpc eval --pred pytpc_outputs/data/labels.csv --truth data/labels.txt

Exit codes: 0 success, 2 unreadable or inconsistent input, 3 solver not converged
(with --strict), 1 any other error.
"""

import argparse
import io
import json
import sys
import numpy as np
from pytpc.anchor import AnchorConfig
from pytpc.loader import ParseError, ShapeMismatch, SyntheticLoader, TextLoader, write_dataset
from pytpc.loader.text_loader import read_labels
from pytpc.metrics import LengthMismatch, evaluate
from pytpc.pipeline import PipelineError, SweepSpec, default_output_path, run_pipeline, run_sweep
from pytpc.solver import SolverConfig

exit_ok = 0
exit_error = 1
exit_input = 2
exit_not_converged = 3

input_errors = (ParseError, ShapeMismatch, LengthMismatch, FileNotFoundError)


def add_solver_flags(parser):
    d = SolverConfig()
    g = parser.add_argument_group("solver")
    g.add_argument("--lambda", dest="lam", type=float, default=d.lam)
    g.add_argument("--p", type=float, default=d.p)
    g.add_argument("--mu0", type=float, default=d.mu0)
    g.add_argument("--rho0", type=float, default=d.rho0)
    g.add_argument("--eta", type=float, default=d.eta)
    g.add_argument("--penalty-cap", type=float, default=d.penalty_cap)
    g.add_argument("--beta-margin", type=float, default=d.beta_margin)
    g.add_argument("--inner-g-iters", type=int, default=d.inner_g_iters)
    g.add_argument("--inner-g-tol", type=float, default=d.inner_g_tol)
    g.add_argument("--tol", type=float, default=d.tol)
    g.add_argument("--max-iter", type=int, default=d.max_iter)
    g.add_argument("--seed", type=int, default=d.seed)
    g.add_argument("--h-damping", type=float, default=d.h_damping)
    g.add_argument("--no-objective", dest="track_objective", action="store_false",
                   help="skip the per-iteration objective and ACC")


def add_anchor_flags(parser):
    d = AnchorConfig()
    g = parser.add_argument_group("anchor graphs")
    g.add_argument("--anchor-rate", type=float, default=d.anchor_rate)
    g.add_argument("--n-anchors", type=int, default=d.n_anchors,
                   help="number of anchors, overrides --anchor-rate")
    g.add_argument("--k", type=int, default=d.k, help="neighbors per sample")
    g.add_argument("--no-align", dest="align", action="store_false",
                   help="keep the k-means order of the anchors of every view")


def add_run_flags(parser):
    parser.add_argument("--manifest", required=True, help="dataset manifest JSON")
    parser.add_argument("--clusters", type=int, default=None,
                        help="number of clusters, inferred from the labels when omitted")
    parser.add_argument("--output", default=None, help="output folder")
    parser.add_argument("--quiet", action="store_true", help="no progress output")
    add_solver_flags(parser)
    add_anchor_flags(parser)


def solver_config(args):
    return SolverConfig(lam=args.lam, p=args.p, mu0=args.mu0, rho0=args.rho0, eta=args.eta,
                        penalty_cap=args.penalty_cap, beta_margin=args.beta_margin,
                        inner_g_iters=args.inner_g_iters, inner_g_tol=args.inner_g_tol,
                        tol=args.tol, max_iter=args.max_iter, seed=args.seed,
                        h_damping=args.h_damping, track_objective=args.track_objective)


def anchor_config(args):
    return AnchorConfig(anchor_rate=args.anchor_rate, k=args.k, seed=args.seed,
                        n_anchors=args.n_anchors, align=args.align)


def parse_values(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers, got {!r}".format(text))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pytpc", description="Multi-view clustering by anchor graph tensor projection")
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    p = sub.add_parser("cluster", help="cluster a dataset")
    add_run_flags(p)
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--strict", action="store_true",
                   help="exit with code 3 when the solver does not converge")

    p = sub.add_parser("synth", help="write a synthetic Gaussian-blob dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", required=True, help="dataset folder")
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--clusters", type=int, default=4)
    p.add_argument("--views", type=int, default=3)
    p.add_argument("--dims", type=lambda s: [int(float(v)) for v in parse_values(s)],
                   default=None, help="comma-separated feature dimensions, one per view")
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--noise", type=float, default=1.0)

    p = sub.add_parser("sweep", help="hyperparameter sweep")
    add_run_flags(p)
    p.add_argument("--parameter", required=True, choices=["anchor_rate", "p", "lambda"])
    p.add_argument("--values", type=parse_values, required=True)
    p.add_argument("--repetitions", type=int, default=10)

    p = sub.add_parser("eval", help="score predicted labels against ground truth")
    p.add_argument("--pred", required=True, help="labels.csv or one label per line")
    p.add_argument("--truth", required=True, help="one label per line")
    return parser


def read_predicted(path):
    """ Labels from labels.csv (index,label) or a plain one-label-per-line file. """
    with io.open(path, "r", encoding="utf8") as f:
        first = f.readline().strip()
    if first.replace(" ", "") != "index,label":
        return read_labels(path)
    labels = {}
    with io.open(path, "r", encoding="utf8") as f:
        f.readline()
        for iline, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                index, label = (int(v) for v in line.split(","))
            except ValueError:
                raise ParseError(path, iline, None, "expected index,label: {!r}".format(line))
            labels[index] = label
    if sorted(labels) != list(range(len(labels))):
        raise ParseError(path, 1, None, "indices are not 0..n-1")
    return np.array([labels[i] for i in range(len(labels))], dtype=int)


def cmd_cluster(args):
    dataset = TextLoader(args.manifest).load()
    output = args.output or default_output_path(dataset.name)
    results, summary = run_pipeline(dataset, solver_config(args), anchor_config(args),
                                    n_clusters=args.clusters, output_path=output,
                                    repetitions=args.repetitions, verbose=not args.quiet)
    print("Results written to {}".format(output))
    if "metrics" in summary:
        print(", ".join("{} = {:.4f}".format(k.upper(), v["mean"])
                        for k, v in sorted(summary["metrics"].items())))
    if args.strict and not all(r.converged for r in results):
        print("solver did not converge", file=sys.stderr)
        return exit_not_converged
    return exit_ok


def cmd_synth(args):
    dims = args.dims if args.dims is not None else [10] * args.views
    loader = SyntheticLoader(n=args.n, K=args.clusters, V=args.views, dims=dims,
                             separation=args.separation, noise=args.noise, seed=args.seed)
    manifest = write_dataset(loader.load(), args.output)
    print("{} written to {}".format(loader.describe(), manifest))
    return exit_ok


def cmd_sweep(args):
    dataset = TextLoader(args.manifest).load()
    sweep = SweepSpec(args.parameter, args.values, args.repetitions)
    output = args.output or default_output_path(dataset.name)
    rows = run_sweep(dataset, sweep, solver_config(args), anchor_config(args),
                     n_clusters=args.clusters, output_path=output, verbose=not args.quiet)
    print("{} runs written to {}".format(len(rows), output))
    return exit_ok


def cmd_eval(args):
    scores = evaluate(read_predicted(args.pred), read_labels(args.truth))
    print(json.dumps(scores, indent=2, sort_keys=True))
    return exit_ok


commands = {"cluster": cmd_cluster, "synth": cmd_synth, "sweep": cmd_sweep, "eval": cmd_eval}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return commands[args.command](args)
    except input_errors as e:
        print("pytpc: {}".format(e), file=sys.stderr)
        return exit_input
    except PipelineError as e:
        print("pytpc: {}".format(e), file=sys.stderr)
        return exit_input if isinstance(e.error, input_errors) else exit_error
    except Exception as e:
        print("pytpc: {}: {}".format(type(e).__name__, e), file=sys.stderr)
        return exit_error


if __name__ == "__main__":
    sys.exit(main())
