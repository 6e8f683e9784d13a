"""Command-line front end: eval, bench, inspect, convert-check.

Every flag can also be supplied through an environment variable with the
``GENET_`` prefix (flag wins over environment, environment over built-in
default), e.g. ``GENET_SEED=7 genet eval ...``.
"""

import argparse
import os
import sys
import warnings

from . import __version__
from .bench import (
    DEFAULT_PIPELINES,
    format_table,
    report_to_json,
    report_to_tsv,
    run_bench,
    run_eval,
)
from .cascade import load_model_file
from .datasets import TEST_PER_CLASS, TRAIN_PER_CLASS, load_dataset
from .errors import GenetError

ENV_PREFIX = "GENET_"


def _env(name, cast=str, default=None):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    return cast(raw)


def _add_data_args(parser):
    parser.add_argument("--data", default=_env("DATA"), required=_env("DATA") is None,
                        help="dataset file path")
    parser.add_argument("--format", choices=["csv", "bin"],
                        default=_env("FORMAT"),
                        help="dataset format (default: inferred from suffix)")


def _add_run_args(parser):
    parser.add_argument("--k1", type=int, default=_env("K1", int),
                        help="MFA same-class neighbor count (default: per dataset name)")
    parser.add_argument("--k2", type=int, default=_env("K2", int),
                        help="MFA between-class pair count (default: per dataset name)")
    parser.add_argument("--repeats", type=int, default=_env("REPEATS", int, 10),
                        help="number of random splits to average over")
    parser.add_argument("--seed", type=int, default=_env("SEED", int, 0),
                        help="run seed (non-negative)")
    parser.add_argument("--svm-cost", type=float, default=_env("SVM_COST", float, 1.0),
                        help="SVM hinge cost parameter")
    parser.add_argument("--out", default=_env("OUT"),
                        help="write the machine-readable JSON report here")


def _parse_sizes(text):
    try:
        sizes = [int(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}")
    if not sizes or any(k < 1 for k in sizes):
        raise argparse.ArgumentTypeError(f"sizes must be positive: {text!r}")
    return sizes


def _split_args(args, multi):
    if args.train_per_class is not None and args.test_per_class is not None:
        raise SystemExit("pass only one of --train-per-class / --test-per-class")
    if args.train_per_class is not None:
        mode, sizes = TRAIN_PER_CLASS, _parse_sizes(args.train_per_class)
    elif args.test_per_class is not None:
        mode, sizes = TEST_PER_CLASS, _parse_sizes(args.test_per_class)
    else:
        return None, None
    if not multi and len(sizes) != 1:
        raise SystemExit("eval takes exactly one split size")
    return mode, sizes


def _write_reports(report, out_path, with_tsv):
    if out_path is None:
        return
    with open(out_path, "w") as fh:
        fh.write(report_to_json(report))
    if with_tsv:
        base, dot, _ = str(out_path).rpartition(".")
        tsv_path = (base if dot else str(out_path)) + ".tsv"
        with open(tsv_path, "w") as fh:
            fh.write(report_to_tsv(report))


def _load(args):
    dataset = load_dataset(args.data, args.format)
    print(f"loaded {dataset.name}: {dataset.n_features} features,"
          f" {dataset.n_samples} samples, {dataset.labels.n_classes} classes")
    return dataset


def _cmd_eval(args):
    dataset = _load(args)
    mode, sizes = _split_args(args, multi=False)
    if mode is None:
        raise SystemExit("eval needs --train-per-class or --test-per-class")
    report = run_eval(
        dataset, args.pipeline, mode, sizes[0], k1=args.k1, k2=args.k2,
        svm_cost=args.svm_cost, seed=args.seed, repeats=args.repeats,
        config_extra={"data": str(args.data), "command": "eval"},
    )
    cell = report.cells[0]
    if cell.error:
        print(f"ERROR: {cell.error}", file=sys.stderr)
    else:
        accs = ", ".join(f"{a:.4f}" for a in cell.per_repeat)
        print(f"pipeline {cell.pipeline} @ {cell.split_label}: "
              f"mean accuracy {100.0 * cell.mean_accuracy:.2f}% "
              f"(std {100.0 * cell.std_accuracy:.2f}) over {cell.repeats} repeat(s)")
        print(f"per-repeat: [{accs}]")
        for layer in cell.layers:
            note = f" ({'; '.join(layer['warnings'])})" if layer["warnings"] else ""
            print(f"  layer {layer['kind']}: dim {layer['requested_dim']}"
                  f" -> {layer['actual_dim']}, residual {layer['max_residual']:.3e}{note}")
        for w in cell.cascade_warnings:
            print(f"  note: {w}")
        print(f"wall time: {cell.wall_time:.2f}s")
    if args.save_model and not cell.error:
        from .cascade import fit_cascade, parse_pipeline, save_model_file
        from .datasets import SplitProtocol, split

        protocol = SplitProtocol(mode=mode, k=sizes[0], seed=args.seed,
                                 repeats=args.repeats)
        train, _ = split(dataset, protocol, 0)
        k1 = report.config["k1"]
        k2 = report.config["k2"]
        model = fit_cascade(parse_pipeline(args.pipeline), train.X,
                            train.labels, mfa_params=(k1, k2))
        save_model_file(model, args.save_model)
        print(f"model (repeat 0 fit) written to {args.save_model}")
    _write_reports(report, args.out, with_tsv=False)
    return 1 if cell.error else 0


def _cmd_bench(args):
    dataset = _load(args)
    mode, sizes = _split_args(args, multi=True)
    pipelines = args.pipeline if args.pipeline else list(DEFAULT_PIPELINES)
    report = run_bench(
        dataset, pipelines=pipelines, mode=mode, sizes=sizes, k1=args.k1,
        k2=args.k2, svm_cost=args.svm_cost, seed=args.seed,
        repeats=args.repeats,
        config_extra={"data": str(args.data), "command": "bench"},
    )
    print(format_table(report), end="")
    _write_reports(report, args.out, with_tsv=True)
    if args.out:
        print(f"report written to {args.out}")
    return 1 if report.failed else 0


def _cmd_inspect(args):
    model = load_model_file(args.model)
    report = model.fit_report
    print(f"pipeline: {report['pipeline']}")
    print(f"layers: {len(model.layers)}")
    for i, layer in enumerate(report["layers"], start=1):
        ks = ""
        if layer["k1"] is not None:
            ks = f" k1={layer['k1']} k2={layer['k2']}"
        print(f"  {i}. {layer['kind']}{ks}: dim {layer['requested_dim']}"
              f" -> {layer['actual_dim']}, max residual {layer['max_residual']:.3e}"
              f" (scale {layer['residual_scale']:.3e})")
        for w in layer["warnings"]:
            print(f"     warning: {w}")
    for w in report["warnings"]:
        print(f"  note: {w}")
    return 0


def _cmd_convert_check(args):
    dataset = load_dataset(args.data, args.format)
    sizes = dataset.labels.class_sizes
    print(f"name: {dataset.name}")
    print(f"features: {dataset.n_features} "
          f"({dataset.image_height}x{dataset.image_width})")
    print(f"samples: {dataset.n_samples}")
    print(f"classes: {dataset.labels.n_classes} "
          f"(sizes {int(sizes.min())}..{int(sizes.max())})")
    print(f"value range: [{dataset.X.min():.6g}, {dataset.X.max():.6g}]")
    from .bench import default_neighborhoods, default_splits

    nk1, nk2 = default_neighborhoods(dataset.name)
    print(f"default neighborhoods: k1={nk1}, k2={nk2}")
    splits = default_splits(dataset.name)
    if splits:
        print(f"default splits: {splits[0]} {list(splits[1])}")
    else:
        print("default splits: none (pass --train-per-class/--test-per-class)")
    print("OK")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="genet",
        description="Cascaded graph-embedding dimensionality reduction benchmark",
    )
    parser.add_argument("--version", action="version", version=f"genet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one pipeline on one split")
    _add_data_args(p_eval)
    p_eval.add_argument("--pipeline", default=_env("PIPELINE"),
                        required=_env("PIPELINE") is None,
                        help="pipeline text, e.g. 'PCA+MFA(100,40)'")
    p_eval.add_argument("--train-per-class", default=_env("TRAIN_PER_CLASS"))
    p_eval.add_argument("--test-per-class", default=_env("TEST_PER_CLASS"))
    p_eval.add_argument("--save-model", default=None,
                        help="save the repeat-0 fitted cascade here")
    _add_run_args(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_bench = sub.add_parser("bench", help="run the benchmark grid")
    _add_data_args(p_bench)
    p_bench.add_argument("--pipeline", action="append", default=None,
                         help="pipeline text; repeat for several"
                              " (default: the standard 8-pipeline grid)")
    p_bench.add_argument("--train-per-class", default=_env("TRAIN_PER_CLASS"),
                         help="comma-separated sizes, e.g. 1,2,3,4,5")
    p_bench.add_argument("--test-per-class", default=_env("TEST_PER_CLASS"),
                         help="comma-separated sizes, e.g. 30,20,10")
    _add_run_args(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    p_inspect = sub.add_parser("inspect", help="summarize a saved model file")
    p_inspect.add_argument("model", help="model file path")
    p_inspect.set_defaults(func=_cmd_inspect)

    p_check = sub.add_parser("convert-check",
                             help="validate a converted dataset file")
    _add_data_args(p_check)
    p_check.set_defaults(func=_cmd_convert_check)
    return parser


def _plain_warning(message, category, filename, lineno, line=None):
    return f"warning: {message}\n"


def main(argv=None):
    warnings.formatwarning = _plain_warning
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GenetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
