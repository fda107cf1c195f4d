"""Command-line interface: ``jsnet {simulate,train,predict,eval,emg-extract,grid}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
Log verbosity is taken from ``JSNET_LOG`` (error, info or debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict

import numpy as np

from . import errors, fileio, harness, trainer
from .johnson import DEFAULT_Z_PARAM

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

logger = logging.getLogger("jsnet")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rest_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.replace(":", ",").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected START,END sample indices") from None
    return lo, hi


def _train_fraction(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("train fraction must lie in (0, 1]")
    return v


def _add_train_flags(p):
    p.add_argument("--z-param", type=float, default=DEFAULT_Z_PARAM, help="percentile spacing z")
    p.add_argument(
        "--strict-percentile",
        action="store_true",
        help="fail on dimensions that are not S_U shaped instead of falling back to S_N",
    )


def _add_grid_flags(p):
    p.add_argument("--grid-min", type=float, default=0.0)
    p.add_argument("--grid-max", type=float, default=1.0)
    p.add_argument("--grid-step", type=float, default=0.01)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jsnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="two-class skewed simulation with posterior maps")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-train", type=int, default=100, help="training samples per class")
    p.add_argument("--n-test", type=int, default=10000, help="test samples per class")
    _add_train_flags(p)
    _add_grid_flags(p)

    p = sub.add_parser("train", help="train a model on a labeled CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--baseline", choices=["llr"])
    p.add_argument("--seed", type=int, default=0, help="recorded as provenance")
    _add_train_flags(p)

    p = sub.add_parser("predict", help="posteriors and labels for a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="CSV with x1..xd columns (a label column is ignored)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="accuracy, confusion matrix and timings")
    p.add_argument("--model", help="trained model; evaluated on --test")
    p.add_argument("--test", help="labeled test CSV")
    p.add_argument("--data", help="labeled CSV for the random-split protocol (instead of --model/--test)")
    p.add_argument("--train-fraction", type=_train_fraction, default=0.01)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--baseline", choices=["llr"])
    p.add_argument("--out", help="write the report JSON here (default: stdout)")
    _add_train_flags(p)

    p = sub.add_parser("emg-extract", help="rectify, smooth and normalize a raw recording")
    p.add_argument("--raw", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fs", type=float, required=True, help="sampling rate in Hz")
    p.add_argument("--fc", type=float, default=1.0, help="low-pass cut-off in Hz")
    p.add_argument("--rest-range", type=_rest_range, required=True, help="START,END rest samples")
    p.add_argument("--label", type=int, help="label for all rows when the recording has none")

    p = sub.add_parser("grid", help="posterior map of a 2-D model")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="output prefix")
    _add_grid_flags(p)
    return parser


def _config(args) -> trainer.TrainConfig:
    return trainer.TrainConfig(
        z_param=args.z_param,
        percentile_mode="strict" if args.strict_percentile else "lenient",
    )


def _check_grid(args):
    if not args.grid_step > 0:
        raise UsageError("--grid-step must be positive")
    if args.grid_max < args.grid_min:
        raise UsageError("--grid-max must not be below --grid-min")


def _emit(obj, path=None):
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args):
    _check_grid(args)
    metrics = harness.simulate(
        args.out, args.seed, args.n_train, args.n_test, _config(args), args.grid_min, args.grid_max, args.grid_step
    )
    for name in ("jsnet", "llr"):
        logger.info("%s accuracy %.3f%%", name, metrics[name]["accuracy"])


def cmd_train(args):
    data = fileio.load_dataset(args.data)
    if data.C < 2:
        raise errors.LabelError("training needs at least two classes")
    config = _config(args)
    model, secs = harness.train_model(data, config, args.baseline)
    cfg = asdict(config)
    prov = {
        "seed": args.seed,
        "config_digest": fileio.config_digest(cfg),
        "config": cfg,
        "training_time_s": secs,
        "n_train": data.N,
    }
    fileio.save_model(model, args.model, prov)
    logger.info("trained %s in %.3fs", "llr" if args.baseline else "jsnet", secs)


def _features(path, d):
    header, rows, _ = fileio.read_table(path)
    arr = np.array(rows, dtype=float).reshape(len(rows), len(header))
    if header[0].lower() == "label":
        arr = arr[:, 1:]
    if arr.shape[1] != d:
        raise errors.ParseError(f"model expects {d} features, file has {arr.shape[1]}")
    return arr


def cmd_predict(args):
    model, _ = fileio.load_model(args.model)
    X = _features(args.data, model.d)
    post = harness.posterior_fn(model)(X)
    with open(args.out, "w", newline="") as fh:
        fh.write(",".join(["label"] + [f"p{c + 1}" for c in range(post.shape[1])]) + "\n")
        for row in post:
            fh.write(",".join([str(int(np.argmax(row)) + 1)] + [fileio.fmt(v) for v in row]) + "\n")


def cmd_eval(args):
    if args.data:
        data = fileio.load_dataset(args.data)
        report = harness.evaluate_protocol(
            data, _config(args), args.train_fraction, args.trials, args.seed, args.baseline
        )
    elif args.model and args.test:
        model, prov = fileio.load_model(args.model)
        data = fileio.load_dataset(args.test)
        report = harness.evaluate(model, data, prov.get("training_time_s", 0.0)).to_dict()
    else:
        raise UsageError("eval needs either --data or both --model and --test")
    _emit(report, args.out)


def cmd_emg_extract(args):
    info = harness.emg_extract(args.raw, args.out, args.fs, args.rest_range, args.fc, args.label)
    logger.info("extracted %d of %d rows", info["rows_out"], info["rows_in"])


def cmd_grid(args):
    _check_grid(args)
    model, _ = fileio.load_model(args.model)
    if model.d != 2:
        raise UsageError("grid maps need a two-dimensional model")
    harness.write_grid(model, args.out, args.grid_min, args.grid_max, args.grid_step)


COMMANDS = {
    "simulate": cmd_simulate,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "emg-extract": cmd_emg_extract,
    "grid": cmd_grid,
}

_DATA_ERRORS = (
    errors.ParseError,
    errors.LabelError,
    errors.DomainError,
    errors.DegenerateSpacing,
    errors.FamilyMismatch,
    errors.NearRestError,
    errors.RangeError,
    FileNotFoundError,
    IsADirectoryError,
    ValueError,
)
_NUMERIC_ERRORS = (errors.SolveFailure, errors.FactorizationError, np.linalg.LinAlgError, ArithmeticError)


def _setup_logging():
    level = os.environ.get("JSNET_LOG", "error").strip().upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "ERROR"
    logging.basicConfig(level=getattr(logging, level), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"jsnet: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERIC_ERRORS as exc:
        print(f"jsnet: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _DATA_ERRORS as exc:
        print(f"jsnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
