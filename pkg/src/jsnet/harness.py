"""Experiment drivers behind the command-line interface.

Every function here is deterministic given its inputs and seed, except
for the wall-clock timing fields of :class:`MetricsReport`.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import emg, fileio, grid, llr, network, synth, trainer
from .dataset import LabeledDataset, stratified_split
from .network import WeightSet

logger = logging.getLogger(__name__)

__all__ = [
    "MetricsReport",
    "posterior_fn",
    "train_model",
    "evaluate",
    "evaluate_protocol",
    "simulate",
    "write_grid",
    "emg_extract",
]


@dataclass
class MetricsReport:
    accuracy: float
    confusion: list
    cv_time_s: float = 0.0
    training_time_s: float = 0.0
    prediction_time_s: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(d.pop("extra"))
        return d


def posterior_fn(model):
    """Batch posterior callable (N, d) -> (N, C) for either model kind."""
    if isinstance(model, WeightSet):
        return lambda X: network.forward(model, X).o5
    if isinstance(model, llr.LlrModel):
        return lambda X: llr.llr_predict(model, np.atleast_2d(X))
    raise TypeError(f"unsupported model type {type(model).__name__}")


def train_model(dataset: LabeledDataset, config: trainer.TrainConfig, baseline: str | None = None):
    """Fit the network (or the LLR baseline); returns ``(model, seconds)``."""
    t0 = time.perf_counter()
    if baseline is None:
        model = trainer.fit(dataset, config)
    elif baseline == "llr":
        model = llr.llr_fit(dataset, None, config)
    else:
        raise ValueError(f"unknown baseline {baseline!r}")
    return model, time.perf_counter() - t0


def _confusion(true, pred, C) -> np.ndarray:
    cm = np.zeros((C, C), dtype=int)
    np.add.at(cm, (true, pred), 1)
    return cm


def evaluate(model, dataset: LabeledDataset, training_time_s: float = 0.0) -> MetricsReport:
    """Accuracy (percent), confusion matrix (rows: true class) and prediction time."""
    fn = posterior_fn(model)
    t0 = time.perf_counter()
    post = fn(dataset.X)
    pred = np.argmax(post, axis=1)
    elapsed = time.perf_counter() - t0
    C = post.shape[1]
    cm = _confusion(dataset.labels, pred, max(C, dataset.C))
    acc = 100.0 * np.trace(cm) / cm.sum() if cm.sum() else float("nan")
    return MetricsReport(
        accuracy=float(acc),
        confusion=cm.tolist(),
        cv_time_s=0.0,
        training_time_s=float(training_time_s),
        prediction_time_s=float(elapsed),
    )


def evaluate_protocol(
    dataset: LabeledDataset,
    config: trainer.TrainConfig,
    train_fraction: float = 0.01,
    trials: int = 1,
    seed: int = 0,
    baseline: str | None = None,
) -> dict:
    """Repeated random split: train on ``train_fraction`` of each class, test on the rest."""
    rng = np.random.default_rng(seed)
    reports = []
    for t in range(trials):
        tr, te = stratified_split(dataset.labels, train_fraction, rng)
        model, secs = train_model(dataset.subset(tr), config, baseline)
        rep = evaluate(model, dataset.subset(te), secs)
        logger.info("trial %d: accuracy %.3f%%", t + 1, rep.accuracy)
        reports.append(rep)
    keys = ("accuracy", "cv_time_s", "training_time_s", "prediction_time_s")
    summary = {k: float(np.mean([getattr(r, k) for r in reports])) for k in keys}
    summary.update({f"{k}_std": float(np.std([getattr(r, k) for r in reports])) for k in keys})
    summary["trials"] = [r.to_dict() for r in reports]
    summary["train_fraction"] = train_fraction
    summary["seed"] = seed
    return summary


def write_grid(model, prefix, lo=0.0, hi=1.0, step=0.01) -> tuple[np.ndarray, np.ndarray]:
    """Posterior grid CSV ``<prefix>_grid.csv`` and one PGM per class ``<prefix>_class<c>.pgm``."""
    axis, P = grid.posterior_grid(posterior_fn(model), lo, hi, step)
    prefix = str(prefix)
    C = P.shape[2]
    with open(prefix + "_grid.csv", "w", newline="") as fh:
        fh.write(",".join(["x1", "x2"] + [f"p{c + 1}" for c in range(C)]) + "\n")
        for j, x2 in enumerate(axis):
            for i, x1 in enumerate(axis):
                fh.write(",".join([fileio.fmt(x1), fileio.fmt(x2)] + [fileio.fmt(v) for v in P[j, i]]) + "\n")
    for c in range(C):
        # image row 0 is the largest x2
        fileio.write_pgm(f"{prefix}_class{c + 1}.pgm", P[::-1, :, c])
    return axis, P


def _level_set_summary(axis, P, step) -> dict:
    pts = grid.level_set_points(axis, P[:, :, 0], 0.5)
    resid = grid.collinearity_residual(pts)
    return {"points": int(pts.shape[0]), "residual": resid, "collinear": bool(resid <= step)}


def simulate(
    outdir,
    seed: int = 0,
    n_train: int = 100,
    n_test: int = 10000,
    config: trainer.TrainConfig = trainer.TrainConfig(),
    lo: float = 0.0,
    hi: float = 1.0,
    step: float = 0.01,
) -> dict:
    """Two-class skewed simulation: generate, train both models, map posteriors, score.

    Writes ``train.csv``, ``test.csv``, ``model_jsnet.json``, ``model_llr.json``,
    ``jsnet_grid.csv``, ``llr_grid.csv``, class PGMs and ``metrics.json``.
    No timing enters the outputs so they are byte-identical for a fixed seed.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    spec = synth.table_preset(n_train, seed)
    train = synth.generate(spec)
    test = synth.generate(spec.with_samples(n_test, seed=[seed, 1]))
    fileio.save_dataset(train, out / "train.csv")
    fileio.save_dataset(test, out / "test.csv")

    net = trainer.fit(train, config)
    base = llr.llr_fit(train, None, config)
    cfg = asdict(config)
    prov = {"seed": seed, "config_digest": fileio.config_digest(cfg)}
    fileio.save_model(net, out / "model_jsnet.json", prov)
    fileio.save_model(base, out / "model_llr.json", prov)

    metrics = {"seed": seed, "n_train_per_class": n_train, "n_test_per_class": n_test, "config": cfg}
    for name, model in (("jsnet", net), ("llr", base)):
        rep = evaluate(model, test)
        axis, P = write_grid(model, out / name, lo, hi, step)
        metrics[name] = {
            "accuracy": rep.accuracy,
            "confusion": rep.confusion,
            "cv_time_s": 0.0,
            "level_set": _level_set_summary(axis, P, step),
        }
    with open(out / "metrics.json", "w") as fh:
        json.dump(metrics, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return metrics


def emg_extract(raw_path, out_path, fs: float, rest_range: tuple[int, int], fc: float = 1.0, label: int | None = None) -> dict:
    """Raw multi-channel recording -> normalized feature CSV.

    A ``label`` column in the recording is carried through; otherwise every
    row gets ``label`` (default 1). Near-rest samples are dropped.
    """
    header, rows, _ = fileio.read_table(raw_path)
    arr = np.array(rows, dtype=float).reshape(len(rows), len(header))
    lower = [h.lower() for h in header]
    if "label" in lower:
        col = lower.index("label")
        labels = arr[:, col].astype(int)
        chans = np.delete(arr, col, axis=1)
    else:
        labels = np.full(arr.shape[0], 1 if label is None else int(label))
        chans = arr
    rec = emg.RawRecording(chans, fs, rest_range)
    feats = emg.extract(rec, fc)
    keep = feats.valid
    if not keep.all():
        logger.warning("dropping %d near-rest samples", int((~keep).sum()))
    with open(out_path, "w", newline="") as fh:
        fh.write(",".join(["label"] + [f"x{i + 1}" for i in range(chans.shape[1])]) + "\n")
        for y, row in zip(labels[keep], feats.features[keep]):
            fh.write(",".join([str(int(y))] + [fileio.fmt(v) for v in row]) + "\n")
    return {"rows_in": int(arr.shape[0]), "rows_out": int(keep.sum()), "channels": int(chans.shape[1])}
