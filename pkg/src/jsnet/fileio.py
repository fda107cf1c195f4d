"""Dataset CSV, model JSON and PGM heatmap formats.

Dataset files carry a header ``label,x1,...,xd`` and 1-based integer
labels. Numbers are written with 12 significant digits. Model files are
JSON documents tagged with a format name and version; floats are stored
with ``repr`` precision so weights round-trip bit-exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .dataset import LabeledDataset
from .errors import LabelError, ParseError
from .llr import LlrModel
from .network import WeightSet

__all__ = [
    "MODEL_FORMAT",
    "MODEL_VERSION",
    "fmt",
    "load_dataset",
    "save_dataset",
    "read_table",
    "save_model",
    "load_model",
    "model_to_dict",
    "model_from_dict",
    "config_digest",
    "write_pgm",
    "read_pgm",
]

MODEL_FORMAT = "jsnet-model"
MODEL_VERSION = 1


def fmt(v: float) -> str:
    return format(float(v), ".12g")


def read_table(path, allow_delims=",\t"):
    """Header and rows of float values from a CSV/TSV file; blank lines are skipped.

    Returns ``(header, rows, line_numbers)``.
    """
    path = Path(path)
    text = path.read_text()
    lines = text.splitlines()
    if not any(line.strip() for line in lines):
        raise ParseError(f"{path}: empty file", line=1)
    first = next(i for i, line in enumerate(lines) if line.strip())
    delim = "\t" if "\t" in lines[first] and "\t" in allow_delims else ","
    reader = csv.reader(lines, delimiter=delim)
    header = None
    rows, numbers = [], []
    for lineno, fields in enumerate(reader, start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        fields = [f.strip() for f in fields]
        if header is None:
            header = fields
            if any(not f for f in fields):
                raise ParseError("empty column name in header", line=lineno)
            continue
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(fields)}", line=lineno)
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            raise ParseError(f"non-numeric or missing value in {fields!r}", line=lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite value", line=lineno)
        rows.append(vals)
        numbers.append(lineno)
    return header, rows, numbers


def load_dataset(path) -> LabeledDataset:
    """Read ``label,x1,...,xd`` with labels 1..C; returns zero-based labels."""
    header, rows, numbers = read_table(path)
    if not header or header[0].lower() != "label" or len(header) < 2:
        raise ParseError("header must be 'label,x1,...,xd'", line=1)
    if not rows:
        raise ParseError("no data rows", line=2)
    arr = np.array(rows, dtype=float)
    raw = arr[:, 0]
    for v, ln in zip(raw, numbers):
        if v != int(v):
            raise ParseError(f"label {v!r} is not an integer", line=ln)
    labels = raw.astype(int)
    present = np.unique(labels)
    if present[0] < 1:
        raise LabelError(f"labels must be 1-based; found {present[0]}")
    C = int(present[-1])
    if present.size != C:
        missing = sorted(set(range(1, C + 1)) - set(present.tolist()))
        raise LabelError(f"labels must be contiguous 1..{C}; missing {missing}")
    return LabeledDataset(arr[:, 1:], labels - 1, C)


def save_dataset(dataset: LabeledDataset, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(["label"] + [f"x{i + 1}" for i in range(dataset.d)]) + "\n")
        for y, row in zip(dataset.labels, dataset.X):
            fh.write(",".join([str(int(y) + 1)] + [fmt(v) for v in row]) + "\n")


def config_digest(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def model_to_dict(model, provenance: dict | None = None) -> dict:
    doc = {"format": MODEL_FORMAT, "version": MODEL_VERSION}
    if isinstance(model, WeightSet):
        diag = np.arange(model.d)
        doc.update(
            kind="johnson-net",
            C=model.C,
            d=model.d,
            family=[[f.value for f in row] for row in model.families],
            W1_offset=model.W1[:, 0, :].tolist(),
            W1_diag=model.W1[:, diag + 1, diag].tolist(),
            W2_offset=model.W2[:, 0, :].tolist(),
            W2_diag=model.W2[:, diag + 1, diag].tolist(),
            W3=model.W3.tolist(),
        )
    elif isinstance(model, LlrModel):
        doc.update(kind="llr", C=model.C, d=model.d, B=model.B.tolist())
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    doc["provenance"] = dict(provenance or {})
    return doc


def model_from_dict(doc: dict):
    if doc.get("format") != MODEL_FORMAT:
        raise ParseError("not a model file")
    if doc.get("version") != MODEL_VERSION:
        raise ParseError(f"unsupported model version {doc.get('version')!r}")
    kind = doc.get("kind")
    try:
        if kind == "johnson-net":
            C, d = int(doc["C"]), int(doc["d"])
            diag = np.arange(d)
            W1 = np.zeros((C, d + 1, d))
            W2 = np.zeros((C, d + 1, d))
            W1[:, 0, :] = doc["W1_offset"]
            W1[:, diag + 1, diag] = doc["W1_diag"]
            W2[:, 0, :] = doc["W2_offset"]
            W2[:, diag + 1, diag] = doc["W2_diag"]
            return WeightSet(W1, W2, np.array(doc["W3"], dtype=float), tuple(map(tuple, doc["family"])))
        if kind == "llr":
            return LlrModel(np.array(doc["B"], dtype=float))
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"invalid model file: {exc}") from None
    raise ParseError(f"unknown model kind {kind!r}")


def save_model(model, path, provenance: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model, provenance), fh, indent=1)
        fh.write("\n")


def load_model(path):
    """Returns ``(model, provenance)``."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return model_from_dict(doc), doc.get("provenance", {})


def write_pgm(path, image) -> None:
    """Binary 8-bit PGM (P5); ``image`` values in [0, 1], 0 renders black. Row 0 is the top."""
    img = np.asarray(image, dtype=float)
    data = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5" or len(parts) < 4:
        raise ParseError("not a binary PGM file")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)
