"""Labeled feature matrices and one-hot teacher signals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LabeledDataset", "teacher_matrix", "split_indices", "stratified_split"]


@dataclass(frozen=True)
class LabeledDataset:
    """N x d features with zero-based integer labels in ``0..C-1``.

    ``n_classes`` defaults to ``max(labels) + 1``; files on disk use
    1-based labels and are converted at the I/O boundary.
    """

    X: np.ndarray
    labels: np.ndarray
    n_classes: int | None = None

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        labels = np.array(self.labels, dtype=int).ravel()
        if X.ndim == 1:
            X = X.reshape(-1, 1) if labels.size == X.size else X.reshape(1, -1)
        if X.ndim != 2 or X.shape[0] != labels.size:
            raise ValueError("X must be (N, d) with one label per row")
        if labels.size and labels.min() < 0:
            raise ValueError("labels must be non-negative")
        C = self.n_classes
        if C is None:
            C = int(labels.max()) + 1 if labels.size else 0
        elif labels.size and labels.max() >= C:
            raise ValueError("label exceeds n_classes")
        X.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", int(C))

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def C(self) -> int:
        return self.n_classes

    def class_samples(self, c: int) -> np.ndarray:
        return self.X[self.labels == c]

    def counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.C)

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx)
        return LabeledDataset(self.X[idx], self.labels[idx], self.C)

    def teachers(self) -> np.ndarray:
        return teacher_matrix(self.labels, self.C)


def teacher_matrix(labels, n_classes: int) -> np.ndarray:
    """One-hot N x C matrix T with T[n, labels[n]] = 1."""
    labels = np.asarray(labels, dtype=int)
    T = np.zeros((labels.size, n_classes))
    T[np.arange(labels.size), labels] = 1.0
    return T


def split_indices(n: int, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Uniform sampling without replacement of ``ceil(fraction * n)`` training indices.

    Returns sorted (train, test) index arrays.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    k = max(1, int(np.ceil(fraction * n)))
    perm = rng.permutation(n)
    return np.sort(perm[:k]), np.sort(perm[k:])


def stratified_split(labels, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Per-class :func:`split_indices` so every class keeps at least one training sample."""
    labels = np.asarray(labels, dtype=int)
    train, test = [], []
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        tr, te = split_indices(members.size, fraction, rng)
        train.append(members[tr])
        test.append(members[te])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))
