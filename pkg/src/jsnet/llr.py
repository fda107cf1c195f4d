"""Multinomial linear logistic regression (LLR) fitted by damped Newton.

Class C is the reference class: its coefficient row is fixed at zero, so
only ``(C - 1) * (d + 1)`` coefficients are free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .dataset import LabeledDataset
from .network import softmax
from .newton import NewtonResult, damped_newton
from .trainer import TrainConfig

__all__ = ["LlrModel", "llr_fit", "llr_fit_result", "llr_predict", "llr_log_likelihood", "llr_gradient"]


@dataclass(frozen=True)
class LlrModel:
    """Coefficients ``B`` of shape (C, d+1); column 0 is the bias, last row is zero."""

    B: np.ndarray

    def __post_init__(self):
        B = np.array(self.B, dtype=float)
        if B.ndim != 2 or B.shape[0] < 2:
            raise ValueError("B must be (C, d+1) with C >= 2")
        if np.any(B[-1] != 0):
            raise ValueError("reference-class row must be zero")
        B.setflags(write=False)
        object.__setattr__(self, "B", B)

    @property
    def C(self) -> int:
        return self.B.shape[0]

    @property
    def d(self) -> int:
        return self.B.shape[1] - 1


def _augment(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.hstack([np.ones((X.shape[0], 1)), X])


class _LlrObjective:
    def __init__(self, Xa: np.ndarray, T: np.ndarray):
        self.Xa = Xa
        self.T = T
        self.C = T.shape[1]
        self.D = Xa.shape[1]

    def full(self, w) -> np.ndarray:
        B = np.zeros((self.C, self.D))
        B[:-1] = w.reshape(self.C - 1, self.D)
        return B

    def energy(self, w) -> float:
        s = self.Xa @ self.full(w).T
        return float(-np.sum(self.T * (s - logsumexp(s, axis=1, keepdims=True)))) + 0.0

    def __call__(self, w):
        s = self.Xa @ self.full(w).T
        log_post = s - logsumexp(s, axis=1, keepdims=True)
        post = np.exp(log_post)
        E = float(-np.sum(self.T * log_post)) + 0.0
        R = (post - self.T)[:, :-1]
        g = (R.T @ self.Xa).ravel()
        P = post[:, :-1]
        N, K, D = P.shape[0], self.C - 1, self.D
        U = (P[:, :, None] * self.Xa[:, None, :]).reshape(N, K * D)
        H = -(U.T @ U)
        root = np.sqrt(P)[:, :, None] * self.Xa[:, None, :]
        for k in range(K):
            blk = slice(k * D, (k + 1) * D)
            H[blk, blk] += root[:, k].T @ root[:, k]
        return E, g, H


def llr_fit_result(dataset: LabeledDataset, teachers=None, config: TrainConfig = TrainConfig(), B0=None) -> tuple[LlrModel, NewtonResult]:
    T = dataset.teachers() if teachers is None else np.asarray(teachers, dtype=float)
    if T.shape[1] < 2:
        raise ValueError("LLR needs at least two classes")
    obj = _LlrObjective(_augment(dataset.X), T)
    w0 = np.zeros((obj.C - 1) * obj.D) if B0 is None else np.asarray(B0, dtype=float)[:-1].ravel()
    res = damped_newton(obj, obj.energy, w0, **config.newton_kwargs())
    return LlrModel(obj.full(res.w)), res


def llr_fit(dataset: LabeledDataset, teachers=None, config: TrainConfig = TrainConfig(), B0=None) -> LlrModel:
    """Maximum-likelihood LLR coefficients, starting from ``B0`` (zeros by default)."""
    return llr_fit_result(dataset, teachers, config, B0)[0]


def llr_predict(model: LlrModel, x) -> np.ndarray:
    """Posterior softmax(B (1, x)); shape (C,) for one input, (N, C) for a batch."""
    x = np.asarray(x, dtype=float)
    post = softmax(_augment(x) @ model.B.T)
    return post[0] if x.ndim == 1 else post


def llr_log_likelihood(model: LlrModel, dataset: LabeledDataset) -> float:
    s = _augment(dataset.X) @ model.B.T
    return float(np.sum((s - logsumexp(s, axis=1, keepdims=True))[np.arange(dataset.N), dataset.labels]))


def llr_gradient(model: LlrModel, dataset: LabeledDataset) -> np.ndarray:
    """Gradient of the negative log-likelihood over the free rows."""
    obj = _LlrObjective(_augment(dataset.X), dataset.teachers())
    return obj(model.B[:-1].ravel())[1]
