"""Two-stage training of the log-linearized network.

Stage 1 fits the translation parameters of every class and dimension by
the percentile method and fixes W1/W2. Stage 2 minimizes the
cross-entropy energy over W3 alone by damped Newton; the energy is convex
in W3, so the optimum does not depend on the starting point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .dataset import LabeledDataset
from .errors import DegenerateSpacing, FamilyMismatch
from .johnson import DEFAULT_Z_PARAM, JohnsonParams, fit_percentile
from .network import (
    LayerTrace,
    WeightSet,
    forward,
    w3_from_probabilistic,
    weights_from_johnson,
)
from .newton import NewtonResult, damped_newton

logger = logging.getLogger(__name__)

__all__ = [
    "TrainConfig",
    "MIN_CLASS_SAMPLES",
    "fit_stage1",
    "initial_w3",
    "energy",
    "gradient_w3",
    "hessian_w3",
    "newton_w3",
    "fit_stage2",
    "fit",
]

MIN_CLASS_SAMPLES = 20


@dataclass(frozen=True)
class TrainConfig:
    z_param: float = DEFAULT_Z_PARAM
    max_newton_iters: int = 100
    rel_energy_tol: float = 1e-10
    damping_init: float = 1e-8
    damping_growth: float = 10.0
    percentile_mode: str = "strict"

    def __post_init__(self):
        if not (self.z_param > 0 and self.rel_energy_tol > 0 and self.damping_init > 0):
            raise ValueError("z_param and tolerances must be positive")
        if not self.damping_growth > 1:
            raise ValueError("damping_growth must exceed 1")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be at least 1")
        if self.percentile_mode not in ("strict", "lenient"):
            raise ValueError("percentile_mode must be 'strict' or 'lenient'")

    def newton_kwargs(self) -> dict:
        return dict(
            max_iters=self.max_newton_iters,
            rel_tol=self.rel_energy_tol,
            damping_init=self.damping_init,
            damping_growth=self.damping_growth,
        )


def fit_stage1(dataset: LabeledDataset, config: TrainConfig = TrainConfig()):
    """Percentile fit per class and dimension; returns ``(W1, W2, params)``."""
    strict = config.percentile_mode == "strict"
    params = []
    for c in range(dataset.C):
        Xc = dataset.class_samples(c)
        if Xc.shape[0] < MIN_CLASS_SAMPLES:
            raise ValueError(
                f"class {c + 1} has {Xc.shape[0]} samples; at least {MIN_CLASS_SAMPLES} are required"
            )
        fits = []
        for i in range(dataset.d):
            try:
                fits.append(fit_percentile(Xc[:, i], config.z_param, strict=strict))
            except (DegenerateSpacing, FamilyMismatch) as exc:
                raise type(exc)(f"class {c + 1}, dimension {i + 1}: {exc}", cls=c, dimension=i) from None
            if fits[-1].family.value != "SU":
                logger.info("class %d dimension %d: S_N fallback", c + 1, i + 1)
        gamma, delta, lam, xi, fam = (list(col) for col in zip(*fits))
        params.append(JohnsonParams(gamma, delta, lam, xi, tuple(fam)))
    W1, W2 = weights_from_johnson(params)
    return W1, W2, params


def initial_w3(params, priors) -> np.ndarray:
    """W3 for identity precision of z and the given priors."""
    return np.stack(
        [w3_from_probabilistic(p, prm, np.eye(prm.d), 0.0) for p, prm in zip(priors, params)]
    )


def _teachers(dataset, teachers):
    return dataset.teachers() if teachers is None else np.asarray(teachers, dtype=float)


def _energy_from_scores(scores: np.ndarray, T: np.ndarray) -> float:
    log_post = scores - logsumexp(scores, axis=1, keepdims=True)
    # -0.0 -> 0.0
    return float(-np.sum(T * log_post)) + 0.0


def _grad(post, T, Z) -> np.ndarray:
    return np.einsum("nc,nch->ch", post - T, Z).ravel()


def _hess(post, Z) -> np.ndarray:
    # sum_n O_k (delta_ck - O_c) Z_ch Z_kl
    #   = blockdiag_c(sum_n O_c Z_c Z_c^T) - U^T U,  U[n, (c,h)] = O_c Z_ch
    N, C, H = Z.shape
    U = (post[:, :, None] * Z).reshape(N, C * H)
    hess = -(U.T @ U)
    root = np.sqrt(post)[:, :, None] * Z
    for c in range(C):
        blk = slice(c * H, (c + 1) * H)
        hess[blk, blk] += root[:, c].T @ root[:, c]
    return hess


def energy(weights: WeightSet, dataset: LabeledDataset, teachers=None) -> float:
    """Cross-entropy E = -sum_n sum_c T_c log O_c."""
    trace = forward(weights, dataset.X)
    return _energy_from_scores(trace.i5, _teachers(dataset, teachers))


def gradient_w3(weights: WeightSet, dataset: LabeledDataset, teachers=None) -> np.ndarray:
    """dE/dW3 flattened class-major, length C*H."""
    trace = forward(weights, dataset.X)
    return _grad(trace.o5, _teachers(dataset, teachers), trace.o4)


def hessian_w3(weights: WeightSet, dataset: LabeledDataset) -> np.ndarray:
    """(C*H) x (C*H) Hessian of E with respect to W3; positive semi-definite."""
    trace = forward(weights, dataset.X)
    return _hess(trace.o5, trace.o4)


class _W3Objective:
    """Energy, gradient and Hessian in W3 with W1/W2 (hence Z and log g') frozen."""

    def __init__(self, trace: LayerTrace, T: np.ndarray):
        d = trace.o3.shape[2]
        self.Z = trace.o4
        self.logjac = trace.o2[:, :, d + 1]
        self.T = T
        self.shape = (trace.o4.shape[1], trace.o4.shape[2])

    def scores(self, w):
        return np.einsum("nch,ch->nc", self.Z, w.reshape(self.shape)) + self.logjac

    def energy(self, w) -> float:
        return _energy_from_scores(self.scores(w), self.T)

    def __call__(self, w):
        s = self.scores(w)
        post = np.exp(s - logsumexp(s, axis=1, keepdims=True))
        return _energy_from_scores(s, self.T), _grad(post, self.T, self.Z), _hess(post, self.Z)


def newton_w3(weights: WeightSet, dataset: LabeledDataset, teachers=None, config: TrainConfig = TrainConfig()) -> NewtonResult:
    """Stage-2 Newton iterations starting from ``weights.W3``; W1/W2 untouched."""
    obj = _W3Objective(forward(weights, dataset.X), _teachers(dataset, teachers))
    return damped_newton(obj, obj.energy, weights.W3.ravel(), **config.newton_kwargs())


def fit_stage2(weights: WeightSet, dataset: LabeledDataset, teachers=None, config: TrainConfig = TrainConfig()) -> WeightSet:
    res = newton_w3(weights, dataset, teachers, config)
    logger.info("stage 2: %d Newton iterations, E=%.6g", res.iterations, res.energies[-1])
    return weights.with_w3(res.w.reshape(weights.W3.shape))


def fit(dataset: LabeledDataset, config: TrainConfig = TrainConfig()) -> WeightSet:
    """Full two-stage training."""
    if dataset.C < 2:
        raise ValueError("training needs at least two classes")
    W1, W2, params = fit_stage1(dataset, config)
    priors = dataset.counts() / dataset.N
    W3 = initial_w3(params, priors)
    weights = WeightSet(W1, W2, W3, tuple(p.families for p in params))
    return fit_stage2(weights, dataset, None, config)
