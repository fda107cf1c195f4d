"""Five-layer log-linearized network computing class posteriors.

Layer 1 augments the input with a constant unit, layer 2 applies the
affine map ``W1`` followed by the family function (and emits the summed
log-derivative as an extra unit), layer 3 applies ``W2`` to recover the
normalized vector ``z``, layer 4 expands ``z`` into the quadratic feature
vector ``Z = [1, z1^2, z1 z2, ..., zd^2]`` and layer 5 forms linear scores
``W3 . Z`` plus the log-Jacobian unit and normalizes with a softmax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .johnson import ClassModel, FamilyTag, JohnsonParams, _log_g_prime, _per_dim, g_eval

__all__ = [
    "WeightSet",
    "LayerTrace",
    "n_expansion",
    "z_index",
    "expansion_pairs",
    "weights_from_johnson",
    "w3_from_probabilistic",
    "weights_from_models",
    "expand",
    "forward",
    "log_scores",
    "softmax",
    "predict",
]


def n_expansion(d: int) -> int:
    """H = 1 + d(d+1)/2, the length of the quadratic expansion."""
    return 1 + d * (d + 1) // 2


def z_index(k: int, k_prime: int, d: int) -> int:
    """1-based slot of the product z_k z_k' (k <= k') in the expansion; slot 1 is the constant."""
    if not (1 <= k <= k_prime <= d):
        raise IndexError(f"need 1 <= k <= k' <= d, got k={k}, k'={k_prime}, d={d}")
    # h = k' - k^2/2 + (d + 1/2) k - d + 1, kept in integers
    return k_prime + (-k * k + (2 * d + 1) * k) // 2 - d + 1


@lru_cache(maxsize=None)
def expansion_pairs(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Zero-based (k, k') index arrays ordered by slot 2..H."""
    H = n_expansion(d)
    rows = np.empty(H - 1, dtype=int)
    cols = np.empty(H - 1, dtype=int)
    for k in range(1, d + 1):
        for kp in range(k, d + 1):
            h = z_index(k, kp, d)
            rows[h - 2] = k - 1
            cols[h - 2] = kp - 1
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def expand(z: np.ndarray) -> np.ndarray:
    """Quadratic expansion of ``z`` along its last axis."""
    z = np.asarray(z, dtype=float)
    rows, cols = expansion_pairs(z.shape[-1])
    out = np.empty(z.shape[:-1] + (1 + rows.size,))
    out[..., 0] = 1.0
    out[..., 1:] = z[..., rows] * z[..., cols]
    return out


@dataclass(frozen=True)
class WeightSet:
    """Network weights for C classes in d dimensions.

    ``W1`` and ``W2`` have shape ``(C, d+1, d)``: row 0 holds the offsets
    (``-xi/lam`` and ``gamma``), rows 1..d form a diagonal (``1/lam`` and
    ``delta``). ``W3`` has shape ``(C, H)``. ``families`` gives the family
    tag of every (class, dimension).
    """

    W1: np.ndarray
    W2: np.ndarray
    W3: np.ndarray
    families: tuple

    def __post_init__(self):
        W1 = np.array(self.W1, dtype=float)
        W2 = np.array(self.W2, dtype=float)
        W3 = np.array(self.W3, dtype=float)
        if W1.ndim != 3 or W1.shape[1] != W1.shape[2] + 1:
            raise ValueError("W1 must have shape (C, d+1, d)")
        C, _, d = W1.shape
        if W2.shape != W1.shape:
            raise ValueError("W2 must match W1 in shape")
        if W3.shape != (C, n_expansion(d)):
            raise ValueError(f"W3 must have shape ({C}, {n_expansion(d)})")
        off = ~np.vstack([np.ones((1, d), bool), np.eye(d, dtype=bool)])
        if np.any(W1[:, off] != 0) or np.any(W2[:, off] != 0):
            raise ValueError("W1/W2 entries off the offset row and diagonal must be zero")
        diag = np.arange(d)
        if not (np.all(W1[:, diag + 1, diag] > 0) and np.all(W2[:, diag + 1, diag] > 0)):
            raise ValueError("W1 and W2 diagonals must be strictly positive")
        fams = self.families
        if isinstance(fams, (str, FamilyTag)):
            fams = ((FamilyTag(fams),) * d,) * C
        fams = tuple(tuple(FamilyTag(f) for f in row) for row in fams)
        if len(fams) != C or any(len(row) != d for row in fams):
            raise ValueError("families must be C rows of d tags")
        for a in (W1, W2, W3):
            a.setflags(write=False)
        object.__setattr__(self, "W1", W1)
        object.__setattr__(self, "W2", W2)
        object.__setattr__(self, "W3", W3)
        object.__setattr__(self, "families", fams)

    @property
    def C(self) -> int:
        return self.W1.shape[0]

    @property
    def d(self) -> int:
        return self.W1.shape[2]

    @property
    def H(self) -> int:
        return self.W3.shape[1]

    def with_w3(self, W3) -> "WeightSet":
        return WeightSet(self.W1, self.W2, W3, self.families)

    def johnson_params(self, c: int) -> JohnsonParams:
        """Recover the translation parameters encoded in class ``c``'s W1/W2."""
        diag = np.arange(self.d)
        inv_lam = self.W1[c, diag + 1, diag]
        lam = 1.0 / inv_lam
        return JohnsonParams(
            gamma=self.W2[c, 0],
            delta=self.W2[c, diag + 1, diag],
            lam=lam,
            xi=-self.W1[c, 0] * lam,
            family=self.families[c],
        )


@dataclass(frozen=True)
class LayerTrace:
    """Outputs of every layer for a batch of N inputs.

    Shapes: o1 (N, d+1); o2 (N, C, d+2); o3 (N, C, d); o4 (N, C, H);
    i5 and o5 (N, C).
    """

    o1: np.ndarray
    o2: np.ndarray
    o3: np.ndarray
    o4: np.ndarray
    i5: np.ndarray
    o5: np.ndarray


def weights_from_johnson(params: Sequence[JohnsonParams]) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the structured W1/W2 blocks from per-class translation parameters."""
    d = params[0].d
    C = len(params)
    W1 = np.zeros((C, d + 1, d))
    W2 = np.zeros((C, d + 1, d))
    diag = np.arange(d)
    for c, p in enumerate(params):
        if p.d != d:
            raise ValueError("all classes must share the input dimension")
        W1[c, 0] = -p.xi / p.lam
        W1[c, diag + 1, diag] = 1.0 / p.lam
        W2[c, 0] = p.gamma
        W2[c, diag + 1, diag] = p.delta
    return W1, W2


def w3_from_probabilistic(prior: float, params: JohnsonParams, precision, logdet_sigma: float) -> np.ndarray:
    """W3 coefficients for one class from its prior, translation and precision of z."""
    s = np.asarray(precision, dtype=float)
    d = params.d
    rows, cols = expansion_pairs(d)
    w = np.empty(n_expansion(d))
    w[0] = math.log(prior) + float(np.sum(np.log(params.delta / params.lam))) - 0.5 * logdet_sigma
    w[1:] = -0.5 * np.where(rows == cols, 1.0, 2.0) * s[rows, cols]
    return w


def weights_from_models(models: Sequence[ClassModel]) -> WeightSet:
    """Complete weight set that reproduces the Bayes posterior of ``models`` exactly."""
    params = [m.params for m in models]
    W1, W2 = weights_from_johnson(params)
    W3 = np.stack(
        [w3_from_probabilistic(m.prior, m.params, m.precision, m.logdet_sigma) for m in models]
    )
    return WeightSet(W1, W2, W3, tuple(p.families for p in params))


def softmax(scores: np.ndarray) -> np.ndarray:
    """Softmax over the last axis with max subtraction."""
    shifted = scores - np.max(scores, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def forward(weights: WeightSet, x) -> LayerTrace:
    """Run all five layers on one input (d,) or a batch (N, d)."""
    x = np.asarray(x, dtype=float)
    X = np.atleast_2d(x)
    if X.shape[-1] != weights.d:
        raise ValueError(f"expected inputs with {weights.d} features, got shape {x.shape}")
    N, d, C = X.shape[0], weights.d, weights.C

    o1 = np.empty((N, d + 1))
    o1[:, 0] = 1.0
    o1[:, 1:] = X

    # (N, C, d): I2 = W1^T o1 per class
    i2 = np.einsum("ni,cij->ncj", o1, weights.W1)
    o2 = np.empty((N, C, d + 2))
    o2[:, :, 0] = 1.0
    for c in range(C):
        fam_params = _FamilyView(weights.families[c])
        o2[:, c, 1 : d + 1] = _per_dim(fam_params, i2[:, c, :], lambda f, v: np.asarray(g_eval(f, v)))
        o2[:, c, d + 1] = np.sum(_per_dim(fam_params, i2[:, c, :], _log_g_prime), axis=-1)

    o3 = np.einsum("ncj,cjk->nck", o2[:, :, : d + 1], weights.W2)
    o4 = expand(o3)
    i5 = np.einsum("nch,ch->nc", o4, weights.W3) + o2[:, :, d + 1]
    o5 = softmax(i5)
    return LayerTrace(o1, o2, o3, o4, i5, o5)


class _FamilyView:
    """Minimal stand-in exposing ``families`` for the per-dimension helpers."""

    __slots__ = ("families",)

    def __init__(self, families):
        self.families = families


def log_scores(weights: WeightSet, x) -> np.ndarray:
    """Layer-5 inputs (unnormalized log posteriors), shape (N, C)."""
    return forward(weights, x).i5


def predict(weights: WeightSet, x):
    """Labels (zero-based, ties to the lowest index) and posteriors.

    A single input returns ``(int, (C,) array)``; a batch returns arrays.
    """
    x = np.asarray(x, dtype=float)
    post = forward(weights, x).o5
    labels = np.argmax(post, axis=-1)
    if x.ndim == 1:
        return int(labels[0]), post[0]
    return labels, post
