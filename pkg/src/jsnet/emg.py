"""EMG feature extraction: rectification, 2nd-order Butterworth smoothing, normalization.

Also provides the closed-form moments of a rectified zero-mean Gaussian
(half-normal law), which show why processed EMG features are skewed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import NearRestError, RangeError

__all__ = [
    "RawRecording",
    "FilterCoeffs",
    "EmgFeatures",
    "rectify",
    "half_normal_moments",
    "butter2_design",
    "filter_apply",
    "normalize_features",
    "extract",
    "NEAR_REST_EPS",
]

NEAR_REST_EPS = 1e-12


@dataclass(frozen=True)
class RawRecording:
    """Samples x channels signal at ``fs`` Hz; ``rest_segment`` is a half-open sample range."""

    channels: np.ndarray
    fs: float
    rest_segment: tuple[int, int]

    def __post_init__(self):
        ch = np.array(self.channels, dtype=float)
        if ch.ndim == 1:
            ch = ch[:, None]
        if ch.ndim != 2:
            raise ValueError("channels must be (N_samples, d)")
        if not self.fs > 0:
            raise ValueError("fs must be positive")
        lo, hi = (int(v) for v in self.rest_segment)
        if not 0 <= lo < hi <= ch.shape[0]:
            raise ValueError(f"rest segment {lo}:{hi} is empty or out of bounds for {ch.shape[0]} samples")
        ch.setflags(write=False)
        object.__setattr__(self, "channels", ch)
        object.__setattr__(self, "rest_segment", (lo, hi))


@dataclass(frozen=True)
class FilterCoeffs:
    b0: float
    b1: float
    b2: float
    a1: float
    a2: float
    fc: float
    fs: float

    @property
    def b(self) -> np.ndarray:
        return np.array([self.b0, self.b1, self.b2])

    @property
    def a(self) -> np.ndarray:
        return np.array([1.0, self.a1, self.a2])

    @property
    def dc_gain(self) -> float:
        return (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)

    def response(self, f) -> np.ndarray:
        """Complex frequency response at ``f`` Hz."""
        zinv = np.exp(-2j * np.pi * np.asarray(f, dtype=float) / self.fs)
        return (self.b0 + self.b1 * zinv + self.b2 * zinv**2) / (1.0 + self.a1 * zinv + self.a2 * zinv**2)

    def poles(self) -> np.ndarray:
        return np.roots(self.a)


def rectify(x) -> np.ndarray:
    return np.abs(np.asarray(x, dtype=float))


def half_normal_moments(sigma: float = 1.0) -> tuple[float, float, float, float]:
    """(mean, variance, skewness, excess kurtosis) of |X|, X ~ N(0, sigma^2)."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    pi = math.pi
    mean = math.sqrt(2.0 / pi) * sigma
    var = (1.0 - 2.0 / pi) * sigma**2
    skew = (4.0 / pi - 1.0) * math.sqrt(2.0 / pi) / (1.0 - 2.0 / pi) ** 1.5
    kurt = (3.0 - 4.0 / pi - 12.0 / pi**2) / (1.0 - 2.0 / pi) ** 2 - 3.0
    return mean, var, skew, kurt


def butter2_design(fc: float, fs: float) -> FilterCoeffs:
    """Second-order Butterworth low-pass via the prewarped bilinear transform."""
    if not (fs > 0 and 0 < fc < fs / 2):
        raise RangeError(f"cut-off {fc!r} Hz must lie in (0, fs/2) for fs={fs!r} Hz")
    K = math.tan(math.pi * fc / fs)
    K2 = K * K
    norm = 1.0 / (1.0 + math.sqrt(2.0) * K + K2)
    b0 = K2 * norm
    return FilterCoeffs(
        b0=b0,
        b1=2.0 * b0,
        b2=b0,
        a1=2.0 * (K2 - 1.0) * norm,
        a2=(1.0 - math.sqrt(2.0) * K + K2) * norm,
        fc=float(fc),
        fs=float(fs),
    )


def filter_apply(coeffs: FilterCoeffs, x, axis: int = 0) -> np.ndarray:
    """Causal filtering from zero initial state (direct form II transposed)."""
    return signal.lfilter(coeffs.b, coeffs.a, np.asarray(x, dtype=float), axis=axis)


def normalize_features(smoothed, rest_means, eps: float = NEAR_REST_EPS) -> np.ndarray:
    """Divide each baseline-removed sample by its sum over channels.

    Raises :class:`NearRestError` listing the offending sample indices when
    any denominator has magnitude below ``eps``.
    """
    E = np.atleast_2d(np.asarray(smoothed, dtype=float)) - np.asarray(rest_means, dtype=float)
    denom = E.sum(axis=1)
    bad = np.flatnonzero(~(np.abs(denom) >= eps))
    if bad.size:
        raise NearRestError(f"{bad.size} samples have a near-zero normalization denominator", bad)
    return E / denom[:, None]


@dataclass(frozen=True)
class EmgFeatures:
    """Normalized features; rows flagged in ``near_rest`` are NaN and must not be used for training."""

    features: np.ndarray
    near_rest: np.ndarray

    @property
    def valid(self) -> np.ndarray:
        return ~self.near_rest


def extract(recording: RawRecording, fc: float = 1.0, eps: float = NEAR_REST_EPS) -> EmgFeatures:
    """Rectify, smooth and normalize every channel; rest means come from the smoothed signal."""
    coeffs = butter2_design(fc, recording.fs)
    smoothed = filter_apply(coeffs, rectify(recording.channels), axis=0)
    lo, hi = recording.rest_segment
    E = smoothed - smoothed[lo:hi].mean(axis=0)
    denom = E.sum(axis=1)
    near = ~(np.abs(denom) >= eps)
    feats = np.full_like(E, np.nan)
    feats[~near] = E[~near] / denom[~near, None]
    return EmgFeatures(feats, near)
