"""
EMG-style features: rectify, smooth, normalize
==============================================

Rectifying zero-mean Gaussian noise gives a half-normal variable with
skewness near 1. After low-pass smoothing the skewness persists when the
noise amplitude varies slowly, as it does during muscle contractions.
"""

import numpy as np
from scipy.stats import kurtosis, skew

from jsnet import RawRecording, butter2_design, extract, filter_apply, half_normal_moments, rectify

fs = 1000.0
rng = np.random.default_rng(3)

mean, var, s, k = half_normal_moments(1.0)
y = rectify(rng.normal(size=1_000_000))
print(f"half-normal skew {s:.5f} (sample {skew(y):.5f}), excess kurtosis {k:.5f} (sample {kurtosis(y):.5f})")

c = butter2_design(1.0, fs)
print(f"filter b = {c.b}, a = {c.a}")
print(f"DC gain {c.dc_gain:.12f}, |H(fc)| = {abs(c.response(1.0)):.9f}")

# two channels, 30 s: a rest second followed by slowly modulated activity
t = np.arange(int(30 * fs)) / fs
env = np.where(t < 1.0, 0.05, np.exp(0.8 * np.sin(2 * np.pi * 0.2 * t)))
raw = np.column_stack([env * rng.normal(size=t.size), 0.5 * env * rng.normal(size=t.size)])

smoothed = filter_apply(c, rectify(raw))
print(f"smoothed channel 1 skewness after the transient: {skew(smoothed[2000:, 0]):.3f}")

feats = extract(RawRecording(raw, fs, (200, 1000)))
v = feats.valid
print(f"{v.sum()} of {v.size} samples usable; features sum to 1: {np.allclose(feats.features[v].sum(axis=1), 1)}")
print("mean feature per channel during activity:", feats.features[v][2000:].mean(axis=0).round(3))
