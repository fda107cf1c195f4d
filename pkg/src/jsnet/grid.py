"""Posterior maps over a 2-D grid and the geometry of their 0.5 level sets."""

from __future__ import annotations

import numpy as np

__all__ = ["grid_axis", "posterior_grid", "level_set_points", "collinearity_residual"]


def grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    """Nodes lo, lo+step, ..., hi (inclusive when hi is on the lattice)."""
    if not step > 0:
        raise ValueError("grid step must be positive")
    if hi < lo:
        raise ValueError("grid max must not be below grid min")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(n), 12)


def posterior_grid(posterior_fn, lo: float = 0.0, hi: float = 1.0, step: float = 0.01):
    """Evaluate ``posterior_fn`` ((N, 2) -> (N, C)) on the square grid.

    Returns ``(axis, P)`` with ``P[j, i, c]`` the posterior of class c at
    ``(x1, x2) = (axis[i], axis[j])``.
    """
    axis = grid_axis(lo, hi, step)
    x1, x2 = np.meshgrid(axis, axis)
    pts = np.column_stack([x1.ravel(), x2.ravel()])
    P = np.asarray(posterior_fn(pts))
    return axis, P.reshape(axis.size, axis.size, -1)


def level_set_points(axis: np.ndarray, field: np.ndarray, level: float = 0.5) -> np.ndarray:
    """Crossings of ``field == level`` along grid rows and columns, by linear interpolation.

    ``field[j, i]`` is sampled at ``(axis[i], axis[j])``. Returns (K, 2) points.
    """
    f = np.asarray(field, dtype=float) - level
    pts = []
    # along x1 (rows) then along x2 (columns)
    for transpose in (False, True):
        g = f.T if transpose else f
        a, b = g[:, :-1], g[:, 1:]
        jj, ii = np.nonzero((a == 0) | (a * b < 0))
        t = np.where(a[jj, ii] == 0, 0.0, a[jj, ii] / (a[jj, ii] - b[jj, ii]))
        along = axis[ii] + t * (axis[ii + 1] - axis[ii])
        across = axis[jj]
        pts.append(np.column_stack([across, along] if transpose else [along, across]))
    out = np.vstack(pts)
    return np.unique(np.round(out, 12), axis=0)


def collinearity_residual(points) -> float:
    """Largest perpendicular distance from the total-least-squares line through ``points``."""
    P = np.asarray(points, dtype=float)
    if P.shape[0] < 3:
        return 0.0
    centered = P - P.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    normal = vt[-1]
    return float(np.max(np.abs(centered @ normal)))
