"""Damped Newton minimization for convex objectives with PSD Hessians."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import linalg

from .errors import SolveFailure

logger = logging.getLogger(__name__)

# damping ceiling, relative to the mean Hessian diagonal
DAMPING_LIMIT = 1e6


@dataclass
class NewtonResult:
    w: np.ndarray
    energies: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def damped_newton(
    objective: Callable[[np.ndarray], tuple[float, np.ndarray, np.ndarray]],
    energy: Callable[[np.ndarray], float],
    w0: np.ndarray,
    *,
    max_iters: int = 100,
    rel_tol: float = 1e-10,
    damping_init: float = 1e-8,
    damping_growth: float = 10.0,
) -> NewtonResult:
    """Minimize with steps ``-(H + mu I)^{-1} g``.

    ``mu`` starts at ``damping_init * trace(H) / n`` each iteration and is
    multiplied by ``damping_growth`` until ``H + mu I`` admits a Cholesky
    factorization and the trial step does not increase the energy. Stops
    when the gradient is exactly zero, when the relative energy decrease
    drops below ``rel_tol``, when no damped step decreases the energy, or
    after ``max_iters`` iterations.
    """
    w = np.array(w0, dtype=float)
    n = w.size
    E, g, H = objective(w)
    result = NewtonResult(w=w, energies=[E])
    eye = np.eye(n)
    for it in range(max_iters):
        if not np.any(g):
            result.converged = True
            break
        scale = np.trace(H) / n
        if not scale > 0:
            result.converged = True
            break
        mu = damping_init * scale
        limit = DAMPING_LIMIT * scale
        E_new = None
        while True:
            try:
                factor = linalg.cho_factor(H + mu * eye, lower=True, check_finite=False)
            except linalg.LinAlgError:
                mu *= damping_growth
                if mu > limit:
                    raise SolveFailure(
                        f"damped Hessian not positive definite up to mu={mu:.3g} (iteration {it})"
                    ) from None
                continue
            w_trial = w - linalg.cho_solve(factor, g, check_finite=False)
            E_trial = energy(w_trial)
            if E_trial <= E:
                E_new = E_trial
                break
            mu *= damping_growth
            if mu > limit:
                break
        if E_new is None:
            logger.debug("no descent step at iteration %d; treating as converged", it)
            result.converged = True
            break
        rel = (E - E_new) / abs(E) if E != 0.0 else (0.0 if E_new == E else np.inf)
        w = w_trial
        E, g, H = objective(w)
        result.energies.append(E)
        result.iterations = it + 1
        logger.debug("newton iter %d: E=%.17g rel=%.3g mu=%.3g", it + 1, E, rel, mu)
        if rel < rel_tol:
            result.converged = True
            break
    result.w = w
    return result
