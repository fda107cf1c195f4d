"""Johnson translation system.

Family functions, the normalizing translation ``z = gamma + delta * g((x - xi) / lambda)``
and its inverse, the Jacobian of the translation, the class-conditional
density of a translated normal law, and percentile-method estimation of
the S_U parameters from data.

Every function accepts a single point of shape ``(d,)`` or a batch of
shape ``(N, d)``; the last axis always indexes dimensions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateSpacing, DomainError, FamilyMismatch

__all__ = [
    "FamilyTag",
    "JohnsonParams",
    "ClassModel",
    "PercentileQuad",
    "PercentileFit",
    "g_eval",
    "g_prime",
    "g_inverse",
    "normalize_transform",
    "inverse_transform",
    "jacobian_logdet",
    "class_log_density",
    "normal_cdf",
    "percentile",
    "percentile_quad",
    "fit_percentile",
    "DEFAULT_Z_PARAM",
]

DEFAULT_Z_PARAM = 0.524
_LOG_2PI = math.log(2.0 * math.pi)


class FamilyTag(str, enum.Enum):
    SL = "SL"
    SU = "SU"
    SB = "SB"
    SN = "SN"


def _tag(family) -> FamilyTag:
    return family if isinstance(family, FamilyTag) else FamilyTag(str(family))


def _check_domain(family: FamilyTag, y: np.ndarray) -> None:
    if family is FamilyTag.SL:
        bad = ~(y > 0)
    elif family is FamilyTag.SB:
        bad = ~((y > 0) & (y < 1))
    else:
        bad = ~np.isfinite(y)
    if np.any(bad):
        first = np.asarray(y)[bad].flat[0] if np.ndim(y) else float(y)
        raise DomainError(
            f"{family.value}: value {first!r} outside the family domain",
            family=family,
            value=float(first),
        )


def g_eval(family, y):
    """Family transformation g(y): ln y, asinh y, logit y or identity."""
    family = _tag(family)
    y = np.asarray(y, dtype=float)
    _check_domain(family, y)
    if family is FamilyTag.SL:
        out = np.log(y)
    elif family is FamilyTag.SU:
        # asinh(y) == ln(y + sqrt(y^2 + 1)) without cancellation for y << 0
        out = np.arcsinh(y)
    elif family is FamilyTag.SB:
        out = np.log(y) - np.log1p(-y)
    else:
        out = y.copy()
    return out[()] if out.ndim == 0 else out


def g_prime(family, y):
    """Derivative g'(y); strictly positive inside the domain."""
    family = _tag(family)
    y = np.asarray(y, dtype=float)
    _check_domain(family, y)
    if family is FamilyTag.SL:
        out = 1.0 / y
    elif family is FamilyTag.SU:
        out = 1.0 / np.hypot(y, 1.0)
    elif family is FamilyTag.SB:
        out = 1.0 / (y * (1.0 - y))
    else:
        out = np.ones_like(y)
    return out[()] if out.ndim == 0 else out


def _log_g_prime(family: FamilyTag, y: np.ndarray) -> np.ndarray:
    if family is FamilyTag.SL:
        return -np.log(y)
    if family is FamilyTag.SU:
        return -np.log(np.hypot(y, 1.0))
    if family is FamilyTag.SB:
        return -(np.log(y) + np.log1p(-y))
    return np.zeros_like(y)


def g_inverse(family, u):
    """Inverse of :func:`g_eval`; defined on the whole real line for every family."""
    family = _tag(family)
    u = np.asarray(u, dtype=float)
    if family is FamilyTag.SL:
        out = np.exp(u)
    elif family is FamilyTag.SU:
        out = np.sinh(u)
    elif family is FamilyTag.SB:
        out = 1.0 / (1.0 + np.exp(-u))
    else:
        out = u.copy()
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class JohnsonParams:
    """Per-dimension translation parameters of one class.

    ``family`` is either a single tag shared by all dimensions or one tag
    per dimension (the latter only arises from lenient percentile fits that
    fall back to S_N on a dimension).
    """

    gamma: np.ndarray
    delta: np.ndarray
    lam: np.ndarray
    xi: np.ndarray
    family: FamilyTag | tuple = FamilyTag.SU

    def __post_init__(self):
        arrays = {}
        for name in ("gamma", "delta", "lam", "xi"):
            a = np.array(getattr(self, name), dtype=float, ndmin=1)
            if a.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            a.setflags(write=False)
            arrays[name] = a
            object.__setattr__(self, name, a)
        d = arrays["gamma"].size
        if d < 1 or any(a.size != d for a in arrays.values()):
            raise ValueError("gamma, delta, lam and xi must share one positive length")
        if not np.all(arrays["delta"] > 0):
            raise ValueError("delta must be strictly positive")
        if not np.all(arrays["lam"] > 0):
            raise ValueError("lam must be strictly positive")
        if isinstance(self.family, (str, FamilyTag)):
            fam = _tag(self.family)
        else:
            tags = tuple(_tag(f) for f in self.family)
            if len(tags) != d:
                raise ValueError("per-dimension family list has the wrong length")
            fam = tags[0] if len(set(tags)) == 1 else tags
        object.__setattr__(self, "family", fam)

    @property
    def d(self) -> int:
        return self.gamma.size

    @property
    def families(self) -> tuple:
        if isinstance(self.family, FamilyTag):
            return (self.family,) * self.d
        return self.family

    def scaled(self, a: float, b: float) -> "JohnsonParams":
        """Parameters of ``a * x + b`` when ``x`` follows these parameters (a > 0)."""
        return JohnsonParams(self.gamma, self.delta, a * self.lam, a * self.xi + b, self.family)


def _affine(params: JohnsonParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (params.d,):
        raise ValueError(f"expected trailing dimension {params.d}, got shape {x.shape}")
    return (x - params.xi) / params.lam


def _per_dim(params: JohnsonParams, y: np.ndarray, fn) -> np.ndarray:
    out = np.empty_like(y)
    for i, fam in enumerate(params.families):
        try:
            _check_domain(fam, y[..., i])
        except DomainError as exc:
            raise DomainError(
                f"dimension {i}: {exc}", family=fam, value=exc.value, dimension=i
            ) from None
        out[..., i] = fn(fam, y[..., i])
    return out


def normalize_transform(params: JohnsonParams, x) -> np.ndarray:
    """z = gamma + delta * g((x - xi) / lam), elementwise per dimension."""
    y = _affine(params, x)
    gy = _per_dim(params, y, lambda fam, v: np.asarray(g_eval(fam, v)))
    return params.gamma + params.delta * gy


def inverse_transform(params: JohnsonParams, z) -> np.ndarray:
    """x = xi + lam * g^{-1}((z - gamma) / delta)."""
    z = np.asarray(z, dtype=float)
    u = (z - params.gamma) / params.delta
    out = np.empty_like(u)
    for i, fam in enumerate(params.families):
        out[..., i] = g_inverse(fam, u[..., i])
    return params.xi + params.lam * out


def jacobian_logdet(params: JohnsonParams, x):
    """log |dz/dx| = sum_i log[(delta_i / lam_i) g'((x_i - xi_i) / lam_i)]."""
    y = _affine(params, x)
    lg = _per_dim(params, y, _log_g_prime)
    return np.sum(np.log(params.delta / params.lam) + lg, axis=-1)


@dataclass(frozen=True)
class ClassModel:
    """Generative model of one class: translation parameters, prior and precision of z."""

    params: JohnsonParams
    prior: float
    precision: np.ndarray
    logdet_sigma: float | None = None

    def __post_init__(self):
        if not 0.0 < self.prior <= 1.0:
            raise ValueError("prior must lie in (0, 1]")
        s = np.array(self.precision, dtype=float, ndmin=2)
        d = self.params.d
        if s.shape != (d, d):
            raise ValueError(f"precision must be {d}x{d}")
        if np.max(np.abs(s - s.T)) > 1e-12:
            raise ValueError("precision must be symmetric")
        try:
            chol = np.linalg.cholesky(s)
        except np.linalg.LinAlgError:
            raise ValueError("precision must be positive definite") from None
        s.setflags(write=False)
        object.__setattr__(self, "precision", s)
        logdet = -2.0 * float(np.sum(np.log(np.diag(chol))))
        if self.logdet_sigma is None:
            object.__setattr__(self, "logdet_sigma", logdet)
        elif not math.isclose(self.logdet_sigma, logdet, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError("logdet_sigma disagrees with -log det(precision)")


def class_log_density(model: ClassModel, x):
    """log P(x | c) including the (2 pi)^{-d/2} normalization."""
    z = normalize_transform(model.params, x)
    quad = np.einsum("...i,ij,...j->...", z, model.precision, z)
    d = model.params.d
    return (
        jacobian_logdet(model.params, x)
        - 0.5 * d * _LOG_2PI
        - 0.5 * model.logdet_sigma
        - 0.5 * quad
    )


def normal_cdf(zeta: float) -> float:
    """Standard normal CDF."""
    return 0.5 * math.erfc(-zeta / math.sqrt(2.0))


def percentile(samples, P: float) -> float:
    """P-th percentile with linear interpolation at zero-based rank (N - 1) P / 100."""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError("percentile of an empty sample")
    return float(np.percentile(samples, P, method="linear"))


@dataclass(frozen=True)
class PercentileQuad:
    x_m3z: float
    x_mz: float
    x_z: float
    x_3z: float

    @property
    def m(self) -> float:
        return self.x_3z - self.x_z

    @property
    def n(self) -> float:
        return self.x_mz - self.x_m3z

    @property
    def p(self) -> float:
        return self.x_z - self.x_mz


def percentile_quad(samples, z_param: float = DEFAULT_Z_PARAM) -> PercentileQuad:
    """Sample percentiles at the normal areas of -3z, -z, z and 3z."""
    samples = np.asarray(samples, dtype=float).ravel()
    xs = [percentile(samples, 100.0 * normal_cdf(k * z_param)) for k in (-3, -1, 1, 3)]
    return PercentileQuad(*xs)


class PercentileFit(NamedTuple):
    gamma: float
    delta: float
    lam: float
    xi: float
    family: FamilyTag = FamilyTag.SU


def fit_percentile(
    samples: Sequence[float] | np.ndarray,
    z_param: float = DEFAULT_Z_PARAM,
    strict: bool = True,
) -> PercentileFit:
    """Closed-form S_U parameters from four symmetric percentiles.

    Tail distances ``m``, ``n`` are compared against the central distance
    ``p``. When ``mn / p**2 <= 1`` the data are not S_U shaped: strict mode
    raises :class:`FamilyMismatch`, lenient mode returns an S_N fit built
    from the sample mean and standard deviation.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if z_param <= 0:
        raise ValueError("z_param must be positive")
    if samples.size < 2:
        raise DegenerateSpacing("need at least two samples")
    q = percentile_quad(samples, z_param)
    m, n, p = q.m, q.n, q.p
    if not p > 0:
        raise DegenerateSpacing(f"central percentile spacing p={p!r} is not positive")
    mp, np_ = m / p, n / p
    disc = mp * np_ - 1.0
    if not disc > 0:
        if strict:
            raise FamilyMismatch(f"mn/p^2 = {mp * np_!r} <= 1; data are not S_U shaped")
        std = float(np.std(samples))
        if not std > 0:
            raise DegenerateSpacing("constant samples")
        return PercentileFit(0.0, 1.0, std, float(np.mean(samples)), FamilyTag.SN)
    root = math.sqrt(disc)
    delta = 2.0 * z_param / math.acosh(0.5 * (mp + np_))
    gamma = delta * math.asinh((np_ - mp) / (2.0 * root))
    lam = 2.0 * p * root / ((mp + np_ - 2.0) * math.sqrt(mp + np_ + 2.0))
    xi = 0.5 * (q.x_z + q.x_mz) + p * (np_ - mp) / (2.0 * (mp + np_ - 2.0))
    return PercentileFit(gamma, delta, lam, xi, FamilyTag.SU)
