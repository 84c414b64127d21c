"""Spectral unfolding, spacing samples, Weibull fits, and the chaos parameter.

The chaos parameter compares the observed nearest-neighbor spacing density
against the Poisson and Wigner-Dyson references on [0, s0]:

    gamma = int_0^s0 [P(s) - P_WD(s)] ds / int_0^s0 [P_P(s) - P_WD(s)] ds

with s0 = 0.472, the crossing point of the two reference densities; gamma = 1
for Poisson (regular) spectra and 0 for Wigner-Dyson (chaotic) ones.  P(s) is
taken from a Weibull fit of the unfolded spacings, not the raw histogram.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

__all__ = [
    "S0_CROSSING",
    "UnfoldingError",
    "FitConvergenceError",
    "WeibullParams",
    "SpacingSample",
    "poisson_density",
    "wigner_dyson_density",
    "weibull_density",
    "unfold",
    "spacing_sample_from_levels",
    "pool_spacing_samples",
    "weibull_mle",
    "weibull_fit",
    "gamma_from_density",
    "gamma_chaos",
]

S0_CROSSING = 0.472


class UnfoldingError(RuntimeError):
    """Unfolding failed (too few levels, bad fit, or non-monotone mapping)."""


class FitConvergenceError(RuntimeError):
    """The Weibull maximum-likelihood iteration did not converge."""


def poisson_density(s):
    """Poisson spacing density exp(-s) of regular spectra."""
    return np.exp(-np.asarray(s, dtype=float))


def wigner_dyson_density(s):
    """Wigner surmise (pi s / 2) exp(-pi s^2 / 4) of chaotic (GOE-like) spectra."""
    s = np.asarray(s, dtype=float)
    return (np.pi * s / 2.0) * np.exp(-np.pi * s * s / 4.0)


def weibull_density(s, a: float, c: float):
    """Two-parameter density a c s^(c-1) exp(-a s^c) on s >= 0.

    Contains both references: (a=1, c=1) is Poisson and (a=pi/4, c=2) is the
    Wigner surmise.
    """
    s = np.asarray(s, dtype=float)
    return a * c * s ** (c - 1.0) * np.exp(-a * s**c)


# Denominator of the chaos parameter, in closed form (both reference densities
# integrate elementarily on [0, s0]).
GAMMA_DENOMINATOR = math.exp(-math.pi * S0_CROSSING**2 / 4.0) - math.exp(-S0_CROSSING)


@dataclass(frozen=True)
class WeibullParams:
    """Maximum-likelihood Weibull parameters with fit diagnostics."""

    a: float
    c: float
    log_likelihood: float
    n_samples: int
    converged: bool
    n_floored: int = 0


@dataclass(frozen=True)
class SpacingSample:
    """Nearest-neighbor spacings normalized to unit mean."""

    spacings: np.ndarray
    source: str
    n_levels_discarded: int = 0

    def __post_init__(self) -> None:
        s = np.asarray(self.spacings, dtype=float)
        if s.size == 0:
            raise ValueError("empty spacing sample")
        if np.any(s < 0):
            raise ValueError("spacings must be nonnegative")
        s = s / s.mean()
        s.setflags(write=False)
        object.__setattr__(self, "spacings", s)

    def __len__(self) -> int:
        return self.spacings.size


def _fit_counting_function(levels: np.ndarray, degree: int):
    y = np.arange(levels.size) + 0.5
    poly = np.polynomial.Polynomial.fit(levels, y, deg=degree)
    return poly(levels)


def unfold(
    eigenvalues, poly_degree: int = 6, edge_trim: float = 0.05
) -> np.ndarray:
    """Map eigenvalues to unit-mean-spacing coordinates.

    Fits the cumulative level-counting staircase with a polynomial, evaluates
    the fit at each level, and discards the trimmed edge fraction on each side
    (the fit is unreliable at spectrum edges).  Returns the kept unfolded
    levels; consecutive differences are the unfolded spacings.
    """
    levels = np.sort(np.asarray(eigenvalues, dtype=float))
    n = levels.size
    if n < 20:
        raise UnfoldingError(f"need at least 20 levels to unfold, got {n}")
    k = int(math.floor(edge_trim * n))
    for degree in (poly_degree, poly_degree - 1):
        if degree < 1:
            break
        mapped = _fit_counting_function(levels, degree)
        kept = mapped[k : n - k] if k > 0 else mapped
        if np.all(np.diff(kept) >= 0.0):
            return kept
    raise UnfoldingError(
        f"counting-function fit non-monotone at degrees {poly_degree} and "
        f"{poly_degree - 1}"
    )


def spacing_sample_from_levels(
    eigenvalues,
    source: str,
    poly_degree: int = 6,
    edge_trim: float = 0.05,
) -> SpacingSample:
    """Unfold a spectrum and package the normalized spacings."""
    levels = np.asarray(eigenvalues, dtype=float)
    kept = unfold(levels, poly_degree=poly_degree, edge_trim=edge_trim)
    return SpacingSample(
        spacings=np.diff(kept),
        source=source,
        n_levels_discarded=levels.size - kept.size,
    )


def pool_spacing_samples(samples, source: str) -> SpacingSample:
    """Concatenate per-realization samples into one pooled, renormalized sample."""
    samples = list(samples)
    if not samples:
        raise ValueError("nothing to pool")
    return SpacingSample(
        spacings=np.concatenate([s.spacings for s in samples]),
        source=source,
        n_levels_discarded=sum(s.n_levels_discarded for s in samples),
    )


def weibull_mle(
    values, max_iter: int = 100, tol: float = 1e-8
) -> WeibullParams:
    """Maximum-likelihood Weibull fit by damped Newton on the shape parameter.

    For fixed shape c the scale solves in closed form, a = n / sum(x^c); the
    remaining one-dimensional profile score in c is strictly decreasing, so
    Newton iteration (with step halving to stay in c > 0) is reliable.  Exact
    zeros are floored at machine epsilon and counted in ``n_floored``.
    """
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 samples to fit")
    if np.any(x < 0):
        raise ValueError("Weibull samples must be nonnegative")
    n_floored = int(np.count_nonzero(x == 0.0))
    if n_floored:
        x = np.where(x == 0.0, np.finfo(float).eps, x)

    log_x = np.log(x)
    mean_log = float(log_x.mean())
    n = x.size

    def score_and_slope(c: float):
        xc = x**c
        s0 = float(xc.sum())
        s1 = float((xc * log_x).sum())
        s2 = float((xc * log_x * log_x).sum())
        score = 1.0 / c + mean_log - s1 / s0
        slope = -1.0 / c**2 - (s2 * s0 - s1 * s1) / s0**2
        return score, slope

    c = 1.0
    converged = False
    for _ in range(max_iter):
        score, slope = score_and_slope(c)
        step = score / slope
        c_next = c - step
        while c_next <= 0.0:
            step *= 0.5
            c_next = c - step
        if not math.isfinite(c_next):
            raise FitConvergenceError("Newton iteration diverged")
        if abs(c_next - c) < tol:
            c = c_next
            converged = True
            break
        c = c_next
    if not converged:
        raise FitConvergenceError(
            f"shape parameter did not converge within {max_iter} iterations"
        )

    a = n / float((x**c).sum())
    log_lik = (
        n * math.log(a)
        + n * math.log(c)
        + (c - 1.0) * float(log_x.sum())
        - a * float((x**c).sum())
    )
    return WeibullParams(
        a=a,
        c=c,
        log_likelihood=log_lik,
        n_samples=n,
        converged=True,
        n_floored=n_floored,
    )


def weibull_fit(sample: SpacingSample) -> WeibullParams:
    """Fit the Weibull density to a spacing sample (needs >= 100 spacings)."""
    if len(sample) < 100:
        raise ValueError(f"need at least 100 spacings to fit, got {len(sample)}")
    return weibull_mle(sample.spacings)


def gamma_from_density(density: Callable[[float], float]) -> float:
    """Chaos parameter of an arbitrary spacing density on [0, s0].

    1 for the Poisson density, 0 for Wigner-Dyson; densities more repulsive
    than Wigner-Dyson (or more clustered than Poisson) land outside [0, 1].
    """
    numerator, _ = quad(
        lambda s: density(s) - wigner_dyson_density(s),
        0.0,
        S0_CROSSING,
        epsabs=1e-10,
        limit=200,
    )
    return numerator / GAMMA_DENOMINATOR


def gamma_chaos(fit: WeibullParams) -> float:
    """Chaos parameter of a fitted Weibull spacing density."""
    return gamma_from_density(lambda s: weibull_density(s, fit.a, fit.c))
