"""Q-Wiener noise diagonal in the sine eigenbasis, with coupled increments.

The covariance spectrum mu_j controls both the noise smoothness and the
attainable convergence rates: the admissible regularity exponent beta is
the largest value in (0, 1/rho] with

    sum_j (j pi)^(2 beta - 2/rho) mu_j < infinity.

Increment tables hold int dW over each fine step in eigencoordinates,
entry (m, j) ~ N(0, k mu_j), generated by the counter-based generator so
that coarsening by summation, widening the mode count, or re-running with
more threads never changes a single draw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng

POWER_LAW = "powerlaw"
EXPLICIT = "explicit"


class NoiseAdmissibilityError(ValueError):
    """The spectrum admits no positive regularity exponent."""


@dataclass(frozen=True)
class NoiseModel:
    """Covariance spectrum of the driving noise.

    powerlaw: mu_j = q j^(-2s) (s = 0 white noise, s >= ~0.5 trace class);
    explicit: mu_j given directly.
    """

    kind: str
    n_modes: int
    s: float = 0.0
    q: float = 1.0
    mu_explicit: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in (POWER_LAW, EXPLICIT):
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if self.kind == POWER_LAW:
            if self.s < 0.0 or self.q <= 0.0:
                raise ValueError("powerlaw spectrum needs s >= 0, q > 0")
        else:
            mu = np.asarray(self.mu_explicit, dtype=float)
            if mu.shape != (self.n_modes,):
                raise ValueError("explicit spectrum must list mu_j for every mode")
            if np.any(mu < 0.0):
                raise ValueError("mu_j must be >= 0")
            mu.setflags(write=False)
            object.__setattr__(self, "mu_explicit", mu)

    def mu(self, n_modes: int | None = None) -> np.ndarray:
        n = self.n_modes if n_modes is None else n_modes
        if self.kind == POWER_LAW:
            j = np.arange(1, n + 1, dtype=float)
            return self.q * j ** (-2.0 * self.s)
        if n > self.n_modes:
            raise ValueError("explicit spectrum has no entries beyond n_modes")
        return self.mu_explicit[:n]


def white_noise(n_modes: int, q: float = 1.0) -> NoiseModel:
    return NoiseModel(POWER_LAW, n_modes, s=0.0, q=q)


def power_law_noise(n_modes: int, s: float, q: float = 1.0) -> NoiseModel:
    return NoiseModel(POWER_LAW, n_modes, s=s, q=q)


def admissible_beta(noise: NoiseModel, rho: float) -> float:
    """Largest regularity exponent compatible with the spectrum.

    Power-law spectra have the closed form min(1/rho, 1/rho + s - 1/2).
    Explicit spectra are probed numerically: the summand's decay exponent
    is fitted on the available tail and the summability threshold solved
    by bisection over beta.
    """
    cap = 1.0 / rho
    if noise.kind == POWER_LAW:
        beta = min(cap, cap + noise.s - 0.5)
        if beta <= 0.0:
            raise NoiseAdmissibilityError("no admissible beta > 0 for this spectrum")
        return beta

    mu = noise.mu()
    j = np.arange(1, len(mu) + 1, dtype=float)
    keep = mu > 0.0
    if keep.sum() < 8:
        raise NoiseAdmissibilityError("need >= 8 nonzero tail entries to judge decay")
    tail = keep & (j >= max(4, len(mu) // 4))

    def converges(beta):
        # summand a_j = (j pi)^(2 beta - 2/rho) mu_j; fitted log-log slope
        # below -1 (with margin) counts as summable
        a = (j[tail] * math.pi) ** (2.0 * beta - 2.0 / rho) * mu[tail]
        slope = np.polyfit(np.log(j[tail]), np.log(a), 1)[0]
        return slope < -1.0 - 1e-9

    if not converges(1e-9):
        raise NoiseAdmissibilityError("no admissible beta > 0 for this spectrum")
    if converges(cap):
        return cap
    lo, hi = 0.0, cap
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if converges(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class IncrementTable:
    """Wiener increments over each fine step, per eigencoordinate.

    increments[m, j] = int_{t_m}^{t_{m+1}} dW_j ~ N(0, k_fine mu_j),
    independent across entries; a deterministic function of (seed, path).
    """

    k_fine: float
    increments: np.ndarray = field(repr=False)
    seed: int
    path_index: int = 0

    def __post_init__(self):
        self.increments.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return self.increments.shape[0]

    @property
    def n_modes(self) -> int:
        return self.increments.shape[1]


def sample_increments(noise: NoiseModel, k_fine: float, n_steps: int,
                      n_modes: int, seed: int, path_index: int = 0) -> IncrementTable:
    """Draw the increment table for one path from the keyed generator."""
    if k_fine <= 0.0 or n_steps < 1 or n_modes < 1:
        raise ValueError("k_fine > 0, n_steps >= 1, n_modes >= 1 required")
    z = rng.normal_matrix(seed, rng.DOMAIN_INCREMENTS, path_index, n_steps, n_modes)
    scale = np.sqrt(k_fine * noise.mu(n_modes))
    return IncrementTable(k_fine=k_fine, increments=scale[None, :] * z,
                          seed=seed, path_index=path_index)


def coarsen(table: IncrementTable, factor: int) -> IncrementTable:
    """Sum blocks of `factor` fine increments into coarse ones.

    Dyadic factors are folded by successive pairwise halvings, which makes
    coarsen(coarsen(T, a), b) bitwise identical to coarsen(T, a*b) on the
    dyadic ladders the rate studies use.  A residual odd factor is summed
    per block.
    """
    if factor < 1:
        raise ValueError("factor must be >= 1")
    if table.n_steps % factor != 0:
        raise ValueError(
            f"factor {factor} does not divide n_steps = {table.n_steps}"
        )
    if factor == 1:
        return table
    inc = table.increments
    remaining = factor
    while remaining % 2 == 0:
        inc = inc[0::2] + inc[1::2]
        remaining //= 2
    if remaining > 1:
        inc = inc.reshape(inc.shape[0] // remaining, remaining,
                          table.n_modes).sum(axis=1)
    return IncrementTable(k_fine=table.k_fine * factor, increments=inc,
                          seed=table.seed, path_index=table.path_index)
