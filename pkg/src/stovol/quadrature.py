"""Convolution quadrature weights and discrete convolutions.

The weights omega_j are the power series coefficients of the kernel's
Laplace transform evaluated at the backward-Euler symbol,

    b_hat((1 - z) / k) = sum_j omega_j z^j,   |z| < 1,

so that  sum_{j=1..n} omega_{n-j} f(t_j)  approximates the memory integral
int_0^{t_n} b(t_n - s) f(s) ds at first order.  For the supported kernel
families the series has a closed form: with c_0 = 1 and
c_j = c_{j-1} (j - 2 + rho) / j (the binomial series of (1-z)^(1-rho)),

    omega_j = k^(rho-1) (1 + k eta)^(1 - rho - j) c_j.

``weights_contour`` extracts the same coefficients by numerical Cauchy
integration and serves as the independent oracle for the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import KernelSpec, KernelDomainError, laplace_transform


class WeightLengthError(ValueError):
    """A history longer than the available weight table was supplied."""


class ContourUnderflowError(ArithmeticError):
    """radius**n_max underflows; coefficients are not recoverable."""


@dataclass(frozen=True)
class CQWeights:
    """Quadrature weights omega_0..omega_n_max for one (kernel, k) pair."""

    kernel: KernelSpec
    k: float
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.weights.setflags(write=False)

    @property
    def n_max(self) -> int:
        return len(self.weights) - 1


def binomial_coefficients(rho: float, n_max: int) -> np.ndarray:
    """c_j from the series (1-z)^(1-rho) = sum c_j z^j, j = 0..n_max."""
    c = np.empty(n_max + 1)
    c[0] = 1.0
    j = np.arange(1, n_max + 1)
    c[1:] = np.cumprod((j - 2.0 + rho) / j)
    return c


def weights_closed_form(kernel: KernelSpec, k: float, n_max: int) -> CQWeights:
    """Exact weights for the riesz/tempered kernels."""
    if not kernel.has_memory:
        raise KernelDomainError("no quadrature weights for the parabolic family")
    if k <= 0.0:
        raise ValueError("step size k must be positive")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    c = binomial_coefficients(kernel.rho, n_max)
    j = np.arange(n_max + 1)
    # (1 + k eta)^(1 - rho - j) via logs to stay stable for large j
    damp = np.exp((1.0 - kernel.rho - j) * np.log1p(k * kernel.eta))
    w = k ** (kernel.rho - 1.0) * damp * c
    return CQWeights(kernel=kernel, k=k, weights=w)


def weights_contour(kernel: KernelSpec, k: float, n_max: int,
                    radius: float = 0.3, samples: int | None = None) -> CQWeights:
    """Cauchy-coefficient extraction of the weights on |z| = radius.

    Independent oracle for ``weights_closed_form``; round-off grows like
    radius^(-j), so large n_max needs a radius close to 1 (aliasing decays
    like radius^samples and stays negligible with samples ~ 8 n_max).
    """
    if not kernel.has_memory:
        raise KernelDomainError("no quadrature weights for the parabolic family")
    if not 0.0 < radius < 1.0:
        raise ValueError("radius must lie in (0, 1)")
    if samples is None:
        samples = max(256, 8 * n_max)
    if samples < 4 * (n_max + 1):
        raise ValueError("need samples >= 4 (n_max + 1)")
    if radius ** max(n_max, 1) < 1e-300:
        raise ContourUnderflowError(
            f"radius**n_max = {radius}**{n_max} underflows; increase radius"
        )
    theta = 2.0 * np.pi * np.arange(samples) / samples
    z = radius * np.exp(1j * theta)
    vals = laplace_transform(kernel, (1.0 - z) / k)
    coeff = np.fft.fft(vals) / samples  # fft uses e^{-2 pi i j l / S}: Cauchy sum
    w = coeff[: n_max + 1].real / radius ** np.arange(n_max + 1)
    return CQWeights(kernel=kernel, k=k, weights=w)


def convolve_history(weights: CQWeights, history) -> np.ndarray:
    """sum_{j=1..n} omega_{n-j} f_j for history f_1..f_n (newest gets omega_0).

    history is a sequence of scalars or equally-shaped vectors.
    """
    hist = np.asarray(history, dtype=float)
    n = hist.shape[0]
    if n > weights.n_max + 1:
        raise WeightLengthError(
            f"history of length {n} exceeds available weights ({weights.n_max + 1})"
        )
    if n == 0:
        raise WeightLengthError("empty history")
    w = np.ascontiguousarray(weights.weights[n - 1 :: -1])
    return w @ hist if hist.ndim > 1 else float(w @ hist)
