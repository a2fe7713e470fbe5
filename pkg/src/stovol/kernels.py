"""Memory kernels for the Volterra term and their Laplace transforms.

Supported families:

* ``riesz``:     b(t) = t^(rho-2) / Gamma(rho-1),            rho in (1, 2)
* ``tempered``:  b(t) = t^(rho-2) exp(-eta t) / Gamma(rho-1), eta >= 0
* ``parabolic``: no memory term at all (rho = 1); the evolution is the
  plain heat semigroup and the kernel functions below are undefined.

The regularity parameter rho of the whole problem equals
1 + (2/pi) * sup |arg b_hat| over the right half plane; ``sector_rho``
recovers it numerically from the transform as a self-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RIESZ = "riesz"
TEMPERED = "tempered"
PARABOLIC = "parabolic"

_FAMILIES = (RIESZ, TEMPERED, PARABOLIC)


class KernelDomainError(ValueError):
    """Raised for evaluations outside a kernel's domain of definition."""


@dataclass(frozen=True)
class KernelSpec:
    """Memory kernel family with regularity exponent and tempering rate.

    rho is dimensionless; eta has units 1/time and must be 0 for the pure
    power-law (riesz) kernel.  The parabolic family encodes the memoryless
    heat equation and fixes rho = 1.
    """

    family: str
    rho: float
    eta: float = 0.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise KernelDomainError(f"unknown kernel family {self.family!r}")
        if self.family == PARABOLIC:
            if self.rho != 1.0:
                raise KernelDomainError("parabolic kernel requires rho = 1")
        else:
            if not 1.0 < self.rho < 2.0:
                raise KernelDomainError(
                    f"rho must lie in (1, 2) for {self.family}, got {self.rho}"
                )
        if self.eta < 0.0:
            raise KernelDomainError(f"eta must be >= 0, got {self.eta}")
        if self.family == RIESZ and self.eta != 0.0:
            raise KernelDomainError("riesz kernel has eta = 0; use tempered")

    @property
    def has_memory(self) -> bool:
        return self.family != PARABOLIC


def riesz_kernel(rho: float) -> KernelSpec:
    return KernelSpec(RIESZ, rho)


def tempered_kernel(rho: float, eta: float) -> KernelSpec:
    return KernelSpec(TEMPERED, rho, eta)


def parabolic_kernel() -> KernelSpec:
    return KernelSpec(PARABOLIC, 1.0)


def kernel_value(spec: KernelSpec, t):
    """Evaluate b(t) = t^(rho-2) exp(-eta t) / Gamma(rho-1) for t > 0."""
    if not spec.has_memory:
        raise KernelDomainError("parabolic family has no kernel values")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise KernelDomainError("kernel_value requires t > 0")
    g = math.gamma(spec.rho - 1.0)
    out = t ** (spec.rho - 2.0) * np.exp(-spec.eta * t) / g
    return out if out.ndim else float(out)


def laplace_transform(spec: KernelSpec, z):
    """b_hat(z) = (z + eta)^(1 - rho) on the principal branch.

    Defined wherever z + eta avoids the branch point 0; the scheme only
    evaluates it for Re z > 0 and on contours around the origin.
    """
    if not spec.has_memory:
        raise KernelDomainError("parabolic family has no memory transform")
    z = np.asarray(z, dtype=complex)
    shifted = z + spec.eta
    if np.any(shifted == 0.0):
        raise KernelDomainError("laplace_transform undefined at z = -eta")
    out = shifted ** (1.0 - spec.rho)
    return out if out.ndim else complex(out)


def sector_rho(spec: KernelSpec, n_samples: int = 4096,
               omega_min: float = 1e-6, omega_max: float = 1e6) -> float:
    """Recover rho from the transform's argument on the imaginary axis.

    Samples |arg b_hat(i*omega)| on a log grid; the supremum over the right
    half plane is attained on this boundary ray for both families, and is
    monotone in omega, so widening the grid only sharpens the estimate.
    """
    if not spec.has_memory:
        raise KernelDomainError("sector_rho undefined for the parabolic family")
    omega = np.logspace(math.log10(omega_min), math.log10(omega_max), n_samples)
    values = laplace_transform(spec, 1j * omega)
    sup_arg = np.max(np.abs(np.angle(values)))
    return 1.0 + (2.0 / math.pi) * sup_arg
