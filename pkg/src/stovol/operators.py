"""Spatial discretizations of -Laplacian on (0,1) with Dirichlet conditions.

Two Galerkin families share one interface:

* ``SpectralOperator``: span of the exact eigenfunctions
  e_j(x) = sqrt(2) sin(j pi x) with eigenvalues (j pi)^2; every linear
  solve is diagonal and fractional powers act on coefficients.
* ``FemOperator``: continuous piecewise-linear elements on the uniform
  mesh of width h = 1/n_cells, consistent (tridiagonal) mass matrix, and
  the generalized eigen-pairs of stiffness vs mass computed once at
  assembly.

Fields store either spectral coefficients or interior nodal values; the
mesh-size parameter of a spectral operator is h = lambda_{N+1}^(-1/2)
so that both families share one refinement bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky_banded, cho_solve_banded, eigh

from .kernels import KernelSpec

SPECTRAL_COEFFS = "spectral"
NODAL_VALUES = "nodal"

_GAUSS4_NODES = np.array([-0.8611363115940526, -0.3399810435848563,
                          0.3399810435848563, 0.8611363115940526])
_GAUSS4_WEIGHTS = np.array([0.34785484513745385, 0.6521451548625461,
                            0.6521451548625461, 0.34785484513745385])


class ConfigValidationError(ValueError):
    """A model configuration violates one of the standing assumptions."""


@dataclass(frozen=True)
class SpectralOperator:
    """Truncated eigenbasis of -Laplacian on (0,1)."""

    n_modes: int
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return 1.0 / ((self.n_modes + 1) * math.pi)

    @property
    def dim(self) -> int:
        return self.n_modes

    kind = SPECTRAL_COEFFS


def spectral_operator(n_modes: int) -> SpectralOperator:
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    j = np.arange(1, n_modes + 1, dtype=float)
    lam = (j * math.pi) ** 2
    lam.setflags(write=False)
    return SpectralOperator(n_modes=n_modes, eigenvalues=lam)


@dataclass(frozen=True)
class FemOperator:
    """P1 finite elements on the uniform mesh with n_cells cells.

    mass_diags/stiff_diags hold the (upper, main) banded storage used by
    scipy's banded solvers; eigenvectors are mass-orthonormal columns.
    """

    n_cells: int
    mass_diags: np.ndarray = field(repr=False)
    stiff_diags: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @property
    def dim(self) -> int:
        return self.n_cells - 1

    @property
    def n_modes(self) -> int:
        return self.n_cells - 1

    kind = NODAL_VALUES

    def nodes(self) -> np.ndarray:
        return np.arange(1, self.n_cells) * self.h

    def shifted_solver(self, coeff: float):
        """Factor mass + coeff * stiffness once; returns solve(rhs)."""
        ab = self.mass_diags + coeff * self.stiff_diags
        cb = cholesky_banded(ab)
        return lambda rhs: cho_solve_banded((cb, False), rhs)

    def apply_mass(self, values: np.ndarray) -> np.ndarray:
        return _tridiag_apply(self.mass_diags, values)

    def apply_stiffness(self, values: np.ndarray) -> np.ndarray:
        return _tridiag_apply(self.stiff_diags, values)


def _tridiag_apply(diags, v):
    # diags is banded (upper, main); matrix is symmetric
    up, main = diags[0], diags[1]
    v = np.asarray(v)
    out = main[:, None] * v if v.ndim > 1 else main * v
    if v.ndim > 1:
        out[:-1] += up[1:, None] * v[1:]
        out[1:] += up[1:, None] * v[:-1]
    else:
        out[:-1] += up[1:] * v[1:]
        out[1:] += up[1:] * v[:-1]
    return out


def assemble_fem(n_cells: int) -> FemOperator:
    """Mass/stiffness assembly plus the generalized eigensolve K v = lam M v."""
    if n_cells < 2:
        raise ValueError("n_cells must be >= 2")
    n = n_cells - 1
    h = 1.0 / n_cells
    mass = np.zeros((2, n))
    mass[1, :] = 2.0 * h / 3.0
    mass[0, 1:] = h / 6.0
    stiff = np.zeros((2, n))
    stiff[1, :] = 2.0 / h
    stiff[0, 1:] = -1.0 / h
    if n == 1:
        lam = np.array([stiff[1, 0] / mass[1, 0]])
        vec = np.array([[1.0 / math.sqrt(mass[1, 0])]])
    else:
        # dense generalized symmetric eigensolve; n <= ~10^3 at desk scale
        m_dense = np.diag(mass[1]) + np.diag(mass[0, 1:], 1) + np.diag(mass[0, 1:], -1)
        k_dense = np.diag(stiff[1]) + np.diag(stiff[0, 1:], 1) + np.diag(stiff[0, 1:], -1)
        lam, vec = eigh(k_dense, m_dense)
    for arr in (mass, stiff, lam, vec):
        arr.setflags(write=False)
    return FemOperator(n_cells=n_cells, mass_diags=mass, stiff_diags=stiff,
                       eigenvalues=lam, eigenvectors=vec)


@dataclass
class Field:
    """Element of the discrete space, tagged by its representation."""

    representation: str
    values: np.ndarray
    op: SpectralOperator | FemOperator

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != self.op.dim:
            raise ValueError(
                f"field length {len(self.values)} != operator dim {self.op.dim}"
            )

    def copy(self) -> "Field":
        return Field(self.representation, self.values.copy(), self.op)


@dataclass(frozen=True)
class InitialData:
    """Deterministic initial state as a finite sine series sum a_j e_j."""

    coefficients: np.ndarray

    @staticmethod
    def from_mode(j: int, amplitude: float = 1.0) -> "InitialData":
        a = np.zeros(j)
        a[j - 1] = amplitude
        return InitialData(np.asarray(a))

    @staticmethod
    def zero() -> "InitialData":
        return InitialData(np.zeros(1))


def eigenfunction_values(indices, x) -> np.ndarray:
    """e_j(x) = sqrt(2) sin(j pi x) for mode indices (1-based), broadcast."""
    j = np.asarray(indices, dtype=float)
    x = np.asarray(x, dtype=float)
    return math.sqrt(2.0) * np.sin(np.multiply.outer(j * math.pi, x))


def sine_series_values(coefficients, x) -> np.ndarray:
    coeffs = np.asarray(coefficients, dtype=float)
    j = np.arange(1, len(coeffs) + 1)
    return coeffs @ eigenfunction_values(j, x)


def cell_gauss_points(op: FemOperator):
    """4-point Gauss nodes/weights on every mesh cell, shape (n_cells, 4)."""
    h = op.h
    left = np.arange(op.n_cells) * h
    pts = left[:, None] + 0.5 * h * (_GAUSS4_NODES[None, :] + 1.0)
    wts = np.broadcast_to(0.5 * h * _GAUSS4_WEIGHTS, pts.shape)
    return pts, wts


def hat_function_values(op: FemOperator, x) -> np.ndarray:
    """phi_i(x) for all interior nodes i, shape (dim, len(x))."""
    x = np.asarray(x, dtype=float)
    nodes = op.nodes()
    d = 1.0 - np.abs(x[None, :] - nodes[:, None]) / op.h
    return np.maximum(d, 0.0)


def fem_load_vector(op: FemOperator, func_values, pts, wts) -> np.ndarray:
    """Integrals <g, phi_i> with g sampled at the cell Gauss points."""
    phi = hat_function_values(op, pts.ravel())
    return phi @ (func_values.ravel() * wts.ravel())


def project_initial(x0: InitialData, op) -> Field:
    """Orthogonal projection of the sine series onto the discrete space."""
    coeffs = np.asarray(x0.coefficients, dtype=float)
    if op.kind == SPECTRAL_COEFFS:
        out = np.zeros(op.dim)
        m = min(op.dim, len(coeffs))
        out[:m] = coeffs[:m]
        return Field(SPECTRAL_COEFFS, out, op)
    pts, wts = cell_gauss_points(op)
    g = sine_series_values(coeffs, pts.ravel()).reshape(pts.shape)
    load = fem_load_vector(op, g, pts, wts)
    solve = op.shifted_solver(0.0)
    return Field(NODAL_VALUES, solve(load), op)


def project_nodal(op: FemOperator, values_at_nodes) -> Field:
    return Field(NODAL_VALUES, np.asarray(values_at_nodes, dtype=float), op)


def apply_fractional(op: SpectralOperator, alpha: float, f: Field) -> Field:
    """Multiply spectral coefficients by lambda_j^alpha."""
    if f.representation != SPECTRAL_COEFFS:
        raise ValueError("fractional powers act on spectral coefficients")
    return Field(SPECTRAL_COEFFS, op.eigenvalues ** alpha * f.values, op)


def hdot_norm(f: Field, alpha: float) -> float:
    """Sobolev-scale norm: ||x||^2 = sum lambda_j^alpha x_j^2.

    alpha = 0 is the L2 (coefficient Euclidean) norm; alpha = 2 applies a
    full power of the operator to an eigenvector.
    """
    if f.representation != SPECTRAL_COEFFS:
        raise ValueError("hdot_norm expects spectral coefficients")
    lam = f.op.eigenvalues
    return float(np.sqrt(np.sum(lam ** alpha * f.values ** 2)))


def l2_norm(f: Field) -> float:
    if f.representation == SPECTRAL_COEFFS:
        return float(np.linalg.norm(f.values))
    m = f.op.apply_mass(f.values)
    return float(math.sqrt(max(f.values @ m, 0.0)))


def validate_config(kernel: KernelSpec, dimension: int, delta: float | None = None):
    """Check the drift-smoothing compatibility condition d/2 < 2/rho.

    Pointwise (Nemytskii) drifts need delta > d/2 while the analysis
    requires delta < 2/rho; a valid delta exists iff d/2 < 2/rho.  Only
    d = 1 is ever simulated, the check itself covers d in {1,2,3}.
    """
    if dimension not in (1, 2, 3):
        raise ConfigValidationError(f"dimension must be 1, 2 or 3, got {dimension}")
    rho = kernel.rho
    errors = []
    if dimension / 2.0 >= 2.0 / rho:
        errors.append(
            f"Nemytskii drift needs delta in (d/2, 2/rho) but d/2 = "
            f"{dimension / 2:.3g} >= 2/rho = {2.0 / rho:.3g} "
            f"(rho < {4.0 / dimension:.3g} required for d = {dimension})"
        )
    if delta is not None:
        if not dimension / 2.0 < delta:
            errors.append(f"delta = {delta:.3g} must exceed d/2 = {dimension / 2:.3g}")
        if not delta < 2.0 / rho:
            errors.append(f"delta = {delta:.3g} must be below 2/rho = {2.0 / rho:.3g}")
    if errors:
        raise ConfigValidationError("; ".join(errors))
    return True
