"""Bloch-basis matrix of the dimensionless one-dimensional Hamiltonian.

Basis functions are ``exp(i (p + omega n) phi) / sqrt(f(phi))`` for
``n in [-n_max, n_max]``; with the arc-length measure ``f dphi`` they are
orthonormal (after the 1/2pi normalisation).  Matrix elements are

    H_mn = 1/(2pi) int_0^2pi exp(i omega (n - m) phi) h_n(phi) dphi

with the bracketed integrand ``h_n`` written out in
:func:`matrix_element_integrand`.  ``H`` represents the operator acting on
the wavefunction in the dimensionless Schrodinger equation ``(H + eps) psi = 0``,
so its eigenvalues are ``-eps``.  :attr:`HamiltonianMatrix.energy_matrix`
gives the matrix whose eigenvalues are the energies ``eps = 2 m E R^2 / hbar^2``.

The magnetic curvature term ``i kappa A_N`` is what makes ``H`` Hermitian:
its anti-Hermitian part cancels that of ``2i A_T d/ds`` because
``d(A_T)/ds = kappa A_N`` for a uniform field.  Setting ``include_vmag=False``
drops it, which only makes sense for demonstrating that defect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import FieldSpec, potential_components
from .geometry import DEFAULT_QUAD_POINTS, HelixSpec, frenet, metric, periodic_grid

CONVERGENCE_TOL = 1e-9


class QuadratureConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class BasisSpec:
    p: int = 0
    n_max: int = 2
    quad_points: int = DEFAULT_QUAD_POINTS

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.quad_points < 64 or self.quad_points % 2:
            raise ValueError(f"quad_points must be even and >= 64, got {self.quad_points}")
        if int(self.p) != self.p:
            raise ValueError(f"Bloch index p must be an integer, got {self.p}")

    @property
    def dim(self) -> int:
        return 2 * self.n_max + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)


@dataclass(frozen=True)
class HamiltonianMatrix:
    entries: np.ndarray
    includes_vmag: bool
    helix: HelixSpec
    field: FieldSpec
    basis: BasisSpec

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def energy_matrix(self) -> np.ndarray:
        return -self.entries


@dataclass(frozen=True)
class _NodeTerms:
    """Integrand pieces on the grid, split by their power of k = p + omega n."""

    phi: np.ndarray
    base: np.ndarray
    lin: np.ndarray
    quad: np.ndarray


def _node_terms(spec, fs, phi, include_vmag):
    fd = frenet(spec, phi)
    pc = potential_components(spec, phi, fs.phi_M, frame=fd)
    f, f1, f2, kappa = fd.f, fd.f1, fd.f2, fd.kappa
    A_T = pc.tangential(fs)
    base = (
        1.25 * f1 ** 2 / f ** 4
        - f2 / (2 * f ** 3)
        + 0.25 * kappa ** 2
        - 1j * f1 / f ** 2 * A_T
        - pc.squared(fs)
    )
    if include_vmag:
        base = base + 1j * kappa * pc.normal(fs)
    lin = -2j * f1 / f ** 3 - 2 * A_T / f
    quad = -1.0 / f ** 2
    return _NodeTerms(phi, base, lin, quad)


def matrix_element_integrand(
    spec: HelixSpec, fs: FieldSpec, basis: BasisSpec, m: int, n: int, phi, include_vmag: bool = True
):
    """Integrand of H_mn at ``phi`` (scalar or array), including the phase factor."""
    phi = np.asarray(phi, dtype=float)
    fd = frenet(spec, phi)
    pc = potential_components(spec, phi, fs.phi_M, frame=fd)
    f, f1, f2, kappa = fd.f, fd.f1, fd.f2, fd.kappa
    k = basis.p + spec.omega * n
    t0, t1 = fs.tau0, fs.tau1
    A_T = t1 * pc.A_T_rho + t0 * pc.A_T_z
    A_N = t1 * pc.A_N_rho + t0 * pc.A_N_z
    A_sq = (
        t1 ** 2 * (pc.A_T_rho ** 2 + pc.A_N_rho ** 2 + pc.A_B_rho ** 2)
        + t0 ** 2 * (pc.A_T_z ** 2 + pc.A_N_z ** 2 + pc.A_B_z ** 2)
        + 2 * t1 * t0 * (pc.A_T_rho * pc.A_T_z + pc.A_N_rho * pc.A_N_z + pc.A_B_rho * pc.A_B_z)
    )
    value = (
        1.25 * f1 ** 2 / f ** 4
        - f2 / (2 * f ** 3)
        - 2j * k * f1 / f ** 3
        + 0.25 * kappa ** 2
        - k ** 2 / f ** 2
        - 2 * k / f * A_T
        - 1j * f1 / f ** 2 * A_T
        - A_sq
    )
    if include_vmag:
        value = value + 1j * kappa * A_N
    return np.exp(1j * spec.omega * (n - m) * phi) * value


def _quadrature(spec, basis, terms):
    n = basis.indices
    k = basis.p + spec.omega * n
    phase = np.exp(1j * spec.omega * np.outer(terms.phi, n))  # (Q, dim)
    h = terms.base[:, None] + terms.lin[:, None] * k + terms.quad[:, None] * k ** 2
    # plain elementwise sum keeps the result independent of BLAS threading
    prod = phase.conj()[:, :, None] * (h * phase)[:, None, :]
    return prod.mean(axis=0)


def assemble(
    spec: HelixSpec,
    fs: FieldSpec,
    basis: BasisSpec,
    include_vmag: bool = True,
    check_convergence: bool = False,
) -> HamiltonianMatrix:
    """Dense H_mn by periodic trapezoid quadrature on ``basis.quad_points`` nodes.

    With ``check_convergence`` the matrix is recomputed on twice as many
    nodes and QuadratureConvergenceError is raised if any entry moves by
    more than 1e-9.
    """
    phi = periodic_grid(basis.quad_points)
    H = _quadrature(spec, basis, _node_terms(spec, fs, phi, include_vmag))
    if check_convergence:
        phi2 = periodic_grid(2 * basis.quad_points)
        H2 = _quadrature(spec, basis, _node_terms(spec, fs, phi2, include_vmag))
        delta = np.abs(H2 - H)
        if delta.max() > CONVERGENCE_TOL:
            m, n = np.unravel_index(delta.argmax(), delta.shape)
            raise QuadratureConvergenceError(
                f"H[{m},{n}] changed by {delta.max():.3e} when doubling quad_points "
                f"{basis.quad_points} -> {2 * basis.quad_points} for {spec}, {fs}, p={basis.p}"
            )
    return HamiltonianMatrix(H, include_vmag, spec, fs, basis)


def hermiticity_defect(H) -> float:
    """max |H_mn - conj(H_nm)|; accepts a HamiltonianMatrix or a plain array."""
    M = np.asarray(H.entries if isinstance(H, HamiltonianMatrix) else H)
    return float(np.max(np.abs(M - M.conj().T)))


def overlap_matrix(spec: HelixSpec, basis: BasisSpec) -> np.ndarray:
    """<chi_m|chi_n> with the arc-length measure, normalised by 2pi."""
    phi = periodic_grid(basis.quad_points)
    f = metric(spec, phi).f
    chi = np.exp(1j * np.outer(phi, basis.p + spec.omega * basis.indices)) / np.sqrt(f)[:, None]
    w = f[:, None, None]
    return (chi.conj()[:, :, None] * chi[:, None, :] * w).mean(axis=0)
