"""Cyclic Jacobi diagonalisation of small dense Hermitian matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import HamiltonianMatrix, hermiticity_defect

HERMITIAN_TOL = 1e-8
# components within this relative margin of the largest count as tied
PHASE_TIE_RTOL = 1e-9


class EigenConvergenceError(RuntimeError):
    pass


class NonHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class EigenSolution:
    p: int
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column alpha holds C_n for n = -n_max..n_max
    residuals: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def coefficients(self, alpha: int) -> np.ndarray:
        if not 0 <= alpha < self.dim:
            raise IndexError(f"alpha={alpha} out of range for dimension {self.dim}")
        return self.eigenvectors[:, alpha]


def _rotation(app, aqq, apq):
    """2x2 unitary that zeroes the off-diagonal of [[app, apq], [conj(apq), aqq]]."""
    r = abs(apq)
    phase = apq / r
    theta = 0.5 * np.arctan2(2 * r, aqq - app)
    c, s = np.cos(theta), np.sin(theta)
    # diag(1, conj(phase)) makes the pivot real, then a real Givens rotation
    return np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])


def jacobi_eigh(A, tol: float = 1e-15, max_sweeps: int = 60):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)
    if n == 1 or scale == 0:
        return np.real(np.diag(A)).copy(), V
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(A - np.diag(np.diag(A))) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                u = _rotation(A[p, p].real, A[q, q].real, apq)
                idx = [p, q]
                A[:, idx] = A[:, idx] @ u
                A[idx, :] = u.conj().T @ A[idx, :]
                V[:, idx] = V[:, idx] @ u
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    else:
        raise EigenConvergenceError(
            f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})"
        )
    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def fix_phases(V: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest component is real and positive.

    Ties (within PHASE_TIE_RTOL) go to the lowest index.
    """
    V = V.copy()
    for j in range(V.shape[1]):
        mag = np.abs(V[:, j])
        i = int(np.flatnonzero(mag >= mag.max() * (1 - PHASE_TIE_RTOL))[0])
        V[:, j] *= np.conj(V[i, j]) / mag[i]
        V[i, j] = mag[i]
    return V


def eigh(H, tol: float = 1e-15, allow_non_hermitian: bool = False) -> EigenSolution:
    """Diagonalise a Hamiltonian matrix (or a plain Hermitian array).

    For a HamiltonianMatrix the energy matrix is used, so the eigenvalues
    are the dimensionless energies eps in ascending order.  Non-Hermitian
    input is rejected unless ``allow_non_hermitian``, in which case only
    the Hermitian part is diagonalised.
    """
    if isinstance(H, HamiltonianMatrix):
        M, p = H.energy_matrix, H.basis.p
    else:
        M, p = np.asarray(H, dtype=complex), 0
    defect = hermiticity_defect(M)
    if defect >= HERMITIAN_TOL:
        if not allow_non_hermitian:
            raise NonHermitianError(f"matrix is not Hermitian (defect {defect:.3e})")
    M = 0.5 * (M + M.conj().T)
    w, V = jacobi_eigh(M, tol=tol)
    V = fix_phases(V)
    residuals = np.linalg.norm(M @ V - V * w, axis=0)
    return EigenSolution(p, w, V, residuals)
