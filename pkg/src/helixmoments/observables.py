"""Current along the helix and toroidal moments.

Currents are in units of e*hbar/(m_e R^2), moments in units of e*hbar*R/m_e.
A state is ``chi = exp(i p phi) / sqrt(f) * sum_n C_n exp(i n omega phi)``
with ``sum |C_n|^2 = 1``, so that ``chi / sqrt(2pi)`` is normalised on the
arc-length measure.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import __version__
from .eigen import EigenSolution
from .field import FieldSpec, potential_components
from .geometry import (
    DEFAULT_QUAD_POINTS,
    HelixSpec,
    arc_length,
    frenet,
    metric,
    periodic_grid,
    periodic_integral,
    position,
)
from .hamiltonian import BasisSpec


class CurrentModel(str, Enum):
    # double-sum current of the coefficients only
    PARAMAGNETIC = "paramagnetic"
    # adds the diamagnetic A_T |chi|^2 term
    GAUGE_INVARIANT = "gauge_invariant"


def current_density(
    spec: HelixSpec,
    basis: BasisSpec,
    sol: EigenSolution,
    alpha: int,
    phi,
    model: CurrentModel | str = CurrentModel.PARAMAGNETIC,
    fs: FieldSpec | None = None,
):
    """Tangential current j(phi) of state ``alpha``; its direction is T_hat.

    The coefficient product is taken in Hermitian form, conj(C_m) C_n, which
    keeps j real and reduces to the plain C_m C_n product for real
    coefficients.
    """
    model = CurrentModel(model)
    phi = np.asarray(phi, dtype=float)
    C = sol.coefficients(alpha)
    n = basis.indices
    k = basis.p + spec.omega * n
    m_ = metric(spec, phi)
    f, f1 = m_.f, m_.f1

    cmn = np.conj(C)[:, None] * C[None, :]  # [m, n]
    dn = n[None, :] - n[:, None]  # n - m
    phase = np.exp(1j * spec.omega * dn * phi[..., None, None])
    prod = cmn * phase
    cos_part = np.sum(k[None, :] * prod.real, axis=(-2, -1))
    sin_part = np.sum(prod.imag, axis=(-2, -1))
    j = (cos_part / f ** 2 - f1 / (2 * f ** 3) * sin_part) / (2 * np.pi)

    if model is CurrentModel.GAUGE_INVARIANT and fs is not None and not fs.is_zero:
        amp = np.sum(C * np.exp(1j * spec.omega * n * phi[..., None]), axis=-1)
        A_T = potential_components(spec, phi, fs.phi_M).tangential(fs)
        j = j + A_T * np.abs(amp) ** 2 / f / (2 * np.pi)
    return j


def moment_from_current(spec: HelixSpec, phi, j) -> np.ndarray:
    """(1/10) int [(j.r) r - 2 r^2 j] f dphi for a tangential current j(phi) T_hat.

    ``phi`` must be a ``periodic_grid``.
    """
    fd = frenet(spec, phi)
    r = position(spec, phi)
    jvec = np.asarray(j)[:, None] * fd.T
    jr = np.sum(jvec * r, axis=-1)
    r2 = np.sum(r * r, axis=-1)
    integrand = (jr[:, None] * r - 2 * r2[:, None] * jvec) * fd.f[:, None]
    return periodic_integral(integrand, axis=0) / 10.0


def toroidal_moment(
    spec: HelixSpec,
    basis: BasisSpec,
    sol: EigenSolution,
    alpha: int,
    model: CurrentModel | str = CurrentModel.PARAMAGNETIC,
    fs: FieldSpec | None = None,
) -> np.ndarray:
    phi = periodic_grid(basis.quad_points)
    j = current_density(spec, basis, sol, alpha, phi, model, fs)
    return moment_from_current(spec, phi, j)


def classical_current(spec: HelixSpec, p: int, quad_points: int = DEFAULT_QUAD_POINTS) -> float:
    L = arc_length(spec, quad_points)
    return 2 * np.pi * p / L ** 2


def classical_moment(spec: HelixSpec, p: int, quad_points: int = DEFAULT_QUAD_POINTS) -> np.ndarray:
    """Toroidal moment of a uniform current 2 pi p / L^2 around the coil."""
    current = classical_current(spec, p, quad_points)
    tz = -np.pi * spec.omega * current * spec.a * spec.b * spec.R / 2
    return np.array([0.0, 0.0, tz])


@dataclass
class MomentRecord:
    helix: HelixSpec
    field: FieldSpec
    basis: BasisSpec
    alpha: int
    moment: np.ndarray
    eigenvalue: float
    model: str = CurrentModel.PARAMAGNETIC.value
    metadata: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.basis.p


def moment_records(
    spec: HelixSpec,
    fs: FieldSpec,
    basis: BasisSpec,
    sol: EigenSolution,
    model: CurrentModel | str = CurrentModel.PARAMAGNETIC,
    timestamp: bool = False,
) -> list[MomentRecord]:
    """One record per substate alpha of a solved Bloch block."""
    model = CurrentModel(model)
    meta = {"quad_points": basis.quad_points, "version": __version__}
    if timestamp:
        meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return [
        MomentRecord(
            spec, fs, basis, alpha,
            toroidal_moment(spec, basis, sol, alpha, model, fs),
            float(sol.eigenvalues[alpha]), model.value, dict(meta),
        )
        for alpha in range(sol.dim)
    ]
