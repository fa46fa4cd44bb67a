"""Constant magnetic field and its symmetric-gauge vector potential on the helix.

Internally the field is stored as the two dimensionless fluxes

    tau0 = B_z e R^2 / hbar      (vertical flux through the R-circle, in units of pi*hbar/e)
    tau1 = B_rho e R^2 / hbar    (same for the in-plane component)

so a field vector built from a FieldSpec is in units of hbar / (e R^2), and a
vector potential A = B x r / 2 evaluated at r in units of R is in units of
hbar / (e R).  The six Frenet-basis scalars of :class:`PotentialComponents`
have the field magnitude factored out: the tangential potential seen by the
particle is ``tau1 * A_T_rho + tau0 * A_T_z``, and likewise for N and B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

from .geometry import HelixSpec, curvature_components, frenet, metric, position


@dataclass(frozen=True)
class FieldSpec:
    tau0: float = 0.0
    tau1: float = 0.0
    phi_M: float = 0.0

    @classmethod
    def from_polar(cls, tau_max: float, theta: float, phi_M: float = 0.0) -> "FieldSpec":
        """Field of fixed magnitude tilted by ``theta`` away from the z axis."""
        return cls(tau0=tau_max * np.cos(theta), tau1=tau_max * np.sin(theta), phi_M=phi_M)

    @classmethod
    def from_tesla(cls, B_rho: float, B_z: float, R_meters: float, phi_M: float = 0.0) -> "FieldSpec":
        return cls(
            tau0=tesla_to_tau(B_z, R_meters), tau1=tesla_to_tau(B_rho, R_meters), phi_M=phi_M
        )

    @property
    def tau_max(self) -> float:
        return float(np.hypot(self.tau0, self.tau1))

    @property
    def theta(self) -> float:
        """Polar angle of the field, in [0, 2pi), with B_rho allowed to be negative."""
        return float(np.arctan2(self.tau1, self.tau0) % (2 * np.pi))

    @property
    def is_zero(self) -> bool:
        return self.tau0 == 0 and self.tau1 == 0


def tesla_to_tau(B: float, R_meters: float) -> float:
    """Flux of a field B (Tesla) through a circle of radius R in units of pi*hbar/e."""
    return B * constants.e * R_meters ** 2 / constants.hbar


def tau_to_tesla(tau: float, R_meters: float) -> float:
    return tau * constants.hbar / (constants.e * R_meters ** 2)


def field_vector(fs: FieldSpec) -> np.ndarray:
    return np.array([fs.tau1 * np.cos(fs.phi_M), fs.tau1 * np.sin(fs.phi_M), fs.tau0])


def vector_potential_direct(fs: FieldSpec, point) -> np.ndarray:
    """Symmetric-gauge potential B x r / 2 at ``point`` (shape (..., 3))."""
    point = np.asarray(point, dtype=float)
    return 0.5 * np.cross(np.broadcast_to(field_vector(fs), point.shape), point)


@dataclass(frozen=True)
class PotentialComponents:
    A_T_rho: np.ndarray
    A_T_z: np.ndarray
    A_N_rho: np.ndarray
    A_N_z: np.ndarray
    A_B_rho: np.ndarray
    A_B_z: np.ndarray

    def tangential(self, fs: FieldSpec):
        return fs.tau1 * self.A_T_rho + fs.tau0 * self.A_T_z

    def normal(self, fs: FieldSpec):
        return fs.tau1 * self.A_N_rho + fs.tau0 * self.A_N_z

    def binormal(self, fs: FieldSpec):
        return fs.tau1 * self.A_B_rho + fs.tau0 * self.A_B_z

    def squared(self, fs: FieldSpec):
        """|A|^2 expanded in the rho/z split, term for term."""
        t0, t1 = fs.tau0, fs.tau1
        rho2 = self.A_T_rho ** 2 + self.A_N_rho ** 2 + self.A_B_rho ** 2
        z2 = self.A_T_z ** 2 + self.A_N_z ** 2 + self.A_B_z ** 2
        cross = self.A_T_rho * self.A_T_z + self.A_N_rho * self.A_N_z + self.A_B_rho * self.A_B_z
        return t1 * t1 * rho2 + t0 * t0 * z2 + 2 * t1 * t0 * cross

    def recombine(self, fs: FieldSpec, T, N, B) -> np.ndarray:
        """Cartesian vector potential from the Frenet components."""
        return (
            self.tangential(fs)[..., None] * T
            + self.normal(fs)[..., None] * N
            + self.binormal(fs)[..., None] * B
        )


def potential_components(spec: HelixSpec, phi, phi_M: float, frame=None) -> PotentialComponents:
    """Frenet components of B x r / 2 for unit in-plane and unit vertical fields.

    ``frame`` may carry a precomputed FrenetData for the same angles.
    """
    phi = np.asarray(phi, dtype=float)
    fd = frame if frame is not None else frenet(spec, phi)
    r = position(spec, phi)
    rho_M = np.array([np.cos(phi_M), np.sin(phi_M), 0.0])
    k_hat = np.array([0.0, 0.0, 1.0])
    A_rho = 0.5 * np.cross(np.broadcast_to(rho_M, r.shape), r)
    A_z = 0.5 * np.cross(np.broadcast_to(k_hat, r.shape), r)

    def dot(u, v):
        return np.sum(u * v, axis=-1)

    return PotentialComponents(
        dot(A_rho, fd.T), dot(A_z, fd.T),
        dot(A_rho, fd.N), dot(A_z, fd.N),
        dot(A_rho, fd.B), dot(A_z, fd.B),
    )


# --- closed-form expressions --------------------------------------------

def unit_vector_projections(spec: HelixSpec, phi) -> dict:
    """Frenet components of i, j, k and the cylindrical phi_hat, in closed form.

    Keys are ``"iT", "iN", "iB", "jT", ..., "phiB"``.
    """
    phi = np.asarray(phi, dtype=float)
    w, a, b = spec.omega, spec.a, spec.b
    m = metric(spec, phi)
    W, P, f = m.W, m.P, m.f
    P1, P2 = curvature_components(spec, phi, m)
    k = np.hypot(P1, P2)
    c, s = np.cos(w * phi), np.sin(w * phi)
    cp, sp = np.cos(phi), np.sin(phi)
    return {
        "iT": -(a * w * s * cp + W * sp) / f,
        "iN": P1 * b * c * cp / (k * P) - P2 * a * W * s * cp / (k * P * f) + P2 * P * w * sp / (k * f),
        "iB": P2 * b * c * cp / (k * P) + P1 * a * W * s * cp / (k * P * f) - P1 * P * w * sp / (k * f),
        "jT": (-a * w * s * sp + W * cp) / f,
        "jN": P1 * b * c * sp / (k * P) - P2 * a * W * s * sp / (k * P * f) - P2 * P * w * cp / (k * f),
        "jB": P2 * b * c * sp / (k * P) + P1 * a * W * s * sp / (k * P * f) + P1 * P * w * cp / (k * f),
        "kT": b * w * c / f,
        "kN": (P1 * a * s + P2 * b * W * c / f) / (k * P),
        "kB": (P2 * a * s - P1 * b * W * c / f) / (k * P),
        "phiT": W / f,
        "phiN": -w * P2 * P / (k * f),
        "phiB": w * P1 * P / (k * f),
    }


def closed_form_potential_components(
    spec: HelixSpec, phi, phi_M: float, binormal_sin_phi_M: bool = False
) -> PotentialComponents:
    """The six potential scalars built from the unit-vector projections.

    ``binormal_sin_phi_M=True`` puts ``sin(phi_M)`` in place of
    ``sin(omega phi)`` in the last term of the binormal in-plane scalar.
    That variant does not match :func:`potential_components` and is kept
    only so the gap can be measured.
    """
    phi = np.asarray(phi, dtype=float)
    u = unit_vector_projections(spec, phi)
    W = spec.R + spec.a * np.cos(spec.omega * phi)
    bs = spec.b * np.sin(spec.omega * phi)
    cM, sM = np.cos(phi_M), np.sin(phi_M)
    tilt = cM * np.sin(phi) - sM * np.cos(phi)

    def rho_part(axis, last=bs):
        return (
            0.5 * W * u["k" + axis] * tilt
            + 0.5 * bs * sM * u["i" + axis]
            - 0.5 * last * cM * u["j" + axis]
        )

    last_B = spec.b * sM if binormal_sin_phi_M else bs
    return PotentialComponents(
        rho_part("T"), 0.5 * W * u["phiT"],
        rho_part("N"), 0.5 * W * u["phiN"],
        rho_part("B", last_B), 0.5 * W * u["phiB"],
    )
