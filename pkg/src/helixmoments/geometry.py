"""Closed-form geometry of the elliptic toroidal helix.

The curve winds ``omega`` times around a torus of major radius ``R`` whose
minor cross-section is an ellipse with horizontal semi-axis ``a`` and
vertical semi-axis ``b``::

    r(phi) = W(phi) rho_hat + b sin(omega phi) k_hat,   W = R + a cos(omega phi)

Every function accepts a scalar or an array of angles and broadcasts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DEFAULT_QUAD_POINTS = 2048

# kappa below this is treated as a frame singularity
KAPPA_FLOOR = 1e-12


class FrameSingularityError(ValueError):
    """Raised when the curvature vanishes and the normal cannot be defined."""


@dataclass(frozen=True)
class HelixSpec:
    R: float = 1.0
    a: float = 0.5
    b: float = 0.5
    omega: int = 4

    def __post_init__(self):
        if not (self.R > 0 and self.a > 0 and self.b > 0):
            raise ValueError(f"R, a, b must be positive, got {self}")
        if not self.a < self.R:
            raise ValueError(f"need a < R so that W > 0, got a={self.a}, R={self.R}")
        if int(self.omega) != self.omega or self.omega < 1:
            raise ValueError(f"omega must be a positive integer, got {self.omega}")
        object.__setattr__(self, "omega", int(self.omega))


class Metric(NamedTuple):
    W: np.ndarray
    P: np.ndarray
    f: np.ndarray
    f1: np.ndarray
    f2: np.ndarray


@dataclass(frozen=True)
class FrenetData:
    """Per-angle geometric bundle; array fields share the shape of ``phi``."""

    phi: np.ndarray
    W: np.ndarray
    P: np.ndarray
    f: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    T: np.ndarray  # shape phi.shape + (3,)
    N: np.ndarray
    B: np.ndarray


def periodic_grid(n: int = DEFAULT_QUAD_POINTS) -> np.ndarray:
    """Uniform nodes on [0, 2pi), endpoint excluded."""
    return 2.0 * np.pi * np.arange(n) / n


def periodic_integral(values, axis=0):
    """Trapezoid rule for a 2pi-periodic integrand sampled on ``periodic_grid``."""
    values = np.asarray(values)
    return 2.0 * np.pi * values.mean(axis=axis)


def _W_derivs(spec, phi):
    w, a = spec.omega, spec.a
    c, s = np.cos(w * phi), np.sin(w * phi)
    W = spec.R + a * c
    return W, -a * w * s, -a * w * w * c, a * w ** 3 * s


def position(spec: HelixSpec, phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    W = spec.R + spec.a * np.cos(spec.omega * phi)
    return np.stack([W * np.cos(phi), W * np.sin(phi), spec.b * np.sin(spec.omega * phi)], axis=-1)


def curve_derivatives(spec: HelixSpec, phi):
    """Analytic r', r'', r''' with respect to phi."""
    phi = np.asarray(phi, dtype=float)
    w, b = spec.omega, spec.b
    W, W1, W2, W3 = _W_derivs(spec, phi)
    c, s = np.cos(phi), np.sin(phi)
    cw, sw = np.cos(w * phi), np.sin(w * phi)
    r1 = np.stack([W1 * c - W * s, W1 * s + W * c, b * w * cw], axis=-1)
    r2 = np.stack(
        [W2 * c - 2 * W1 * s - W * c, W2 * s + 2 * W1 * c - W * s, -b * w * w * sw], axis=-1
    )
    r3 = np.stack(
        [
            W3 * c - 3 * W2 * s - 3 * W1 * c + W * s,
            W3 * s + 3 * W2 * c - 3 * W1 * s - W * c,
            -b * w ** 3 * cw,
        ],
        axis=-1,
    )
    return r1, r2, r3


def metric(spec: HelixSpec, phi) -> Metric:
    """W, P, f = |dr/dphi| and the first two phi-derivatives of f.

    The derivatives come from the chain rule applied to
    f^2 = omega^2 P^2 + W^2.
    """
    phi = np.asarray(phi, dtype=float)
    w, a, b = spec.omega, spec.a, spec.b
    W, W1, W2, _ = _W_derivs(spec, phi)
    c, s = np.cos(w * phi), np.sin(w * phi)
    P2sq = a * a * s * s + b * b * c * c
    P = np.sqrt(P2sq)
    g = w * w * P2sq + W * W
    f = np.sqrt(g)
    dP2sq = w * (a * a - b * b) * np.sin(2 * w * phi)
    ddP2sq = 2 * w * w * (a * a - b * b) * np.cos(2 * w * phi)
    g1 = w * w * dP2sq + 2 * W * W1
    g2 = w * w * ddP2sq + 2 * W1 * W1 + 2 * W * W2
    f1 = g1 / (2 * f)
    f2 = (g2 - 2 * f1 * f1) / (2 * f)
    return Metric(W, P, f, f1, f2)


def curvature_components(spec: HelixSpec, phi, m: Metric | None = None):
    """The two normal-plane curvature components (P1, P2); kappa = hypot(P1, P2)."""
    phi = np.asarray(phi, dtype=float)
    if m is None:
        m = metric(spec, phi)
    w, a, b = spec.omega, spec.a, spec.b
    c, s = np.cos(w * phi), np.sin(w * phi)
    W, P, f = m.W, m.P, m.f
    P1 = -b / (f * f * P) * (a * w * w + W * c)
    P2 = s / (f * P) * (a + (w * w * W * (a * a - b * b) * c + P * P * a * w * w) / (f * f))
    return P1, P2


def frenet(spec: HelixSpec, phi) -> FrenetData:
    """Frenet frame, curvature and torsion.

    Raises FrameSingularityError where the curvature vanishes.
    """
    phi = np.asarray(phi, dtype=float)
    m = metric(spec, phi)
    P1, P2 = curvature_components(spec, phi, m)
    kappa = np.hypot(P1, P2)
    if np.any(kappa < KAPPA_FLOOR):
        bad = np.atleast_1d(phi)[np.atleast_1d(kappa < KAPPA_FLOOR)]
        raise FrameSingularityError(f"curvature vanishes at phi={bad[:5]} for {spec}")

    r1, r2, r3 = curve_derivatives(spec, phi)
    cross = np.cross(r1, r2)
    cross_sq = np.sum(cross * cross, axis=-1)
    T = r1 / m.f[..., None]
    B = cross / np.sqrt(cross_sq)[..., None]
    N = np.cross(B, T)
    tau = np.sum(cross * r3, axis=-1) / cross_sq
    return FrenetData(phi, m.W, m.P, m.f, m.f1, m.f2, P1, P2, kappa, tau, T, N, B)


def arc_length(spec: HelixSpec, quad_points: int = DEFAULT_QUAD_POINTS) -> float:
    """Total length of one full circuit of the helix."""
    phi = periodic_grid(quad_points)
    return float(periodic_integral(metric(spec, phi).f))
