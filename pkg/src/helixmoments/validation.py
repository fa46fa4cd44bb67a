"""Independent numerical cross-checks of the geometry, field and solver.

Each check returns a :class:`CheckResult`; ``run_all`` is what the
``validate`` subcommand prints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .eigen import jacobi_eigh
from .field import (
    FieldSpec,
    closed_form_potential_components,
    field_vector,
    potential_components,
    unit_vector_projections,
    vector_potential_direct,
)
from .geometry import HelixSpec, arc_length, curve_derivatives, frenet, metric, position
from .hamiltonian import BasisSpec, assemble, hermiticity_defect, overlap_matrix

COMPONENTS = ("A_T_rho", "A_T_z", "A_N_rho", "A_N_z", "A_B_rho", "A_B_z")


@dataclass
class CheckResult:
    name: str
    value: float
    tol: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.value < self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{status}  {self.name}: {self.value:.3e} < {self.tol:.0e}{extra}"


def random_helices(rng, count):
    out = []
    for _ in range(count):
        a = rng.uniform(0.1, 0.9)
        b = rng.uniform(0.1, 0.9)
        out.append(HelixSpec(1.0, a, b, int(rng.choice([2, 3, 4, 6, 8]))))
    return out


def frenet_serret_residual(spec: HelixSpec, phi: float, h: float = 1e-5) -> float:
    """Largest mismatch of the three Frenet-Serret relations, by central differences."""
    fd = frenet(spec, phi)
    lo, hi = frenet(spec, phi - h), frenet(spec, phi + h)
    dT = (hi.T - lo.T) / (2 * h)
    dN = (hi.N - lo.N) / (2 * h)
    dB = (hi.B - lo.B) / (2 * h)
    fk, ft = fd.f * fd.kappa, fd.f * fd.tau
    return max(
        np.linalg.norm(dT - fk * fd.N),
        np.linalg.norm(dN + fk * fd.T - ft * fd.B),
        np.linalg.norm(dB + ft * fd.N),
    )


def curvature_formula_error(spec: HelixSpec, phi: float) -> float:
    """Relative gap between the closed-form kappa and |r' x r''| / |r'|^3."""
    r1, r2, _ = curve_derivatives(spec, phi)
    k_ref = np.linalg.norm(np.cross(r1, r2)) / np.linalg.norm(r1) ** 3
    return abs(frenet(spec, phi).kappa - k_ref) / k_ref


def check_frenet_serret(samples=100, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = max(
        frenet_serret_residual(s, rng.uniform(0, 2 * np.pi)) for s in random_helices(rng, samples)
    )
    return CheckResult("Frenet-Serret relations vs finite differences", worst, 1e-6)


def check_curvature(samples=100, seed=1) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = max(
        curvature_formula_error(s, rng.uniform(0, 2 * np.pi)) for s in random_helices(rng, samples)
    )
    return CheckResult("closed-form curvature vs |r' x r''|/|r'|^3", worst, 1e-9)


def check_closed_form_potential(samples=100, seed=2) -> list[CheckResult]:
    """Closed-form potential scalars against the projected B x r / 2.

    The second result measures the sin(phi_M) variant of the binormal
    in-plane term; it is informational and expected to disagree.
    """
    rng = np.random.default_rng(seed)
    worst = worst_literal = 0.0
    for spec in random_helices(rng, samples):
        phi = rng.uniform(0, 2 * np.pi, 8)
        phi_M = rng.uniform(0, 2 * np.pi)
        direct = potential_components(spec, phi, phi_M)
        closed = closed_form_potential_components(spec, phi, phi_M)
        literal = closed_form_potential_components(spec, phi, phi_M, binormal_sin_phi_M=True)
        for c in COMPONENTS:
            worst = max(worst, np.abs(getattr(direct, c) - getattr(closed, c)).max())
        worst_literal = max(worst_literal, np.abs(direct.A_B_rho - literal.A_B_rho).max())
    return [
        CheckResult("closed-form potential components vs projected B x r / 2", worst, 1e-12),
        CheckResult(
            "binormal in-plane term with sin(phi_M) in place of sin(omega phi)",
            worst_literal, np.inf,
            "informational: the variant is wrong",
        ),
    ]


def check_recombination(samples=100, seed=3) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for spec in random_helices(rng, samples):
        phi = rng.uniform(0, 2 * np.pi, 8)
        fs = FieldSpec(rng.normal(), rng.normal(), rng.uniform(0, 2 * np.pi))
        fd = frenet(spec, phi)
        pc = potential_components(spec, phi, fs.phi_M, frame=fd)
        A = pc.recombine(fs, fd.T, fd.N, fd.B)
        worst = max(worst, np.abs(A - vector_potential_direct(fs, position(spec, phi))).max())
    return CheckResult("Frenet recombination of A vs B x r / 2", worst, 1e-12)


def check_unit_vector_projections(samples=100, seed=4) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for spec in random_helices(rng, samples):
        phi = rng.uniform(0, 2 * np.pi)
        fd = frenet(spec, phi)
        u = unit_vector_projections(spec, phi)
        targets = {
            "i": np.array([1.0, 0, 0]), "j": np.array([0, 1.0, 0]), "k": np.array([0, 0, 1.0]),
            "phi": np.array([-np.sin(phi), np.cos(phi), 0.0]),
        }
        for key, vec in targets.items():
            rebuilt = u[key + "T"] * fd.T + u[key + "N"] * fd.N + u[key + "B"] * fd.B
            worst = max(worst, np.abs(rebuilt - vec).max())
            worst = max(worst, abs(u[key + "T"] ** 2 + u[key + "N"] ** 2 + u[key + "B"] ** 2 - 1))
    return CheckResult("closed-form unit-vector projections reproduce i, j, k, phi_hat", worst, 1e-12)


def gauge_errors(fs: FieldSpec, point, h: float = 1e-4):
    """(divergence, |curl A - B|) of B x r / 2 by central differences."""
    point = np.asarray(point, dtype=float)
    J = np.empty((3, 3))  # J[i, j] = dA_i / dx_j
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[:, j] = (vector_potential_direct(fs, point + e) - vector_potential_direct(fs, point - e)) / (2 * h)
    div = np.trace(J)
    curl = np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])
    return abs(div), np.abs(curl - field_vector(fs)).max()


def check_gauge(samples=100, seed=5) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        fs = FieldSpec(rng.normal(), rng.normal(), rng.uniform(0, 2 * np.pi))
        worst = max(worst, *gauge_errors(fs, rng.normal(size=3)))
    return CheckResult("Coulomb gauge and curl of B x r / 2", worst, 1e-6)


def check_overlap() -> CheckResult:
    worst = 0.0
    for spec in (HelixSpec(1, 0.5, 0.5, 4), HelixSpec(1, 0.25, 0.75, 8), HelixSpec(1, 0.75, 0.25, 4)):
        for p in (0, 1, 2):
            S = overlap_matrix(spec, BasisSpec(p, 4))
            worst = max(worst, np.abs(S - np.eye(S.shape[0])).max())
    return CheckResult("basis overlap is the identity", worst, 1e-12)


def quadrature_doubling(spec, fs, basis) -> float:
    H1 = assemble(spec, fs, basis).entries
    H2 = assemble(spec, fs, BasisSpec(basis.p, basis.n_max, 2 * basis.quad_points)).entries
    return float(np.abs(H1 - H2).max())


def check_quadrature() -> CheckResult:
    worst = 0.0
    for spec in (HelixSpec(1, 0.5, 0.5, 4), HelixSpec(1, 0.25, 0.75, 8), HelixSpec(1, 0.75, 0.25, 4)):
        for p in (0, 1, 2):
            worst = max(worst, quadrature_doubling(spec, FieldSpec(2.0, 1.0, 0.3), BasisSpec(p)))
    return CheckResult("H entries stable when doubling 2048 -> 4096 nodes", worst, 1e-10)


def check_arc_length() -> CheckResult:
    spec = HelixSpec(1, 0.5, 0.5, 4)
    ref, _ = quad(lambda x: float(metric(spec, x).f), 0, 2 * np.pi, limit=400, epsabs=0, epsrel=1e-13)
    return CheckResult("arc length vs adaptive quadrature (relative)", abs(arc_length(spec) - ref) / ref, 1e-10)


def characteristic_polynomial(A) -> np.ndarray:
    """Coefficients of det(x I - A), highest power first (Faddeev-LeVerrier)."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    coeffs = [1.0 + 0j]
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(A @ M) / k)
    return np.array(coeffs)


def polynomial_real_roots(coeffs, lo, hi, samples=20000) -> np.ndarray:
    """Real roots in [lo, hi] by sign-change bracketing and Brent refinement."""
    c = np.real(coeffs)
    xs = np.linspace(lo, hi, samples)
    ys = np.polyval(c, xs)
    roots = []
    for i in np.flatnonzero(np.sign(ys[:-1]) * np.sign(ys[1:]) <= 0):
        if ys[i] == 0:
            roots.append(xs[i])
            continue
        roots.append(brentq(lambda x: np.polyval(c, x), xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15))
    return np.unique(np.array(roots))


def random_hermitian(rng, n=5):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (X + X.conj().T)


def check_eigensolver(samples=20, seed=6) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        A = random_hermitian(rng)
        bound = np.max(np.sum(np.abs(A), axis=1)) + 1.0
        roots = polynomial_real_roots(characteristic_polynomial(A), -bound, bound)
        w, _ = jacobi_eigh(A)
        if len(roots) != len(w):
            return CheckResult("Jacobi eigenvalues vs characteristic-polynomial roots", np.inf, 1e-9,
                               f"root finder found {len(roots)} of {len(w)} roots")
        worst = max(worst, np.abs(np.sort(roots) - w).max())
    return CheckResult("Jacobi eigenvalues vs characteristic-polynomial roots", worst, 1e-9)


def check_hermiticity() -> list[CheckResult]:
    spec = HelixSpec(1, 0.5, 0.5, 4)
    with_vmag, without = 0.0, np.inf
    for p in (0, 1, 2):
        for phi_M in (0.0, 0.7):
            fs = FieldSpec(1.0, 1.0, phi_M)
            with_vmag = max(with_vmag, hermiticity_defect(assemble(spec, fs, BasisSpec(p))))
            without = min(without, hermiticity_defect(assemble(spec, fs, BasisSpec(p), include_vmag=False)))
    return [
        CheckResult("Hermiticity defect with magnetic curvature term", with_vmag, 1e-10),
        CheckResult("inverse Hermiticity defect without it", 1.0 / without, 1e6,
                    f"defect without term = {without:.3e}"),
    ]


def run_all() -> list[CheckResult]:
    results = [check_frenet_serret(), check_curvature(), check_arc_length()]
    results += check_closed_form_potential()
    results += [check_recombination(), check_unit_vector_projections(), check_gauge(), check_overlap(),
                check_quadrature(), check_eigensolver()]
    results += check_hermiticity()
    return results
