"""Acceptance criteria, one test and one summary line per criterion.

The lines are printed in the "acceptance criteria" section at the end of the
pytest run.  Tolerances are fixed here and not tuned to the results.
"""

import numpy as np
import pytest

from conftest import ACCEPTANCE
from helixmoments import sweep as sw
from helixmoments.eigen import eigh
from helixmoments.field import FieldSpec
from helixmoments.geometry import HelixSpec
from helixmoments.hamiltonian import BasisSpec, assemble, hermiticity_defect
from helixmoments.observables import classical_moment, toroidal_moment
from helixmoments.validation import (
    check_closed_form_potential, check_eigensolver, check_frenet_serret, check_overlap, check_quadrature,
)

CIRCULAR = (0.5, 0.5)

HERMITIAN_TOL = 1e-10
NON_HERMITIAN_FLOOR = 1e-6
CLASSICAL_MATCH_RTOL = 1e-2
REGRESSION_RTOL = 1e-6
THETA_ZERO_TOL = 1e-3
QUADRATURE_TOL = 1e-10
AZIMUTH_TOL = 1e-8
TAU1_NULL_TOL = 1e-6

# relative gap |TM_z - classical| / |classical| at n_max = 2, zero field,
# ground state, circular cross-section
FROZEN_DEVIATION = {
    (4, 1): 0.005053494738332052,
    (4, 2): 0.9970598779463768,
    (8, 1): 0.00042256573464453137,
    (8, 2): 0.0006585703722124412,
}


def record(number, passed, text):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {text}"
    ACCEPTANCE[number] = [line]
    print(line)
    return passed


@pytest.fixture(scope="module")
def theta_sweeps(tmp_path_factory):
    out = {}
    for name, omega in (("fig1a", 4), ("fig1b", 8)):
        plan = sw.preset(name)
        rows = sw.run_sweep(plan)
        path = sw.emit(rows, tmp_path_factory.mktemp(name) / f"{name}.csv")
        out[omega] = (plan, rows, path)
    return out


def test_criterion_1_hermiticity_restored():
    spec = HelixSpec(1.0, *CIRCULAR, 4)
    worst_with, least_without = 0.0, np.inf
    for p in (0, 1, 2):
        for phi_M in (0.0, 0.7):
            fs = FieldSpec(1.0, 1.0, phi_M)
            worst_with = max(worst_with, hermiticity_defect(assemble(spec, fs, BasisSpec(p))))
            least_without = min(least_without,
                                hermiticity_defect(assemble(spec, fs, BasisSpec(p), include_vmag=False)))
    ok = worst_with < HERMITIAN_TOL and least_without >= NON_HERMITIAN_FLOOR
    record(1, ok, f"defect with curvature term {worst_with:.2e} (< {HERMITIAN_TOL:.0e}), "
                  f"without {least_without:.4e} (>= {NON_HERMITIAN_FLOOR:.0e})")
    assert ok


def test_criterion_2_classical_limit():
    failures, details = [], []
    for omega in (4, 8):
        spec = HelixSpec(1.0, *CIRCULAR, omega)
        for p in (1, 2):
            classical = classical_moment(spec, p)[2]
            devs = []
            for n_max in range(2, 7):
                basis = BasisSpec(p, n_max)
                tm = toroidal_moment(spec, basis, eigh(assemble(spec, FieldSpec(), basis)), 0)[2]
                devs.append(abs(tm - classical) / abs(classical))
            tag = f"w={omega} p={p}"
            details.append(f"{tag} dev(n_max=2..6)=" + ",".join(f"{d:.3g}" for d in devs))
            if devs[0] >= CLASSICAL_MATCH_RTOL:
                failures.append(f"{tag} n_max=2 deviation {devs[0]:.3g} >= {CLASSICAL_MATCH_RTOL:g}")
            rises = [n for n in range(3, 7) if devs[n - 2] > devs[n - 3] + 1e-12]
            if rises:
                failures.append(f"{tag} deviation grows at n_max={rises}")
            if abs(devs[0] - FROZEN_DEVIATION[omega, p]) > REGRESSION_RTOL * FROZEN_DEVIATION[omega, p]:
                failures.append(f"{tag} n_max=2 deviation moved from frozen value")
    record(2, not failures, "; ".join(failures or ["classical moment matched, monotone, regression held"])
           + " | " + "; ".join(details))
    assert not failures, "\n".join(failures)


def test_criterion_3_theta_sweep_zeros(theta_sweeps):
    worst, parts = 0.0, []
    for omega, (plan, rows, _) in theta_sweeps.items():
        assert not any(r.error for r in rows)
        for target in (np.pi / 2, 3 * np.pi / 2):
            value = min(plan.grid, key=lambda g: abs(g - target))
            assert abs(value - target) < 1e-12
            at = [r for r in rows if r.sweep_param == value]
            assert sorted(r.alpha for r in at) == [0, 1, 2, 3, 4]
            worst = max(worst, max(abs(r.TM_z) for r in at))
        parts.append(f"w={omega}")
    ok = worst < THETA_ZERO_TOL
    record(3, ok, f"max |TM_z| at theta = pi/2, 3pi/2 over all alpha ({', '.join(parts)}): "
                  f"{worst:.2e} (< {THETA_ZERO_TOL:.0e})")
    assert ok


def test_criterion_4_more_turns_larger_moment(theta_sweeps):
    peak = {omega: max(abs(r.TM_z) for r in rows) for omega, (_, rows, _) in theta_sweeps.items()}
    ratio = peak[8] / peak[4]
    ok = peak[8] > peak[4] and abs(ratio - 2) > QUADRATURE_TOL
    record(4, ok, f"max |TM_z| w=4 {peak[4]:.6f}, w=8 {peak[8]:.6f}, ratio {ratio:.4f} (not 2)")
    assert ok


def test_criterion_5_azimuthal_invariance():
    worst = 0.0
    for conf in ("circular", "tall"):
        spec = HelixSpec(1.0, *sw.CONFIGURATIONS[conf], 4)
        for theta in (0.3, np.pi / 4, 2.0, 4.0):
            for p in (0, 1, 2):
                basis = BasisSpec(p)
                ref = None
                for phi_M in (0.0, np.pi / 3, 1.1):
                    sol = eigh(assemble(spec, FieldSpec.from_polar(sw.DEFAULT_TAU_MAX, theta, phi_M), basis))
                    tms = np.array([toroidal_moment(spec, basis, sol, a) for a in range(basis.dim)])
                    if ref is None:
                        ref = tms
                    worst = max(worst, np.abs(tms - ref).max())
    ok = worst < AZIMUTH_TOL
    record(5, ok, f"max TM change across phi_M in {{0, pi/3, 1.1}}: {worst:.2e} (< {AZIMUTH_TOL:.0e})")
    assert ok


def test_criterion_6_in_plane_flux_null_at_p0():
    plan = sw.preset("tau1-circular-w4", p_list=(0,))
    rows = sw.run_sweep(plan)
    assert not any(r.error for r in rows) and plan.tau0 == 0.0
    worst = max(np.abs(r.moment).max() for r in rows)
    ok = worst < TAU1_NULL_TOL
    record(6, ok, f"max |TM| over tau1 in [0, {plan.grid[-1]:g}] ({len(plan.grid)} points): "
                  f"{worst:.2e} (< {TAU1_NULL_TOL:.0e})")
    assert ok


def test_criterion_7_oracle_suites():
    closed, literal = check_closed_form_potential()
    checks = [check_frenet_serret(), closed, check_overlap(), check_eigensolver(), check_quadrature()]
    ok = all(c.passed for c in checks)
    text = "; ".join(f"{c.name} {c.value:.1e}<{c.tol:.0e}" for c in checks)
    record(7, ok, text + f"; sin(phi_M) binormal variant off by {literal.value:.2f}, corrected form used")
    assert ok


def test_criterion_8_determinism(theta_sweeps, tmp_path):
    plan, _, first = theta_sweeps[4]
    again = sw.emit(sw.run_sweep(plan, workers=1), tmp_path / "again.csv")
    parallel = sw.emit(sw.run_sweep(plan, workers=4), tmp_path / "parallel.csv")
    ok = first.read_bytes() == again.read_bytes() == parallel.read_bytes()
    record(8, ok, f"fig1a ({len(plan.grid)} points) serial twice and 4 workers: "
                  + ("bit-identical" if ok else "outputs differ"))
    assert ok
