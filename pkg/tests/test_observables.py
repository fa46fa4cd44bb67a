import numpy as np
import pytest

import oracles
from helixmoments.eigen import EigenSolution, eigh
from helixmoments.field import FieldSpec
from helixmoments.geometry import HelixSpec, metric, periodic_grid
from helixmoments.hamiltonian import BasisSpec, assemble
from helixmoments.observables import (
    CurrentModel, classical_current, classical_moment, current_density,
    moment_from_current, moment_records, toroidal_moment,
)


def _single(basis, n, phase=1.0):
    C = np.zeros(basis.dim, dtype=complex)
    C[n + basis.n_max] = phase
    return EigenSolution(basis.p, np.zeros(basis.dim), C[:, None] * np.ones((1, basis.dim)), np.zeros(basis.dim))


def test_plane_wave_current(circular):
    basis = BasisSpec(1, 2)
    phi = np.linspace(0, 6, 25)
    j = current_density(circular, basis, _single(basis, 0, np.exp(0.4j)), 0, phi)
    assert np.allclose(j, 1 / (2 * np.pi * metric(circular, phi).f ** 2), rtol=1e-13)


def test_current_against_wavefunction_derivative(circular):
    basis = BasisSpec(1, 2)
    rng = np.random.default_rng(4)
    C = rng.normal(size=5) + 1j * rng.normal(size=5)
    C /= np.linalg.norm(C)
    sol = EigenSolution(1, np.zeros(5), np.tile(C[:, None], (1, 5)), np.zeros(5))
    fs = FieldSpec(1.0, 0.5, 0.3)
    for phi in (0.37, 2.0, 5.1):
        ref = oracles.probability_current(circular, C, 1, basis.indices, phi)
        assert current_density(circular, basis, sol, 0, np.array([phi]))[0] == pytest.approx(ref, abs=1e-13)
        ref = oracles.probability_current(circular, C, 1, basis.indices, phi, fs)
        got = current_density(circular, basis, sol, 0, np.array([phi]), CurrentModel.GAUGE_INVARIANT, fs)[0]
        assert got == pytest.approx(ref, abs=1e-13)


def test_real_coefficients_match_literal_double_sum(tall8):
    sol = eigh(assemble(tall8, FieldSpec(1.0, 0.0), BasisSpec(2)))
    C = sol.coefficients(1)
    assert np.abs(C.imag).max() < 1e-14
    C = C.real
    w, basis = tall8.omega, BasisSpec(2)
    phi = np.array([0.3, 1.9])
    m_ = metric(tall8, phi)
    ref = np.zeros_like(phi)
    for m, cm in zip(basis.indices, C):
        for n, cn in zip(basis.indices, C):
            k = basis.p + w * n
            ref += cm * cn * (k * np.cos(w * (n - m) * phi) / m_.f ** 2
                              - m_.f1 / (2 * m_.f ** 3) * np.sin(w * (n - m) * phi))
    assert np.allclose(current_density(tall8, basis, sol, 1, phi), ref / (2 * np.pi), atol=1e-14)


def test_uniform_current_reproduces_classical_moment(tall8):
    phi = periodic_grid()
    for p in (1, 3):
        I = classical_current(tall8, p)
        tm = moment_from_current(tall8, phi, np.full_like(phi, I))
        assert np.allclose(tm, classical_moment(tall8, p), atol=1e-14)


def test_classical_moment_frozen(circular):
    assert classical_moment(circular, 1)[2] == pytest.approx(-0.049014978683400046, rel=1e-12)
    assert np.allclose(classical_moment(circular, 2), 2 * classical_moment(circular, 1))
    assert np.array_equal(classical_moment(circular, 0), np.zeros(3))


def test_moment_linear_in_current(circular):
    phi = periodic_grid(256)
    j1, j2 = np.cos(phi), np.sin(3 * phi) + 0.5
    a = moment_from_current(circular, phi, 2 * j1 - j2)
    assert np.allclose(a, 2 * moment_from_current(circular, phi, j1) - moment_from_current(circular, phi, j2),
                       atol=1e-14)


def test_zero_field_p0_has_no_moment(circular):
    basis = BasisSpec(0)
    sol = eigh(assemble(circular, FieldSpec(), basis))
    for alpha in range(basis.dim):
        assert np.abs(toroidal_moment(circular, basis, sol, alpha)).max() < 1e-12


def test_reversing_bloch_index_flips_moment(circular):
    out = []
    for p in (1, -1):
        basis = BasisSpec(p)
        out.append(toroidal_moment(circular, basis, eigh(assemble(circular, FieldSpec(), basis)), 0))
    assert np.allclose(out[0], -out[1], atol=1e-14)


@pytest.mark.parametrize("spec", [HelixSpec(1, 0.5, 0.5, 4), HelixSpec(1, 0.5, 0.5, 8)])
def test_gauge_invariant_current_conserved_in_vertical_field(spec):
    basis = BasisSpec(1, 10)
    fs = FieldSpec(1.0, 0.0, 0.3)
    sol = eigh(assemble(spec, fs, basis))
    phi = periodic_grid()
    for alpha in (0, 1):
        j = current_density(spec, basis, sol, alpha, phi, CurrentModel.GAUGE_INVARIANT, fs)
        assert j.std() < 1e-9 * max(1.0, abs(j.mean()))
        # the paramagnetic part alone is not constant along the coil
        assert current_density(spec, basis, sol, alpha, phi).std() > 1e-4


def test_moment_records(circular):
    basis = BasisSpec(1)
    fs = FieldSpec(1.0)
    sol = eigh(assemble(circular, fs, basis))
    recs = moment_records(circular, fs, basis, sol, "gauge_invariant", timestamp=True)
    assert [r.alpha for r in recs] == list(range(5))
    assert recs[0].p == 1 and recs[0].model == "gauge_invariant"
    assert "timestamp" in recs[0].metadata
    assert np.allclose(recs[2].moment, toroidal_moment(circular, basis, sol, 2, "gauge_invariant", fs))


def test_in_plane_components_vanish(circular):
    basis = BasisSpec(0)
    fs = FieldSpec.from_polar(2.0, 0.8, 0.4)
    sol = eigh(assemble(circular, fs, basis))
    for alpha in range(5):
        assert np.abs(toroidal_moment(circular, basis, sol, alpha)[:2]).max() < 1e-12
