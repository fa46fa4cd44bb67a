import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

import oracles
from helixmoments.eigen import eigh
from helixmoments.field import FieldSpec
from helixmoments.geometry import HelixSpec, periodic_grid
from helixmoments.hamiltonian import (
    BasisSpec, QuadratureConvergenceError, assemble, hermiticity_defect,
    matrix_element_integrand, overlap_matrix,
)
from helixmoments.validation import quadrature_doubling

# regression value: defect of the circular 4-turn block at tau0 = tau1 = 1
# when the magnetic curvature term is dropped
DEFECT_WITHOUT_VMAG = 0.3475195825643438


@pytest.mark.parametrize("m,n,phi,vmag", [(0, 1, 0.9, True), (1, 0, 0.9, True),
                                          (0, 0, 2.3, True), (-1, 2, 0.4, False)])
def test_integrand_against_operator_oracle(circular, m, n, phi, vmag):
    fs = FieldSpec(2.0, 1.0, 0.0)
    ref = oracles.integrand(circular, fs, 1, m, n, phi, vmag)
    got = complex(matrix_element_integrand(circular, fs, BasisSpec(1), m, n, phi, vmag))
    assert abs(got - ref) < 1e-12 * max(1.0, abs(ref))


def test_integrand_frozen(circular):
    got = complex(matrix_element_integrand(circular, FieldSpec(2.0, 1.0, 0.0), BasisSpec(1), 0, 1, 0.9))
    assert got == pytest.approx(5.191370312096768 + 2.2261317732061827j, abs=1e-12)


def test_integrand_oracle_tall_in_plane(tall8):
    fs = FieldSpec(0.5, 1.5, 2.2)
    ref = oracles.integrand(tall8, fs, 2, 1, -1, 1.7)
    got = complex(matrix_element_integrand(tall8, fs, BasisSpec(2), 1, -1, 1.7))
    assert abs(got - ref) < 1e-11 * max(1.0, abs(ref))


def test_assembly_matches_integrand_mean(tall8):
    fs = FieldSpec(1.0, 0.7, 0.4)
    basis = BasisSpec(1, 2, 512)
    H = assemble(tall8, fs, basis).entries
    phi = periodic_grid(512)
    for i, m in enumerate(basis.indices):
        for j, n in enumerate(basis.indices):
            ref = matrix_element_integrand(tall8, fs, basis, m, n, phi).mean()
            assert abs(H[i, j] - ref) < 1e-12


def test_zero_field_diagonal_is_real(circular):
    H = assemble(circular, FieldSpec(), BasisSpec(1)).entries
    assert np.abs(np.diag(H).imag).max() < 1e-13


def test_off_diagonal_phase_factor(circular):
    phi = np.linspace(0, 2 * np.pi, 7)
    fs, basis = FieldSpec(1.0, 0.5, 0.2), BasisSpec(1)
    diag = matrix_element_integrand(circular, fs, basis, 2, 2, phi)
    off = matrix_element_integrand(circular, fs, basis, -1, 2, phi)
    assert np.allclose(off, np.exp(12j * phi) * diag, atol=1e-13)


@pytest.mark.parametrize("p", [0, 1, 2])
@pytest.mark.parametrize("phi_M", [0.0, 0.7])
def test_hermitian_with_magnetic_curvature_term(circular, p, phi_M):
    fs = FieldSpec(1.0, 1.0, phi_M)
    assert hermiticity_defect(assemble(circular, fs, BasisSpec(p))) < 1e-10
    without = hermiticity_defect(assemble(circular, fs, BasisSpec(p), include_vmag=False))
    assert without == pytest.approx(DEFECT_WITHOUT_VMAG, rel=1e-10)


@given(st.floats(0.1, 0.9), st.floats(0.1, 0.9), st.sampled_from([2, 3, 4, 8]),
       st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2 * np.pi), st.integers(-3, 3))
@settings(max_examples=25, deadline=None)
def test_hermitian_for_random_parameters(a, b, omega, t0, t1, phi_M, p):
    assume(abs(a * (omega ** 2 + 1) - 1.0) > 1e-6)  # curvature zero on the grid
    H = assemble(HelixSpec(1.0, a, b, omega), FieldSpec(t0, t1, phi_M), BasisSpec(p, 2, 1024))
    assert hermiticity_defect(H) < 1e-9


def test_quadrature_doubling(tall8):
    assert quadrature_doubling(tall8, FieldSpec(2.0, 1.0, 0.3), BasisSpec(2)) < 1e-10


def test_convergence_check_raises_on_coarse_grid(tall8):
    with pytest.raises(QuadratureConvergenceError):
        assemble(tall8, FieldSpec(2.0, 1.0), BasisSpec(1, 3, 64), check_convergence=True)
    assemble(tall8, FieldSpec(2.0, 1.0), BasisSpec(1, 3), check_convergence=True)


@pytest.mark.parametrize("p", [0, 1, 2])
def test_overlap_is_identity(tall8, p):
    S = overlap_matrix(tall8, BasisSpec(p, 4))
    assert np.abs(S - np.eye(9)).max() < 1e-12


def test_spectrum_independent_of_field_azimuth():
    spec = HelixSpec(1.0, 0.25, 0.75, 4)
    ref = eigh(assemble(spec, FieldSpec(1.0, 1.5, 0.0), BasisSpec(1))).eigenvalues
    for phi_M in (np.pi / 3, 1.1, 5.0):
        got = eigh(assemble(spec, FieldSpec(1.0, 1.5, phi_M), BasisSpec(1))).eigenvalues
        assert np.allclose(got, ref, atol=1e-12)


def test_energy_matrix_sign(circular):
    H = assemble(circular, FieldSpec(), BasisSpec(0))
    assert np.array_equal(H.energy_matrix, -H.entries)
    # the k = 0 plane wave is the zero-field ground state
    sol = eigh(H)
    assert np.argmax(np.abs(sol.coefficients(0))) == 2


@pytest.mark.parametrize("kwargs", [dict(n_max=0), dict(quad_points=63), dict(quad_points=32), dict(p=0.5)])
def test_invalid_basis(kwargs):
    with pytest.raises(ValueError):
        BasisSpec(**kwargs)


def test_assembly_is_deterministic(tall8):
    fs = FieldSpec(1.3, 0.4, 0.2)
    a = assemble(tall8, fs, BasisSpec(1)).entries
    b = assemble(tall8, fs, BasisSpec(1)).entries
    assert np.array_equal(a, b)
