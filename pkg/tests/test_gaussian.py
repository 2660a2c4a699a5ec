import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ngteleport.errors import InvalidCovarianceError
from ngteleport.fock import StateSpec, TwoModeState, build_input, build_resource, fock_state
from ngteleport.gaussian import (
    BS_QUADRATURE_MATRIX,
    OMEGA,
    CovarianceMatrix,
    SymmetricGaussianSpec,
    bs_output_covariance,
    bs_transform_covariance,
    covariance_of,
    gaussian_fidelity,
    is_bona_fide,
    least_eigenvalue,
    single_mode_covariance,
    symmetric_gaussian_conditions,
    symplectic_eigenvalues,
    tmsv_family_lambda_min,
)
from oracles import momentum, pad2, position

VACUUM = np.eye(4) / 2


def _brute_covariance(amps, dim):
    """Symmetrized quadrature covariance from explicit operators in a larger space."""
    psi = pad2(amps, dim).ravel()
    x, p, eye = position(dim), momentum(dim), np.eye(dim)
    ops = [np.kron(x, eye), np.kron(p, eye), np.kron(eye, x), np.kron(eye, p)]
    mean = np.array([np.vdot(psi, o @ psi).real for o in ops])
    v = np.empty((4, 4))
    for i, oi in enumerate(ops):
        for j, oj in enumerate(ops):
            sym = 0.5 * (oi @ oj + oj @ oi)
            v[i, j] = np.vdot(psi, sym @ psi).real - mean[i] * mean[j]
    return v, mean


amplitude = st.floats(-1, 1, allow_nan=False)


@given(st.lists(st.tuples(amplitude, amplitude), min_size=25, max_size=25))
def test_covariance_matches_operator_oracle(pairs):
    amps = np.array([complex(a, b) for a, b in pairs]).reshape(5, 5)
    norm = np.linalg.norm(amps)
    assume(norm > 1e-3)
    state = TwoModeState(amps / norm)
    v, mean = _brute_covariance(state.amps, 8)
    cov = covariance_of(state)
    assert np.allclose(cov.v, v, atol=1e-10)
    assert np.allclose(cov.mean, mean, atol=1e-10)


def test_vacuum_covariance():
    cov = covariance_of(build_resource(StateSpec("SqueezeVac", 0.0)))
    assert np.allclose(cov.v, VACUUM)


def test_tmsv_covariance():
    r = 0.5
    v = covariance_of(build_resource(StateSpec("TMSV", r))).v
    c2 = math.cosh(2 * r) / 2
    s2 = math.sinh(2 * r) / 2
    expected = np.array([[c2, 0, s2, 0], [0, c2, 0, -s2], [s2, 0, c2, 0], [0, -s2, 0, c2]])
    assert np.allclose(v, expected, atol=1e-10)


def test_single_mode_squeezed_covariance():
    v, mean = single_mode_covariance(build_input(StateSpec("SqueezeVac", 0.4)))
    assert np.allclose(v, np.diag([math.exp(-0.8) / 2, math.exp(0.8) / 2]), atol=1e-10)
    assert np.allclose(mean, 0)


@pytest.mark.parametrize("family,m", [("PAS", 1), ("PSS", 2), ("SNS", 3), ("SqueezeVac", 0)])
def test_bs_quadrature_transform_matches_fock_path(family, m):
    spec = StateSpec(family, 0.6, m)
    v_in, _ = single_mode_covariance(build_input(spec))
    full = np.block([[v_in, np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2) / 2]])
    assert np.allclose(bs_transform_covariance(full).v, covariance_of(build_resource(spec)).v, atol=1e-10)


def test_bs_output_closed_form():
    eta, zeta = math.exp(-2) / 2, math.exp(2) / 2
    full = np.diag([eta, zeta, 0.5, 0.5])
    assert np.allclose(bs_output_covariance(eta, zeta).v, bs_transform_covariance(full).v)


def test_bs_matrix_is_symplectic_and_orthogonal():
    s = BS_QUADRATURE_MATRIX
    assert np.allclose(s @ s.T, np.eye(4))
    assert np.allclose(s @ OMEGA @ s.T, OMEGA)


@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_bs_least_eigenvalue_reduction(eta, zeta):
    v = bs_transform_covariance(np.diag([eta, zeta, 0.5, 0.5]))
    assert least_eigenvalue(v) == pytest.approx(min(0.5, eta, zeta), abs=1e-12)


@given(
    st.floats(0.5, 3.0), st.floats(0.5, 3.0),
    st.floats(-1.0, 1.0), st.floats(-1.0, 1.0),
)
def test_symplectic_spectrum_invariant_under_bs(n1, n2, c1, c2):
    v = np.diag([n1, n1, n2, n2]).astype(float)
    v[0, 2] = v[2, 0] = c1 * 0.3
    v[1, 3] = v[3, 1] = c2 * 0.3
    assume(np.linalg.eigvalsh(v)[0] > 0)
    k1 = symplectic_eigenvalues(v)
    k2 = symplectic_eigenvalues(bs_transform_covariance(v))
    assert np.allclose(k1, k2, atol=1e-10)


def test_symplectic_eigenvalues_of_product_state():
    assert symplectic_eigenvalues(np.diag([2.0, 2.0, 0.7, 0.7])) == pytest.approx((0.7, 2.0))


@pytest.mark.parametrize(
    "spec",
    [StateSpec("TMSV", 0.9), StateSpec("TMPA", 0.4), StateSpec("PAS", 0.8, 2), StateSpec("SNS", 0.5, 3)],
)
def test_symplectic_spectrum_of_pure_resources(spec):
    kappa = symplectic_eigenvalues(covariance_of(build_resource(spec)))
    assert is_bona_fide(covariance_of(build_resource(spec)))
    if spec.family.value == "TMSV":
        assert kappa == pytest.approx((0.5, 0.5), abs=1e-6)
    else:
        # non-Gaussian pure states have mixed Gaussian counterparts
        assert kappa[1] > 0.5


def test_unphysical_covariance_not_bona_fide():
    assert not is_bona_fide(np.eye(4) * 0.3)


@pytest.mark.parametrize(
    "bad",
    [np.eye(3), np.full((4, 4), np.nan), np.triu(np.ones((4, 4)))],
)
def test_covariance_validation(bad):
    with pytest.raises(InvalidCovarianceError):
        CovarianceMatrix(bad)


# --------------------------------------------------------------------------
# Gaussian fidelity

def test_gaussian_fidelity_vacuum_is_half():
    assert gaussian_fidelity(VACUUM) == pytest.approx(0.5)


@pytest.mark.parametrize("r", [0.1, 0.5, 1.2])
def test_gaussian_fidelity_tmsv(r):
    v = covariance_of(build_resource(StateSpec("TMSV", r))).v
    # the auto cutoff leaves ~1e-9 of truncation error at r = 1.2
    assert gaussian_fidelity(v) == pytest.approx(1 / (1 + math.exp(-2 * r)), abs=1e-8)


def test_gaussian_fidelity_bs_squeezed():
    v = bs_output_covariance(math.exp(-2) / 2, math.exp(2) / 2)
    assert gaussian_fidelity(v) == pytest.approx(1 / math.sqrt(2 * (1 + math.exp(-2))))


def test_gaussian_fidelity_rejects_nonpositive_det():
    with pytest.raises(InvalidCovarianceError):
        gaussian_fidelity(np.diag([-3.0, 1.0, 0.0, 0.0]))


# --------------------------------------------------------------------------
# symmetric Gaussian states

@st.composite
def bona_fide_symmetric(draw, signed=False):
    eta = draw(st.floats(0.5, 5.0))
    c_max = math.sqrt(eta**2 - 0.25)
    c = draw(st.floats(-c_max if signed else 0.0, c_max))
    assume(math.sqrt((eta + c) * (eta - c)) >= 0.5)
    return SymmetricGaussianSpec(eta, c)


@given(bona_fide_symmetric())
def test_squeezing_iff_teleportation_for_symmetric_states(spec):
    cond = symmetric_gaussian_conditions(spec)
    assume(abs(spec.eta - spec.c - 0.5) > 1e-9)
    assert cond.bona_fide
    assert cond.squeezed == cond.qt


@given(bona_fide_symmetric(signed=True))
def test_squeezing_necessary_for_signed_correlations(spec):
    cond = symmetric_gaussian_conditions(spec)
    assume(abs(spec.eta - abs(spec.c) - 0.5) > 1e-9)
    if cond.qt:
        assert cond.squeezed


def test_anticorrelated_symmetric_state_squeezed_without_teleportation():
    # c < 0 is squeezed but correlates the wrong quadratures for this protocol
    cond = symmetric_gaussian_conditions(SymmetricGaussianSpec(1.0, -0.9))
    assert cond.squeezed and not cond.qt


def test_symmetric_least_eigenvalue():
    spec = SymmetricGaussianSpec(1.2, 0.9)
    assert least_eigenvalue(spec.covariance()) == pytest.approx(0.3)


# --------------------------------------------------------------------------
# closed-form least eigenvalues

@pytest.mark.parametrize("family", ["TMSV", "TMPA", "TMPS", "TMSN"])
@pytest.mark.parametrize("r", [0.1, 0.4, 0.8, 1.2])
def test_lambda_min_closed_forms(family, r):
    lam = least_eigenvalue(covariance_of(build_resource(StateSpec(family, r))))
    assert lam == pytest.approx(tmsv_family_lambda_min(family, r), abs=1e-9)


def test_lambda_min_needs_quartic_denominator():
    # dropping the 1/(1 - tau^4) factor misses the numerical values
    r = 0.6
    tau = math.tanh(r)
    bare_pa = 0.5 + (1 - tau) * (1 - 3 * tau + tau**2 - tau**3)
    bare_ps = 0.5 - 2 * tau * (1 - tau) * (1 - tau + tau**2)
    lam_pa = least_eigenvalue(covariance_of(build_resource(StateSpec("TMPA", r))))
    lam_ps = least_eigenvalue(covariance_of(build_resource(StateSpec("TMPS", r))))
    assert abs(lam_pa - bare_pa) > 1e-2
    assert abs(lam_ps - bare_ps) > 1e-2


def test_tmsv_lambda_min_is_exponential():
    assert tmsv_family_lambda_min("TMSV", 0.7) == pytest.approx(math.exp(-1.4) / 2)


def test_lambda_min_rejects_single_mode_family():
    with pytest.raises(ValueError):
        tmsv_family_lambda_min("PAS", 0.3)


def test_fock_state_input_not_squeezed():
    v, _ = single_mode_covariance(fock_state(1, 5))
    assert np.allclose(v, 1.5 * np.eye(2))
