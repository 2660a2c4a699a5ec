import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import eigh, expm

from ngteleport.errors import ConvergenceError
from ngteleport.fock import StateSpec, TwoModeState, build_input, build_resource, two_mode_fock
from ngteleport.teleport import (
    CharacteristicFunction,
    chi,
    displacement_matrix,
    fidelity_coherent,
    fidelity_nodewise,
    fidelity_sum_oracle,
)
from oracles import annihilation, position


def _singlet(cutoff=6):
    psi = np.zeros((cutoff + 1, cutoff + 1))
    psi[1, 0], psi[0, 1] = 1 / math.sqrt(2), -1 / math.sqrt(2)
    return TwoModeState(psi)


# --------------------------------------------------------------------------
# displacement matrices

@given(st.floats(-2.5, 2.5), st.floats(-2.5, 2.5))
def test_displacement_matches_matrix_exponential(re, im):
    alpha = complex(re, im)
    dim, n = 140, 20
    a = annihilation(dim)
    ref = expm(alpha * a.T - np.conj(alpha) * a)[: n + 1, : n + 1]
    assert np.allclose(displacement_matrix(alpha, n), ref, atol=1e-11)


def test_displacement_is_stable_at_large_cutoff():
    d = displacement_matrix(5.9, 200)
    assert np.all(np.abs(d) <= 1.0 + 1e-12)
    # columns of the full unitary are normalized; low columns live inside the truncation
    assert np.allclose(np.sum(np.abs(d[:, :40]) ** 2, axis=0), 1.0, atol=1e-10)


def test_displacement_of_zero_is_identity():
    assert np.allclose(displacement_matrix(0.0, 6), np.eye(7))


# --------------------------------------------------------------------------
# characteristic function

def test_chi_normalization():
    state = build_resource(StateSpec("PAS", 0.5, 2))
    assert chi(state, 0, 0) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("lam", [0.3, 0.5 - 0.7j, 1.5j])
def test_vacuum_chi(lam):
    vac = two_mode_fock(0, 0, 20)
    assert chi(vac, lam, np.conj(lam)) == pytest.approx(math.exp(-abs(lam) ** 2), abs=1e-12)


@pytest.mark.parametrize("lam", [0.2, 0.6 + 0.4j, -1.1j])
def test_tmsv_chi_on_diagonal(lam):
    r = 0.5
    state = build_resource(StateSpec("TMSV", r))
    assert chi(state, lam, np.conj(lam)) == pytest.approx(
        math.exp(-math.exp(-2 * r) * abs(lam) ** 2), abs=1e-8
    )


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_chi_is_bounded(a, b, c, d):
    state = build_resource(StateSpec("SNS", 0.4, 1, cutoff=30), tail_tol=1e-4)
    assert abs(chi(state, complex(a, b), complex(c, d))) <= 1 + 1e-9


def test_angular_modes_reproduce_chi():
    state = build_resource(StateSpec("PSS", 0.6, 2, cutoff=16), tail_tol=1.0)
    cf = CharacteristicFunction(state)
    rho, _, d = cf.radial_matrices(8, 3.0)
    theta = 0.37
    series = sum(cf.angular_mode(j, d) * np.exp(1j * j * theta) for j in range(-32, 33))
    direct = [cf.on_diagonal(p, theta) for p in rho]
    assert np.allclose(series, direct, atol=1e-12)


# --------------------------------------------------------------------------
# fidelity

def test_separable_bound():
    assert fidelity_coherent(two_mode_fock(0, 0, 10)) == pytest.approx(0.5, abs=1e-8)


@pytest.mark.parametrize("r", [0.2, 0.5, 1.0])
def test_tmsv_fidelity(r):
    state = build_resource(StateSpec("TMSV", r))
    assert fidelity_coherent(state, check=True) == pytest.approx(1 / (1 + math.exp(-2 * r)), abs=1e-7)


def test_bs_squeezed_vacuum_fidelity():
    state = build_resource(StateSpec("SqueezeVac", 1.0))
    assert fidelity_coherent(state) == pytest.approx(1 / math.sqrt(2 * (1 + math.exp(-2))), abs=1e-7)


def _x_gaussian_expectation(amps, dim=300):
    # <exp(-x^2)> through the spectral decomposition of the truncated position operator
    xs, vecs = eigh(position(dim))
    psi = np.zeros(dim, dtype=complex)
    psi[: amps.size] = amps
    proj = vecs.T @ psi
    return float(np.sum(np.abs(proj) ** 2 * np.exp(-(xs**2))))


@pytest.mark.parametrize(
    "spec",
    [StateSpec("PAS", 0.5, 2), StateSpec("PSS", 0.3, 1), StateSpec("SNS", 0.8, 3), StateSpec("PAS", 1.0, 4)],
)
def test_bs_fidelity_equals_position_gaussian_average(spec):
    # with vacuum in the second port F = <exp(-x^2)>_in / sqrt(2)
    expected = _x_gaussian_expectation(build_input(spec).amps) / math.sqrt(2)
    assert fidelity_coherent(build_resource(spec)) == pytest.approx(expected, abs=1e-8)


def test_singlet_fidelity():
    state = _singlet()
    assert fidelity_sum_oracle(state) == pytest.approx(0.25, abs=1e-14)
    assert fidelity_coherent(state) == pytest.approx(0.25, abs=1e-10)


@pytest.mark.parametrize("spec", [StateSpec("PAS", 0.4, 2), StateSpec("TMPA", 0.3), StateSpec("SNS", 0.3, 1)])
def test_quadrature_against_term_sum(spec):
    state = build_resource(StateSpec(spec.family, spec.r, spec.m, cutoff=18), tail_tol=1e-2)
    assert fidelity_coherent(state) == pytest.approx(fidelity_sum_oracle(state), abs=1e-6)


def test_term_sum_truncated_tmsv():
    state = build_resource(StateSpec("TMSV", 0.3, cutoff=20), tail_tol=1.0)
    assert fidelity_sum_oracle(state) == pytest.approx(1 / (1 + math.exp(-0.6)), abs=2e-4)


def test_term_sum_guard():
    with pytest.raises(ValueError, match="guard"):
        fidelity_sum_oracle(two_mode_fock(0, 0, 30))


def test_folded_sum_equals_nodewise_sum():
    state = build_resource(StateSpec("PAS", 0.6, 3, cutoff=14), tail_tol=1.0)
    for n_angular in (8, 16):
        folded = fidelity_coherent(state, n_radial=12, n_angular=n_angular)
        nodes = fidelity_nodewise(state, 12, n_angular)
        assert folded == pytest.approx(nodes.real, abs=1e-13)


def test_fidelity_with_complex_amplitudes():
    # a local phase on both modes leaves the fidelity unchanged only if opposite
    state = build_resource(StateSpec("PSS", 0.5, 2))
    n = np.arange(state.cutoff + 1)
    phase = np.exp(0.4j * n)
    rotated = TwoModeState(state.amps * np.outer(phase, np.conj(phase)))
    assert fidelity_coherent(rotated) == pytest.approx(fidelity_coherent(state), abs=1e-10)


def test_doubling_check_flags_coarse_grid():
    state = build_resource(StateSpec("TMSV", 1.0))
    with pytest.raises(ConvergenceError):
        fidelity_coherent(state, n_radial=6, check=True)


@given(st.floats(0.0, 1.2))
def test_squeezed_vacuum_fidelity_below_limit(r):
    f = fidelity_coherent(build_resource(StateSpec("SqueezeVac", r)))
    assert 0.5 - 1e-9 <= f < 1 / math.sqrt(2)
