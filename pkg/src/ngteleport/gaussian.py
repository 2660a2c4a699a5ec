"""Quadrature covariance matrices and Gaussian-state algebra.

Quadrature order is ``R = (x1, p1, x2, p2)`` and ``V_kl = <{dR_k, dR_l}>/2``,
so the vacuum is ``I/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidCovarianceError
from .fock import Family, SingleModeState, TwoModeState

SYMMETRY_TOL = 1e-12
BONA_FIDE_TOL = 1e-9

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.block([[J2, np.zeros((2, 2))], [np.zeros((2, 2)), J2]])
SIGMA_Z = np.diag([1.0, -1.0])

_H = 1.0 / math.sqrt(2.0)
# R_out = S R_in for the 50:50 beam splitter
BS_QUADRATURE_MATRIX = np.array(
    [
        [_H, 0.0, _H, 0.0],
        [0.0, _H, 0.0, _H],
        [-_H, 0.0, _H, 0.0],
        [0.0, -_H, 0.0, _H],
    ]
)


@dataclass(frozen=True)
class CovarianceMatrix:
    """Real symmetric 4x4 variance matrix with the first moments."""

    v: np.ndarray
    mean: np.ndarray | None = None

    def __post_init__(self) -> None:
        v = np.array(self.v, dtype=float)
        if v.shape != (4, 4):
            raise InvalidCovarianceError(f"expected a 4x4 matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidCovarianceError("covariance matrix has non-finite entries")
        if np.max(np.abs(v - v.T)) > SYMMETRY_TOL:
            raise InvalidCovarianceError("covariance matrix is not symmetric")
        v = 0.5 * (v + v.T)
        v.flags.writeable = False
        mean = np.zeros(4) if self.mean is None else np.array(self.mean, dtype=float)
        mean.flags.writeable = False
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "mean", mean)

    @property
    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(A, B, C)`` with ``V = [[A, C], [C^T, B]]``."""
        return self.v[:2, :2], self.v[2:, 2:], self.v[:2, 2:]


def _matrix(v: CovarianceMatrix | np.ndarray) -> np.ndarray:
    m = v.v if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    if not np.all(np.isfinite(m)):
        raise InvalidCovarianceError("covariance matrix has non-finite entries")
    return m


# --------------------------------------------------------------------------
# moments from Fock amplitudes

def _lower(psi: np.ndarray, axis: int) -> np.ndarray:
    """Apply a (or b) and drop the now-empty top level of that axis."""
    w = np.sqrt(np.arange(1, psi.shape[axis]))
    if axis == 0:
        return psi[1:, :] * w[:, None]
    return psi[:, 1:] * w[None, :]


class LadderMoments(NamedTuple):
    a: complex
    b: complex
    aa: complex
    bb: complex
    ada: float
    bdb: float
    ab: complex
    adb: complex


def ladder_moments(state: TwoModeState) -> LadderMoments:
    """First and second normally ordered moments of a two-mode pure state.

    Only lowering operators act on the amplitudes, so every moment is exact
    for the truncated vector.
    """
    psi = state.amps
    la = _lower(psi, 0)
    lb = _lower(psi, 1)
    a = np.vdot(psi[:-1, :], la)
    b = np.vdot(psi[:, :-1], lb)
    aa = np.vdot(psi[:-2, :], _lower(la, 0))
    bb = np.vdot(psi[:, :-2], _lower(lb, 1))
    ada = np.vdot(la, la).real
    bdb = np.vdot(lb, lb).real
    ab = np.vdot(psi[:-1, :-1], _lower(la, 1))
    adb = np.vdot(la[:, :-1], lb[:-1, :])
    return LadderMoments(a, b, aa, bb, float(ada), float(bdb), ab, adb)


def _mode_block(a: complex, aa: complex, n: float) -> tuple[np.ndarray, np.ndarray]:
    mean = math.sqrt(2.0) * np.array([a.real, a.imag])
    second = np.array(
        [
            [aa.real + n + 0.5, aa.imag],
            [aa.imag, -aa.real + n + 0.5],
        ]
    )
    return second - np.outer(mean, mean), mean


def single_mode_covariance(state: SingleModeState) -> tuple[np.ndarray, np.ndarray]:
    """2x2 variance matrix and mean ``(<x>, <p>)`` of a single-mode state."""
    psi = state.amps
    la = psi[1:] * np.sqrt(np.arange(1, psi.size))
    a = np.vdot(psi[:-1], la)
    aa = np.vdot(psi[:-2], la[1:] * np.sqrt(np.arange(1, la.size)))
    n = float(np.vdot(la, la).real)
    return _mode_block(a, aa, n)


def covariance_of(state: TwoModeState) -> CovarianceMatrix:
    mom = ladder_moments(state)
    v_a, mean_a = _mode_block(mom.a, mom.aa, mom.ada)
    v_b, mean_b = _mode_block(mom.b, mom.bb, mom.bdb)
    ab, adb = mom.ab, mom.adb
    # symmetrized <R_i R_j> between the modes (operators of different modes commute)
    cross = np.array(
        [
            [ab.real + adb.real, ab.imag + adb.imag],   # x1x2, x1p2
            [ab.imag - adb.imag, -ab.real + adb.real],  # p1x2, p1p2
        ]
    )
    cross -= np.outer(mean_a, mean_b)
    v = np.block([[v_a, cross], [cross.T, v_b]])
    return CovarianceMatrix(v, np.concatenate([mean_a, mean_b]))


# --------------------------------------------------------------------------
# beam splitter on covariance matrices

def bs_transform_covariance(v_in: CovarianceMatrix | np.ndarray) -> CovarianceMatrix:
    s = BS_QUADRATURE_MATRIX
    v = s @ _matrix(v_in) @ s.T
    mean = None
    if isinstance(v_in, CovarianceMatrix):
        mean = s @ v_in.mean
    return CovarianceMatrix(0.5 * (v + v.T), mean)


def bs_output_covariance(eta_a: float, zeta_a: float) -> CovarianceMatrix:
    """Closed-form BS image of ``diag(eta_a, zeta_a, 1/2, 1/2)``."""
    d_x, o_x = (eta_a + 0.5) / 2, (0.5 - eta_a) / 2
    d_p, o_p = (zeta_a + 0.5) / 2, (0.5 - zeta_a) / 2
    return CovarianceMatrix(
        [
            [d_x, 0.0, o_x, 0.0],
            [0.0, d_p, 0.0, o_p],
            [o_x, 0.0, d_x, 0.0],
            [0.0, o_p, 0.0, d_p],
        ]
    )


# --------------------------------------------------------------------------
# spectra

def symplectic_eigenvalues(v: CovarianceMatrix | np.ndarray) -> tuple[float, float]:
    """Symplectic spectrum ``(kappa_1, kappa_2)``, ascending.

    The eigenvalues of ``-(Omega V)^2`` are the squared symplectic eigenvalues,
    each doubly degenerate.
    """
    m = _matrix(v)
    ov = OMEGA @ m
    sq = np.sort(np.linalg.eigvals(-ov @ ov).real)
    kappa = np.sqrt(np.clip(sq, 0.0, None))
    return float(kappa[0]), float(kappa[2])


def is_bona_fide(v: CovarianceMatrix | np.ndarray, tol: float = BONA_FIDE_TOL) -> bool:
    return symplectic_eigenvalues(v)[0] >= 0.5 - tol


def least_eigenvalue(v: CovarianceMatrix | np.ndarray) -> float:
    return float(np.linalg.eigvalsh(_matrix(v))[0])


def gaussian_fidelity(v: CovarianceMatrix | np.ndarray) -> float:
    """Coherent-state teleportation fidelity of a Gaussian resource.

    ``F = 1/sqrt(det M)`` with ``M = A - {sigma_z, C} + sigma_z B sigma_z + I``.
    """
    m = _matrix(v)
    a, b, c = m[:2, :2], m[2:, 2:], m[:2, 2:]
    mat = a - (SIGMA_Z @ c + c @ SIGMA_Z) + SIGMA_Z @ b @ SIGMA_Z + np.eye(2)
    det = float(np.linalg.det(mat))
    if not det > 0:
        raise InvalidCovarianceError(f"det M = {det} is not positive")
    return 1.0 / math.sqrt(det)


# --------------------------------------------------------------------------
# symmetric Gaussian family

@dataclass(frozen=True)
class SymmetricGaussianSpec:
    """``V = [[eta, 0, c, 0], [0, eta, 0, -c], [c, 0, eta, 0], [0, -c, 0, eta]]``."""

    eta: float
    c: float

    def covariance(self) -> CovarianceMatrix:
        e, c = self.eta, self.c
        return CovarianceMatrix(
            [[e, 0, c, 0], [0, e, 0, -c], [c, 0, e, 0], [0, -c, 0, e]]
        )


class SymmetricConditions(NamedTuple):
    bona_fide: bool
    squeezed: bool
    qt: bool


def symmetric_gaussian_conditions(spec: SymmetricGaussianSpec) -> SymmetricConditions:
    """Bona fide, U(2)-squeezed and teleporting (F > 1/2) flags.

    ``squeezed`` uses the least eigenvalue ``eta - |c|``, which is ``eta - c``
    for the positively correlated members of the family.
    """
    e, c = spec.eta, spec.c
    bona_fide = e >= abs(c) and math.sqrt((e + c) * (e - c)) >= 0.5
    squeezed = e - abs(c) < 0.5
    try:
        qt = gaussian_fidelity(spec.covariance()) > 0.5
    except InvalidCovarianceError:
        qt = False
    return SymmetricConditions(bona_fide, squeezed, qt)


# --------------------------------------------------------------------------
# closed-form least eigenvalues for the TMSV family

def tmsv_family_lambda_min(family: Family | str, r: float) -> float:
    """Least covariance eigenvalue of TMSV, TMPA, TMPS and TMSN in closed form.

    For the photon-added and -subtracted states the correction to 1/2 carries
    the factor ``1/(1 - tau^4)`` from the normalization sums.
    """
    family = Family(family)
    mu, nu, tau = math.cosh(r), math.sinh(r), math.tanh(r)
    if family is Family.TMSV:
        return 0.5 - nu * (mu - nu)
    if family is Family.TMSN:
        return 0.5 + (mu - 2 * nu) * (mu - nu)
    quartic = 1.0 - tau**4
    if family is Family.TMPA:
        return 0.5 + (1 - tau) * (1 - 3 * tau + tau**2 - tau**3) / quartic
    if family is Family.TMPS:
        return 0.5 - 2 * tau * (1 - tau) * (1 - tau + tau**2) / quartic
    raise ValueError(f"no closed form for {family}")
