"""Scalar diagnostics of two-mode resource states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import entr, eval_hermite, gammaln, xlogy

from .errors import ConvergenceError, InvalidCovarianceError, InvalidSpecError
from .fock import Family, SingleModeState, StateSpec, TwoModeState, pas_norm_sq, pss_norm_sq
from .gaussian import CovarianceMatrix, covariance_of, least_eigenvalue, single_mode_covariance
from .quadrature import angular_rule, radial_rule

WEHRL_RADIAL = 128
WEHRL_ANGULAR = 128
WEHRL_TOL = 1e-6
TWO_MODE_WEHRL_TOL = 1e-5
SVA_S_MAX = 3.0
SVA_GRID = 600
SVA_XTOL = 1e-10


# --------------------------------------------------------------------------
# entanglement

def entanglement_entropy(state: TwoModeState) -> float:
    """Von Neumann entropy (bits) of either reduced state, from the Schmidt spectrum."""
    s = np.linalg.svd(state.amps, compute_uv=False)
    p = s**2
    p = p / p.sum()
    return float(entr(p).sum() / math.log(2.0))


# --------------------------------------------------------------------------
# Wehrl entropy and non-Gaussianity

def _radial_extent(cutoff: int) -> float:
    # the vacuum Gaussian alone needs |z| up to 6 to reach ~1e-16
    return max(6.0, math.sqrt(cutoff + 6.0 * math.sqrt(cutoff)))


def _support(amps: np.ndarray) -> int:
    """Highest Fock level carrying a non-negligible amplitude."""
    mags = np.abs(amps)
    if mags.ndim > 1:
        mags = np.maximum(mags.max(axis=1), mags.max(axis=0))
    nz = np.nonzero(mags > 1e-15 * mags.max())[0]
    return int(nz[-1]) if nz.size else 0


def _coherent_overlaps(rho: np.ndarray, size: int) -> np.ndarray:
    """``e^{-rho^2/2} rho^n / sqrt(n!)`` for ``n < size``, shape ``(len(rho), size)``."""
    n = np.arange(size)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_g = -0.5 * rho[:, None] ** 2 + np.outer(np.log(rho), n) - 0.5 * gammaln(n + 1.0)[None, :]
    log_g[:, 0] = -0.5 * rho**2
    return np.exp(log_g)


def _wehrl_single(psi: np.ndarray, n_radial: int, n_angular: int, r_max: float) -> float:
    rho, w = radial_rule(n_radial, r_max)
    theta = angular_rule(n_angular)
    g = _coherent_overlaps(rho, psi.size) * psi[None, :]
    # <z|psi> = sum_n psi_n g_n(rho) e^{-i n theta}
    phase = np.exp(-1j * np.outer(np.arange(psi.size), theta))
    q = np.abs(g @ phase) ** 2
    integrand = -xlogy(q, q).mean(axis=1)
    # d^2z / pi = 2 rho d rho after averaging over theta
    return float(np.sum(w * 2.0 * rho * integrand))


def wehrl_entropy(
    state: SingleModeState,
    n_radial: int = WEHRL_RADIAL,
    n_angular: int = WEHRL_ANGULAR,
    check: bool = True,
    tol: float = WEHRL_TOL,
) -> float:
    """``-int d^2z/pi Q ln Q`` with ``Q(z) = |<z|psi>|^2``."""
    psi = state.amps[: _support(state.amps) + 1]
    r_max = _radial_extent(state.cutoff)
    value = _wehrl_single(psi, n_radial, n_angular, r_max)
    if check:
        fine = _wehrl_single(psi, 2 * n_radial, 2 * n_angular, r_max)
        if abs(fine - value) > tol:
            raise ConvergenceError(
                f"Wehrl entropy changed by {abs(fine - value):.3e} under grid doubling"
            )
    return value


def gaussian_wehrl_entropy(v: np.ndarray) -> float:
    """Wehrl entropy of the Gaussian state with variance matrix ``v`` (1 or 2 modes)."""
    v = np.asarray(v, dtype=float)
    modes = v.shape[0] // 2
    det = float(np.linalg.det(v + 0.5 * np.eye(v.shape[0])))
    if not det > 0:
        raise InvalidCovarianceError(f"det(V + I/2) = {det} is not positive")
    return modes + 0.5 * math.log(det)


def wehrl_ng(state: SingleModeState, **quadrature) -> float:
    """Wehrl-entropy gap between the Gaussian counterpart and the state (nats)."""
    v, _ = single_mode_covariance(state)
    return gaussian_wehrl_entropy(v) - wehrl_entropy(state, **quadrature)


def two_mode_ng(state: TwoModeState, input_delta: float) -> float:
    """NG of a beam-splitter output with vacuum in the second port.

    The Wehrl gap is additive under the beam splitter and the vacuum adds
    nothing, so this is ``input_delta``. :func:`two_mode_ng_direct` integrates
    the two-mode Q function instead.
    """
    del state
    return float(input_delta)


def _wehrl_two_mode_general(
    psi: np.ndarray, n_radial: int, n_angular: int, r_max: float, chunk: int = 2048
) -> float:
    rho, w = radial_rule(n_radial, r_max)
    theta = angular_rule(n_angular)
    size = psi.shape[0]
    phase = np.exp(-1j * np.outer(theta, np.arange(size)))
    # coherent overlaps over the flattened (radius, angle) grid of one mode
    c = (_coherent_overlaps(rho, size)[:, None, :] * phase[None, :, :]).reshape(-1, size)
    weights = np.repeat(w * rho * (2.0 / n_angular), n_angular)
    right = psi @ c.T
    total = 0.0
    for start in range(0, c.shape[0], chunk):
        amp = c[start : start + chunk] @ right
        q = np.abs(amp) ** 2
        total -= float(weights[start : start + chunk] @ xlogy(q, q) @ weights)
    return total


def _wehrl_two_mode_diagonal(
    diag: np.ndarray, n_radial: int, n_angular: int, r_max: float
) -> float:
    # sum_k psi_kk <z1,z2|k,k> depends on the angles only through theta1 + theta2
    rho, w = radial_rule(n_radial, r_max)
    phi = angular_rule(n_angular)
    k = np.arange(diag.size)
    g = _coherent_overlaps(rho, diag.size)
    pair = g[:, None, :] * g[None, :, :] * diag[None, None, :]
    amp = pair.reshape(-1, diag.size) @ np.exp(-1j * np.outer(k, phi))
    q = np.abs(amp) ** 2
    inner = -xlogy(q, q).mean(axis=1).reshape(n_radial, n_radial)
    wr = w * 2.0 * rho
    return float(wr @ inner @ wr)


def two_mode_wehrl_entropy(
    state: TwoModeState,
    n_radial: int = 48,
    n_angular: int = 48,
    check: bool = True,
    tol: float = TWO_MODE_WEHRL_TOL,
) -> float:
    """``-int d^2z1 d^2z2 / pi^2 Q ln Q`` by direct quadrature."""
    n = _support(state.amps)
    psi = state.amps[: n + 1, : n + 1]
    r_max = _radial_extent(n)
    off_diagonal = psi - np.diag(np.diagonal(psi))
    if not np.any(off_diagonal):
        def run(nr, na):
            return _wehrl_two_mode_diagonal(np.diagonal(psi), nr, na, r_max)
    else:
        def run(nr, na):
            return _wehrl_two_mode_general(psi, nr, na, r_max)
    value = run(n_radial, n_angular)
    if check:
        fine = run(2 * n_radial, 2 * n_angular)
        if abs(fine - value) > tol:
            raise ConvergenceError(
                f"two-mode Wehrl entropy changed by {abs(fine - value):.3e} under grid doubling"
            )
        value = fine
    return value


def two_mode_ng_direct(state: TwoModeState, **quadrature) -> float:
    """Two-mode Wehrl gap from the two-mode Q function (slow path)."""
    v = covariance_of(state).v
    return gaussian_wehrl_entropy(v) - two_mode_wehrl_entropy(state, **quadrature)


# --------------------------------------------------------------------------
# squeezed-vacuum affinity

def sva_overlap(state: TwoModeState, s: float) -> float:
    """``<xi(s)|rho|xi(s)>`` for the TMSV ``xi(s)``."""
    diag = np.diagonal(state.amps)
    tau = math.tanh(s)
    powers = tau ** np.arange(diag.size)
    return float(abs(np.dot(powers, diag) / math.cosh(s)) ** 2)


def sva(state: TwoModeState, s_max: float = SVA_S_MAX) -> float:
    """Maximal overlap with a TMSV over ``s`` in ``[0, s_max]``."""
    return sva_argmax(state, s_max)[0]


def _sva_amplitude(diag: np.ndarray, s: float) -> tuple[float, float]:
    """``<xi(s)|psi>`` restricted to the diagonal, and its derivative in ``s``."""
    k = np.arange(diag.size)
    tau, mu = math.tanh(s), math.cosh(s)
    powers = tau**k
    value = np.dot(powers, diag) / mu
    # d/ds tau^k / mu = k tau^(k-1) / mu^3 - tau^(k+1) / mu
    dpowers = k * np.concatenate(([0.0], powers[:-1])) / mu**3 - powers * tau / mu
    return value, np.dot(dpowers, diag)


def sva_argmax(state: TwoModeState, s_max: float = SVA_S_MAX) -> tuple[float, float]:
    """``(eta, s*)``: dense grid search, then a root of the overlap derivative."""
    diag = np.diagonal(state.amps)
    if not np.any(diag):
        return 0.0, 0.0
    grid = np.linspace(0.0, s_max, SVA_GRID)
    values = np.array([sva_overlap(state, s) for s in grid])
    i = int(np.argmax(values))
    best_s, best = float(grid[i]), float(values[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    sign = math.copysign(1.0, _sva_amplitude(diag, best_s)[0].real)

    def slope(s):
        return sign * _sva_amplitude(diag, s)[1].real

    if hi > lo and slope(lo) > 0 > slope(hi):
        s_star = brentq(slope, lo, hi, xtol=SVA_XTOL, rtol=4 * np.finfo(float).eps)
        value = sva_overlap(state, s_star)
        if value >= best:
            best_s, best = float(s_star), value
    return best, best_s


# --------------------------------------------------------------------------
# EPR uncertainty

def epr_from_covariance(v: CovarianceMatrix | np.ndarray) -> float:
    """``Var(x_A - x_B) + Var(p_A + p_B)``."""
    m = v.v if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    return float(m[0, 0] + m[2, 2] - 2 * m[0, 2] + m[1, 1] + m[3, 3] + 2 * m[1, 3])


def epr_uncertainty(state: TwoModeState) -> float:
    return epr_from_covariance(covariance_of(state))


def epr_from_input_moments(n: float, a2: complex) -> float:
    """EPR uncertainty of the BS output for an input with zero mean field.

    ``n = <a^dag a>`` and ``a2 = <a^2>`` of the input mode; the second port is
    vacuum. With the x-compressing squeezer ``<a^2>`` is negative, so this is
    ``2 (1 + n + Re <a^2>)``.
    """
    return 2.0 * (1.0 + n + complex(a2).real)


def _hermite_sum(m: int, ratio: float) -> float:
    # sum_k C(m, k) ratio^k H_k(0) H_{k+2}(0) / (k+2)!
    total = 0.0
    for k in range(0, m + 1, 2):
        total += (
            math.comb(m, k)
            * ratio**k
            * float(eval_hermite(k, 0.0))
            * float(eval_hermite(k + 2, 0.0))
            / math.factorial(k + 2)
        )
    return total


def epr_analytic(spec: StateSpec) -> float:
    """Closed-form EPR uncertainty of the BS output for PAS, PSS and SNS inputs."""
    family, m, r = Family(spec.family), spec.m, spec.r
    mu, nu = math.cosh(r), math.sinh(r)
    if family is Family.SQUEEZED_VACUUM:
        family, m = Family.SNS, 0
    if family is Family.SNS:
        return 2.0 * (1.0 + m * (mu - nu) ** 2 - nu * (mu - nu))
    if family is Family.PAS:
        n_m = pas_norm_sq(m, r)
        corr = mu ** (2 * m) * math.factorial(m + 2) / n_m * (mu * nu / 2.0)
        return 2.0 * (pas_norm_sq(m + 1, r) / n_m + corr * _hermite_sum(m, -nu / (2 * mu)))
    if family is Family.PSS:
        if m > 0 and r == 0:
            raise InvalidSpecError("photon subtraction from the vacuum (PSS, m > 0, r = 0)")
        if m == 0:
            return 2.0 * (1.0 + nu**2 - mu * nu)
        n_m = pss_norm_sq(m, r)
        corr = nu ** (2 * m) * math.factorial(m + 2) / n_m * (mu * nu / 2.0)
        return 2.0 * (1.0 + pss_norm_sq(m + 1, r) / n_m + corr * _hermite_sum(m, -mu / (2 * nu)))
    raise InvalidSpecError(f"no closed form for family {family.value}")


# --------------------------------------------------------------------------
# quadrature squeezing

def squeezing_degree(v: CovarianceMatrix | np.ndarray) -> float:
    """``f_sq = 1/sqrt(2 lambda_min)``; above 1 means two-mode quadrature squeezing."""
    lam = least_eigenvalue(v)
    if not lam > 0:
        raise InvalidCovarianceError(f"least eigenvalue {lam} is not positive")
    return 1.0 / math.sqrt(2.0 * lam)


# --------------------------------------------------------------------------
# report

MEASURES = ("F", "E", "delta", "eta_sva", "epr", "f_sq")


@dataclass(frozen=True)
class MeasureReport:
    """Measures of one resource state; unrequested entries are ``None``."""

    F: float | None = None
    E: float | None = None
    delta: float | None = None
    eta_sva: float | None = None
    epr: float | None = None
    f_sq: float | None = None

    @property
    def epr_correlated(self) -> bool | None:
        return None if self.epr is None else self.epr < 2.0

    @property
    def squeezed(self) -> bool | None:
        return None if self.f_sq is None else self.f_sq > 1.0

    @property
    def qt(self) -> bool | None:
        return None if self.F is None else self.F > 0.5

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in MEASURES}
        out.update(epr_correlated=self.epr_correlated, squeezed=self.squeezed, qt=self.qt)
        return out
