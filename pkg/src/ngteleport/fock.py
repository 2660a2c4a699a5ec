"""Truncated Fock-basis states, ladder operators and the 50:50 beam splitter.

Conventions used throughout the package:

* quadratures ``x = (a + a^dag)/sqrt(2)``, ``p = (a - a^dag)/(i sqrt(2))``; the
  vacuum variance is 1/2;
* the single-mode squeezer compresses ``x``: ``S(r)|0>`` has amplitudes
  ``(-tanh r)^k sqrt((2k)!)/(2^k k!)/sqrt(cosh r)`` on ``|2k>``, so
  ``<a^2> = -sinh(r) cosh(r)`` and ``Var(x) = exp(-2r)/2``;
* the two-mode squeezer ``exp(r(a^dag b^dag - ab))`` gives ``tanh(r)^k/cosh(r)``
  on ``|k,k>``;
* the beam splitter maps ``a^dag -> (A^dag - B^dag)/sqrt(2)`` and
  ``b^dag -> (A^dag + B^dag)/sqrt(2)``, i.e. ``|1,0> -> (|1,0> - |0,1>)/sqrt(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.special import eval_hermite, eval_legendre, gammaln

from .errors import InvalidSpecError, TruncationError, ZeroNormError

DEFAULT_TAIL_TOL = 1e-8
TAIL_LEVELS = 4
# auto-selected cutoffs are taken from this ladder, smallest first
CUTOFF_LADDER = (48, 64, 96, 128, 160, 192, 256, 320, 384, 512)
NORM_TOL = 1e-10


class Family(str, Enum):
    PAS = "PAS"
    PSS = "PSS"
    SNS = "SNS"
    SQUEEZED_VACUUM = "SqueezeVac"
    TMSV = "TMSV"
    TMPA = "TMPA"
    TMPS = "TMPS"
    TMSN = "TMSN"

    @property
    def is_single_mode(self) -> bool:
        return self in SINGLE_MODE_FAMILIES

    def __str__(self) -> str:
        return self.value


SINGLE_MODE_FAMILIES = frozenset(
    {Family.PAS, Family.PSS, Family.SNS, Family.SQUEEZED_VACUUM}
)
TWO_MODE_FAMILIES = frozenset({Family.TMSV, Family.TMPA, Family.TMPS, Family.TMSN})


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class SingleModeState:
    """Normalized pure state of one mode, ``amps[n] = <n|psi>``.

    ``norm_sq`` keeps the squared norm of the vector before renormalization
    (1 for states that were built normalized).
    """

    amps: np.ndarray
    norm_sq: float = 1.0

    def __post_init__(self) -> None:
        amps = _frozen(self.amps)
        if amps.ndim != 1 or amps.size < 2:
            raise ValueError("single-mode amplitudes must be a vector with cutoff >= 1")
        total = float(np.vdot(amps, amps).real)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {total!r})")
        object.__setattr__(self, "amps", amps)

    @property
    def cutoff(self) -> int:
        return self.amps.size - 1

    def photon_distribution(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def mean_photon_number(self) -> float:
        return float(np.dot(np.arange(self.amps.size), self.photon_distribution()))


@dataclass(frozen=True)
class TwoModeState:
    """Normalized pure two-mode state, ``amps[nA, nB] = <nA, nB|psi>``."""

    amps: np.ndarray
    norm_sq: float = 1.0

    def __post_init__(self) -> None:
        amps = _frozen(self.amps)
        if amps.ndim != 2 or amps.shape[0] != amps.shape[1] or amps.shape[0] < 2:
            raise ValueError("two-mode amplitudes must be a square matrix")
        total = float(np.vdot(amps, amps).real)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {total!r})")
        object.__setattr__(self, "amps", amps)

    @property
    def cutoff(self) -> int:
        return self.amps.shape[0] - 1

    def total_photon_distribution(self) -> np.ndarray:
        """Probability of ``nA + nB = n`` for n = 0..2*cutoff."""
        n = np.arange(self.amps.shape[0])
        shell = np.add.outer(n, n).ravel()
        return np.bincount(shell, weights=(np.abs(self.amps) ** 2).ravel(),
                           minlength=2 * n.size - 1)


@dataclass(frozen=True)
class StateSpec:
    """Declarative description of a resource state.

    ``cutoff=None`` selects the smallest cutoff from ``CUTOFF_LADDER`` that
    passes the truncation-health check.
    """

    family: Family
    r: float = 0.0
    m: int = 0
    cutoff: int | None = None

    def __post_init__(self) -> None:
        try:
            family = Family(self.family)
        except ValueError:
            raise InvalidSpecError(f"unknown state family {self.family!r}") from None
        object.__setattr__(self, "family", family)
        if not math.isfinite(self.r) or self.r < 0:
            raise InvalidSpecError(f"squeeze parameter must be >= 0, got {self.r}")
        if int(self.m) != self.m or self.m < 0:
            raise InvalidSpecError(f"photon number m must be a non-negative integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))
        if (family in TWO_MODE_FAMILIES or family is Family.SQUEEZED_VACUUM) and self.m != 0:
            # m carries no meaning for these families
            object.__setattr__(self, "m", 0)
        if self.cutoff is not None and int(self.cutoff) < 2:
            raise InvalidSpecError("cutoff must be at least 2")
        if family is Family.PSS and self.m > 0 and self.r == 0:
            raise InvalidSpecError("photon subtraction from the vacuum (PSS with m > 0, r = 0)")
        if family is Family.TMPS and self.r == 0:
            raise InvalidSpecError("photon subtraction from the two-mode vacuum (TMPS, r = 0)")


# --------------------------------------------------------------------------
# analytic normalization constants

def pas_norm_sq(m: int, r: float) -> float:
    """``||a^dag^m S(r)|0>||^2 = m! mu^m P_m(mu)``."""
    mu = math.cosh(r)
    return math.factorial(m) * mu**m * float(eval_legendre(m, mu))


def pss_norm_sq(m: int, r: float) -> float:
    """``||a^m S(r)|0>||^2`` as a Hermite sum."""
    mu, nu = math.cosh(r), math.sinh(r)
    if m == 0:
        return 1.0
    if nu == 0:
        return 0.0
    total = 0.0
    for k in range(m + 1):
        total += (
            math.comb(m, k)
            * (-mu / (2 * nu)) ** k
            * float(eval_hermite(k, 0.0)) ** 2
            / math.factorial(k)
        )
    return math.factorial(m) * nu ** (2 * m) * total


# --------------------------------------------------------------------------
# primitive vector operations

def _tail_fraction(weights: np.ndarray, cutoff: int) -> float:
    total = float(weights.sum())
    if total == 0:
        return 0.0
    if weights.ndim == 1:
        tail = weights[cutoff - TAIL_LEVELS + 1 :].sum()
    else:
        lo = cutoff - TAIL_LEVELS + 1
        inner = weights[:lo, :lo].sum()
        tail = total - inner
    return float(tail) / total


def tail_mass(state: SingleModeState | TwoModeState) -> float:
    """Probability carried by the top ``TAIL_LEVELS`` levels of either mode."""
    return _tail_fraction(np.abs(state.amps) ** 2, state.cutoff)


def _squeezed_vacuum_vector(r: float, length: int) -> np.ndarray:
    amps = np.zeros(length, dtype=complex)
    amps[0] = 1.0 / math.sqrt(math.cosh(r))
    t = -math.tanh(r)
    for n in range(2, length, 2):
        amps[n] = amps[n - 2] * t * math.sqrt((n - 1) / n)
    return amps


def _create(vec: np.ndarray) -> np.ndarray:
    out = np.zeros(vec.size + 1, dtype=complex)
    out[1:] = vec * np.sqrt(np.arange(1, vec.size + 1))
    return out


def _annihilate(vec: np.ndarray) -> np.ndarray:
    return vec[1:] * np.sqrt(np.arange(1, vec.size))


def apply_ladder(
    state: SingleModeState | np.ndarray, kind: str, times: int = 1
) -> tuple[np.ndarray, float]:
    """Apply ``a^dag`` or ``a`` ``times`` times without renormalizing.

    The vector grows by ``times`` levels under creation so nothing is lost at
    the cutoff; annihilation shortens it accordingly. Returns the unnormalized
    amplitudes together with their squared norm.
    """
    vec = np.asarray(state.amps if isinstance(state, SingleModeState) else state, dtype=complex)
    if times < 1:
        raise ValueError("times must be >= 1")
    if kind not in ("create", "annihilate"):
        raise ValueError(f"kind must be 'create' or 'annihilate', got {kind!r}")
    step = _create if kind == "create" else _annihilate
    for _ in range(times):
        vec = step(vec)
    norm_sq = float(np.vdot(vec, vec).real)
    if norm_sq == 0.0:
        raise ZeroNormError(f"{kind} x{times} maps the state to the zero vector")
    if vec.size < 2:
        vec = np.concatenate([vec, np.zeros(2 - vec.size, dtype=complex)])
    return vec, norm_sq


def _pad(vec: np.ndarray, length: int) -> np.ndarray:
    if vec.size >= length:
        return vec[:length]
    return np.concatenate([vec, np.zeros(length - vec.size, dtype=complex)])


def _with_cutoff(
    build: Callable[[int], tuple[np.ndarray, int]],
    cutoff: int | None,
    tail_tol: float,
    label: str,
):
    """Run ``build(cutoff) -> (working amplitudes, cutoff)`` with the health check."""
    candidates = CUTOFF_LADDER if cutoff is None else (int(cutoff),)
    worst = None
    for c in candidates:
        work, c = build(c)
        weights = np.abs(work) ** 2
        tail = _tail_fraction(weights, c)
        if tail < tail_tol:
            return work, c
        worst = (c, tail)
    c, tail = worst
    raise TruncationError(
        f"{label}: tail mass {tail:.3e} in the top {TAIL_LEVELS} levels at cutoff {c} "
        f"exceeds {tail_tol:.1e}"
    )


# --------------------------------------------------------------------------
# single-mode constructors

def squeezed_vacuum(
    r: float, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL
) -> SingleModeState:
    if r < 0:
        raise InvalidSpecError("squeeze parameter must be >= 0")
    if cutoff is not None and cutoff < 2:
        raise InvalidSpecError("cutoff must be at least 2")

    def build(c):
        return _squeezed_vacuum_vector(r, _working_length(c)), c

    work, c = _with_cutoff(build, cutoff, tail_tol, f"squeezed vacuum r={r}")
    amps = work[: c + 1]
    return SingleModeState(amps / np.linalg.norm(amps))


def fock_state(n: int, cutoff: int) -> SingleModeState:
    if not 0 <= n <= cutoff:
        raise ValueError("photon number outside the truncated basis")
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[n] = 1.0
    return SingleModeState(amps)


def _working_length(cutoff: int) -> int:
    # levels kept beyond the cutoff so that discarded mass is seen by the health check
    return 2 * cutoff + 2 * TAIL_LEVELS


def _input_vector(family: Family, r: float, m: int, cutoff: int) -> np.ndarray:
    """Unnormalized input amplitudes on a working range well beyond ``cutoff``."""
    length = _working_length(cutoff)
    if family is Family.SQUEEZED_VACUUM or m == 0:
        return _squeezed_vacuum_vector(r, length)
    if family is Family.PAS:
        vec = _squeezed_vacuum_vector(r, length)
        for _ in range(m):
            vec = _create(vec)
        return vec
    if family is Family.PSS:
        vec = _squeezed_vacuum_vector(r, length + m)
        for _ in range(m):
            vec = _annihilate(vec)
        return vec
    if family is Family.SNS:
        # S|m> = (mu a^dag + nu a)^m S|0> / sqrt(m!) for the x-squeezing S
        mu, nu = math.cosh(r), math.sinh(r)
        vec = _squeezed_vacuum_vector(r, length + m + 1)
        for _ in range(m):
            up = _create(vec)
            down = _pad(_annihilate(vec), up.size)
            vec = (mu * up + nu * down)[:-2]
        return vec / math.sqrt(math.factorial(m))
    raise InvalidSpecError(f"{family} is not a single-mode input family")


def build_input(spec: StateSpec, tail_tol: float = DEFAULT_TAIL_TOL) -> SingleModeState:
    """Normalized ``a^dag^m S|0>``, ``a^m S|0>``, ``S|m>`` or ``S|0>``.

    The returned state's ``norm_sq`` is the numerically accumulated squared norm
    prior to renormalization.
    """
    if spec.family not in SINGLE_MODE_FAMILIES:
        raise InvalidSpecError(f"{spec.family} is not a single-mode input family")

    def build(c):
        return _input_vector(spec.family, spec.r, spec.m, c), c

    work, c = _with_cutoff(build, spec.cutoff, tail_tol, f"{spec}")
    norm_sq = float(np.vdot(work, work).real)
    if norm_sq == 0.0:
        raise ZeroNormError(f"{spec} has zero norm")
    amps = work[: c + 1]
    return SingleModeState(amps / np.linalg.norm(amps), norm_sq=norm_sq)


# --------------------------------------------------------------------------
# two-mode constructors

def _bs_amplitudes(n: int) -> np.ndarray:
    """Amplitudes of the BS image of ``|n, 0>`` on ``|k, n-k>``, k = 0..n."""
    k = np.arange(n + 1)
    log_w = 0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) - n * math.log(2.0))
    sign = np.where((n - k) % 2 == 0, 1.0, -1.0)
    return sign * np.exp(log_w)


def beam_splitter(input_a: SingleModeState) -> TwoModeState:
    """50:50 beam splitter with vacuum in the second port.

    Each input level ``|n>`` is spread over ``|k, n-k>`` with weight
    ``(-1)^(n-k) sqrt(C(n, k) / 2^n)``; the output cutoff equals the input
    cutoff, so the map is exact on the truncated space.
    """
    c = input_a.cutoff
    out = np.zeros((c + 1, c + 1), dtype=complex)
    for n, amp in enumerate(input_a.amps):
        if amp == 0:
            continue
        k = np.arange(n + 1)
        out[k, n - k] += amp * _bs_amplitudes(n)
    return TwoModeState(out / np.linalg.norm(out))


def product_with_vacuum(input_a: SingleModeState) -> TwoModeState:
    amps = np.zeros((input_a.cutoff + 1, input_a.cutoff + 1), dtype=complex)
    amps[:, 0] = input_a.amps
    return TwoModeState(amps)


def two_mode_fock(n_a: int, n_b: int, cutoff: int) -> TwoModeState:
    amps = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    amps[n_a, n_b] = 1.0
    return TwoModeState(amps)


def _tmsv_family_matrix(family: Family, r: float, cutoff: int) -> np.ndarray:
    length = _working_length(cutoff)
    mu, t = math.cosh(r), math.tanh(r)
    k = np.arange(length + 2)
    base = np.zeros(length + 2)
    base[0] = 1.0 / mu
    if t != 0:
        base[1:] = np.exp(k[1:] * math.log(t)) / mu
    diag = np.zeros(length, dtype=complex)
    if family is Family.TMSV:
        diag[:] = base[:length]
    elif family is Family.TMPA:
        # a^dag b^dag |k,k> = (k+1) |k+1,k+1>
        diag[1:] = np.arange(1, length) * base[: length - 1]
    elif family is Family.TMPS:
        # ab |k,k> = k |k-1,k-1>
        diag[:] = np.arange(1, length + 1) * base[1 : length + 1]
    elif family is Family.TMSN:
        # S_ab |1,1> = (mu a^dag - nu b)(mu b^dag - nu a) S_ab |0,0>
        nu = math.sinh(r)
        psi = np.diag(base[: length + 2]).astype(complex)
        a = _annihilate_axis(psi, 0)
        bd = _create_axis(psi, 1)
        step = mu * bd - nu * a
        out = mu * _create_axis(step, 0) - nu * _annihilate_axis(step, 1)
        return out[:length, :length]
    else:
        raise InvalidSpecError(f"{family} is not a two-mode family")
    return np.diag(diag)


def _create_axis(psi: np.ndarray, axis: int) -> np.ndarray:
    n = psi.shape[axis]
    out = np.zeros_like(psi)
    w = np.sqrt(np.arange(1, n))
    if axis == 0:
        out[1:, :] = psi[:-1, :] * w[:, None]
    else:
        out[:, 1:] = psi[:, :-1] * w[None, :]
    return out


def _annihilate_axis(psi: np.ndarray, axis: int) -> np.ndarray:
    n = psi.shape[axis]
    out = np.zeros_like(psi)
    w = np.sqrt(np.arange(1, n))
    if axis == 0:
        out[:-1, :] = psi[1:, :] * w[:, None]
    else:
        out[:, :-1] = psi[:, 1:] * w[None, :]
    return out


def build_tmsv_family(spec: StateSpec, tail_tol: float = DEFAULT_TAIL_TOL) -> TwoModeState:
    """TMSV and its symmetric photon-added/-subtracted and number-seeded variants.

    ``norm_sq`` of the result carries N_+^2 (TMPA) or N_-^2 (TMPS); it is 1 for
    TMSV and TMSN, which are unitary images of normalized states.
    """
    if spec.family not in TWO_MODE_FAMILIES:
        raise InvalidSpecError(f"{spec.family} is not a two-mode family")

    def build(c):
        return _tmsv_family_matrix(spec.family, spec.r, c), c

    work, c = _with_cutoff(build, spec.cutoff, tail_tol, f"{spec}")
    norm_sq = float(np.vdot(work, work).real)
    if norm_sq == 0.0:
        raise ZeroNormError(f"{spec} has zero norm")
    amps = work[: c + 1, : c + 1]
    return TwoModeState(amps / np.linalg.norm(amps), norm_sq=norm_sq)


def build_resource(spec: StateSpec, tail_tol: float = DEFAULT_TAIL_TOL) -> TwoModeState:
    """Two-mode resource for any family: BS output for single-mode inputs."""
    if spec.family in SINGLE_MODE_FAMILIES:
        return beam_splitter(build_input(spec, tail_tol))
    return build_tmsv_family(spec, tail_tol)
