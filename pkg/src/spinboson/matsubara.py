"""Matsubara grids and the fermionic frequency sums behind the coupling coefficients.

Every sum is truncated at ``M`` positive-index fermionic frequencies. The
leading large-|p| asymptote of each summand is summed exactly over the
discarded indices (subtract-and-add), so the remaining truncation error falls
off as 1/p**4 and is bounded analytically.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import polygamma

from .errors import CutoffTooSmall, DomainError, FrequencyNotOnGrid

DEFAULT_CUTOFF = 100_000

BOSONIC = "bosonic"
FERMIONIC = "fermionic"


@dataclass(frozen=True)
class MatsubaraGrid:
    beta: float
    statistics: str
    cutoff: int

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError("beta", f"beta must be finite and > 0, got {self.beta}")
        if self.statistics not in (BOSONIC, FERMIONIC):
            raise DomainError("statistics", f"unknown statistics {self.statistics!r}")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise DomainError("cutoff", f"cutoff must be a positive integer, got {self.cutoff}")


@dataclass(frozen=True)
class SumResult:
    value: float
    truncation_error_estimate: float
    M_used: int


def frequencies(grid: MatsubaraGrid) -> np.ndarray:
    """Ascending Matsubara frequencies of ``grid``.

    Bosonic: 2 pi n / beta for n in [-M, M]. Fermionic: (2n+1) pi / beta for
    n in [-M, M-1].
    """
    M = int(grid.cutoff)
    if grid.statistics == BOSONIC:
        n = np.arange(-M, M + 1)
        return 2.0 * np.pi * n / grid.beta
    n = np.arange(-M, M)
    return (2 * n + 1) * np.pi / grid.beta


def bosonic_index(omega: float, beta: float, rtol: float = 1e-9) -> int:
    """Integer n with omega = 2 pi n / beta; FrequencyNotOnGrid otherwise."""
    x = omega * beta / (2.0 * np.pi)
    n = round(x)
    if abs(x - n) > rtol * max(1.0, abs(x)):
        raise FrequencyNotOnGrid(f"omega={omega!r} is not a bosonic Matsubara frequency for beta={beta!r}")
    return int(n)


def _positive_fermionic(beta: float, M: int) -> np.ndarray:
    return (2 * np.arange(M) + 1) * np.pi / beta


def _inverse_square_tail(beta: float, M: int) -> float:
    """sum_{n >= M} 1/p_n**2 for fermionic p_n = (2n+1) pi / beta."""
    return (beta / (2 * np.pi)) ** 2 * float(polygamma(1, M + 0.5))


def _inverse_quartic_tail(beta: float, M: int) -> float:
    """sum_{n >= M} 1/p_n**4."""
    return (beta / (2 * np.pi)) ** 4 * float(polygamma(3, M + 0.5)) / 6.0


def _inverse_sixth_tail(beta: float, M: int) -> float:
    """sum_{n >= M} 1/p_n**6."""
    return (beta / (2 * np.pi)) ** 6 * float(polygamma(5, M + 0.5)) / 120.0


def _shifted_product_tail(k: int, beta: float, M: int) -> float:
    """Sum of 1/(p (p - omega)) over all discarded p, omega = 2 pi k / beta, k > 0.

    Partial fractions telescope the sum to the finite block of 1/p_j with
    j in [M - k, M + k - 1].
    """
    omega = 2 * np.pi * k / beta
    j = np.arange(M - k, M + k)
    p = (2 * j + 1) * np.pi / beta
    return math.fsum(1.0 / p) / omega


def _check_tolerance(result: SumResult, tol):
    if tol is not None and result.truncation_error_estimate > tol:
        raise CutoffTooSmall(
            f"tail estimate {result.truncation_error_estimate:.3e} exceeds tolerance {tol:.3e} at M={result.M_used}"
        )
    return result


def _check_inputs(omega_big, beta, M):
    if not (omega_big > 0 and math.isfinite(omega_big)):
        raise DomainError("omega_big", f"omega_big must be > 0, got {omega_big}")
    if not (beta > 0 and math.isfinite(beta)):
        raise DomainError("beta", f"beta must be finite and > 0, got {beta}")
    if int(M) != M or M < 1:
        raise DomainError("M", f"cutoff must be a positive integer, got {M}")
    return int(M)


def lorentzian_fermi_sum(omega_big: float, beta: float, M: int = DEFAULT_CUTOFF, tol: float | None = None) -> SumResult:
    """sum_p 1/(p**2 + Omega**2/4) over fermionic p; converges to (beta/Omega) tanh(beta Omega/4)."""
    M = _check_inputs(omega_big, beta, M)
    a2 = (omega_big / 2.0) ** 2
    p = _positive_fermionic(beta, M)
    # partners n and -n-1 share |p|
    kept = 2.0 * math.fsum(1.0 / (p * p + a2))
    # tail: 1/(p^2+a^2) = 1/p^2 - a^2/p^4 + O(a^4/p^6)
    value = kept + 2.0 * (_inverse_square_tail(beta, M) - a2 * _inverse_quartic_tail(beta, M))
    err = 2.0 * a2 * a2 * _inverse_sixth_tail(beta, M)
    return _check_tolerance(SumResult(value, err, M), tol)


def lorentzian_closed_form(omega_big: float, beta: float) -> float:
    return beta / omega_big * math.tanh(beta * omega_big / 4.0)


def _pair_terms(beta, M, k, kernel):
    p = _positive_fermionic(beta, M)
    omega = 2 * np.pi * k / beta
    return kernel(p, p - omega) + kernel(-p, -p - omega)


def cancellation_kernel_sum(omega: float, omega_big: float, beta: float, M: int = DEFAULT_CUTOFF,
                            tol: float | None = None) -> SumResult:
    """sum_p [a^2 - p(p-omega)] / [(p^2+a^2)((p-omega)^2+a^2)], a = Omega/2.

    The sum vanishes for every bosonic omega != 0. At omega = 0 it equals
    -(beta^2/4) sech^2(beta Omega/4).
    """
    M = _check_inputs(omega_big, beta, M)
    k = abs(bosonic_index(omega, beta))
    a2 = (omega_big / 2.0) ** 2

    def kernel(p, q):
        return (a2 - p * q) / ((p * p + a2) * (q * q + a2))

    if k == 0:
        kept = math.fsum(_pair_terms(beta, M, 0, kernel))
        value = kept - 2.0 * _inverse_square_tail(beta, M)
        p_min = (2 * M + 1) * np.pi / beta
        err = 2.0 * (3 * a2 + a2 * a2 / p_min**2) * _inverse_quartic_tail(beta, M)
        return _check_tolerance(SumResult(value, err, M), tol)

    if 2 * M + 1 < 4 * k:
        raise CutoffTooSmall(f"cutoff M={M} too small for bosonic index {k}; need 2M+1 >= 4|k|")
    kept = math.fsum(_pair_terms(beta, M, k, kernel))
    value = kept - _shifted_product_tail(k, beta, M)
    p_min = (2 * M + 1) * np.pi / beta
    err = 2.0 * 8.0 * a2 * (4.75 + a2 / p_min**2) * _inverse_quartic_tail(beta, M)
    return _check_tolerance(SumResult(value, err, M), tol)


def cancellation_closed_form(omega: float, omega_big: float, beta: float) -> float:
    if bosonic_index(omega, beta) != 0:
        return 0.0
    return -(beta**2) / 4.0 / math.cosh(beta * omega_big / 4.0) ** 2


@functools.lru_cache(maxsize=65536)
def bound_kernel_sum(k: int, omega_big: float, beta: float, M: int = 4096) -> SumResult:
    """sum over p - q = omega_k of 1/sqrt((p^2+a^2)(q^2+a^2)), a = Omega/2.

    This is the convolution entering the convergence-bound coefficients
    a0(omega) and c0(omega). ``k`` is the bosonic index; the fermionic cutoff
    is raised to ``2|k|+1`` when needed.
    """
    k = abs(int(k))
    M = max(_check_inputs(omega_big, beta, M), 2 * k + 1)
    a2 = (omega_big / 2.0) ** 2
    if k == 0:
        return lorentzian_fermi_sum(omega_big, beta, M)

    def kernel(p, q):
        return 1.0 / np.sqrt((p * p + a2) * (q * q + a2))

    kept = math.fsum(_pair_terms(beta, M, k, kernel))
    value = kept + _shifted_product_tail(k, beta, M)
    err = 2.0 * 5.0 * a2 * _inverse_quartic_tail(beta, M)
    return SumResult(value, err, M)
