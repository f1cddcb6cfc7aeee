"""Thermodynamic-limit closed forms for the sigma-z coupled model.

The interacting partition function differs from the free one only through the
bosonic zero mode: ln Z = ln Z0 + ln C0 + (g^2 beta / omega0) tanh^2(Omega beta/4),
with C0 = 1 fixed by the third law.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import GridTooCoarse
from ..model import ModelParams, ThermoReport, require_finite_beta


class ZeroModePolicy(str, enum.Enum):
    KEEP = "keep"
    DROP = "drop"


def _log_2cosh(x):
    x = abs(x)
    return x + math.log1p(math.exp(-2.0 * x))


def free_lnz(params: ModelParams) -> float:
    """ln Z0 of the free mode (normal ordered) plus N atoms with levels +-Omega/2."""
    beta = require_finite_beta(params, "free_lnz")
    boson = -math.log1p(-math.exp(-beta * params.omega0))
    return boson + params.n_atoms * _log_2cosh(beta * params.omega_big / 2.0)


def free_energy(params: ModelParams) -> float:
    """E0 = -d ln Z0 / d beta."""
    beta = require_finite_beta(params, "free_energy")
    boson = params.omega0 / math.expm1(beta * params.omega0)
    atoms = -params.n_atoms * params.omega_big / 2.0 * math.tanh(beta * params.omega_big / 2.0)
    return boson + atoms


def free_entropy(params: ModelParams) -> float:
    """S0 = ln Z0 + beta E0, written without the large-beta cancellation."""
    beta = require_finite_beta(params, "free_entropy")
    return float(_free_entropy_array(params, np.array([beta]))[0])


def _free_entropy_array(params, betas):
    y = betas * params.omega0
    boson = -np.log1p(-np.exp(-y)) + y / np.expm1(y)
    x = betas * params.omega_big
    ex = np.exp(-x)
    atom = np.log1p(ex) + x * ex / (1.0 + ex)
    return boson + params.n_atoms * atom


def _entropy_shift_per_g2(params, betas):
    x = params.omega_big * betas / 4.0
    return -betas**2 * params.omega_big / (2.0 * params.omega0) * np.tanh(x) / np.cosh(x) ** 2


def lnz_shift_sigma_z(params: ModelParams, policy=ZeroModePolicy.KEEP) -> float:
    """ln Z - ln Z0 = g^2 beta/omega0 * tanh^2(Omega beta/4)  (zero for policy DROP)."""
    beta = require_finite_beta(params, "lnz_shift_sigma_z")
    if ZeroModePolicy(policy) is ZeroModePolicy.DROP:
        return 0.0
    t = math.tanh(params.omega_big * beta / 4.0)
    return params.g**2 * beta / params.omega0 * t * t


def energy_shift_sigma_z(params: ModelParams, policy=ZeroModePolicy.KEEP) -> float:
    beta = require_finite_beta(params, "energy_sigma_z")
    if ZeroModePolicy(policy) is ZeroModePolicy.DROP:
        return 0.0
    x = params.omega_big * beta
    t = math.tanh(x / 4.0)
    return -params.g**2 / (2.0 * params.omega0) * t * (math.sinh(x / 2.0) + x) / math.cosh(x / 4.0) ** 2


def entropy_shift_sigma_z(params: ModelParams, policy=ZeroModePolicy.KEEP) -> float:
    beta = require_finite_beta(params, "entropy_sigma_z")
    if ZeroModePolicy(policy) is ZeroModePolicy.DROP:
        return 0.0
    x = params.omega_big * beta
    return -params.g**2 * beta**2 * params.omega_big / (2.0 * params.omega0) * math.tanh(x / 4.0) / math.cosh(x / 4.0) ** 2


def energy_sigma_z(params: ModelParams, policy=ZeroModePolicy.KEEP) -> float:
    return free_energy(params) + energy_shift_sigma_z(params, policy)


def entropy_sigma_z(params: ModelParams, policy=ZeroModePolicy.KEEP) -> float:
    return free_entropy(params) + entropy_shift_sigma_z(params, policy)


def thermo_sigma_z(params: ModelParams, policy=ZeroModePolicy.KEEP) -> ThermoReport:
    shift = lnz_shift_sigma_z(params, policy)
    return ThermoReport(
        ln_z_ratio=shift,
        ln_z_total=free_lnz(params) + shift,
        mean_energy=energy_sigma_z(params, policy),
        entropy=entropy_sigma_z(params, policy),
        order_parameter=None,
        source="analytic",
        truncation_metadata={"zero_mode_policy": ZeroModePolicy(policy).value, "ln_C0": 0.0},
    )


@dataclass(frozen=True)
class EntropyBound:
    g2_max: float
    beta_fail: float
    at_grid_edge: bool


def entropy_positive_g2_bound(params: ModelParams, beta_grid: Sequence[float], rtol: float = 1e-12,
                              allow_edge: bool = False) -> EntropyBound:
    """Largest g^2 keeping the closed-form entropy non-negative on ``beta_grid``.

    Bisection on g^2; at each trial value the entropy is scanned over the whole
    grid. ``beta_fail`` is the grid point where positivity is lost first.
    The coupling in ``params`` is ignored.

    Raises GridTooCoarse when the grid has fewer than 3 points or the binding
    point sits on the grid edge (the minimum is not bracketed), unless
    ``allow_edge`` is set.
    """
    betas = np.sort(np.asarray(beta_grid, dtype=float))
    if betas.size < 3:
        raise GridTooCoarse(f"need at least 3 grid points, got {betas.size}")

    s0 = _free_entropy_array(params, betas)
    h = _entropy_shift_per_g2(params, betas)

    def entropies(g2):
        return s0 + g2 * h

    if np.any(entropies(0.0) < 0):
        return EntropyBound(0.0, float(betas[np.argmin(entropies(0.0))]), False)

    lo, hi = 0.0, 1.0
    while np.all(entropies(hi) >= 0):
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise GridTooCoarse("entropy stays positive for every g^2; grid misses the minimum")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if np.all(entropies(mid) >= 0):
            lo = mid
        else:
            hi = mid

    idx = int(np.argmin(entropies(hi)))
    at_edge = idx in (0, betas.size - 1)
    if at_edge and not allow_edge:
        raise GridTooCoarse(
            f"entropy minimum at the grid edge beta={betas[idx]:.6g}; extend the grid (g2 bound so far {lo:.6g})"
        )
    return EntropyBound(lo, float(betas[idx]), at_edge)
