"""Collective excitation energies of the generalized Dicke model.

After continuing i*omega -> E, the condition c^2 - (1 - a(w))(1 - a(-w)) = 0
becomes a rational equation in E with poles at E = +-Omega and E = +-omega0.
At the critical temperature its non-negative roots are 0 and

    E2 = sqrt((g1 (Omega + omega0)^2 + g2 (Omega - omega0)^2) / (g1 + g2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic.dicke import FINITE, critical_beta
from .errors import DomainError, PoleDense, PoleProximity
from .model import ModelParams, is_zero_t, parse_beta

POLE_RADIUS_REL = 1e-8
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class Root:
    E: float
    residual: float
    bracket: tuple
    multiplicity: int = 1


@dataclass
class SpectrumResult:
    roots: list
    poles_excluded: dict
    search_window: tuple
    beta: float
    metadata: dict = field(default_factory=dict)

    @property
    def energies(self) -> list:
        return [r.E for r in self.roots]


def _tanh_at(params: ModelParams, beta) -> float:
    if is_zero_t(beta):
        return 1.0
    return math.tanh(beta * params.omega_big / 4.0)


def _residual(E, params: ModelParams, t: float):
    # The bracket 1/(W-E)^2 + 1/(W+E)^2 - 4W^2/(W^2-E^2)^2 equals -2/(W^2-E^2),
    # so the double poles cancel and everything sits over (w0^2-E^2)(W^2-E^2).
    # Evaluating the combined numerator avoids cancellation next to the poles.
    E = np.asarray(E, dtype=float)
    W, w0 = params.omega_big, params.omega0
    a, b = params.g1**2, params.g2**2
    E2 = E * E
    num = -((a - b) * t) ** 2 + 2.0 * t * (a * (W * w0 + E2) + b * (W * w0 - E2))
    return num / ((w0 * w0 - E2) * (W * W - E2)) - 1.0


def _pole_radius(params: ModelParams) -> float:
    return POLE_RADIUS_REL * max(params.omega_big, params.omega0)


def _resolve_beta(params: ModelParams, beta):
    if beta is None:
        beta = params.beta
    if isinstance(beta, str) and beta.strip().lower() == "critical":
        cp = critical_beta(params)
        if cp.status != FINITE:
            raise DomainError("beta", f"no finite critical temperature (status {cp.status})")
        return cp.beta_c
    beta = parse_beta(beta)
    if not is_zero_t(beta) and not (beta > 0 and math.isfinite(beta)):
        raise DomainError("beta", f"beta must be > 0, got {beta}")
    return beta


def excitation_residual(E: float, params: ModelParams, beta=None) -> float:
    """Right-hand side minus 1 of the continued excitation equation.

    ``beta`` defaults to ``params.beta``; the string "critical" selects beta_c.
    Raises PoleProximity within 1e-8 max(Omega, omega0) of +-Omega or +-omega0.
    """
    beta = _resolve_beta(params, beta)
    r = _pole_radius(params)
    for pole in (params.omega_big, params.omega0):
        if abs(abs(E) - pole) < r:
            raise PoleProximity(f"E={E!r} is within {r:.3g} of the pole at {pole!r}")
    return float(_residual(E, params, _tanh_at(params, beta)))


def _zero_root_order(params, t, h):
    """Order of vanishing of the (even) residual at E = 0: 2 normally, 4 when E2 merges with 0."""
    r1 = float(_residual(h, params, t))
    r2 = float(_residual(2 * h, params, t))
    if r1 == 0.0:
        return 4
    ratio = r2 / r1
    return 4 if abs(ratio - 16.0) < abs(ratio - 4.0) else 2


def solve_spectrum(params: ModelParams, beta=None, e_max: float | None = None, grid_n: int = 2000,
                   rtol: float = 1e-12, residual_tol: float = RESIDUAL_TOL) -> SpectrumResult:
    """Real non-negative roots of the excitation equation on [0, e_max].

    Scans ``grid_n`` cells, skips cells touching a pole exclusion zone,
    brackets sign changes and bisects each to adjacent floats, keeping only
    endpoints with |residual| < residual_tol. E = 0 is tested
    directly, since the residual is even in E and only touches zero there.
    An empty root list is a valid answer.
    """
    beta = _resolve_beta(params, beta)
    t = _tanh_at(params, beta)
    if e_max is None:
        e_max = 3.0 * (params.omega_big + params.omega0)
    if not (e_max > 0):
        raise DomainError("e_max", "e_max must be > 0")
    if grid_n < 2:
        raise DomainError("grid_n", "grid_n must be >= 2")

    radius = _pole_radius(params)
    poles = sorted({params.omega_big, params.omega0})
    base = np.linspace(0.0, e_max, grid_n + 1)
    cuts = [x for pole in poles for x in (pole - radius, pole + radius) if 0.0 < x < e_max]
    grid = np.unique(np.concatenate([base, cuts]))
    lo, hi = grid[:-1], grid[1:]
    # a segment is dropped when it overlaps an exclusion zone around a pole
    excluded = np.zeros(lo.size, dtype=bool)
    touched = np.zeros(grid_n, dtype=bool)
    for pole in poles:
        excluded |= (lo < pole + radius) & (hi > pole - radius)
        touched |= (base[:-1] < pole + radius) & (base[1:] > pole - radius)
    if touched.mean() > 0.10:
        raise PoleDense(f"{touched.sum()} of {grid_n} cells lie next to a pole")

    values = np.full(grid.size, np.nan)
    usable = np.zeros(grid.size, dtype=bool)
    usable[:-1] |= ~excluded
    usable[1:] |= ~excluded
    with np.errstate(divide="ignore", invalid="ignore"):
        values[usable] = _residual(grid[usable], params, t)

    step = e_max / grid_n
    roots = []
    r0 = values[0] if usable[0] else float(_residual(0.0, params, t))
    if abs(r0) < residual_tol:
        order = _zero_root_order(params, t, min(step, 1e-3 * min(poles)))
        roots.append(Root(0.0, float(r0), (-step, step), order))

    for i in np.flatnonzero(~excluded):
        a, b = grid[i], grid[i + 1]
        fa, fb = values[i], values[i + 1]
        if i == 0 and roots:
            continue
        if fb == 0.0:
            roots.append(Root(float(b), 0.0, (float(a), float(b) + step)))
            continue
        if fa == 0.0 or not (fa * fb < 0):
            continue
        a0, b0 = a, b
        # bisect down to adjacent floats; rtol only bounds the reported bracket
        while True:
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            fm = float(_residual(m, params, t))
            if fm == 0.0:
                a = b = m
                fa = fb = 0.0
                break
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b, fb = m, fm
        E, res = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
        if not abs(res) < residual_tol:
            continue
        width = max(rtol * abs(E), b - a)
        lo_b, hi_b = max(a0, E - width), min(b0, E + width)
        if not (lo_b < E < hi_b):
            lo_b, hi_b = E - width, E + width
        roots.append(Root(float(E), float(res), (float(lo_b), float(hi_b))))

    roots.sort(key=lambda r: r.E)
    deduped = []
    for r in roots:
        if deduped and r.E - deduped[-1].E <= 10 * rtol * max(1.0, r.E):
            continue
        deduped.append(r)

    return SpectrumResult(
        roots=deduped,
        poles_excluded={"poles": poles, "radius": radius},
        search_window=(0.0, float(e_max)),
        beta=beta,
        metadata={"grid_n": grid_n, "excluded_segments": int(excluded.sum())},
    )


def e2_closed_form(params: ModelParams) -> float:
    """Gapped root at the critical temperature."""
    s = params.g1 + params.g2
    if s <= 0:
        raise DomainError("g1+g2", "e2_closed_form needs g1 + g2 > 0")
    W, w0 = params.omega_big, params.omega0
    return math.sqrt((params.g1 * (W + w0) ** 2 + params.g2 * (W - w0) ** 2) / s)
