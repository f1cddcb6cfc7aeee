"""Ground-state order parameter sweeps at finite N."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, TruncationUnconverged
from ..model import Family, ModelKind, ModelParams, validate_params
from .hamiltonian import DICKE, BasisSpec, build_hamiltonian
from .solve import diagonalize

#: tolerance on <b+b>/N between n_max and n_max + 10
ORDER_TOL = 1e-6

COUPLINGS = ("g", "g1", "g2", "g1=g2")


def default_coupling(kind: ModelKind) -> str:
    if kind.family is Family.SIGMA_Z:
        return "g"
    if kind.family is Family.INTENSITY_DEPENDENT:
        return "g2"
    return "g1=g2"


def _with_coupling(params: ModelParams, coupling: str, value: float) -> ModelParams:
    if coupling == "g1=g2":
        return params.replace(g1=value, g2=value)
    return params.replace(**{coupling: value})


def ground_state(kind: ModelKind, params: ModelParams, basis: BasisSpec):
    """(E0, <b+b>/N) of the lowest eigenstate."""
    h = build_hamiltonian(kind, params, basis)
    spec = diagonalize(h, k=1)
    return float(spec.eigenvalues[0]), float(max(spec.number_diag[0], 0.0)) / basis.n_atoms


@dataclass
class OrderSweep:
    couplings: np.ndarray
    order_parameter: np.ndarray
    susceptibility: np.ndarray
    ground_energy: np.ndarray
    converged: np.ndarray
    deltas: np.ndarray
    argmax: float
    coupling: str
    metadata: dict = field(default_factory=dict)

    def rows(self):
        for i in range(self.couplings.size):
            yield (float(self.couplings[i]), float(self.order_parameter[i]),
                   float(self.susceptibility[i]), bool(self.converged[i]))


def order_parameter_sweep(kind: ModelKind, params_template: ModelParams, coupling_grid, basis: BasisSpec,
                          coupling: str | None = None, check: str = "all", strict: bool = False) -> OrderSweep:
    """Ground-state <b+b>/N across ``coupling_grid`` and its finite-difference slope.

    ``check`` selects where the n_max -> n_max + 10 test runs ("all",
    "extremes" or "none"). Unconverged points are flagged; with ``strict``
    they raise TruncationUnconverged instead.
    """
    coupling = coupling or default_coupling(kind)
    if coupling not in COUPLINGS:
        raise DomainError("coupling", f"unknown coupling {coupling!r}; expected one of {COUPLINGS}")
    if basis.spin_rep != DICKE:
        raise DomainError("spin_rep", "order parameter sweeps use the collective basis")
    if check not in ("all", "extremes", "none"):
        raise DomainError("check", f"unknown check mode {check!r}")
    grid = np.asarray(coupling_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise DomainError("coupling_grid", "need at least 3 coupling values")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("coupling_grid", "coupling grid must be strictly increasing")
    template = params_template.replace(n_atoms=basis.n_atoms)
    bigger = BasisSpec(basis.n_max + 10, basis.n_atoms, basis.spin_rep)

    n = grid.size
    order = np.empty(n)
    energy = np.empty(n)
    deltas = np.full(n, np.nan)
    converged = np.ones(n, dtype=bool)
    for i, value in enumerate(grid):
        p = validate_params(kind, _with_coupling(template, coupling, float(value)))
        energy[i], order[i] = ground_state(kind, p, basis)
        if check == "all" or (check == "extremes" and i in (0, n - 1)):
            _, ref = ground_state(kind, p, bigger)
            deltas[i] = abs(ref - order[i])
            converged[i] = deltas[i] <= ORDER_TOL
            if strict and not converged[i]:
                raise TruncationUnconverged(
                    f"<b+b>/N moves by {deltas[i]:.3e} at {coupling}={value!r} when n_max -> n_max+10",
                    delta=float(deltas[i]),
                )
    chi = np.gradient(order, grid)
    return OrderSweep(
        couplings=grid,
        order_parameter=order,
        susceptibility=chi,
        ground_energy=energy,
        converged=converged,
        deltas=deltas,
        argmax=float(grid[int(np.argmax(chi))]),
        coupling=coupling,
        metadata={"n_atoms": basis.n_atoms, "n_max": basis.n_max, "check": check},
    )
