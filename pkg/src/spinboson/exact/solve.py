"""Eigensolvers, thermal traces and the finite-N sigma-z closed form."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import gammaln, logsumexp

from ..analytic.sigma_z import free_lnz, lnz_shift_sigma_z
from ..errors import ConvergenceFailure, DimensionOverflow, DomainError, NonHermitianOrdering, TruncationUnconverged
from ..model import Family, ModelKind, ModelParams, ThermoReport, require_finite_beta, validate_params
from .hamiltonian import MAX_DENSE_DIM, BasisSpec, OperatorMatrix, build_hamiltonian

RESIDUAL_RTOL = 1e-9
TRUNCATION_TOL = 1e-6
#: below this dimension the ground-state path also uses the dense solver
SPARSE_MIN_DIM = 600


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degeneracies: np.ndarray
    number_diag: np.ndarray
    max_residual: float
    method: str


def _op_norm(matrix) -> float:
    if sp.issparse(matrix):
        return float(abs(matrix).sum(axis=1).max()) if matrix.nnz else 0.0
    return float(np.abs(matrix).sum(axis=1).max()) if matrix.size else 0.0


def _residuals(matrix, vals, vecs):
    r = matrix @ vecs - vecs * vals
    return np.linalg.norm(r, axis=0)


def _dense_eigh(matrix):
    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
    if dense.shape[0] > MAX_DENSE_DIM:
        raise DimensionOverflow(f"dense path limited to dimension {MAX_DENSE_DIM}, got {dense.shape[0]}")
    return scipy.linalg.eigh(dense)


def _sparse_lowest(matrix, k, maxiter):
    v0 = np.ones(matrix.shape[0]) / math.sqrt(matrix.shape[0])
    try:
        vals, vecs = spla.eigsh(matrix, k=k, which="SA", v0=v0, maxiter=maxiter, tol=0)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(
            f"Lanczos did not converge: {len(exc.eigenvalues)} of {k} pairs after maxiter={maxiter}"
        ) from exc
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def diagonalize(h: OperatorMatrix, k: int | None = None, maxiter: int | None = None) -> Spectrum:
    """Eigenpairs in ascending order.

    ``k=None`` gives the full spectrum (dense, block by block when ``h`` is
    block diagonal). An integer ``k`` asks for the lowest k pairs, through
    Lanczos once the dimension exceeds SPARSE_MIN_DIM.
    """
    if not h.hermitian:
        raise NonHermitianOrdering("matrix is not symmetric; refusing to diagonalize")
    matrix = h.matrix
    norm = _op_norm(matrix)
    numbers = h.number_diag()
    dim = h.dimension

    if k is not None and (k < 1 or k > dim):
        raise DomainError("k", f"k must be in [1, {dim}], got {k}")

    if k is not None and dim > SPARSE_MIN_DIM and k < dim - 1:
        vals, vecs = _sparse_lowest(matrix, k, maxiter)
        degen = np.ones_like(vals)
        method = "lanczos"
    elif h.blocks:
        parts_v, parts_d, parts_x = [], [], []
        for sl, deg in h.blocks:
            bv, bx = _dense_eigh(matrix[sl, sl])
            full = np.zeros((dim, bx.shape[1]))
            full[sl] = bx
            parts_v.append(bv)
            parts_x.append(full)
            parts_d.append(np.full(bv.size, float(deg)))
        vals = np.concatenate(parts_v)
        vecs = np.hstack(parts_x)
        degen = np.concatenate(parts_d)
        order = np.argsort(vals, kind="stable")
        vals, vecs, degen = vals[order], vecs[:, order], degen[order]
        method = "dense_blocks"
    else:
        vals, vecs = _dense_eigh(matrix)
        degen = np.ones_like(vals)
        method = "dense"
    if k is not None:
        vals, vecs, degen = vals[:k], vecs[:, :k], degen[:k]

    res = _residuals(matrix, vals, vecs)
    worst = float(res.max()) if res.size else 0.0
    if worst >= RESIDUAL_RTOL * max(norm, 1.0):
        raise ConvergenceFailure(f"eigenpair residual {worst:.3e} exceeds {RESIDUAL_RTOL:g} * |H| = {norm:.3e}")
    number_exp = np.einsum("ij,i,ij->j", vecs, numbers, vecs)
    return Spectrum(vals, vecs, degen, number_exp, worst, method)


def thermal_report(eigs, beta: float, number_operator_diag, n_atoms: int, degeneracies=None,
                   metadata: dict | None = None) -> ThermoReport:
    """Canonical averages over a finite spectrum.

    ``number_operator_diag`` holds <i|b+b|i> per eigenstate and ``degeneracies``
    optional integer weights. ln Z is a shifted log-sum-exp.
    """
    if not (isinstance(beta, (int, float)) and beta > 0 and math.isfinite(beta)):
        raise DomainError("beta", f"thermal traces need a finite beta > 0, got {beta!r}")
    e = np.asarray(eigs, dtype=float)
    nd = np.asarray(number_operator_diag, dtype=float)
    w = np.ones_like(e) if degeneracies is None else np.asarray(degeneracies, dtype=float)
    logw = np.log(w) - beta * e
    ln_z = float(logsumexp(logw))
    log_p = logw - ln_z
    p = np.exp(log_p)
    energy = float(np.dot(p, e))
    # Gibbs form -sum p ln(p/w) avoids the ln Z + beta E cancellation
    nz = p > 0
    entropy = float(-np.dot(p[nz], log_p[nz] - np.log(w[nz])))
    order = float(np.dot(p, nd)) / n_atoms
    return ThermoReport(
        ln_z_ratio=None,
        ln_z_total=ln_z,
        mean_energy=energy,
        entropy=max(entropy, 0.0) if entropy > -1e-12 else entropy,
        order_parameter=max(order, 0.0),
        source="oracle",
        truncation_metadata=dict(metadata or {}),
    )


def default_spin_rep(kind: ModelKind) -> str:
    return "sigma_z_blocks" if kind.family is Family.SIGMA_Z else "dicke"


def _thermal_at(kind, params, n_max, spin_rep, ordering):
    basis = BasisSpec(n_max, params.n_atoms, spin_rep)
    h = build_hamiltonian(kind, params, basis, ordering)
    spec = diagonalize(h)
    return spec, h


def exact_thermo(kind: ModelKind, params: ModelParams, n_max: int, spin_rep: str | None = None,
                 ordering: str = "buck_sukumar", check: bool = True) -> ThermoReport:
    """Oracle thermodynamics with the n_max -> n_max + 10 sensitivity attached.

    Raises TruncationUnconverged when ln Z moves by more than 1e-6.
    """
    params = validate_params(kind, params)
    beta = require_finite_beta(params, "exact_thermo")
    if ordering != "buck_sukumar":
        raise NonHermitianOrdering("thermal quantities are refused for the as-printed ordering")
    spin_rep = spin_rep or default_spin_rep(kind)
    spec, h = _thermal_at(kind, params, n_max, spin_rep, ordering)
    meta = {"n_max": n_max, "spin_rep": spin_rep, "dimension": h.dimension, "method": spec.method,
            "max_residual": spec.max_residual}
    report = thermal_report(spec.eigenvalues, beta, spec.number_diag, params.n_atoms, spec.degeneracies, meta)
    if check:
        spec2, _ = _thermal_at(kind, params, n_max + 10, spin_rep, ordering)
        ref = thermal_report(spec2.eigenvalues, beta, spec2.number_diag, params.n_atoms, spec2.degeneracies)
        delta = abs(ref.ln_z_total - report.ln_z_total)
        report.truncation_metadata["n_max_delta"] = delta
        report.truncation_metadata["converged"] = delta <= TRUNCATION_TOL
        if delta > TRUNCATION_TOL:
            raise TruncationUnconverged(
                f"ln Z changes by {delta:.3e} between n_max={n_max} and {n_max + 10}", delta=delta
            )
    report.ln_z_ratio = report.ln_z_total - free_lnz(params)
    return report


def sigma_z_analytic_finite_n(params: ModelParams, n_max_unused=None) -> ThermoReport:
    """Displaced-oscillator closed form of the sigma-z model at finite N.

    Z_N = (1 - e^{-beta w0})^-1 sum_j C(N,j) exp(-beta[(Omega/2) k - g^2 k^2 / (N^2 w0)]), k = 2j - N.
    E and S follow from the beta derivative of the same sum.
    """
    beta = require_finite_beta(params, "sigma_z_analytic_finite_n")
    N = params.n_atoms
    j = np.arange(N + 1)
    k = 2.0 * j - N
    eps = params.omega_big / 2.0 * k - params.g**2 * k * k / (N * N * params.omega0)
    logc = gammaln(N + 1) - gammaln(j + 1) - gammaln(N - j + 1)
    logw = logc - beta * eps
    ln_spin = float(logsumexp(logw))
    p = np.exp(logw - ln_spin)
    e_spin = float(np.dot(p, eps))
    y = beta * params.omega0
    ln_boson = -math.log1p(-math.exp(-y))
    e_boson = params.omega0 / math.expm1(y)
    s_boson = ln_boson + y / math.expm1(y)
    nz = p > 0
    s_spin = float(-np.dot(p[nz], np.log(p[nz]) - logc[nz]))
    ln_z = ln_boson + ln_spin
    return ThermoReport(
        ln_z_ratio=ln_z - free_lnz(params),
        ln_z_total=ln_z,
        mean_energy=e_boson + e_spin,
        entropy=s_boson + s_spin,
        order_parameter=None,
        source="analytic",
        truncation_metadata={"finite_n": N},
    )


def sigma_z_large_n_report(params: ModelParams, n_values=(1, 2, 4, 8, 16, 32, 64, 128, 256, 1024)) -> dict:
    """Finite-N ln Z shift next to the thermodynamic-limit shift with tanh(beta Omega/4) and tanh(beta Omega/2).

    Returned for inspection; nothing is asserted about which limit is reached.
    """
    beta = require_finite_beta(params, "sigma_z_large_n_report")
    rows = []
    for N in n_values:
        rep = sigma_z_analytic_finite_n(params.replace(n_atoms=int(N)))
        rows.append({"N": int(N), "ln_z_shift": rep.ln_z_ratio})
    quarter = lnz_shift_sigma_z(params)
    half = params.g**2 * beta / params.omega0 * math.tanh(beta * params.omega_big / 2.0) ** 2
    last = rows[-1]["ln_z_shift"]
    return {
        "params": params.to_dict(),
        "rows": rows,
        "limit_tanh_quarter": quarter,
        "limit_tanh_half": half,
        "distance_to_quarter": abs(last - quarter),
        "distance_to_half": abs(last - half),
    }
