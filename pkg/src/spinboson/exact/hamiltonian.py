"""Truncated Fock space times spin space Hamiltonians.

Collective basis index: n * (N + 1) + (m + N/2), with boson number n in
[0, n_max] and m in [-N/2, N/2]. All three models are real-symmetric there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionOverflow, DomainError, NonHermitianOrdering
from ..model import Family, ModelKind, ModelParams, validate_params

DICKE = "dicke"
PRODUCT = "product"
SIGMA_Z_BLOCKS = "sigma_z_blocks"

BUCK_SUKUMAR = "buck_sukumar"
AS_PRINTED = "as_printed"

MAX_TOTAL_DIM = 200_000
MAX_DENSE_DIM = 4_000
MAX_PRODUCT_ATOMS = 12
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class BasisSpec:
    n_max: int
    n_atoms: int = 1
    spin_rep: str = DICKE

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise DomainError("n_max", f"n_max must be a non-negative integer, got {self.n_max}")
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise DomainError("n_atoms", f"n_atoms must be a positive integer, got {self.n_atoms}")
        if self.spin_rep not in (DICKE, PRODUCT, SIGMA_Z_BLOCKS):
            raise DomainError("spin_rep", f"unknown spin representation {self.spin_rep!r}")
        if self.spin_rep == PRODUCT and self.n_atoms > MAX_PRODUCT_ATOMS:
            raise DimensionOverflow(f"product basis limited to N <= {MAX_PRODUCT_ATOMS}, got {self.n_atoms}")

    @property
    def spin_dim(self) -> int:
        if self.spin_rep == PRODUCT:
            return 2**self.n_atoms
        return self.n_atoms + 1

    @property
    def total_dim(self) -> int:
        return (self.n_max + 1) * self.spin_dim

    def boson_numbers(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_max + 1), self.spin_dim).astype(float)

    def magnetizations(self) -> np.ndarray:
        """J_z eigenvalue of each basis state."""
        if self.spin_rep == PRODUCT:
            bits = (np.arange(self.spin_dim)[:, None] >> np.arange(self.n_atoms)) & 1
            mz = bits.sum(axis=1) - self.n_atoms / 2.0
        else:
            mz = np.arange(self.spin_dim) - self.n_atoms / 2.0
        return np.tile(mz, self.n_max + 1)


@dataclass
class OperatorMatrix:
    """Real matrix on ``basis``; ``blocks`` lists (slice, degeneracy) sectors when block diagonal."""

    matrix: object
    basis: BasisSpec
    kind: ModelKind
    ordering: str = BUCK_SUKUMAR
    blocks: list = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def hermitian(self) -> bool:
        return asymmetry(self.matrix) < HERMITIAN_TOL

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if sp.issparse(self.matrix) else np.asarray(self.matrix)

    def number_diag(self) -> np.ndarray:
        """b+b on each basis state, in this matrix's ordering."""
        if self.blocks:
            return sigma_z_block_numbers(self.basis)
        return self.basis.boson_numbers()

    def parities(self) -> np.ndarray:
        """Parity of n + m + N/2 per basis state (collective basis only)."""
        n = self.basis.boson_numbers()
        mm = self.basis.magnetizations() + self.basis.n_atoms / 2.0
        return (np.rint(n + mm).astype(int)) % 2


def asymmetry(matrix) -> float:
    d = matrix - matrix.T
    if sp.issparse(d):
        return float(abs(d).max()) if d.nnz else 0.0
    return float(np.max(np.abs(d))) if d.size else 0.0


def _ladder(n_max):
    """b in the truncated Fock basis: <n-1|b|n> = sqrt(n)."""
    return sp.diags(np.sqrt(np.arange(1, n_max + 1)), 1, format="csr")


def _collective_jplus(n_atoms):
    j = n_atoms / 2.0
    m = np.arange(n_atoms) - j
    return sp.diags(np.sqrt(j * (j + 1) - m * (m + 1)), -1, format="csr")


def _product_ops(n_atoms):
    """Collective J+ and J_z on the 2^N product space (bit i set = atom i up)."""
    dim = 2**n_atoms
    states = np.arange(dim)
    rows, cols = [], []
    for i in range(n_atoms):
        down = states[(states >> i) & 1 == 0]
        rows.append(down | (1 << i))
        cols.append(down)
    rows = np.concatenate(rows) if rows else np.array([], int)
    cols = np.concatenate(cols) if cols else np.array([], int)
    jp = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(dim, dim))
    bits = (states[:, None] >> np.arange(n_atoms)) & 1
    jz = sp.diags(bits.sum(axis=1) - n_atoms / 2.0, format="csr")
    return jp, jz


def _intensity_pair(n_max, ordering):
    """(lowering, raising) boson factors of the intensity-dependent rotating term."""
    n = np.arange(1, n_max + 1, dtype=float)
    lower = sp.diags(n, 1, format="csr")                      # b sqrt(b+b): |n> -> n |n-1>
    if ordering == BUCK_SUKUMAR:
        raise_ = sp.diags(n, -1, format="csr")                # sqrt(b+b) b+: |n-1> -> n |n>
    else:
        raise_ = sp.diags(np.sqrt(n * (n - 1)), -1, format="csr")  # b+ sqrt(b+b): |n-1> -> sqrt(n(n-1)) |n>
    return lower, raise_


def build_hamiltonian(kind: ModelKind, params: ModelParams, basis: BasisSpec, ordering: str = BUCK_SUKUMAR,
                      max_dim: int = MAX_TOTAL_DIM) -> OperatorMatrix:
    """Hamiltonian of ``kind`` in ``basis`` (sparse CSR).

    sigma_z:      w0 b+b + Omega J_z + (g/N)(b + b+) 2 J_z
    dicke:        w0 b+b + Omega J_z + N^-1/2 [g1 (b J+ + b+ J-) + g2 (b+ J+ + b J-)]
    intensity:    as dicke with b -> b sqrt(b+b), b+ -> sqrt(b+b) b+ in the g1 terms

    ``ordering="as_printed"`` uses b+ sqrt(b+b) for the raising factor; the
    result is not symmetric and is only meant for inspection.
    """
    params = validate_params(kind, params)
    if params.n_atoms != basis.n_atoms:
        raise DomainError("n_atoms", f"params has N={params.n_atoms} but basis has N={basis.n_atoms}")
    if ordering not in (BUCK_SUKUMAR, AS_PRINTED):
        raise DomainError("ordering", f"unknown ordering {ordering!r}")
    if basis.total_dim > max_dim:
        raise DimensionOverflow(f"total dimension {basis.total_dim} exceeds cap {max_dim}")
    if basis.spin_rep == SIGMA_Z_BLOCKS and kind.family is not Family.SIGMA_Z:
        raise DomainError("spin_rep", "sigma_z_blocks only applies to the sigma-z model")

    N = basis.n_atoms
    nb = basis.n_max + 1
    b = _ladder(basis.n_max)
    num = sp.diags(np.arange(nb, dtype=float), format="csr")
    eye_b = sp.identity(nb, format="csr")
    if basis.spin_rep == PRODUCT:
        jp, jz = _product_ops(N)
    else:
        jp = _collective_jplus(N)
        jz = sp.diags(np.arange(N + 1) - N / 2.0, format="csr")
    jm = jp.T.tocsr()
    eye_s = sp.identity(jp.shape[0], format="csr")

    h = params.omega0 * sp.kron(num, eye_s) + params.omega_big * sp.kron(eye_b, jz)
    fam = kind.family
    if fam is Family.SIGMA_Z:
        if params.g:
            h = h + (params.g / N) * sp.kron(b + b.T, 2.0 * jz)
    else:
        scale = 1.0 / math.sqrt(N)
        if fam is Family.INTENSITY_DEPENDENT:
            lower, raise_ = _intensity_pair(basis.n_max, ordering)
        else:
            lower, raise_ = b, b.T
        if params.g1:
            h = h + scale * params.g1 * (sp.kron(lower, jp) + sp.kron(raise_, jm))
        if params.g2:
            h = h + scale * params.g2 * (sp.kron(b.T, jp) + sp.kron(b, jm))
    h = h.tocsr()
    h.eliminate_zeros()

    blocks = []
    if basis.spin_rep == SIGMA_Z_BLOCKS:
        # reorder so each J_z sector is contiguous
        perm = np.arange(basis.total_dim).reshape(nb, N + 1).T.ravel()
        h = h[perm][:, perm].tocsr()
        for mm in range(N + 1):
            blocks.append((slice(mm * nb, (mm + 1) * nb), math.comb(N, mm)))
    out = OperatorMatrix(h, basis, kind, ordering, blocks)
    if ordering == BUCK_SUKUMAR and not out.hermitian:
        raise NonHermitianOrdering(f"built matrix is not symmetric (max |H - H^T| = {asymmetry(h):.3e})")
    return out


def sigma_z_block_numbers(basis: BasisSpec) -> np.ndarray:
    """Boson number per state in the sector-contiguous sigma_z_blocks ordering."""
    return np.tile(np.arange(basis.n_max + 1, dtype=float), basis.n_atoms + 1)
