import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from spinboson.analytic.sigma_z import free_lnz, lnz_shift_sigma_z
from spinboson.errors import ConvergenceFailure, DimensionOverflow, DomainError, NonHermitianOrdering, TruncationUnconverged
from spinboson.exact import (AS_PRINTED, BasisSpec, build_hamiltonian, diagonalize, exact_thermo, ground_state,
                             order_parameter_sweep, sigma_z_analytic_finite_n, sigma_z_large_n_report, thermal_report)
from spinboson.model import ModelKind, ModelParams

DICKE = ModelKind.dicke()
SZ = ModelKind.sigma_z()
INT = ModelKind.intensity()


def test_basis_dims():
    assert BasisSpec(4, 3).total_dim == 5 * 4
    assert BasisSpec(4, 3, "product").total_dim == 5 * 8
    with pytest.raises(DomainError):
        BasisSpec(-1)
    with pytest.raises(DomainError):
        BasisSpec(2, 1, "holstein")
    with pytest.raises(DimensionOverflow):
        BasisSpec(2, 13, "product")


def test_jc_block_example():
    h = build_hamiltonian(DICKE, ModelParams(1, 1, g1=0.1), BasisSpec(1, 1))
    np.testing.assert_allclose(h.dense()[1:3, 1:3], [[0.5, 0.1], [0.1, 0.5]])
    np.testing.assert_allclose(diagonalize(h).eigenvalues, [-0.5, 0.4, 0.6, 1.5], atol=1e-14)


@pytest.mark.parametrize("kind", [SZ, DICKE, INT])
def test_free_hamiltonian_diagonal(kind):
    basis = BasisSpec(5, 3)
    h = build_hamiltonian(kind, ModelParams(1.3, 0.7, n_atoms=3), basis)
    d = h.dense()
    assert np.count_nonzero(d - np.diag(np.diag(d))) == 0
    expected = 0.7 * basis.boson_numbers() + 1.3 * basis.magnetizations()
    np.testing.assert_allclose(np.sort(np.diag(d)), np.sort(expected))
    np.testing.assert_allclose(diagonalize(h).eigenvalues, np.sort(expected), atol=1e-12)


def test_intensity_element():
    h = build_hamiltonian(INT, ModelParams(1, 1, g1=1.0), BasisSpec(4, 1))
    d = h.dense()
    up, down = 1, 0
    assert d[2 * 2 + up, 3 * 2 + down] == 3.0
    # the same element from explicit operator products b sqrt(b+b)
    b = np.diag(np.sqrt(np.arange(1, 5)), 1)
    op = b @ np.diag(np.sqrt(np.arange(5)))
    assert op[2, 3] == pytest.approx(3.0)
    assert h.hermitian


def test_intensity_as_printed_is_flagged():
    h = build_hamiltonian(INT, ModelParams(1, 1, g1=1.0), BasisSpec(4, 1), ordering=AS_PRINTED)
    assert not h.hermitian
    with pytest.raises(NonHermitianOrdering):
        diagonalize(h)
    with pytest.raises(NonHermitianOrdering):
        exact_thermo(INT, ModelParams(1, 1, g1=1.0), 4, ordering=AS_PRINTED)


@settings(max_examples=25)
@given(st.sampled_from(["sz", "dicke", "int"]), st.floats(0.2, 2), st.floats(0.2, 2), st.floats(0, 1.5),
       st.floats(0, 1.5), st.integers(1, 5), st.integers(0, 8))
def test_symmetric_and_parity(which, w, w0, g1, g2, n, n_max):
    kind = {"sz": SZ, "dicke": DICKE, "int": INT}[which]
    p = ModelParams(w, w0, g1=g1, g2=g2, g=g1, n_atoms=n)
    h = build_hamiltonian(kind, p, BasisSpec(n_max, n))
    d = h.dense()
    assert np.max(np.abs(d - d.T), initial=0.0) < 1e-12
    if kind is not SZ:
        par = h.parities()
        mixed = par[:, None] != par[None, :]
        assert np.max(np.abs(d[mixed]), initial=0.0) < 1e-12


@pytest.mark.parametrize("family, n", [("dicke", 2), ("dicke", 3), ("sigma_z", 3)])
def test_collective_vs_product_basis(family, n):
    kind = DICKE if family == "dicke" else SZ
    p = ModelParams(1.1, 0.9, g1=0.6, g2=0.3, g=0.8, n_atoms=n)
    ref = oracles.product_basis_hamiltonian(family, 1.1, 0.9, 0.6, 0.3, 0.8, n, 6)
    prod = build_hamiltonian(kind, p, BasisSpec(6, n, "product")).dense()
    np.testing.assert_allclose(prod, ref, atol=1e-13)
    ev_ref = np.linalg.eigvalsh(ref)
    ev_col = diagonalize(build_hamiltonian(kind, p, BasisSpec(6, n))).eigenvalues
    # the symmetric sector is a subset of the full spectrum
    for e in ev_col:
        assert np.min(np.abs(ev_ref - e)) < 1e-10


def test_sigma_z_blocks_vs_product_thermal():
    p = ModelParams(1.0, 1.0, g=0.8, n_atoms=3, beta=1.5)
    blocks = exact_thermo(SZ, p, 50, spin_rep="sigma_z_blocks")
    prod = exact_thermo(SZ, p, 50, spin_rep="product")
    assert blocks.ln_z_total == pytest.approx(prod.ln_z_total, abs=1e-11)
    assert blocks.entropy == pytest.approx(prod.entropy, abs=1e-10)


def test_jaynes_cummings_blocks():
    n_max = 21
    for w, w0, g in ((1.0, 1.0, 0.3), (1.4, 0.9, 0.7)):
        h = build_hamiltonian(DICKE, ModelParams(w, w0, g1=g), BasisSpec(n_max, 1))
        ev = diagonalize(h).eigenvalues
        np.testing.assert_allclose(ev, oracles.jc_levels(w, w0, g, n_max), atol=1e-10)
        for n in range(0, 21):
            lo, hi = oracles.jc_closed(w, w0, g, n)
            assert np.min(np.abs(ev - lo)) < 1e-10 and np.min(np.abs(ev - hi)) < 1e-10


def test_diagonalize_deterministic():
    h = build_hamiltonian(DICKE, ModelParams(1, 1, g1=0.4, g2=0.3, n_atoms=4), BasisSpec(12, 4))
    a, b = diagonalize(h).eigenvalues, diagonalize(h).eigenvalues
    np.testing.assert_allclose(a, b, atol=1e-12, rtol=0)


def test_sparse_ground_state_matches_dense():
    h = build_hamiltonian(DICKE, ModelParams(1, 1, g1=0.6, g2=0.6, n_atoms=10), BasisSpec(70, 10))
    assert h.dimension > 600
    sparse = diagonalize(h, k=1)
    dense = diagonalize(h)
    assert sparse.method == "lanczos"
    assert sparse.eigenvalues[0] == pytest.approx(dense.eigenvalues[0], abs=1e-9)


def test_dense_cap():
    h = build_hamiltonian(DICKE, ModelParams(n_atoms=40), BasisSpec(120, 40))
    with pytest.raises(DimensionOverflow):
        diagonalize(h)
    with pytest.raises(DimensionOverflow):
        build_hamiltonian(DICKE, ModelParams(n_atoms=40), BasisSpec(120, 40), max_dim=1000)


def test_variational_monotone_in_n_max():
    p = ModelParams(1, 1, g1=0.7, g2=0.7, n_atoms=4)
    e = [ground_state(DICKE, p, BasisSpec(m, 4))[0] for m in (2, 4, 8, 16, 32)]
    assert all(a >= b - 1e-12 for a, b in zip(e, e[1:]))


def test_thermal_free_model():
    p = ModelParams(1.0, 1.0, beta=1.0)
    rep = exact_thermo(DICKE, p, 40)
    assert rep.ln_z_total == pytest.approx(free_lnz(p), abs=1e-10)
    assert rep.source == "oracle"
    assert rep.truncation_metadata["converged"]


def test_thermal_report_ground_state_limit():
    h = build_hamiltonian(DICKE, ModelParams(1, 1, g1=0.9, g2=0.9, n_atoms=2), BasisSpec(30, 2))
    spec = diagonalize(h)
    rep = thermal_report(spec.eigenvalues, 500.0, spec.number_diag, 2)
    assert rep.order_parameter == pytest.approx(spec.number_diag[0] / 2, rel=1e-9)
    assert rep.entropy >= 0


def test_truncation_unconverged():
    with pytest.raises(TruncationUnconverged) as exc:
        exact_thermo(SZ, ModelParams(1, 1, g=1.0, beta=0.05), 5)
    assert exc.value.delta > 1e-6


@settings(max_examples=15)
@given(st.floats(0.1, 10), st.floats(0, 1.2), st.integers(1, 4))
def test_oracle_entropy_non_negative(beta, g, n):
    rep = exact_thermo(DICKE, ModelParams(1, 1, g1=g, g2=g / 2, n_atoms=n, beta=beta), 30, check=False)
    assert rep.entropy >= -1e-10
    assert rep.order_parameter >= 0


def test_sigma_z_finite_n_examples():
    assert sigma_z_analytic_finite_n(ModelParams(g=0.0, n_atoms=3, beta=0.7)).ln_z_total == pytest.approx(
        free_lnz(ModelParams(n_atoms=3, beta=0.7)), rel=1e-14)
    rep = sigma_z_analytic_finite_n(ModelParams(1, 1, g=1.0, n_atoms=1, beta=1.0))
    expected = -math.log1p(-math.exp(-1)) + math.log(math.exp(0.5) + math.exp(1.5))
    assert rep.ln_z_total == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("beta", [0.5, 3.0])
def test_sigma_z_finite_n_against_mp(n, beta):
    rep = sigma_z_analytic_finite_n(ModelParams(1.2, 0.8, g=0.9, n_atoms=n, beta=beta))
    assert rep.ln_z_total == pytest.approx(float(oracles.sigma_z_lnz(1.2, 0.8, 0.9, n, beta)), rel=1e-13)
    # energy and entropy from the same sum
    h = 1e-5
    f = lambda b: sigma_z_analytic_finite_n(ModelParams(1.2, 0.8, g=0.9, n_atoms=n, beta=b)).ln_z_total
    assert rep.mean_energy == pytest.approx(-(f(beta + h) - f(beta - h)) / (2 * h), abs=1e-7)
    assert rep.entropy == pytest.approx(rep.ln_z_total + beta * rep.mean_energy, abs=1e-12)


def test_large_n_report_is_informational():
    rep = sigma_z_large_n_report(ModelParams(1, 1, g=0.5, beta=2.0), n_values=(1, 10, 100, 1000))
    assert len(rep["rows"]) == 4
    assert rep["limit_tanh_quarter"] == pytest.approx(lnz_shift_sigma_z(ModelParams(1, 1, g=0.5, beta=2.0)))
    assert rep["limit_tanh_half"] > rep["limit_tanh_quarter"]


def test_order_parameter_zero_coupling():
    res = order_parameter_sweep(DICKE, ModelParams(), np.zeros(3) + [0, 1e-12, 2e-12], BasisSpec(10, 4), "g1=g2")
    assert np.all(res.order_parameter < 1e-20)


def test_order_parameter_sweep_validation():
    with pytest.raises(DomainError):
        order_parameter_sweep(DICKE, ModelParams(), [0.1, 0.2], BasisSpec(10, 2))
    with pytest.raises(DomainError):
        order_parameter_sweep(DICKE, ModelParams(), [0.1, 0.3, 0.2], BasisSpec(10, 2))
    with pytest.raises(DomainError):
        order_parameter_sweep(DICKE, ModelParams(), [0.1, 0.2, 0.3], BasisSpec(10, 2), coupling="lambda")


def test_order_parameter_strict_truncation():
    with pytest.raises(TruncationUnconverged):
        order_parameter_sweep(DICKE, ModelParams(n_atoms=4), [0.8, 0.9, 1.0], BasisSpec(3, 4), strict=True)
    res = order_parameter_sweep(DICKE, ModelParams(n_atoms=4), [0.8, 0.9, 1.0], BasisSpec(3, 4))
    assert not res.converged.any()
