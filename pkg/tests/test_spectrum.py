import math

import pytest
from hypothesis import assume, given, strategies as st

import oracles
from spinboson.analytic.dicke import critical_beta
from spinboson.errors import DomainError, PoleDense, PoleProximity
from spinboson.model import ZERO_T, ModelParams
from spinboson.spectrum import e2_closed_form, excitation_residual, solve_spectrum

pos = st.floats(0.2, 3.0)
coup = st.floats(0.0, 2.5)


def test_residual_matches_determinant_oracle():
    p = ModelParams(1.3, 0.7, g1=0.9, g2=0.4, beta=2.0)
    t = math.tanh(0.65)
    for E in (0.1, 0.5, 1.0, 2.5):
        ref = -oracles.excitation_determinant(E, 1.3, 0.7, 0.9, 0.4, t)
        assert excitation_residual(E, p) == pytest.approx(float(ref), rel=1e-11, abs=1e-13)


@given(pos, pos, coup, coup, st.floats(0.0, 5.0))
def test_residual_even(w, w0, g1, g2, E):
    p = ModelParams(w, w0, g1=g1, g2=g2, beta=1.0)
    assume(min(abs(E - w), abs(E - w0)) > 1e-3)
    a, b = excitation_residual(E, p), excitation_residual(-E, p)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_pole_proximity():
    p = ModelParams(1.0, 2.0, g1=1.0)
    with pytest.raises(PoleProximity):
        excitation_residual(1.0 + 1e-10, p)
    with pytest.raises(PoleProximity):
        excitation_residual(-2.0, p)


@pytest.mark.parametrize("w, w0, g1, g2, e2", [
    (1.0, 1.0, 2.0, 0.0, 2.0),
    (1.5, 1.0, 0.0, 1.5, 0.5),
    (1.0, 1.0, 1.0, 1.0, math.sqrt(2.0)),
])
def test_special_cases(w, w0, g1, g2, e2):
    p = ModelParams(w, w0, g1=g1, g2=g2)
    res = solve_spectrum(p, "critical")
    assert res.energies[0] == 0.0
    assert res.roots[0].multiplicity == 2
    assert e2_closed_form(p) == pytest.approx(e2, rel=1e-14)
    assert any(abs(E - e2) <= 1e-8 * e2 for E in res.energies)
    assert all(abs(r.residual) < 1e-9 for r in res.roots)


@given(pos, pos, coup, coup)
def test_roots_at_criticality(w, w0, g1, g2):
    assume((g1 + g2) ** 2 > w * w0 * 1.01)
    p = ModelParams(w, w0, g1=g1, g2=g2)
    res = solve_spectrum(p, "critical", grid_n=800)
    e2 = e2_closed_form(p)
    assume(min(abs(e2 - w), abs(e2 - w0)) > 1e-3)
    assert res.energies[0] == 0.0
    assert any(abs(E - e2) <= 1e-8 * e2 for E in res.energies)
    for r in res.roots:
        assert abs(r.residual) < 1e-9
        assert r.bracket[0] < r.E < r.bracket[1] or r.E == 0.0
        for pole in (w, w0):
            assert abs(r.E - pole) > 1e-8 * max(w, w0)


def test_roots_sorted_unique():
    res = solve_spectrum(ModelParams(1.0, 2.0, g1=0.7, g2=0.9, beta=3.0))
    Es = res.energies
    assert Es == sorted(Es) and len(set(Es)) == len(Es)


def test_empty_root_set_is_valid():
    res = solve_spectrum(ModelParams(1.0, 1.0, beta=1.0))
    assert res.roots == []


def test_zero_temperature_accepted():
    res = solve_spectrum(ModelParams(1.0, 1.0, g1=0.5, g2=0.5, beta=ZERO_T))
    assert res.energies[0] == 0.0


def test_critical_requires_transition():
    with pytest.raises(DomainError):
        solve_spectrum(ModelParams(g1=0.2), "critical")
    with pytest.raises(DomainError):
        e2_closed_form(ModelParams())


def test_pole_dense():
    with pytest.raises(PoleDense):
        solve_spectrum(ModelParams(1.0, 1.5, g1=2.0), e_max=3.0, grid_n=10)


def test_beta_c_reused():
    p = ModelParams(1.0, 1.0, g1=1.2)
    res = solve_spectrum(p, "critical")
    assert res.beta == critical_beta(p).beta_c
