import math

import pytest
from hypothesis import assume, given, strategies as st

from spinboson.analytic.intensity import (c_zero_t, intensity_coeffs, intensity_critical_coupling,
                                          intensity_zero_t_ratio)
from spinboson.errors import DomainError, SuperradiantRegime
from spinboson.model import ZERO_T, ModelParams


def test_coeffs_rotating_off():
    c = intensity_coeffs(0.7, ModelParams(g2=0.5, beta=2.0))
    assert c.a == 0 and c.d == 0
    assert c.c == pytest.approx(0.25 * math.tanh(0.5) / ((1 + 0.7j) * (1 - 0.7j)))


def test_coeffs_zero_temperature():
    p = ModelParams(g1=0.4, g2=0.5, beta=ZERO_T)
    c = intensity_coeffs(1.3, p)
    assert c.a == 0 and c.d == 0
    assert c.c == pytest.approx(complex(c_zero_t(1.3, p)))
    assert complex(c_zero_t(0.0, p)) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        intensity_coeffs(0.0, p, b0_magnitude=-1.0)


def test_low_temperature_limit_of_coeffs():
    p = ModelParams(g1=0.4, g2=0.5, beta=400.0)
    c = intensity_coeffs(0.9, p)
    assert abs(c.a) < 1e-2 and abs(c.d) < 0.1
    assert c.c == pytest.approx(complex(c_zero_t(0.9, p)), rel=1e-12)


def test_ratio_free():
    assert intensity_zero_t_ratio(ModelParams(beta=ZERO_T)).value == 1.0


def test_zero_mode_factor_example():
    res = intensity_zero_t_ratio(ModelParams(g2=0.5, beta=ZERO_T))
    assert res.zero_mode_factor == 1.0 / (1.0 - 0.25)
    assert math.isfinite(res.value) and not res.critical


@given(st.floats(0.2, 4), st.floats(0.2, 4), st.floats(0, 0.999))
def test_zero_mode_factor_exact(w, w0, frac):
    g2 = frac * math.sqrt(w * w0)
    res = intensity_zero_t_ratio(ModelParams(w, w0, g2=g2, beta=ZERO_T), M=500)
    assume(not res.critical)
    assert res.zero_mode_factor == 1.0 / (1.0 - g2**2 / (w * w0))


def test_criticality_flag():
    p = ModelParams(1.0, 2.0, beta=ZERO_T)
    gc = intensity_critical_coupling(p)
    assert intensity_zero_t_ratio(p.replace(g2=gc)).critical
    assert intensity_zero_t_ratio(p.replace(g2=gc * (1 - 5e-10))).critical
    assert not intensity_zero_t_ratio(p.replace(g2=gc * (1 - 1e-6))).critical
    with pytest.raises(SuperradiantRegime):
        intensity_zero_t_ratio(p.replace(g2=gc * 1.01))


def test_divergence_approaching_critical():
    p = ModelParams(beta=ZERO_T)
    vals = [intensity_zero_t_ratio(p.replace(g2=1 - eps)).value for eps in (1e-1, 1e-2, 1e-3)]
    assert vals[0] < vals[1] < vals[2]


def test_grid_beta_validation():
    with pytest.raises(DomainError):
        intensity_zero_t_ratio(ModelParams(g2=0.1, beta=ZERO_T), grid_beta=-1.0)
