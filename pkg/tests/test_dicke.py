import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

import oracles
from spinboson.analytic.dicke import (FINITE, NONE, QUANTUM_CRITICAL, coeff_a, coeff_c, critical_beta,
                                      ratio_product, ratio_upper_bound, transition_condition)
from spinboson.errors import DomainError, SuperradiantRegime
from spinboson.model import ZERO_T, ModelParams

pos = st.floats(0.1, 5.0)
coup = st.floats(0.0, 3.0)


def test_coefficients_examples():
    p = ModelParams(1.0, 1.0, g1=0.8, beta=2.0)
    t = math.tanh(0.5)
    assert coeff_a(0.0, p) == pytest.approx(0.64 * t)
    assert coeff_c(0.0, p) == 0.0
    q = ModelParams(1.0, 1.0, g1=0.4, g2=0.4, beta=2.0)
    assert coeff_a(0.0, q).real + 2 * coeff_c(0.0, q) == pytest.approx(4 * 0.16 * t)
    assert coeff_a(0.0, ModelParams(g1=1.0, beta=ZERO_T)).real == 1.0


@given(pos, pos, coup, coup, st.floats(0.05, 10), st.floats(-20, 20))
def test_coefficient_symmetries(w, w0, g1, g2, beta, om):
    p = ModelParams(w, w0, g1=g1, g2=g2, beta=beta)
    assert coeff_c(om, p) == coeff_c(-om, p)
    assert complex(coeff_a(-om, p)) == pytest.approx(complex(coeff_a(om, p).conjugate()), rel=1e-12, abs=1e-300)
    zero = coeff_a(0.0, p).real + 2 * coeff_c(0.0, p)
    assert zero == pytest.approx(transition_condition(p), rel=1e-12)


def test_betac_example():
    cp = critical_beta(ModelParams(1.0, 1.0, g1=1.2))
    assert cp.status == FINITE
    assert cp.beta_c == pytest.approx(float(oracles.betac(1, 1, 1.2, 0)), rel=1e-12)
    assert cp.beta_c == pytest.approx(3.42596, abs=1e-5)
    assert critical_beta(ModelParams(1.0, 1.0, g2=1.2)).beta_c == cp.beta_c


def test_betac_statuses():
    assert critical_beta(ModelParams(g1=0.6, g2=0.4)).status == QUANTUM_CRITICAL
    assert critical_beta(ModelParams(g1=0.3, g2=0.3)).status == NONE
    assert critical_beta(ModelParams(g1=0.3, g2=0.3)).beta_c is None


@given(pos, pos, coup, coup)
def test_betac_symmetric_and_consistent(w, w0, g1, g2):
    assume((g1 + g2) ** 2 > w * w0 * (1 + 1e-6))
    p = ModelParams(w, w0, g1=g1, g2=g2)
    a, b = critical_beta(p), critical_beta(p.replace(g1=g2, g2=g1))
    assert a.beta_c == pytest.approx(b.beta_c, rel=1e-14)
    assert transition_condition(p.replace(beta=a.beta_c)) == pytest.approx(1.0, rel=1e-10)


@given(pos, pos, coup, coup, st.floats(0.01, 10), st.floats(0.01, 10))
def test_condition_monotone_in_beta(w, w0, g1, g2, b1, b2):
    assume(g1 + g2 > 0 and b1 < b2)
    p = ModelParams(w, w0, g1=g1, g2=g2)
    assert transition_condition(p.replace(beta=b1)) <= transition_condition(p.replace(beta=b2))


def test_ratio_product_free():
    res = ratio_product(ModelParams(beta=1.0))
    assert res.value == 1.0 and res.ln_value == 0.0


def test_ratio_product_self_convergence():
    p = ModelParams(1.0, 1.0, g1=0.5, beta=1.0)
    a, b = ratio_product(p, 10_000), ratio_product(p, 20_000)
    assert math.isfinite(a.value) and a.value > 1
    assert abs(a.value - b.value) / b.value < 1e-6


def test_ratio_product_rwa_reduces():
    # with g2 = 0, c vanishes and every factor is |1 - a|^2
    p = ModelParams(1.2, 0.9, g1=0.6, beta=1.5)
    res = ratio_product(p, 4000)
    n = np.arange(1, 4001)
    w = 2 * np.pi * n / 1.5
    a = coeff_a(w, p)
    a0 = coeff_a(0.0, p).real
    ln = -math.log(1 - a0) - math.fsum(np.log(np.abs(1 - a) ** 2)) + res.tail
    assert res.ln_value == pytest.approx(ln, rel=1e-12)


def test_ratio_product_diverges_near_betac():
    p = ModelParams(1.0, 1.0, g1=1.2)
    bc = critical_beta(p).beta_c
    zero = [ratio_product(p.replace(beta=bc * (1 - eps)), 2000).zero_mode_factor for eps in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(a < b for a, b in zip(zero, zero[1:]))
    assert zero[-1] > 50
    with pytest.raises(SuperradiantRegime) as exc:
        ratio_product(p.replace(beta=bc * 1.01))
    assert exc.value.factor == "zero_mode"


def test_ratio_product_needs_finite_beta():
    with pytest.raises(DomainError):
        ratio_product(ModelParams(g1=0.1, beta=ZERO_T))


def test_bound_free_and_ordering():
    assert ratio_upper_bound(ModelParams(beta=1.0), M=50).value == pytest.approx(1.0, abs=1e-12)
    p = ModelParams(1.0, 1.0, g1=0.4, g2=0.3, beta=2.0)
    assert ratio_upper_bound(p, M=200).ln_value >= ratio_product(p).ln_value


def test_bound_grows_toward_transition():
    p = ModelParams(1.0, 1.0, g1=0.7, g2=0.3)
    vals = [ratio_upper_bound(p.replace(beta=b), M=100).ln_value for b in (0.5, 1.0, 2.0)]
    assert vals[0] < vals[1] < vals[2]
