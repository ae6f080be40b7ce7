import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from epdt_lab.errors import DomainError, OutsideCone
from epdt_lab.kernel import (E_values, KernelPoint, dz_db, dz_db_at_1, kernel_E, kernel_E_transformed,
                             kernel_K0, kernel_K1, z_argument, z_values)
from epdt_lab.model import ModelParams, amplitude, kernel_constant, kernel_gamma, phi_ell


def cone_points(rng, ell, m, t_max=5.0, b_one=False, shrink=0.999):
    t = rng.uniform(1.0, t_max, m) + 1e-3
    b = np.ones(m) if b_one else 1.0 + rng.uniform(0, 1, m) * (t - 1.0)
    w = phi_ell(t, ell) - phi_ell(b, ell)
    x = rng.uniform(-2, 2, m)
    y = x + shrink * w * rng.uniform(-1, 1, m)
    return t, x, b, y


def params_with_delta(d, ell=0.0, mu=3.5):
    # delta = (mu-1)**2 - 4 nu2
    return ModelParams(ell, mu, ((mu - 1) ** 2 - d) / 4, 1)


def test_z_examples():
    assert z_argument(KernelPoint(2, 0, 1, 0), 0.0) == pytest.approx(1 / 9, rel=1e-15)
    assert z_argument(KernelPoint(3, 0.4, 3, 0.4), 0.5) == 0.0
    t, b, x = 3.0, 1.5, 0.2
    w = phi_ell(t, 0.5) - phi_ell(b, 0.5)
    assert z_values(t, x, b, x + w, 0.5) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(OutsideCone):
        z_values(t, x, b, x + 1.01 * w, 0.5)
    with pytest.raises(DomainError):
        KernelPoint(2.0, 0.0, 2.5, 0.0)


def test_classical_wave_kernels(rng):
    p = ModelParams(0, 0, 0, 1)
    t, x, b, y = cone_points(rng, 0.0, 1000)
    assert np.max(np.abs(E_values(t, x, b, y, p) - 0.5)) <= 1e-12
    t, x, _, y = cone_points(rng, 0.0, 1000, b_one=True)
    assert np.max(np.abs(kernel_K0(t, x, y, p))) <= 1e-12
    assert np.max(np.abs(kernel_K1(t, x, y, p) - 0.5)) <= 1e-12


def test_E_examples():
    p = ModelParams(0, 2, 0, 1)
    assert kernel_E(KernelPoint(2, 0, 1, 0), p) == pytest.approx(0.25, rel=1e-14)
    assert kernel_E_transformed(KernelPoint(2, 0, 1, 0), p) == pytest.approx(0.25, rel=1e-14)
    assert kernel_K1(2.0, 0.0, 0.0, p) == pytest.approx(0.25, rel=1e-14)
    q = ModelParams(0.5, 1.5, 0.05, 1)
    t = 2.7
    sd, g, c = math.sqrt(q.delta), kernel_gamma(q), kernel_constant(q)
    want = c * t ** (1 - sd) * (2 * phi_ell(t, 0.5)) ** (-2 * g)
    assert kernel_E(KernelPoint(t, 0.3, t, 0.3), q) == pytest.approx(want, rel=1e-13)


def test_K1_on_cone_boundary():
    p = ModelParams(0.5, 1.2, 0.0, 1)
    t, x = 2.5, 0.1
    A = amplitude(t, 0.5)
    pt, p1 = phi_ell(t, 0.5), phi_ell(1.0, 0.5)
    sd, lo = math.sqrt(p.delta), 0.5 * (1 - math.sqrt(p.delta))
    want = kernel_constant(p) * t ** (-p.mu / 2 + lo) * ((pt + p1) ** 2 - A * A) ** (-kernel_gamma(p))
    assert kernel_K1(t, x, x + A, p, form="original") == pytest.approx(want, rel=1e-13)


def test_dz_db_at_1_examples():
    ell, t, x = 0.5, 3.0, 0.2
    pt, p1 = phi_ell(t, ell), phi_ell(1.0, ell)
    # the bracket phi(t)**2 - phi(1)**2 - (y-x)**2 only vanishes outside the backward cone
    with pytest.raises(OutsideCone):
        dz_db_at_1(t, x, x + math.sqrt(pt**2 - p1**2), ell)
    closed = -4 * pt * (pt**2 - p1**2) / (pt + p1) ** 4
    h = 1e-6
    fd = (z_values(t, x, 1 + h, x, ell) - z_values(t, x, 1 - h, x, ell)) / (2 * h)
    assert dz_db_at_1(t, x, x, ell) == pytest.approx(closed, rel=1e-14)
    assert dz_db_at_1(t, x, x, ell) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("d", [0.0, 0.25, 1.0, 4.0])
@pytest.mark.parametrize("ell", [-0.5, 0.0, 1.0])
def test_transformed_equals_original(rng, d, ell):
    p = params_with_delta(d, ell)
    t, x, b, y = cone_points(rng, ell, 400, shrink=0.95)
    a = E_values(t, x, b, y, p, "original")
    c = E_values(t, x, b, y, p, "transformed")
    assert np.max(np.abs(a - c) / np.abs(a)) <= 1e-9


@pytest.mark.parametrize("params", [ModelParams(0, 2, 0, 1), ModelParams(0.5, 1.5, 0.05, 1),
                                    ModelParams(-0.5, 0.3, 0.0, 1), ModelParams(1.0, 4.0, 2.0, 1),
                                    ModelParams(0, 3, 1, 1)])
def test_K0_matches_finite_difference_oracle(rng, params):
    t, x, _, y = cone_points(rng, params.ell, 60, b_one=True, shrink=0.9)
    h = 1e-5
    dE = (E_values(t, x, 1 + h, y, params) - E_values(t, x, 1 - h, y, params)) / (2 * h)
    oracle = params.mu * E_values(t, x, 1.0, y, params) - dE
    got = kernel_K0(t, x, y, params)
    assert np.max(np.abs(got - oracle) / np.maximum(1.0, np.abs(oracle))) <= 1e-6


@st.composite
def admissible(draw):
    mu = draw(st.floats(0, 5))
    nu2 = draw(st.floats(0, 1)) * (mu - 1) ** 2 / 4
    return ModelParams(draw(st.floats(-0.8, 2)), mu, nu2, 1)


@st.composite
def point(draw, ell):
    t = draw(st.floats(1.01, 6))
    b = 1 + draw(st.floats(0, 1)) * (t - 1)
    x = draw(st.floats(-3, 3))
    w = phi_ell(t, ell) - phi_ell(b, ell)
    return t, x, b, x + 0.99 * w * draw(st.floats(-1, 1))


@given(st.data())
def test_kernel_properties(data):
    p = data.draw(admissible())
    t, x, b, y = data.draw(point(p.ell))
    e = E_values(t, x, b, y, p)
    assert e > 0
    assert E_values(t, x, b, 2 * x - y, p) == pytest.approx(e, rel=1e-12)
    assert kernel_K1(t, x, y if b == 1 else x, p) >= 0
    assert dz_db(t, x, b, y, p.ell) <= 0


@given(st.data())
def test_K0_nonnegative_for_strong_damping(data):
    mu = data.draw(st.floats(1, 5))
    nu2 = data.draw(st.floats(0, 1)) * (mu - 1) ** 2 / 4
    p = ModelParams(data.draw(st.floats(-0.8, 2)), mu, nu2, 1)
    t = data.draw(st.floats(1.01, 6))
    x = data.draw(st.floats(-3, 3))
    w = amplitude(t, p.ell)
    y = x + 0.999 * w * data.draw(st.floats(-1, 1))
    assert kernel_K0(t, x, y, p) >= -1e-12
