import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from epdt_lab.errors import InvalidCriticalCondition, NegativeDelta, ValidationError, ZeroDenominator
from epdt_lab.kato import (KatoProblem, euler_homogeneous, factorization_identity_check, g_lin,
                           kato_lemma_check, kato_simulate, kato_thresholds, monte_carlo, sample_problem,
                           threshold_doubling_shift, write_monte_carlo_csv)
from epdt_lab.model import characteristic_roots

ANCHOR = KatoProblem(mu=0, nu2=0, p=2, q=2, a=0, B=1, K=1, T0=1, G1=1, G1p=1)


def test_lower_time_distinct_roots():
    prob = KatoProblem(0, 0, 2, 2, 0, 1, 1, 1, G1=0.7, G1p=0.4)
    assert kato_thresholds(prob).T0_tilde == pytest.approx(1 + 0.7 / 0.4, rel=1e-15)


def test_lower_time_double_root():
    # mu = 3, nu2 = 1: r1 = r2 = 1, so a >= -1 and q = a (p - 1) + 2
    prob = KatoProblem(3, 1, 2, 1, -1, 1, 1, 1, G1=0.7, G1p=0.4)
    assert kato_thresholds(prob).T0_tilde == pytest.approx(math.exp(0.7 / 1.1), rel=1e-15)


def test_k0_boundary_branch():
    p, B = 3.0, 2.0
    prob = KatoProblem(0, 0, p, 2, 0, B, 1, 1, 1, 1)   # r1 = 0 so a + r1 = 0
    beta = (p - 1) / 4
    want = ((p + 1) / B) ** (1 / (p - 1)) * (beta * math.log(2)) ** (-2 / (p - 1))
    assert kato_thresholds(prob).K0 == pytest.approx(want, rel=1e-14)


def test_t1_is_max():
    prob = ANCHOR.with_(T0=5.0)
    th = kato_thresholds(prob)
    assert th.T1 == 5.0 and th.T0_tilde == 2.0


def test_validation():
    with pytest.raises(InvalidCriticalCondition):
        KatoProblem(0, 0, 2, 0, 0, 1, 1, 1, 1, 1)
    with pytest.raises(NegativeDelta):
        KatoProblem(0.5, 1, 2, 2, 0, 1, 1, 1, 1, 1)
    with pytest.raises(ZeroDenominator):
        KatoProblem(0, 0, 2, 2, 0, 1, 1, 1, G1=1, G1p=0)
    with pytest.raises(ValidationError):
        KatoProblem(0, 0, 2, 0, -2, 1, 1, 1, 1, 1)          # a + r1 < 0
    with pytest.raises(ValidationError):
        ANCHOR.with_(beta=0.6)


def test_anchor_blows_up():
    traj = kato_simulate(ANCHOR, 50.0)
    assert traj.status == "threshold"
    assert traj.blowup_time == pytest.approx(7.4757, abs=5e-4)
    assert threshold_doubling_shift(ANCHOR, 50.0) < 1e-2


def test_weak_forcing_does_not_blow_up():
    prob = KatoProblem(0, 0, 2, 2, 0, 1e-8, 1, 1, G1=1e-3, G1p=1e-3)
    assert math.isinf(kato_simulate(prob, 10.0).blowup_time)


def test_lemma_gates():
    th = kato_thresholds(ANCHOR)
    below = kato_lemma_check(ANCHOR.with_(K=0.5 * th.K0, G1=0.01, G1p=0.01))
    assert below.status in ("below_k0", "inapplicable")
    fails = kato_lemma_check(ANCHOR.with_(K=100.0))
    assert fails.status == "inapplicable" and fails.bound_satisfied is None


def test_factorization_kernel_elements():
    for mu, nu2 in [(0, 0), (2, 0.1), (3, 1), (0.5, 0.05)]:
        r1, r2 = characteristic_roots(mu, nu2)
        assert factorization_identity_check(mu, nu2, lambda t: t ** (-r1)) <= 1e-8
        if r1 != r2:
            assert factorization_identity_check(mu, nu2, lambda t: t ** (-r2)) <= 1e-8


def test_factorization_on_trajectory():
    traj = kato_simulate(ANCHOR, 50.0)
    assert factorization_identity_check(ANCHOR.mu, ANCHOR.nu2, traj) <= 1e-4


def test_euler_homogeneous_solves_ode():
    for mu, nu2 in [(2, 0.1), (3, 1)]:
        t = np.linspace(1, 4, 4001)
        y = euler_homogeneous(mu, nu2, 0.3, -0.2, t)
        h = t[1] - t[0]
        d1 = np.gradient(y, h, edge_order=2)
        d2 = np.gradient(d1, h, edge_order=2)
        assert np.max(np.abs(d2 + mu / t * d1 + nu2 / t**2 * y)[5:-5]) < 1e-5
        assert y[0] == pytest.approx(0.3)


@given(st.integers(0, 10**6))
def test_sampled_trajectory_properties(seed):
    prob = sample_problem(np.random.default_rng(seed))
    th = kato_thresholds(prob)
    traj = kato_simulate(prob, min(4 * th.T1 + 10, 200.0))
    T_end = traj.blowup_time if math.isfinite(traj.blowup_time) else traj.t[-1]
    ts = np.linspace(1, 1 + 0.9 * (T_end - 1), 400)
    G, Gp = traj.sol(ts)
    r1, _ = prob.roots
    dF = ts ** r1 * (Gp + r1 * G / ts)       # derivative of t**r1 G
    assert np.all(dF > 0)
    lin = g_lin(prob, ts)
    assert np.all(G >= lin - 1e-8 * np.maximum(1, np.abs(lin)))


@given(st.floats(1.2, 4), st.floats(0.1, 10), st.floats(0.0, 3.0), st.floats(1.01, 3))
def test_k0_monotone_in_B(p, B, a, factor):
    lo = kato_thresholds(KatoProblem(0, 0, p, a * (p - 1) + 2, a, B, 1, 1, 1, 1)).K0
    hi = kato_thresholds(KatoProblem(0, 0, p, a * (p - 1) + 2, a, B * factor, 1, 1, 1, 1)).K0
    assert hi <= lo


@given(st.floats(1.2, 4), st.floats(1e-12, 1e-7))
def test_k0_continuous_at_boundary(p, s):
    base = kato_thresholds(KatoProblem(0, 0, p, 2, 0, 1, 1, 1, 1, 1)).K0
    near = kato_thresholds(KatoProblem(0, 0, p, s * (p - 1) + 2, s, 1, 1, 1, 1, 1)).K0
    assert near == pytest.approx(base, rel=1e-6)


def test_monte_carlo_small_and_deterministic(tmp_path):
    res = monte_carlo(24, seed=11)
    assert all(r.status != "violated" for _, _, r in res)
    write_monte_carlo_csv(tmp_path / "a.csv", res)
    write_monte_carlo_csv(tmp_path / "b.csv", monte_carlo(24, seed=11, jobs=2))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
