import numpy as np
import pytest
from hypothesis import given, strategies as st

from epdt_lab.errors import CFLViolation, DomainError, DomainTooSmall, ValidationError
from epdt_lab.linear1d import (GridFunction, LinearProblem, check_initial_velocity, dalembert,
                               relative_linf, solve_fd_oracle, solve_representation,
                               solve_representation_many, write_solution_csv)
from epdt_lab.model import ModelParams, amplitude
from epdt_lab.semilinear import bump

b6 = bump(1.0, 6)


def u1_tilted(x):
    return b6(x) * (0.5 + 0.3 * np.asarray(x))


def zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


PARAM_SETS = [(0, 0, 0), (0, 2, 0), (1, 0, 0), (0, 3, 1), (-0.5, 1, 0)]


def test_grid_function_interpolates_and_vanishes_outside():
    g = GridFunction.from_callable(np.sin, -1.0, 1.0, 0.01)
    assert g(0.3) == pytest.approx(np.sin(0.3), abs=1e-8)
    assert g(1.5) == 0.0
    with pytest.raises(ValidationError):
        GridFunction(0.0, 0.1, np.ones(5), support_radius=0.1)


def test_problem_validation():
    with pytest.raises(ValidationError):
        LinearProblem(ModelParams(), b6, zero, t_end=1.0)
    with pytest.raises(ValidationError):
        LinearProblem(ModelParams(), lambda x: (np.abs(np.asarray(x)) < 0.5).astype(float), zero)
    assert LinearProblem(ModelParams(n=3), b6, zero).params.n == 1


def test_initial_time_returns_data():
    prob = LinearProblem(ModelParams(0.5, 2, 0.1), b6, u1_tilted)
    assert solve_representation(prob, 1.0, 0.3) == pytest.approx(b6(0.3), rel=1e-15)
    with pytest.raises(DomainError):
        solve_representation(prob, 3.5, 0.0)


def test_dalembert_case():
    prob = LinearProblem(ModelParams(0, 0, 0), b6, u1_tilted)
    xs = np.linspace(-2.5, 2.5, 11)
    for t in (1.5, 3.0):
        got = solve_representation_many(prob, t, xs)
        want = np.array([dalembert(b6, u1_tilted, t, x) for x in xs])
        assert np.max(np.abs(got - want)) <= 1e-9


def test_zero_data_gives_zero():
    prob = LinearProblem(ModelParams(0.5, 2, 0.1), zero, zero)
    assert solve_representation(prob, 2.0, 0.1) == 0.0
    fd = solve_fd_oracle(prob, 2.0, 0.05)
    assert np.all(fd.snapshots[-1].values == 0.0)
    assert check_initial_velocity(prob, xs=[0.0, 0.5]) == 0.0


@pytest.mark.parametrize("triple", PARAM_SETS)
def test_representation_matches_fd_oracle(triple):
    prob = LinearProblem(ModelParams(*triple), b6, u1_tilted)
    xs = np.linspace(-2, 2, 21)
    ref = solve_representation_many(prob, 3.0, xs)
    errs = [relative_linf(solve_fd_oracle(prob, 3.0, dx).snapshots[-1](xs), ref) for dx in (1 / 200, 1 / 400)]
    assert errs[1] <= 2e-3
    assert 3 <= errs[0] / errs[1] <= 5


def test_duhamel_term_matches_fd_oracle():
    g = lambda t, x: np.exp(-t) * b6(x)
    prob = LinearProblem(ModelParams(0.5, 2, 0.1), b6, u1_tilted, g=g)
    fd = solve_fd_oracle(prob, 2.0, 1 / 400).snapshots[-1]
    for x in (-0.7, 0.3, 1.6):
        assert solve_representation(prob, 2.0, x) == pytest.approx(fd(x), abs=2e-3 * 0.3)


def test_fd_dalembert_second_order():
    prob = LinearProblem(ModelParams(0, 0, 0), b6, u1_tilted)
    xs = np.linspace(-2.5, 2.5, 51)
    exact = np.array([dalembert(b6, u1_tilted, 3.0, x) for x in xs])
    e = [np.max(np.abs(solve_fd_oracle(prob, 3.0, dx).snapshots[-1](xs) - exact)) for dx in (0.01, 0.005)]
    assert 3 <= e[0] / e[1] <= 5


def test_fd_guards():
    prob = LinearProblem(ModelParams(0, 0, 0), b6, zero)
    with pytest.raises(CFLViolation):
        solve_fd_oracle(prob, 2.0, 0.01, dt=0.01)
    with pytest.raises(DomainTooSmall):
        solve_fd_oracle(prob, 2.0, 0.01, half_width=1.5)


@pytest.mark.parametrize("triple", [(0, 0, 0), (0.5, 2, 0.1), (-0.5, 1, 0)])
def test_initial_velocity(triple):
    prob = LinearProblem(ModelParams(*triple), b6, u1_tilted)
    assert check_initial_velocity(prob, xs=np.linspace(-1.2, 1.2, 7)) <= 1e-2


def test_finite_speed_of_propagation():
    prob = LinearProblem(ModelParams(0.5, 2, 0.1), b6, u1_tilted)
    t = 2.5
    edge = 1.0 + amplitude(t, 0.5)
    for x in (edge + 0.01, -edge - 0.3):
        assert abs(solve_representation(prob, t, x)) <= 1e-9


@given(st.floats(0, 2), st.floats(0, 1), st.floats(-0.5, 1), st.floats(-1.5, 1.5), st.floats(1.1, 3))
def test_positivity_under_sign_conditions(mu, frac, ell, x, t):
    nu2 = frac * (mu - 1) ** 2 / 4
    prob = LinearProblem(ModelParams(ell, mu, nu2), b6, b6)   # u1 + r2 u0 = (1 + r2) u0 >= 0
    assert solve_representation(prob, t, x, tol=1e-10) >= -1e-9


@given(st.floats(-3, 3))
def test_linearity(alpha):
    p = ModelParams(0.5, 2, 0.1)
    base = solve_representation(LinearProblem(p, b6, u1_tilted), 2.2, 0.4)
    scaled = solve_representation(LinearProblem(p, lambda x: alpha * b6(x), lambda x: alpha * u1_tilted(x)), 2.2, 0.4)
    assert scaled == pytest.approx(alpha * base, abs=1e-9)


def test_csv_writer(tmp_path):
    path = tmp_path / "u.csv"
    write_solution_csv(path, [(3.0, 0.5, 0.25)])
    assert path.read_bytes() == b"t,x,u\n3.0,0.5,0.25\n"
