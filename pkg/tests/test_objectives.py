import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from oracles import fd_gradient
from pvmopt.domains import ScaledSimplex
from pvmopt.errors import ConfigError, DomainError
from pvmopt.objectives import (PROBLEMS, ConvexBarrierObjective, GradientOracle,
                               LinearObjective, QuadraticObjective, as_oracle,
                               build_convex, build_quadratic, lipschitz,
                               make_problem, spectral_norm, start_point)


def test_quadratic_m1():
    f = build_quadratic(1)
    assert_allclose(f.P, [[1.0]])
    assert_allclose(f.q, [0.0])
    assert f.value(np.array([2.0])) == 2.0
    assert_allclose(f.gradient(np.array([2.0])), [2.0])


def test_quadratic_m2_partial():
    f = build_quadratic(2)
    # p_11 = 1 + |sin(1) cos(2)|
    assert math.isclose(f.partial(np.array([1.0, 0.0]), 0), 1 + abs(math.sin(1) * math.cos(2)))
    assert math.isclose(f.partial(np.array([1.0, 0.0]), 0), 1.35017, abs_tol=1e-5)


def test_quadratic_entries_follow_trig_formula():
    m = 6
    P = build_quadratic(m).P
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            if i < j:
                assert P[i - 1, j - 1] == pytest.approx(math.sin(i) * math.cos(j))
            elif i > j:
                assert P[i - 1, j - 1] == pytest.approx(math.sin(j) * math.cos(i))


@pytest.mark.parametrize("m", [1, 2, 5, 17, 100])
def test_diagonal_dominance(m):
    P = build_quadratic(m).P
    off = np.abs(P).sum(axis=0) - np.abs(np.diag(P))
    assert np.all(np.diag(P) > off)
    assert_allclose(np.diag(P), 1 + off)
    assert np.linalg.eigvalsh(P).min() > 0


def test_q_modes():
    assert_allclose(build_quadratic(3, "sin_over_i").q, [math.sin(i) / i for i in (1, 2, 3)])
    with pytest.raises(ConfigError):
        build_quadratic(3, "cos")


def test_barrier_data():
    f = build_convex(3)
    assert_allclose(f.c, [2 + math.sin(i) for i in (1, 2, 3)])
    assert f.mu == 5.0


def test_barrier_requires_positive_shift():
    f = ConvexBarrierObjective(QuadraticObjective([[1.0]], [0.0]), [1.0], 1.0)
    with pytest.raises(DomainError):
        f.value(np.array([-2.0]))


def test_quadratic_rejects_asymmetric():
    with pytest.raises(DomainError):
        QuadraticObjective([[1, 2], [0, 1]], [0, 0])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(PROBLEMS), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_gradient_matches_finite_differences(name, m, seed):
    domain, f = make_problem(name, m)
    x = domain.reconstruct(dict(enumerate(np.random.default_rng(seed).dirichlet(np.ones(m)))))
    g = f.gradient(x)
    fd = fd_gradient(f.value, x)
    assert np.max(np.abs(g - fd) / np.maximum(1.0, np.abs(g))) <= 1e-5
    assert_allclose([f.partial(x, i) for i in range(m)], g, rtol=1e-12, atol=1e-12)


def test_counters_on_scripted_sequence():
    oracle = GradientOracle(build_quadratic(100))
    x = np.ones(100) / 10
    oracle.gradient(x)
    assert oracle.partial_calls == 100
    oracle.partial(x, 3)
    assert oracle.partial_calls == 101
    oracle.value(x)
    oracle.gradient(x)
    for i in range(7):
        oracle.partial(x, i)
    assert oracle.partial_calls == 2 * 100 + 8
    assert oracle.value_calls == 1
    oracle.reset()
    assert oracle.partial_calls == oracle.value_calls == 0


def test_as_oracle_reuses_counters():
    oracle = GradientOracle(build_quadratic(3))
    assert as_oracle(oracle) is oracle
    assert isinstance(as_oracle(build_quadratic(3)), GradientOracle)


def test_lipschitz_examples():
    assert lipschitz(build_quadratic(1)).L == pytest.approx(1.0, rel=1e-6)
    assert lipschitz(build_quadratic(2)).L == pytest.approx(1.70034, rel=1e-5)
    assert lipschitz(build_convex(1)).L == pytest.approx(1 + 2 * (2 + math.sin(1)) ** 2 / 125, rel=1e-6)
    assert lipschitz(build_convex(1)).L == pytest.approx(1.12918, abs=1e-5)
    assert lipschitz(LinearObjective([1, 2])).L == 0


@pytest.mark.parametrize("m", [3, 10, 40])
def test_spectral_norm_not_below_eigvalsh(m):
    P = build_quadratic(m).P
    top = np.linalg.eigvalsh(P).max()
    L = spectral_norm(P)
    assert top <= L <= top * (1 + 1e-5)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(PROBLEMS), st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_descent_lemma(name, m, seed):
    domain, f = make_problem(name, m)
    L = lipschitz(f, domain).L
    rng = np.random.default_rng(seed)
    x, y = (domain.reconstruct(dict(enumerate(rng.dirichlet(np.ones(m))))) for _ in range(2))
    d = y - x
    bound = f.value(x) + f.gradient(x) @ d + 0.5 * L * d @ d
    assert f.value(y) <= bound + 1e-9 * (1 + abs(bound))


def test_make_problem_defaults():
    dom, f = make_problem("quad-simplex", 4)
    assert np.all(dom.a == 1) and np.all(f.q == 0)
    dom, f = make_problem("convex-scaled", 4)
    assert_allclose(dom.a, 1.5 + np.sin(np.arange(1, 5)))
    assert_allclose(f.base.q, np.sin(np.arange(1, 5)) / np.arange(1, 5))
    with pytest.raises(ConfigError):
        make_problem("quad-cube", 4)


def test_start_points():
    dom = ScaledSimplex([2.0, 1.0], 10)
    assert_allclose(start_point(dom, "vertex").point, [5, 0])
    assert_allclose(start_point(dom, "uniform").dense_weights(2), [0.5, 0.5])
    with pytest.raises(ConfigError):
        start_point(dom, "random")
