"""Smooth objectives, counting oracles and the benchmark problem families.

Objective classes hold immutable problem data and evaluate without side
effects. A :class:`GradientOracle` wraps one objective for a single run and
counts work in units of single partial derivatives: a full gradient costs
``m``, one partial costs 1. Function values are counted separately.
"""
from dataclasses import dataclass, field

import numpy as np

from .domains import ScaledSimplex
from .errors import ConfigError, DomainError

Q_MODES = ("zero", "sin_over_i")


class QuadraticObjective:
    """``phi(x) = 0.5 <P x, x> - <q, x>`` with symmetric ``P``."""

    def __init__(self, P, q):
        P = np.array(P, dtype=float, ndmin=2)
        q = np.atleast_1d(np.array(q, dtype=float))
        m = q.size
        if P.shape != (m, m):
            raise DomainError(f"P has shape {P.shape}, expected ({m}, {m})")
        if not np.allclose(P, P.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(P).max()))):
            raise DomainError("P must be symmetric")
        self.P = 0.5 * (P + P.T)
        self.q = q
        self.P.setflags(write=False)
        self.q.setflags(write=False)
        self.dim = m

    def __repr__(self):
        return f"QuadraticObjective(m={self.dim})"

    def value(self, x):
        return float(0.5 * x @ (self.P @ x) - self.q @ x)

    def gradient(self, x):
        return self.P @ x - self.q

    def partial(self, x, i):
        return float(self.P[i] @ x - self.q[i])


class ConvexBarrierObjective:
    """``f(x) = phi(x) + 1 / (<c, x> + mu)`` on the nonnegative orthant."""

    def __init__(self, base, c, mu):
        c = np.atleast_1d(np.array(c, dtype=float))
        if c.shape != (base.dim,):
            raise DomainError(f"c has shape {c.shape}, expected ({base.dim},)")
        if not np.all(c > 0) or not mu > 0:
            raise DomainError("c and mu must be positive")
        self.base = base
        self.c = c
        self.c.setflags(write=False)
        self.mu = float(mu)
        self.dim = base.dim

    def __repr__(self):
        return f"ConvexBarrierObjective(m={self.dim}, mu={self.mu:g})"

    def _shift(self, x):
        s = float(self.c @ x) + self.mu
        if s <= 0:
            raise DomainError("<c, x> + mu must stay positive")
        return s

    def value(self, x):
        return self.base.value(x) + 1.0 / self._shift(x)

    def gradient(self, x):
        s = self._shift(x)
        return self.base.gradient(x) - self.c / (s * s)

    def partial(self, x, i):
        s = self._shift(x)
        return self.base.partial(x, i) - self.c[i] / (s * s)


class LinearObjective:
    """``f(x) = <c, x>``; handy for hand-checkable solver traces."""

    def __init__(self, c):
        self.c = np.atleast_1d(np.array(c, dtype=float))
        self.c.setflags(write=False)
        self.dim = self.c.size

    def value(self, x):
        return float(self.c @ x)

    def gradient(self, x):
        return self.c.copy()

    def partial(self, x, i):
        return float(self.c[i])


@dataclass
class GradientOracle:
    """Counting view of an objective, owned by one solver run."""

    objective: object
    value_calls: int = 0
    partial_calls: int = 0

    @property
    def dim(self):
        return self.objective.dim

    def value(self, x):
        self.value_calls += 1
        return self.objective.value(x)

    def gradient(self, x):
        self.partial_calls += self.objective.dim
        return self.objective.gradient(x)

    def partial(self, x, i):
        self.partial_calls += 1
        return self.objective.partial(x, i)

    def reset(self):
        self.value_calls = 0
        self.partial_calls = 0


def as_oracle(objective):
    """Reuse a caller's oracle (and its counters) or wrap a bare objective."""
    if isinstance(objective, GradientOracle):
        return objective
    return GradientOracle(objective)


def unwrap(objective):
    return objective.objective if isinstance(objective, GradientOracle) else objective


def build_quadratic(m, q_mode="zero"):
    """Diagonally dominant test matrix with trigonometric off-diagonals.

    ``p_ij = sin(i) cos(j)`` for ``i < j`` (1-based, radians), mirrored below
    the diagonal, and ``p_jj = 1 + sum_{i != j} |p_ij|``.
    """
    if m < 1:
        raise ConfigError("m must be at least 1")
    idx = np.arange(1, m + 1, dtype=float)
    s, c = np.sin(idx), np.cos(idx)
    upper = np.triu(np.outer(s, c), k=1)
    P = upper + upper.T
    P[np.diag_indices(m)] = 1.0 + np.abs(P).sum(axis=0)
    if q_mode == "zero":
        q = np.zeros(m)
    elif q_mode == "sin_over_i":
        q = np.sin(idx) / idx
    else:
        raise ConfigError(f"unknown q_mode {q_mode!r}; expected one of {Q_MODES}")
    return QuadraticObjective(P, q)


def build_convex(m, q_mode="zero", mu=5.0):
    """Quadratic plus the barrier ``1 / (<c, x> + mu)`` with ``c_i = 2 + sin(i)``."""
    base = build_quadratic(m, q_mode)
    c = 2.0 + np.sin(np.arange(1, m + 1, dtype=float))
    return ConvexBarrierObjective(base, c, mu)


@dataclass(frozen=True)
class LipschitzEstimate:
    L: float
    method: str
    exact: bool = field(default=False)

    def __float__(self):
        return self.L


def spectral_norm(P, rtol=1e-6, max_iter=100_000):
    """Largest eigenvalue magnitude of a symmetric matrix by power iteration.

    Stops once the residual ``||P v - rho v||`` is below ``rtol * |rho|`` and
    returns ``|rho|`` padded by that residual, so a fixed step built on it
    errs on the short side.
    """
    P = np.asarray(P, dtype=float)
    m = P.shape[0]
    if not np.any(P):
        return 0.0
    # deterministic start with components along every eigenvector generically
    v = 1.0 + np.sin(np.arange(1, m + 1)) * 0.5
    v /= np.linalg.norm(v)
    rho = 0.0
    for _ in range(max_iter):
        w = P @ v
        rho = float(v @ w)
        resid = float(np.linalg.norm(w - rho * v))
        if resid <= rtol * abs(rho):
            break
        nw = np.linalg.norm(w)
        if nw == 0:
            break
        v = w / nw
    return abs(rho) + resid


def lipschitz(objective, domain=None):
    """Gradient Lipschitz constant on the domain.

    Quadratic: ``||P||_2``. Barrier family: ``||P||_2 + 2 ||c||^2 / s^3`` where
    ``s`` lower-bounds ``<c, x> + mu`` on the domain (``mu`` on the orthant).
    """
    objective = unwrap(objective)
    if isinstance(objective, LinearObjective):
        return LipschitzEstimate(0.0, "linear", exact=True)
    if isinstance(objective, QuadraticObjective):
        return LipschitzEstimate(spectral_norm(objective.P), "power-iteration")
    if isinstance(objective, ConvexBarrierObjective):
        floor = 0.0
        if domain is not None and not isinstance(domain, ScaledSimplex):
            floor = min(0.0, float(np.min(domain.atom_values(objective.c))))
        s = objective.mu + floor
        if s <= 0:
            raise DomainError("barrier term is unbounded on this domain")
        L = spectral_norm(objective.base.P) + 2.0 * float(objective.c @ objective.c) / s**3
        return LipschitzEstimate(L, "closed-form bound")
    raise ConfigError(f"no Lipschitz estimate for {type(objective).__name__}")


# -- named benchmark families --------------------------------------------------

PROBLEMS = ("quad-simplex", "convex-simplex", "quad-scaled", "convex-scaled")
STARTS = ("uniform", "vertex")


def scaled_weights(m):
    """Constraint vector ``a_i = 1.5 + sin(i)`` of the scaled-simplex family."""
    return 1.5 + np.sin(np.arange(1, m + 1, dtype=float))


def make_problem(name, m, q_mode=None, tau=10.0):
    """Build ``(domain, objective)`` for a named benchmark family.

    ``q_mode`` defaults to ``zero`` on the plain simplex and ``sin_over_i`` on
    the scaled simplex.
    """
    try:
        kind, dom = name.split("-")
    except ValueError:
        raise ConfigError(f"unknown problem {name!r}; expected one of {PROBLEMS}") from None
    if name not in PROBLEMS:
        raise ConfigError(f"unknown problem {name!r}; expected one of {PROBLEMS}")
    if m < 1:
        raise ConfigError("m must be at least 1")
    if q_mode is None:
        q_mode = "zero" if dom == "simplex" else "sin_over_i"
    domain = ScaledSimplex.standard(m, tau) if dom == "simplex" else ScaledSimplex(scaled_weights(m), tau)
    objective = build_quadratic(m, q_mode) if kind == "quad" else build_convex(m, q_mode)
    return domain, objective


def start_point(domain, start):
    """``uniform``: equal weights on all atoms; ``vertex``: all weight on atom 0."""
    if start == "uniform":
        return domain.barycenter()
    if start == "vertex":
        return domain.vertex_point(0)
    raise ConfigError(f"unknown start {start!r}; expected one of {STARTS}")
