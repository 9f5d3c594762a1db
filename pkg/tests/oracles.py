"""Independent reference computations used by the tests.

Nothing here calls the solvers: minima come from support enumeration or
brute-force grids, derivatives from central differences.
"""
import itertools

import numpy as np

from pvmopt.objectives import ConvexBarrierObjective, QuadraticObjective


def fd_gradient(f, x, rel=1e-6):
    """Central differences with step ``rel * (1 + |x_i|)``."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = rel * (1.0 + abs(x[i]))
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def batch_values(objective, X):
    """Objective values at the rows of ``X``."""
    if isinstance(objective, ConvexBarrierObjective):
        return batch_values(objective.base, X) + 1.0 / (X @ objective.c + objective.mu)
    if isinstance(objective, QuadraticObjective):
        return 0.5 * np.einsum("ij,ij->i", X @ objective.P, X) - X @ objective.q
    raise TypeError(type(objective).__name__)


def _prefixes(m, N):
    """All integer prefixes ``(k_0, ..., k_{m-3})`` with sum at most ``N``."""
    if m == 2:
        return np.zeros((1, 0), dtype=int)
    K = np.arange(N + 1)[:, None]
    for _ in range(m - 3):
        k = np.arange(N + 1)
        parts = [np.column_stack([np.repeat(row[None, :], N + 1 - row.sum(), axis=0),
                                  k[: N + 1 - row.sum()]]) for row in K]
        K = np.concatenate(parts)
    return K


def grid_minimum(objective, radii, resolution=1e-3):
    """Minimum over weight vectors on the grid ``u in (resolution * Z)^m``.

    ``x = radii * u`` with ``u`` on the unit simplex. For quadratics the last
    two weights share the remaining mass and the objective along that segment
    is a convex parabola, so its grid minimum sits at the floor or ceiling
    of the clipped vertex; this gives the exact grid minimum with work
    ``O(N^(m-2))``. Other objectives are enumerated point by point (``m <= 3``).
    """
    radii = np.asarray(radii, dtype=float)
    m = radii.size
    N = int(round(1.0 / resolution))
    if m == 1:
        return float(batch_values(objective, radii[None, :])[0])
    pre = _prefixes(m, N)
    rest = N - pre.sum(axis=1)
    if not isinstance(objective, QuadraticObjective):
        if m > 3:
            raise ValueError("point-by-point grid is limited to m <= 3")
        best = np.inf
        for row, r in zip(pre, rest):
            t = np.arange(r + 1)
            K = np.column_stack([np.repeat(row[None, :], t.size, axis=0), t, r - t])
            best = min(best, float(batch_values(objective, (K / N) * radii).min()))
        return best
    R = np.diag(radii)
    H = R @ objective.P @ R
    b = radii * objective.q
    U0 = np.column_stack([pre, np.zeros_like(rest), rest]) / N
    d = np.zeros(m)
    d[-2], d[-1] = 1.0 / N, -1.0 / N
    curv = float(d @ H @ d)
    slope = (U0 @ H - b) @ d
    t_star = np.clip(-slope / curv, 0, rest)
    best = np.inf
    for t in (np.floor(t_star), np.ceil(t_star)):
        U = U0 + t[:, None] * d
        f = 0.5 * np.einsum("ij,ij->i", U @ H, U) - U @ b
        best = min(best, float(f.min()))
    return best


def kkt_minimum(objective, radii):
    """Exact minimum of a convex quadratic over a scaled simplex.

    Enumerates supports ``S`` and solves the equality-constrained KKT system
    in weight space; a candidate is kept when its weights are nonnegative
    and no atom outside ``S`` has a lower linearized value.
    """
    radii = np.asarray(radii, dtype=float)
    R = np.diag(radii)
    H = R @ objective.P @ R
    b = radii * objective.q
    m = radii.size
    best_f, best_u = np.inf, None
    for size in range(1, m + 1):
        for S in itertools.combinations(range(m), size):
            S = list(S)
            K = np.zeros((size + 1, size + 1))
            K[:size, :size] = H[np.ix_(S, S)]
            K[:size, size] = 1.0
            K[size, :size] = 1.0
            rhs = np.concatenate([b[S], [1.0]])
            try:
                sol = np.linalg.solve(K, rhs)
            except np.linalg.LinAlgError:
                continue
            uS = sol[:size]
            if np.any(uS < -1e-12):
                continue
            u = np.zeros(m)
            u[S] = np.clip(uS, 0, None)
            u /= u.sum()
            g = H @ u - b
            if np.any(g < g[S].max() - 1e-9 * (1 + np.abs(g).max())):
                continue
            f = 0.5 * u @ H @ u - b @ u
            if f < best_f:
                best_f, best_u = f, u
    return float(best_f), best_u * radii


def random_quadratic(rng, m, scale=1.0):
    """Random strictly convex quadratic with O(1) curvature."""
    A = rng.standard_normal((m, m))
    P = scale * (A.T @ A / m + 0.2 * np.eye(m))
    q = scale * rng.standard_normal(m)
    return QuadraticObjective(P, q)
