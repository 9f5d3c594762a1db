"""Optimality and accuracy instrumentation.

Gap function, three equivalent stationarity tests on a weighted point, the
implicit weight probe on scaled simplices, the restart gap bound and the
complexity constants of the fixed-step method.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .domains import ScaledSimplex
from .errors import DomainError
from .objectives import (ConvexBarrierObjective, LinearObjective,
                         QuadraticObjective, unwrap)


def gap(domain, g, x):
    """``Delta(x) = <g, x> - min_i <g, z^i>`` for ``g = f'(x)``.

    The maximum of ``<g, x - y>`` over the domain is attained at an atom.
    """
    g = np.asarray(g, dtype=float)
    _, vmin = domain.lmo(g)
    return float(g @ np.asarray(x, dtype=float)) - vmin


@dataclass
class StationarityReport:
    is_stationary: bool
    tol: float
    worst_violation: float
    witness: tuple = None
    verdicts: dict = field(default_factory=dict)

    @property
    def consistent(self):
        return len(set(self.verdicts.values())) <= 1


def support_at_minimum(values, weights, gx, tol=0.0):
    """Supported atoms have value ``<g, x>``, all others at least ``<g, x>``."""
    for i, v in enumerate(values):
        if weights[i] > 0:
            if abs(v - gx) > tol:
                return False
        elif v < gx - tol:
            return False
    return True


def no_dominated_support(values, weights, tol=0.0):
    """No atom carries weight while some other atom has a strictly lower value."""
    n = len(values)
    for i in range(n):
        for j in range(n):
            if values[i] > values[j] + tol and weights[i] != 0:
                return False
    return True


def pairwise_order(values, weights, tol=0.0):
    """Worst ``max_{u_i > 0} v_i - min_j v_j`` and a witness pair if it exceeds ``tol``."""
    values = np.asarray(values, dtype=float)
    supp = np.flatnonzero(np.asarray(weights) > 0)
    i = int(supp[np.argmax(values[supp])])
    j = int(np.argmin(values))
    worst = float(values[i] - values[j])
    return worst, ((i, j) if worst > tol else None)


def check_stationarity(domain, wp, g, tol=1e-6):
    """Test whether a weighted point is stationary for gradient ``g``.

    The verdict follows the pairwise test (every supported atom is no worse
    than any atom, up to ``tol``). The two other equivalent formulations are
    evaluated independently and stored in ``verdicts``; at ``tol = 0`` they
    agree whenever the arithmetic is exact.
    """
    if tol < 0:
        raise DomainError("tol must be nonnegative")
    g = np.asarray(g, dtype=float)
    values = domain.atom_values(g)
    u = wp.dense_weights(domain.n)
    gx = float(g @ wp.point)
    worst, witness = pairwise_order(values, u, tol)
    verdicts = {
        "pairwise_order": worst <= tol,
        "no_dominated_support": no_dominated_support(values, u, tol),
        "support_at_minimum": support_at_minimum(values, u, gx, tol),
    }
    return StationarityReport(worst <= tol, tol, worst, witness, verdicts)


def weight_probe(domain, x, i, eps):
    """True iff ``x + eps (z^j - z^i)`` stays feasible for every atom ``j``.

    A ``False`` certifies ``u_i(x) < eps`` for every weight representation of
    ``x``. On a scaled simplex the test is sharp.
    """
    if not isinstance(domain, ScaledSimplex):
        raise DomainError("weight_probe needs a scaled simplex")
    domain._check_index(i)
    if not eps > 0:
        raise DomainError("eps must be positive")
    x = np.asarray(x, dtype=float)
    r = domain.radii
    tol = 1e-12 * r
    # moving to j changes only coordinates i and j
    new_i = x[i] - eps * r[i]
    others = np.delete(x + eps * r, i)
    return bool(new_i >= -tol[i] and np.all(others >= -np.delete(tol, i)))


@dataclass(frozen=True)
class SigmaEstimate:
    """Estimates of ``sigma = max_i max_{x in D} |<f'(x), z^i>|``.

    ``empirical`` is the maximum over visited restart points; ``analytic`` is
    a certified overestimate over the whole domain (``nan`` when unavailable).
    ``value`` is the larger of the two. The global maximum is not computed.
    """

    empirical: float
    analytic: float
    value: float
    exact_global: bool = False


def atom_gram(domain, P):
    """Matrix ``<P z^j, z^i>`` over all atom pairs."""
    if isinstance(domain, ScaledSimplex):
        r = domain.radii
        return r[:, None] * P * r[None, :]
    Z = domain.atoms
    return Z @ P @ Z.T


def sigma_bound(domain, objective):
    """Certified overestimate of ``max_i max_{x in D} |<f'(x), z^i>|``.

    For quadratics ``<P x - q, z^i>`` is linear in ``x``, so its range over
    the domain is spanned by its values at the atoms. The barrier gradient
    ``-c / (<c, x> + mu)^2`` adds a term of fixed sign and bounded size.
    """
    obj = unwrap(objective)
    if isinstance(obj, LinearObjective):
        return float(np.max(np.abs(domain.atom_values(obj.c))))
    base = obj.base if isinstance(obj, ConvexBarrierObjective) else obj
    if not isinstance(base, QuadraticObjective):
        return math.nan
    M = atom_gram(domain, base.P) - domain.atom_values(base.q)[:, None]
    lo, hi = M.min(axis=1), M.max(axis=1)
    if isinstance(obj, ConvexBarrierObjective):
        cz = domain.atom_values(obj.c)
        s = obj.mu + float(cz.min())
        if s <= 0:
            return math.inf
        extra = -cz / s**2
        lo = lo + np.minimum(extra, 0.0)
        hi = hi + np.maximum(extra, 0.0)
    return float(max(np.abs(lo).max(), np.abs(hi).max()))


def sigma_over_run(report, domain, objective):
    """Empirical and certified ``sigma`` for the restart bound of a run."""
    obj = unwrap(objective)
    pts = [r.point for r in report.restarts]
    if report.final is not None:
        pts.append(report.final.point)
    emp = 0.0
    for p in pts:
        emp = max(emp, float(np.max(np.abs(domain.atom_values(obj.gradient(p))))))
    ana = sigma_bound(domain, obj)
    value = emp if math.isnan(ana) else max(emp, ana)
    return SigmaEstimate(emp, ana, value)


@dataclass(frozen=True)
class ComplexityConstants:
    """Constants of the fixed-step complexity estimate.

    ``C1 = 1 + 2 n sigma``, ``C2 = C1 L B^2 / (beta (1 - beta) delta0)``;
    ``bound(alpha) = C2 (C1 / alpha - 1) / (1 - nu)``, floored at 0.
    """

    C1: float
    C2: float
    nu: float

    def bound(self, alpha):
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        return max(0.0, self.C2 * (self.C1 / alpha - 1.0) / (1.0 - self.nu))


def complexity_constants(n, sigma, L, B, beta, delta0, nu):
    if not (n >= 1 and sigma >= 0 and L > 0 and B > 0 and delta0 > 0):
        raise ValueError("complexity constants need n >= 1, sigma >= 0, L, B, delta0 > 0")
    if not (0 < beta < 1 and 0 < nu < 1):
        raise ValueError("beta and nu must lie in (0, 1)")
    C1 = 1.0 + 2.0 * n * sigma
    C2 = C1 * L * B * B / (beta * (1.0 - beta) * delta0)
    return ComplexityConstants(C1, C2, nu)


@dataclass(frozen=True)
class RestartBound:
    stage: int
    gap: float
    bound: float
    holds: bool


def restart_gap_bound(report, n, sigma, schedule):
    """Compare each restart gap with ``delta_l + 2 n eps_l sigma``."""
    sigma = float(getattr(sigma, "value", sigma))
    out = []
    for r in report.restarts:
        b = schedule.delta(r.stage) + 2.0 * n * schedule.eps(r.stage) * sigma
        out.append(RestartBound(r.stage, r.gap, b, r.gap <= b))
    return out
