"""Pairwise variation method with tolerances, plus CGM and MDM baselines.

All three solvers walk over weighted points of an atomic domain and return a
:class:`RunReport`. Work is counted in partial-derivative evaluations through
a per-run :class:`~pvmopt.objectives.GradientOracle`.

Accounting. Stopping tests (the gap ``Delta(x)``) are evaluated on the bare
objective and never charged. CGM and MDM charge ``m`` partials for each
gradient that produces a step, so their ``calc`` is exactly ``m * it``. PVM
charges one partial per atom value it looks at on a scaled simplex (a full
gradient per iterate on explicit atoms).
"""
import bisect
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import gap
from .errors import ConfigError, DomainError
from .objectives import as_oracle, lipschitz, unwrap
from .stepsize import (Armijo, ArmijoParams, Divergent, FixedLipschitz, armijo,
                       divergent_step, fixed_step)

ACCOUNTING_NOTE = (
    "calc counts partial derivatives used to produce steps; gap checks run "
    "on an uncounted diagnostic path"
)


@dataclass(frozen=True)
class ToleranceSchedule:
    """Stage tolerances ``delta_l = nu**l * delta0`` and ``eps_l = nu**l * eps0``."""

    delta0: float = 1.0
    eps0: float = 0.5
    nu: float = 0.5

    def __post_init__(self):
        if not self.delta0 > 0:
            raise ConfigError("delta0 must be positive")
        if not 0 < self.eps0 < 1:
            raise ConfigError("eps0 must lie in (0, 1)")
        if not 0 < self.nu < 1:
            raise ConfigError("nu must lie in (0, 1)")

    def delta(self, stage):
        return self.nu**stage * self.delta0

    def eps(self, stage):
        return self.nu**stage * self.eps0


@dataclass(frozen=True)
class StopCriteria:
    target_gap: float = 0.1
    max_inner_iterations: int = 500
    max_stages: int = 60

    def __post_init__(self):
        if self.max_inner_iterations < 0 or self.max_stages < 1:
            raise ConfigError("iteration and stage caps must be positive")
        if self.target_gap < 0:
            raise ConfigError("target_gap must be nonnegative")


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``step_rule`` defaults to Armijo with ``armijo``. ``gap_check_every`` sets
    how often PVM measures the gap between restarts. ``pair_rule`` picks the
    PVM pair search, ``interleaved`` or ``first_hit``.
    """

    armijo: ArmijoParams = ArmijoParams()
    step_rule: object = None
    schedule: ToleranceSchedule = ToleranceSchedule()
    stop: StopCriteria = StopCriteria()
    gap_check_every: int = 10
    pair_rule: str = "interleaved"

    def __post_init__(self):
        if self.step_rule is None:
            object.__setattr__(self, "step_rule", Armijo(self.armijo))
        if not isinstance(self.step_rule, (Armijo, FixedLipschitz, Divergent)):
            raise ConfigError(f"unsupported step rule {self.step_rule!r}")
        if self.pair_rule not in PAIR_RULES:
            raise ConfigError(f"unknown pair rule {self.pair_rule!r}; expected one of {PAIR_RULES}")
        if self.gap_check_every < 1:
            raise ConfigError("gap_check_every must be at least 1")


@dataclass
class StepRecord:
    stage: int
    k: int
    i: int
    j: int
    step: float
    slope: float
    delta: float
    f_before: float
    f_after: float
    backtracks: int
    calc: int


@dataclass
class Restart:
    stage: int
    k: int
    delta: float
    eps: float
    gap: float
    point: np.ndarray
    weights: dict


@dataclass
class RunReport:
    method: str
    iterations: int = 0
    partial_calls: int = 0
    value_calls: int = 0
    f_trajectory: list = field(default_factory=list)
    gap_trajectory: list = field(default_factory=list)
    restarts: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    final: object = None
    final_gap: float = math.nan
    terminated_by: str = ""
    step_info: dict = field(default_factory=dict)
    accounting: str = ACCOUNTING_NOTE

    @property
    def reached(self):
        return self.terminated_by in ("gap_reached", "stationary")

    @property
    def calc(self):
        return self.partial_calls

    def summary(self):
        lines = [
            f"method        {self.method}",
            f"terminated_by {self.terminated_by}",
            f"it            {self.iterations}",
            f"calc          {self.partial_calls}",
            f"value_calls   {self.value_calls}",
            f"final f       {self.f_trajectory[-1]:.10g}",
            f"final gap     {self.final_gap:.6g}",
            f"support size  {len(self.final.weights)}",
        ]
        if self.restarts:
            lines.append(f"restarts      {len(self.restarts)}")
        lines.append(f"# {self.accounting}")
        return "\n".join(lines)


class ScanState:
    """Cyclic pointers of the lazy pair search.

    ``position`` walks over all atoms, ``heavy`` over the heavy atoms (those
    with weight at least ``eps``). Both persist across the inner steps of a
    stage and are reset at restarts.
    """

    __slots__ = ("position", "heavy")

    def __init__(self, position=0, heavy=0):
        self.position = position
        self.heavy = heavy

    def reset(self):
        self.position = 0
        self.heavy = 0


@dataclass(frozen=True)
class PairChoice:
    i: int
    j: int
    gamma: float
    margin: float


PAIR_RULES = ("interleaved", "first_hit")


def select_pair(values, weights, eps, delta, scan=None):
    """Pick a transfer pair ``(i, j)`` with ``values[i] - values[j] >= delta``.

    Two cyclic walks advance in turn, one over heavy atoms and one over all
    atoms. ``i`` is the largest value seen among heavy atoms and ``j`` the
    smallest value seen overall; the search stops as soon as they differ by
    ``delta``. Only visited atoms are evaluated (``values`` is lazy in the
    solvers), so a step usually costs far fewer than ``m`` partials.

    Returns ``None`` once both walks have completed a full cycle without a
    hit. At that point every atom has been seen, so no admissible pair
    exists for any heavy ``i`` and any ``j``.
    """
    heavy = sorted(i for i, w in weights.items() if w >= eps)
    if not heavy:
        return None
    n, nh = len(values), len(heavy)
    ph = scan.heavy if scan is not None else 0
    pa = scan.position if scan is not None else 0
    h0 = bisect.bisect_left(heavy, ph) % nh
    i = j = None
    vi = vj = math.inf
    th = ta = 0
    hit = False
    while th < nh or ta < n:
        if th < nh:
            s = heavy[(h0 + th) % nh]
            th += 1
            v = values[s]
            if i is None or v > vi:
                i, vi = s, v
            if v < vj:
                j, vj = s, v
            if vi - vj >= delta:
                hit = True
                break
        if ta < n:
            s = (pa + ta) % n
            ta += 1
            v = values[s]
            if v < vj:
                j, vj = s, v
            if i is not None and vi - vj >= delta:
                hit = True
                break
    if not hit:
        return None
    if scan is not None:
        scan.position = (pa + ta) % n
        scan.heavy = heavy[(h0 + th) % nh]
    return PairChoice(i, j, weights[i], vi - vj)


def select_pair_first_hit(values, weights, eps, delta, scan=None):
    """Exact ``i`` over the heavy atoms, first-hit cyclic scan for ``j``.

    Same contract as :func:`select_pair`. Each call evaluates every heavy
    atom, which approaches ``m`` partials per step once the weights spread.
    """
    cand = sorted(i for i, w in weights.items() if w >= eps)
    if not cand:
        return None
    i = cand[0]
    vi = values[i]
    for s in cand[1:]:
        v = values[s]
        if v > vi:
            i, vi = s, v
    n = len(values)
    start = scan.position if scan is not None else 0
    for t in range(n):
        j = (start + t) % n
        margin = vi - values[j]
        if margin >= delta:
            if scan is not None:
                scan.position = (j + 1) % n
            return PairChoice(i, j, weights[i], margin)
    return None


_PAIR_SELECTORS = {"interleaved": select_pair, "first_hit": select_pair_first_hit}


def _start(domain, start):
    if start is None:
        return domain.barycenter()
    wp = start.copy()
    if wp.point.shape != (domain.dim,):
        raise DomainError(f"start has dimension {wp.point.shape}, domain has {domain.dim}")
    domain.check_weighted_point(wp, sum_tol=1e-9, point_tol=1e-9)
    return wp


def _resolve_rule(rule, objective, domain):
    info = {"rule": getattr(rule, "name", type(rule).__name__)}
    if isinstance(rule, FixedLipschitz):
        L, B = rule.L, rule.B
        if L is None:
            est = lipschitz(objective, domain)
            L = est.L
            info["L_method"] = est.method
        else:
            info["L_method"] = "given"
        if B is None:
            B = float(domain.diameter())
        if not B > 0:
            raise ConfigError("fixed step needs a domain with positive diameter")
        rule = FixedLipschitz(L if L > 0 else None, B)
        info.update(L=L, B=B)
    return rule, info


class _Run:
    """Shared bookkeeping for one solver run."""

    def __init__(self, method, domain, objective, config, start, callback):
        self.domain = domain
        self.oracle = as_oracle(objective)
        self.plain = unwrap(objective)
        self.config = config or SolverConfig()
        self.wp = _start(domain, start)
        self.callback = callback
        self.calc0 = self.oracle.partial_calls
        self.vals0 = self.oracle.value_calls
        self.report = RunReport(method)
        self.f = self.oracle.value(self.wp.point)
        self.report.f_trajectory.append(self.f)
        self.total = 0

    @property
    def calc(self):
        return self.oracle.partial_calls - self.calc0

    def measure_gap(self):
        if self.domain.n == 1:
            value = 0.0
        else:
            value = gap(self.domain, self.plain.gradient(self.wp.point), self.wp.point)
        self.report.gap_trajectory.append((self.total, value))
        return value

    def record(self, stage, k, i, j, step, slope, delta, f_new, backtracks):
        rec = StepRecord(stage, k, i, j, step, slope, delta, self.f, f_new, backtracks, self.calc)
        self.f = f_new
        self.total += 1
        self.report.steps.append(rec)
        self.report.f_trajectory.append(f_new)
        if self.callback is not None:
            self.callback(rec, self.wp)

    def finish(self, reason, last_gap=None):
        rep = self.report
        if last_gap is None or rep.gap_trajectory[-1][0] != self.total:
            last_gap = self.measure_gap()
        rep.iterations = self.total
        rep.partial_calls = self.calc
        rep.value_calls = self.oracle.value_calls - self.vals0
        rep.final = self.wp
        rep.final_gap = last_gap
        rep.terminated_by = reason
        return rep


def pvm_solve(domain, objective, config=None, start=None, callback=None):
    """Pairwise variation method with tolerances and explicit weights.

    Stage ``l = 1, 2, ...`` runs inner steps with fixed ``(delta_l, eps_l)``.
    Each step moves weight from a heavy atom ``i`` (``u_i >= eps_l``) to an
    atom ``j`` whose linearized value is lower by at least ``delta_l``, with
    step capped at ``gamma = u_i``. When no such pair exists the stage ends
    (restart) and both tolerances shrink by ``nu``.

    Pairs come from :func:`select_pair` (``config.pair_rule="interleaved"``)
    or :func:`select_pair_first_hit`. Either way a restart certifies that no
    admissible pair exists at the current iterate.

    Parameters
    ----------
    domain : AtomicDomain
    objective : objective or GradientOracle
        A bare objective is wrapped in a fresh counting oracle.
    config : SolverConfig, optional
    start : WeightedPoint, optional
        Defaults to the barycenter of the atoms.
    callback : callable, optional
        ``callback(step_record, weighted_point)`` after every step.

    Returns
    -------
    RunReport
    """
    run = _Run("PVM", domain, objective, config, start, callback)
    cfg, rep, wp = run.config, run.report, run.wp
    rule, rep.step_info = _resolve_rule(cfg.step_rule, run.plain, domain)
    sched, stop = cfg.schedule, cfg.stop

    g0 = run.measure_gap()
    if g0 <= stop.target_gap:
        return run.finish("gap_reached", g0)

    stage, k = 1, 0
    scan = ScanState()
    pick = _PAIR_SELECTORS[cfg.pair_rule]
    values = domain.lazy_atom_values(run.oracle, wp.point)
    while True:
        if run.total >= stop.max_inner_iterations:
            return run.finish("iteration_cap")
        delta, eps = sched.delta(stage), sched.eps(stage)
        choice = pick(values, wp.weights, eps, delta, scan)
        if choice is None:
            g = run.measure_gap()
            rep.restarts.append(Restart(stage, k, delta, eps, g, wp.point.copy(), dict(wp.weights)))
            if g <= stop.target_gap:
                return run.finish("gap_reached", g)
            if stage >= stop.max_stages:
                return run.finish("stage_cap", g)
            # the iterate is unchanged, so evaluated atom values stay valid
            stage, k = stage + 1, 0
            scan.reset()
            continue

        i, j, gamma = choice.i, choice.j, choice.gamma
        slope = values[j] - values[i]
        assert slope <= -delta, (slope, delta)
        x = wp.point.copy()
        d = domain.atom(j) - domain.atom(i)
        if isinstance(rule, Armijo):
            backtracks, lam, f_new = armijo(run.oracle.value, x, d, gamma, slope,
                                            rule.params, fx=run.f)
        else:
            if isinstance(rule, FixedLipschitz):
                lam = (fixed_step(rule.L, rule.B, cfg.armijo.beta, eps, delta)
                       if rule.L is not None else eps * delta)
            else:
                lam = divergent_step(k, eps)
            lam = min(lam, gamma)
            backtracks, f_new = 0, run.oracle.value(x + lam * d)
        domain.transfer(wp, i, j, lam)
        run.record(stage, k, i, j, lam, slope, delta, f_new, backtracks)
        k += 1
        values = domain.lazy_atom_values(run.oracle, wp.point)
        if run.total % cfg.gap_check_every == 0:
            g = run.measure_gap()
            if g <= stop.target_gap:
                return run.finish("gap_reached", g)


def cgm_solve(domain, objective, config=None, start=None, callback=None):
    """Conditional gradient method with Armijo backtracking from the full step.

    Each step moves toward the LMO atom ``j``: ``x <- (1 - lam) x + lam z^j``.
    Weights are updated the same way, so the support size is reportable.
    """
    run = _Run("CGM", domain, objective, config, start, callback)
    cfg, wp = run.config, run.wp
    run.report.step_info = {"rule": "armijo"}
    stop = cfg.stop
    while True:
        g = run.measure_gap()
        if g <= stop.target_gap:
            return run.finish("gap_reached", g)
        if run.total >= stop.max_inner_iterations:
            return run.finish("iteration_cap", g)
        x = wp.point.copy()
        grad = run.oracle.gradient(x)
        j, vj = domain.lmo(grad)
        slope = vj - float(grad @ x)
        if slope >= 0:
            return run.finish("stationary", g)
        d = domain.atom(j) - x
        backtracks, lam, f_new = armijo(run.oracle.value, x, d, 1.0, slope, cfg.armijo, fx=run.f)
        domain.blend(wp, j, lam)
        run.record(1, run.total, -1, j, lam, slope, 0.0, f_new, backtracks)


def mdm_solve(domain, objective, config=None, start=None, callback=None):
    """Marginal swap-direction method.

    Every iteration takes the exact away atom ``i`` (largest linearized value
    on the support) and the exact LMO atom ``j`` and transfers weight along
    ``z^j - z^i`` with Armijo capped at ``u_i``.
    """
    run = _Run("MDM", domain, objective, config, start, callback)
    cfg, wp = run.config, run.wp
    run.report.step_info = {"rule": "armijo"}
    stop = cfg.stop
    while True:
        g = run.measure_gap()
        if g <= stop.target_gap:
            return run.finish("gap_reached", g)
        if run.total >= stop.max_inner_iterations:
            return run.finish("iteration_cap", g)
        x = wp.point.copy()
        grad = run.oracle.gradient(x)
        vals = domain.atom_values(grad)
        j = int(np.argmin(vals))
        i = max(sorted(wp.weights), key=lambda s: vals[s])
        margin = float(vals[i] - vals[j])
        if margin <= 0:
            return run.finish("stationary", g)
        slope = -margin
        d = domain.atom(j) - domain.atom(i)
        backtracks, lam, f_new = armijo(run.oracle.value, x, d, wp.weights[i], slope,
                                        cfg.armijo, fx=run.f)
        domain.transfer(wp, i, j, lam)
        run.record(1, run.total, i, j, lam, slope, 0.0, f_new, backtracks)


SOLVERS = {"pvm": pvm_solve, "cgm": cgm_solve, "mdm": mdm_solve}


def solve(method, domain, objective, config=None, start=None, callback=None):
    try:
        fn = SOLVERS[method.lower()]
    except KeyError:
        raise ConfigError(f"unknown method {method!r}; expected one of {sorted(SOLVERS)}") from None
    return fn(domain, objective, config, start, callback)


TRACE_HEADER = ("stage", "k", "i", "j", "step", "f", "calc")


def write_trace(report, fh):
    """Write one CSV row per step: stage, k, i, j, step, f, calc-so-far."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for s in report.steps:
        writer.writerow([s.stage, s.k, s.i, s.j, repr(s.step), repr(s.f_after), s.calc])
