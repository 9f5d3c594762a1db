"""
Stationarity, gaps and the restart certificate
==============================================

At a point written as a convex combination of atoms, three descriptions of
stationarity coincide.  This script checks them on small instances and then
confirms that every restart of a run lands inside its certified gap bound.
"""
import numpy as np

from pvmopt import (ScaledSimplex, SolverConfig, check_stationarity, make_problem,
                    pvm_solve, restart_gap_bound, sigma_over_run, start_point)
from pvmopt.bench import BENCH_SCHEDULE

###############################################################################
# Three equivalent tests
# ----------------------
dom = ScaledSimplex.standard(3, 1.0)
g = np.array([1.0, 1.0, 3.0])
for weights in ({0: 0.5, 1: 0.5}, {0: 0.5, 2: 0.5}):
    rep = check_stationarity(dom, dom.point_from_weights(weights), g, tol=0.0)
    print(weights, "stationary:", rep.is_stationary, "consistent:", rep.consistent,
          "witness:", rep.witness)

###############################################################################
# Restart certificate
# -------------------
# When no admissible pair remains, the gap is at most delta + 2 n eps sigma.
domain, f = make_problem("convex-scaled", 20)
run = pvm_solve(domain, f, SolverConfig(schedule=BENCH_SCHEDULE, gap_check_every=1),
                start_point(domain, "vertex"))
sigma = sigma_over_run(run, domain, f)
print(f"sigma: analytic {sigma.analytic:.3g}, seen along the run {sigma.empirical:.3g}")
for c in restart_gap_bound(run, domain.n, sigma, BENCH_SCHEDULE)[:8]:
    print(f"stage {c.stage}: gap {c.gap:.3g} <= bound {c.bound:.3g}: {c.holds}")
