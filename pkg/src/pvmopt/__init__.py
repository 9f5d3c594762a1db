"""Projection-free minimization over atomic polyhedra by pairwise variations."""
from .diagnostics import (check_stationarity, complexity_constants, gap,
                          restart_gap_bound, sigma_over_run, weight_probe)
from .domains import (DiameterBound, ExplicitAtoms, ScaledSimplex, WeightedPoint,
                      load_atoms_csv)
from .errors import AtomFileError, ConfigError, DomainError, LineSearchError
from .objectives import (ConvexBarrierObjective, GradientOracle, LinearObjective,
                         QuadraticObjective, build_convex, build_quadratic,
                         lipschitz, make_problem, start_point)
from .solvers import (PAIR_RULES, RunReport, SolverConfig, StopCriteria,
                      ToleranceSchedule, cgm_solve, mdm_solve, pvm_solve,
                      select_pair, select_pair_first_hit, solve, write_trace)
from .bench import (BENCH_SCHEDULE, ExperimentSpec, ResultRow, emit_table,
                    paper_spec, run_experiment)
from .stepsize import (Armijo, ArmijoParams, Divergent, FixedLipschitz, armijo,
                       divergent_step, fixed_step)

__version__ = "0.1.0"
