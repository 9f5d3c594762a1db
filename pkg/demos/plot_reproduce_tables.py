"""
Reproducing the benchmark tables
================================

Run the three methods on the six reference setups and compare iteration
counts with the published numbers.  The full sweep takes a few seconds.
"""
from pvmopt.bench import (PAPER_TABLES, emit_comparison, emit_table, paper_spec,
                          run_experiment)

###############################################################################
# One table
# ---------
# Setup 1 is the quadratic on the simplex from the barycenter.  Cells read
# ``it / calc``, or ``at CAP / calc, Δ=gap`` when the iteration cap was hit.
rows = run_experiment(paper_spec(1))
print(emit_table(rows))

###############################################################################
# Against the reference
# ---------------------
# ``ratio`` is our iteration count over the published one.
print(emit_comparison(rows, PAPER_TABLES[1]))

###############################################################################
# All six setups as CSV
# ---------------------
for t in range(1, 7):
    spec = paper_spec(t, dims=(5, 10))
    print(f"# setup {t}: {spec.problem}, start={spec.start}")
    print(emit_table(run_experiment(spec), "csv"))
