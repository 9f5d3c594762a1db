import io

import pytest

from pvmopt import cli
from pvmopt.bench import (BENCH_SCHEDULE, PAPER_TABLES, ExperimentSpec,
                          ResultRow, compare, emit_comparison, emit_table,
                          paper_spec, paper_specs, run_experiment,
                          spec_from_config)
from pvmopt.errors import ConfigError


def test_emit_csv_reached_row():
    out = emit_table([ResultRow("PVM", 5, 11, 53, True)], "csv")
    assert out == "method,m,it,calc,reached,gap_at_cap\nPVM,5,11,53,true,\n"


def test_emit_csv_capped_row():
    out = emit_table([ResultRow("CGM", 10, 500, 5000, False, 0.25)], "csv")
    assert out.splitlines()[1] == "CGM,10,500,5000,false,0.25"


def test_emit_default_is_text():
    rows = [ResultRow("PVM", 5, 11, 53, True), ResultRow("CGM", 5, 500, 2500, False, 0.4)]
    text = emit_table(rows, "")
    assert "11 / 53" in text and "at 500 / 2500, Δ=0.40" in text
    assert text == emit_table(rows)


def test_emit_rejects_empty_and_unknown_format():
    with pytest.raises(ConfigError):
        emit_table([])
    with pytest.raises(ConfigError):
        emit_table([ResultRow("PVM", 5, 11, 53, True)], "json")


def test_spec_validation():
    with pytest.raises(ConfigError, match="simplex-ish"):
        ExperimentSpec("simplex-ish", "uniform")
    with pytest.raises(ConfigError, match="newton"):
        ExperimentSpec("quad-simplex", "uniform", methods=("pvm", "newton"))
    with pytest.raises(ConfigError):
        ExperimentSpec("quad-simplex", "uniform", dims=())
    with pytest.raises(ConfigError):
        ExperimentSpec("quad-simplex", "uniform", target_gap=0)


def test_single_atom_experiment():
    rows = run_experiment(ExperimentSpec("quad-simplex", "uniform", dims=(1,)))
    assert [(r.method, r.it, r.calc, r.reached) for r in rows] == [
        ("CGM", 0, 0, True), ("MDM", 0, 0, True), ("PVM", 0, 0, True)]


def test_rows_sorted_and_deterministic():
    spec = ExperimentSpec("convex-scaled", "vertex", dims=(10, 5), methods=("pvm", "cgm"))
    rows = run_experiment(spec)
    assert [(r.method, r.m) for r in rows] == [("CGM", 5), ("CGM", 10), ("PVM", 5), ("PVM", 10)]
    assert emit_table(rows, "csv") == emit_table(run_experiment(spec), "csv")


def test_table5_mdm_cell():
    rows = run_experiment(paper_spec(5, dims=(10,), methods=("mdm",)))
    assert (rows[0].it, rows[0].calc) == (29, 290)
    assert PAPER_TABLES[5]["MDM"][10] == (29, 290, None)


def test_paper_specs_cover_six_setups():
    specs = paper_specs()
    assert len({(s.problem, s.start) for s in specs}) == 6
    assert all(s.dims == (5, 10, 20, 50, 100) for s in specs)
    assert all(s.schedule == BENCH_SCHEDULE for s in specs)
    with pytest.raises(ConfigError):
        paper_spec(7)


def test_reference_table1_values():
    ref = PAPER_TABLES[1]
    assert ref["PVM"][5] == (11, 53, None)
    assert ref["CGM"][10] == (500, 5000, 0.25)
    assert ref["MDM"][100] == (221, 22100, None)


def test_compare_ratios():
    rows = [ResultRow("PVM", 5, 22, 90, True)]
    c = compare(rows, PAPER_TABLES[1])[0]
    assert c.ratio == 2.0 and c.ref_calc == 53
    assert "2.00" in emit_comparison(rows, PAPER_TABLES[1])


CONFIG = """
[experiment]
problem = quad-scaled
start = vertex
dims = 5, 10
methods = mdm, pvm   ; two methods
target_gap = 0.1

[pvm]
delta0 = 50
eps0 = 0.02
pair_rule = first_hit

[armijo]
beta = 0.4
"""


def test_config_roundtrip():
    spec = spec_from_config(CONFIG)
    assert spec.dims == (5, 10) and spec.methods == ("MDM", "PVM")
    assert spec.schedule.delta0 == 50 and spec.schedule.eps0 == 0.02
    assert spec.pair_rule == "first_hit" and spec.armijo.beta == 0.4


@pytest.mark.parametrize("text,token", [
    ("[experiment]\nstart = vertex\n", "problem"),
    ("[experiment]\nproblem = quad-simplex\nstart = vertex\ndims = 5, x\n", "dims"),
    ("[experiment]\nproblem = quad-simplex\nstart = vertex\n[extra]\n", "extra"),
    ("[experiment]\nproblem = quad-simplex\nstart = vertex\ntau = ten\n", "tau"),
    ("no sections here", "parse"),
])
def test_config_errors_name_the_token(text, token):
    with pytest.raises(ConfigError, match=token):
        spec_from_config(text)


# -- CLI ------------------------------------------------------------------------------

def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out)
    return code, out.getvalue()


def test_cli_solve_summary():
    code, out = run(["solve", "--problem", "quad-simplex", "--m", "5", "--method", "pvm",
                     "--start", "uniform"])
    assert code == 0
    assert "it " in out and "calc " in out and "final gap" in out


def test_cli_solve_trace(tmp_path):
    trace = tmp_path / "trace.csv"
    code, _ = run(["solve", "--problem", "convex-scaled", "--m", "6", "--method", "mdm",
                   "--start", "vertex", "--trace", str(trace)])
    assert code == 0
    assert trace.read_text().splitlines()[0] == "stage,k,i,j,step,f,calc"


def test_cli_bench_table_csv():
    code, out = run(["bench", "--table", "1", "--dims", "5", "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "method,m,it,calc,reached,gap_at_cap"
    assert len(lines) == 4


def test_cli_bench_from_config(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(CONFIG)
    code, out = run(["bench", "--config", str(cfg)])
    assert code == 0 and "PVM" in out and "MDM" in out


def test_cli_check_point():
    code, out = run(["check", "--domain", "simplex", "--tau", "1", "--point", "0.5,0.5",
                     "--grad-of", "quad-simplex"])
    assert code == 0
    assert "gap" in out and "stationary      true" in out


def test_cli_check_point_file(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("10\n0\n0\n")
    code, out = run(["check", "--domain", "scaled", "--tau", "10", "--point", str(f),
                     "--grad-of", "quad-scaled"])
    assert code == 1  # (10, 0, 0) misses <a, x> = 10 on the scaled simplex
    f.write_text(f"{10 / (1.5 + 0.8414709848078965)}\n0\n0\n")
    code, out = run(["check", "--domain", "scaled", "--tau", "10", "--point", str(f),
                     "--grad-of", "quad-scaled"])
    assert code == 0 and "stationary      false" in out


def test_cli_config_errors_exit_1():
    assert run(["bench", "--table", "9"])[0] == 1
    assert run(["solve", "--problem", "nope", "--m", "3"])[0] == 1
    assert run(["bench"])[0] == 1
    assert run(["bench", "--config", "/no/such/file.ini"])[0] == 1
    assert run(["solve", "--problem", "quad-simplex", "--m", "3", "--eps0", "2"])[0] == 1


def test_cli_contract_violation_exit_2(monkeypatch):
    from pvmopt.errors import LineSearchError

    def broken(*a, **k):
        raise LineSearchError("synthetic", last_step=1e-18, last_value=0.0)

    monkeypatch.setattr(cli, "solve", broken)
    assert run(["solve", "--problem", "quad-simplex", "--m", "3"])[0] == 2


def test_cli_paper_tables_csv():
    code, out = run(["paper-tables", "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "table,method,m,it,calc,reached,gap_at_cap"
    assert len(lines) == 1 + 6 * 15
