"""Benchmark harness: experiment specs, table runs and result emission.

An :class:`ExperimentSpec` names a problem family, a start, a list of
dimensions and the methods to compare. :func:`run_experiment` produces one
:class:`ResultRow` per (method, m) cell and :func:`emit_table` renders rows
as CSV or as an ``it / calc`` grid.

Config files use INI syntax (``configparser``)::

    [experiment]
    problem = quad-scaled        ; quad-simplex | convex-simplex | quad-scaled | convex-scaled
    start = vertex               ; uniform | vertex
    dims = 5, 10, 20
    methods = cgm, mdm, pvm
    q_mode = sin_over_i          ; optional, zero | sin_over_i
    tau = 10
    target_gap = 0.1
    max_iterations = 500

    [pvm]                        ; optional
    delta0 = 100
    eps0 = 0.01
    nu = 0.5
    gap_check_every = 1
    pair_rule = interleaved      ; interleaved | first_hit
    step = armijo                ; armijo | fixed | divergent

    [armijo]                     ; optional
    beta = 0.5
    theta = 0.5
"""
import configparser
import csv
import io
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .objectives import PROBLEMS, Q_MODES, STARTS, make_problem, start_point
from .solvers import (PAIR_RULES, SOLVERS, SolverConfig, StopCriteria,
                      ToleranceSchedule)
from .stepsize import STEP_RULES, ArmijoParams, step_rule_from_name

METHODS = ("CGM", "MDM", "PVM")
PAPER_DIMS = (5, 10, 20, 50, 100)

# PVM tolerances used by the benchmark. The atom values of these problems
# spread over tens to thousands of units, so the stage where the pair test
# starts to bite should come after eps_l has fallen below 1/m.
BENCH_SCHEDULE = ToleranceSchedule(delta0=100.0, eps0=0.01, nu=0.5)


@dataclass(frozen=True)
class ExperimentSpec:
    """One benchmark table.

    ``methods`` are upper-case names from :data:`METHODS`. ``reference``
    holds published ``{method: {m: (it, calc, gap_at_cap)}}`` values, if any.
    ``seed`` is kept for config compatibility; every run is deterministic.
    """

    problem: str
    start: str
    dims: tuple = PAPER_DIMS
    methods: tuple = METHODS
    q_mode: str = None
    tau: float = 10.0
    target_gap: float = 0.1
    max_iterations: int = 500
    schedule: ToleranceSchedule = BENCH_SCHEDULE
    armijo: ArmijoParams = ArmijoParams()
    step: str = "armijo"
    gap_check_every: int = 1
    pair_rule: str = "interleaved"
    name: str = ""
    seed: int = 0
    reference: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}; expected one of {PROBLEMS}")
        if self.start not in STARTS:
            raise ConfigError(f"unknown start {self.start!r}; expected one of {STARTS}")
        if self.q_mode is not None and self.q_mode not in Q_MODES:
            raise ConfigError(f"unknown q_mode {self.q_mode!r}; expected one of {Q_MODES}")
        dims = tuple(int(m) for m in self.dims)
        if not dims or min(dims) < 1:
            raise ConfigError("dims must be a nonempty list of positive integers")
        methods = tuple(_method_name(s) for s in self.methods)
        if not methods:
            raise ConfigError("methods must not be empty")
        if not self.target_gap > 0:
            raise ConfigError("target_gap must be positive")
        if not self.tau > 0:
            raise ConfigError("tau must be positive")
        if self.max_iterations < 0:
            raise ConfigError("max_iterations must be nonnegative")
        if self.step not in STEP_RULES:
            raise ConfigError(f"unknown step rule {self.step!r}; expected one of {STEP_RULES}")
        if self.pair_rule not in PAIR_RULES:
            raise ConfigError(f"unknown pair rule {self.pair_rule!r}; expected one of {PAIR_RULES}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "methods", methods)

    def solver_config(self):
        return SolverConfig(
            armijo=self.armijo,
            step_rule=step_rule_from_name(self.step, self.armijo),
            schedule=self.schedule,
            stop=StopCriteria(target_gap=self.target_gap, max_inner_iterations=self.max_iterations),
            gap_check_every=self.gap_check_every,
            pair_rule=self.pair_rule,
        )


def _method_name(name):
    up = str(name).strip().upper()
    if up not in METHODS:
        raise ConfigError(f"unknown method {name!r}; expected one of {METHODS}")
    return up


@dataclass(frozen=True)
class ResultRow:
    method: str
    m: int
    it: int
    calc: int
    reached: bool
    gap_at_cap: float = None


def run_cell(spec, method, m):
    """Run one (method, m) cell and return its :class:`ResultRow`."""
    domain, objective = make_problem(spec.problem, m, spec.q_mode, spec.tau)
    start = start_point(domain, spec.start)
    rep = SOLVERS[method.lower()](domain, objective, spec.solver_config(), start)
    gap_at_cap = None if rep.reached else rep.final_gap
    return ResultRow(method, m, rep.iterations, rep.partial_calls, rep.reached, gap_at_cap)


def run_experiment(spec):
    """All (method, m) cells of ``spec``, sorted by method then ``m``."""
    rows = [run_cell(spec, method, m) for method in spec.methods for m in spec.dims]
    return sorted(rows, key=lambda r: (r.method, r.m))


CSV_HEADER = ("method", "m", "it", "calc", "reached", "gap_at_cap")


def _cell(it, calc, reached, gap_at_cap):
    if reached:
        return f"{it} / {calc}"
    return f"at {it} / {calc}, Δ={gap_at_cap:.2f}"


def emit_table(rows, format="text"):
    """Render rows as CSV or as an aligned ``it / calc`` grid (one line per ``m``)."""
    rows = list(rows)
    if not rows:
        raise ConfigError("no rows to emit")
    format = format or "text"
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            gap = "" if r.gap_at_cap is None else f"{r.gap_at_cap:.2f}"
            w.writerow([r.method, r.m, r.it, r.calc, "true" if r.reached else "false", gap])
        return buf.getvalue()
    if format != "text":
        raise ConfigError(f"unknown format {format!r}; expected csv or text")
    methods = [m for m in METHODS if any(r.method == m for r in rows)]
    dims = sorted({r.m for r in rows})
    by = {(r.method, r.m): r for r in rows}
    grid = [["m"] + methods]
    for m in dims:
        line = [str(m)]
        for meth in methods:
            r = by.get((meth, m))
            line.append("-" if r is None else _cell(r.it, r.calc, r.reached, r.gap_at_cap))
        grid.append(line)
    return _render(grid)


def _render(grid):
    widths = [max(len(row[c]) for row in grid) for c in range(len(grid[0]))]
    lines = ["  ".join(s.ljust(w) for s, w in zip(row, widths)).rstrip() for row in grid]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# -- published reference values ------------------------------------------------

def _ref(cgm, mdm, pvm):
    """Pack ``{m: (it, calc, gap)}`` cells; ``gap`` is set only for capped cells."""
    out = {}
    for name, cells in (("CGM", cgm), ("MDM", mdm), ("PVM", pvm)):
        out[name] = {m: (c if len(c) == 3 else (c[0], c[1], None)) for m, c in zip(PAPER_DIMS, cells)}
    return out


PAPER_TABLES = {
    1: _ref([(202, 1010), (500, 5000, 0.25), (500, 10000, 0.11), (500, 25000, 0.39), (500, 50000, 0.62)],
            [(11, 55), (34, 340), (49, 980), (87, 4350), (221, 22100)],
            [(11, 53), (37, 279), (50, 703), (108, 3574), (267, 17594)]),
    2: _ref([(47, 235), (194, 1940), (500, 10000, 0.44), (500, 25000, 1.22), (500, 50000, 2.93)],
            [(14, 70), (37, 370), (124, 2480), (326, 16300), (500, 50000, 0.31)],
            [(17, 74), (42, 307), (124, 1668), (211, 7046), (399, 25213)]),
    3: _ref([(203, 1015), (500, 5000, 0.21), (491, 9820), (500, 25000, 0.41), (500, 50000, 0.61)],
            [(11, 55), (34, 340), (53, 1060), (83, 4150), (211, 21100)],
            [(11, 53), (38, 287), (46, 666), (107, 3427), (267, 17012)]),
    4: _ref([(44, 220), (198, 1980), (500, 10000, 0.45), (500, 25000, 1.24), (500, 50000, 2.97)],
            [(14, 70), (37, 370), (114, 2280), (319, 15950), (500, 50000, 0.33)],
            [(15, 67), (43, 312), (138, 1839), (227, 7354), (405, 25758)]),
    5: _ref([(20, 100), (82, 820), (199, 3980), (500, 25000, 0.21), (500, 50000, 0.62)],
            [(9, 45), (29, 290), (48, 960), (101, 5050), (203, 20300)],
            [(11, 48), (27, 210), (49, 644), (119, 3630), (286, 17080)]),
    6: _ref([(20, 100), (79, 790), (204, 4080), (500, 25000, 0.19), (500, 50000, 0.64)],
            [(7, 35), (27, 270), (49, 980), (100, 5000), (210, 21000)],
            [(11, 48), (25, 189), (51, 677), (117, 3618), (307, 18468)]),
}

_TABLE_SETUPS = {
    1: ("quad-simplex", "uniform", "quadratic cost, simplex, barycenter start"),
    2: ("quad-simplex", "vertex", "quadratic cost, simplex, vertex start"),
    3: ("convex-simplex", "uniform", "convex cost, simplex, barycenter start"),
    4: ("convex-simplex", "vertex", "convex cost, simplex, vertex start"),
    5: ("quad-scaled", "vertex", "quadratic cost, scaled simplex, vertex start"),
    6: ("convex-scaled", "vertex", "convex cost, scaled simplex, vertex start"),
}


def paper_spec(table, **overrides):
    """Built-in spec for reference table ``table`` (1 to 6)."""
    try:
        problem, start, title = _TABLE_SETUPS[int(table)]
    except (KeyError, ValueError):
        raise ConfigError(f"unknown table {table!r}; expected 1 to 6") from None
    spec = ExperimentSpec(problem, start, name=f"Table {int(table)}: {title}",
                          reference=PAPER_TABLES[int(table)])
    return replace(spec, **overrides) if overrides else spec


def paper_specs():
    return [paper_spec(t) for t in sorted(_TABLE_SETUPS)]


@dataclass(frozen=True)
class Comparison:
    method: str
    m: int
    it: int
    ref_it: int
    calc: int
    ref_calc: int
    reached: bool
    ref_reached: bool

    @property
    def ratio(self):
        return self.it / self.ref_it if self.ref_it else float("nan")


def compare(rows, reference):
    """Pair rows with reference cells; cells without a reference are skipped."""
    out = []
    for r in rows:
        ref = (reference or {}).get(r.method, {}).get(r.m)
        if ref is None:
            continue
        it, calc, gap = ref
        out.append(Comparison(r.method, r.m, r.it, it, r.calc, calc, r.reached, gap is None))
    return out


def emit_comparison(rows, reference):
    """Side-by-side text table of measured and reference ``it / calc`` cells."""
    grid = [["method", "m", "measured", "reference", "it ratio"]]
    for c in compare(rows, reference):
        r = next(x for x in rows if x.method == c.method and x.m == c.m)
        ref = reference[c.method][c.m]
        grid.append([c.method, str(c.m), _cell(r.it, r.calc, r.reached, r.gap_at_cap),
                     _cell(ref[0], ref[1], ref[2] is None, ref[2]), f"{c.ratio:.2f}"])
    return _render(grid)


# -- config files ----------------------------------------------------------------

def _split(text):
    return [s.strip() for s in text.replace(";", ",").split(",") if s.strip()]


def _number(section, key, kind, default):
    if key not in section:
        return default
    raw = section[key]
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not a valid {kind.__name__}") from None


def spec_from_config(text):
    """Parse an INI experiment description (see module docstring)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    known = {"experiment", "pvm", "armijo"}
    extra = set(parser.sections()) - known
    if extra:
        raise ConfigError(f"unknown config section(s) {sorted(extra)}; expected {sorted(known)}")
    if not parser.has_section("experiment"):
        raise ConfigError("config needs an [experiment] section")
    ex = parser["experiment"]
    for key in ("problem", "start"):
        if key not in ex:
            raise ConfigError(f"[experiment] needs a {key!r} entry")
    kw = {}
    if "dims" in ex:
        try:
            kw["dims"] = tuple(int(s) for s in _split(ex["dims"]))
        except ValueError:
            raise ConfigError(f"[experiment] dims = {ex['dims']!r} must list integers") from None
    if "methods" in ex:
        kw["methods"] = tuple(_split(ex["methods"]))
    if "q_mode" in ex:
        kw["q_mode"] = ex["q_mode"]
    kw["tau"] = _number(ex, "tau", float, 10.0)
    kw["target_gap"] = _number(ex, "target_gap", float, 0.1)
    kw["max_iterations"] = _number(ex, "max_iterations", int, 500)
    kw["seed"] = _number(ex, "seed", int, 0)
    if "name" in ex:
        kw["name"] = ex["name"]
    if parser.has_section("pvm"):
        pv = parser["pvm"]
        kw["schedule"] = ToleranceSchedule(
            _number(pv, "delta0", float, BENCH_SCHEDULE.delta0),
            _number(pv, "eps0", float, BENCH_SCHEDULE.eps0),
            _number(pv, "nu", float, BENCH_SCHEDULE.nu))
        kw["gap_check_every"] = _number(pv, "gap_check_every", int, 1)
        kw["pair_rule"] = pv.get("pair_rule", "interleaved")
        kw["step"] = pv.get("step", "armijo")
    if parser.has_section("armijo"):
        ar = parser["armijo"]
        kw["armijo"] = ArmijoParams(_number(ar, "beta", float, 0.5), _number(ar, "theta", float, 0.5),
                                    _number(ar, "max_backtracks", int, 60))
    return ExperimentSpec(ex["problem"], ex["start"], **kw)


def load_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return spec_from_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
