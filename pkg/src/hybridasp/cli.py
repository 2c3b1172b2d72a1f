"""``asp`` command line: design, evaluate, simulate, tables, case-study.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines (``#`` starts a comment), then command-line flags.
Keys use the option names with underscores, e.g. ``theta_A = 200``.

Exit codes: 0 success, 1 invalid input, 2 infeasible, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from .bayes import EstimatorDomainError, LossSpec, Prior, bayes_estimate
from .censoring import CensoringScheme, censor, mle
from .data import APPLIANCE_LIFETIMES, CASE_STUDY_PLANS, CASE_STUDY_SPEC, TABLE_COMPARISON, TABLES
from .mle_dist import PrecisionError
from .plan import PlanSpec, evaluate_plan
from .simulate import run_plan
from .solver import PlanSolution, SearchBounds, integer_thresholds, solve_plan

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3

CSV_HEADER = ["theta_A", "theta_U", "T", "alpha", "beta", "gamma", "t1", "t2", "n", "etc",
              "feasible", "slack_alpha", "slack_beta"]
COMPARISON_HEADER = ["table", "loss", "theta_A", "theta_U", "T", "alpha", "beta",
                     "gamma", "t1", "t2", "n", "etc", "feasible",
                     "published_gamma", "published_t1", "published_t2", "published_n", "published_etc",
                     "rel_gap", "note"]

DEFAULTS = {
    "seed": 0,
    "loss": "sel",
    "c": None,
    "a": 1.25,
    "b": 2.5,
    "C": 1.0,
    "d_convention": None,
    "n_max": 150,
    "t_max": None,
    "gamma_policy": "cost",
    "out": None,
    "raw": False,
    "integer_thresholds": False,
    "trials": 100_000,
    "duration": "estimate",
    "format": "jsonl",
    "tables": "1,2,3,4",
    "grid": None,
}

INT_KEYS = {"seed", "d_convention", "n_max", "n", "gamma", "trials"}
FLOAT_KEYS = {"c", "a", "b", "C", "t_max", "theta_A", "theta_U", "T", "alpha", "beta", "t1", "t2", "theta"}
BOOL_KEYS = {"raw", "integer_thresholds"}


class InvalidInput(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file into typed settings."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _coerce(key, value)
    return out


def _coerce(key, value):
    if value.lower() in ("none", ""):
        return None
    try:
        if key in INT_KEYS:
            return int(value)
        if key in FLOAT_KEYS:
            return float(value)
    except ValueError:
        raise InvalidInput(f"bad value for {key}: {value!r}") from None
    if key in BOOL_KEYS:
        return value.lower() in ("1", "true", "yes", "on")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("common")
    g.add_argument("--config", help="key = value settings file")
    g.add_argument("--seed", type=int)
    g.add_argument("--loss", choices=["sel", "linex"])
    g.add_argument("--c", type=float, help="Linex asymmetry")
    g.add_argument("--a", type=float, help="prior scale")
    g.add_argument("--b", type=float, help="prior shape")
    g.add_argument("--C", type=float, help="testing cost per unit time")
    g.add_argument("--d-convention", dest="d_convention", type=int)
    g.add_argument("--out")
    g.add_argument("--raw", action="store_true", help="full-precision numbers")
    g.add_argument("--integer-thresholds", dest="integer_thresholds", action="store_true")
    g.add_argument("-v", "--verbose", action="store_true")

    plan = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p = plan.add_argument_group("plan")
    p.add_argument("--theta-A", dest="theta_A", type=float)
    p.add_argument("--theta-U", dest="theta_U", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--gamma-policy", dest="gamma_policy", choices=["cost", "least"])

    design = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    d = design.add_argument_group("fixed design")
    d.add_argument("--n", type=int)
    d.add_argument("--gamma", type=int)
    d.add_argument("--t1", type=float)
    d.add_argument("--t2", type=float)

    parser = _Parser(prog="asp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("design", parents=[common, plan], help="solve for a cost-optimal plan")
    sub.add_parser("evaluate", parents=[common, plan, design], help="recompute ETC and risks of a given plan")
    s = sub.add_parser("simulate", parents=[common, plan, design], help="Monte Carlo run of a plan")
    s.add_argument("--theta", type=float, default=argparse.SUPPRESS, help="true mean life (default theta_A)")
    s.add_argument("--trials", type=int, default=argparse.SUPPRESS)
    s.add_argument("--duration", choices=["estimate", "t_star"], default=argparse.SUPPRESS)
    s.add_argument("--format", choices=["jsonl", "csv"], default=argparse.SUPPRESS)
    t = sub.add_parser("tables", parents=[common, plan], help="reproduce the published plan tables")
    t.add_argument("--tables", default=argparse.SUPPRESS, help="comma list from 1,2,3,4")
    t.add_argument("--grid", default=argparse.SUPPRESS,
                   help="CSV of theta_A,theta_U,T,alpha,beta rows replacing the published grid")
    sub.add_parser("case-study", parents=[common, plan], help="apply plans to the appliance data")
    return parser


def resolve_settings(argv) -> dict:
    args = vars(build_parser().parse_args(argv))
    settings = dict(DEFAULTS)
    if args.get("command") == "case-study":
        settings.update(CASE_STUDY_SPEC, n_max=len(APPLIANCE_LIFETIMES), integer_thresholds=True)
    if args.get("config"):
        settings.update(read_config(args["config"]))
    settings.update(args)
    return settings


def _fmt(x, raw):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return "" if x is None else str(x)
    if isinstance(x, int):
        return str(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return repr(float(x)) if raw else f"{x:.4f}"


def _loss(cfg) -> LossSpec:
    if cfg["loss"] == "sel":
        return LossSpec("sel")
    if cfg.get("c") is None:
        raise InvalidInput("--loss linex needs --c")
    return LossSpec.linex(cfg["c"])


def make_spec(cfg) -> PlanSpec:
    missing = [k for k in ("theta_A", "theta_U", "T", "alpha", "beta") if cfg.get(k) is None]
    if missing:
        raise InvalidInput(f"missing plan parameters: {', '.join(missing)}")
    try:
        return PlanSpec(cfg["theta_A"], cfg["theta_U"], cfg["T"], cfg["alpha"], cfg["beta"],
                        cfg["C"], Prior(cfg["a"], cfg["b"]), _loss(cfg))
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def design_row(spec: PlanSpec, sol: PlanSolution, raw=False) -> list[str]:
    vals = [spec.theta_A, spec.theta_U, spec.T, spec.alpha, spec.beta, sol.gamma,
            sol.t1, sol.t2, sol.n, sol.etc, sol.feasible, sol.slack_alpha, sol.slack_beta]
    return [_fmt(v, raw) for v in vals]


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def design_plan(spec, cfg) -> PlanSolution:
    bounds = SearchBounds(cfg["n_max"], cfg["t_max"])
    sol = solve_plan(spec, bounds, seed=cfg["seed"], d_convention=cfg["d_convention"],
                     gamma_policy=cfg["gamma_policy"])
    if cfg["integer_thresholds"] and sol.feasible:
        sol = integer_thresholds(spec, sol)
    return sol


def cmd_design(cfg) -> int:
    spec = make_spec(cfg)
    sol = design_plan(spec, cfg)
    _emit(_csv_text(CSV_HEADER, [design_row(spec, sol, cfg["raw"])]), cfg["out"])
    return EXIT_OK if sol.feasible else EXIT_INFEASIBLE


def _given_plan(spec, cfg) -> PlanSolution:
    missing = [k for k in ("n", "gamma", "t1", "t2") if cfg.get(k) is None]
    if missing:
        raise InvalidInput(f"missing design values: {', '.join(missing)}")
    try:
        scheme = CensoringScheme(cfg["n"], cfg["gamma"], spec.T)
        scheme.require_proper()
        ev = evaluate_plan(spec, scheme, cfg["t1"], cfg["t2"], cfg["d_convention"])
    except (EstimatorDomainError, PrecisionError, ZeroDivisionError):
        raise
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    return PlanSolution(cfg["gamma"], cfg["n"], cfg["t1"], cfg["t2"], ev.etc, ev.feasible,
                        ev.slack_alpha, ev.slack_beta, cfg["d_convention"])


def cmd_evaluate(cfg) -> int:
    spec = make_spec(cfg)
    sol = _given_plan(spec, cfg)
    _emit(_csv_text(CSV_HEADER, [design_row(spec, sol, cfg["raw"])]), cfg["out"])
    return EXIT_OK if sol.feasible else EXIT_INFEASIBLE


def cmd_simulate(cfg) -> int:
    spec = make_spec(cfg)
    if all(cfg.get(k) is not None for k in ("n", "gamma", "t1", "t2")):
        sol = _given_plan(spec, cfg)
    else:
        sol = design_plan(spec, cfg)
    if not sol.feasible:
        return EXIT_INFEASIBLE
    theta = cfg.get("theta") or spec.theta_A
    rep = run_plan(sol, spec, theta, cfg["trials"], cfg["seed"], duration=cfg["duration"])
    row = {"theta": theta, "gamma": sol.gamma, "n": sol.n, "t1": sol.t1, "t2": sol.t2, **rep.as_row()}
    if cfg["format"] == "csv":
        text = _csv_text(list(row), [[_fmt(v, cfg["raw"]) for v in row.values()]])
    else:
        text = json.dumps({k: (v if cfg["raw"] or not isinstance(v, float) else round(v, 4))
                           for k, v in row.items()}) + "\n"
    _emit(text, cfg["out"])
    return EXIT_OK


def read_grid(path) -> list[tuple]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(tuple(float(rec[k]) for k in ("theta_A", "theta_U", "T", "alpha", "beta")) + (None,) * 5)
    return rows


def table_jobs(cfg):
    """(table id, loss, c, row, reference ETC) for every requested table row."""
    wanted = [t.strip() for t in str(cfg["tables"]).split(",") if t.strip()]
    grid = read_grid(cfg["grid"]) if cfg.get("grid") else None
    jobs = []
    for tid in wanted:
        if tid in TABLES:
            kind, c, rows = TABLES[tid]
            for row in (grid if grid is not None else rows):
                jobs.append((tid, kind, c, row, None))
        elif tid == "4":
            src = TABLE_COMPARISON if grid is None else [r[:5] + (None, None, None) for r in grid]
            for r in src:
                jobs.append(("4", "sel", None, r[:5] + (None, None, None, None, r[5]), r[7]))
                jobs.append(("4", "linex", 0.5, r[:5] + (None, None, None, None, r[6]), r[7]))
        else:
            raise InvalidInput(f"unknown table {tid!r}")
    return jobs


def cmd_tables(cfg) -> int:
    raw = cfg["raw"]
    out_dir = Path(cfg["out"] or "tables_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    design_rows = {}
    comparison = []
    jobs = table_jobs(cfg)
    for tid, kind, c, row, ref in jobs:
        theta_A, theta_U, T, alpha, beta, p_gamma, p_t1, p_t2, p_n, p_etc = row
        note = ""
        try:
            spec = PlanSpec(theta_A, theta_U, T, alpha, beta, cfg["C"], Prior(cfg["a"], cfg["b"]),
                            LossSpec(kind, c))
            sol = design_plan(spec, cfg)
        except Exception as exc:  # recorded in-row; the run continues
            note = f"error: {exc}"
            sol = PlanSolution(None, None, math.nan, math.nan, math.nan, False, math.nan, math.nan)
        gap = (sol.etc - p_etc) / p_etc if p_etc and math.isfinite(sol.etc) else math.nan
        if not note and math.isfinite(gap) and abs(gap) > 0.15:
            note = "ETC gap above 15%; the failure-count convention inside the delta method is unstated"
        if ref is not None:
            note = "; ".join(filter(None, [f"Type I censoring MLE plan ETC {ref}", note]))
        base = [theta_A, theta_U, T, alpha, beta, sol.gamma, sol.t1, sol.t2, sol.n, sol.etc, sol.feasible,
                sol.slack_alpha, sol.slack_beta]
        design_rows.setdefault((tid, kind, c), []).append([_fmt(v, raw) for v in base])
        comparison.append([_fmt(v, raw) for v in [tid, str(LossSpec(kind, c)), *base[:11],
                                                   p_gamma, p_t1, p_t2, p_n, p_etc, gap]] + [note])
        logging.getLogger(__name__).info("table %s %s row %s -> ETC %.4f", tid, kind, row[:5], sol.etc)

    for tid, kind, c in sorted(set(design_rows), key=str):
        name = f"table{tid}_{kind}{'' if c is None else f'_c{c:g}'}.csv"
        (out_dir / name).write_text(_csv_text(CSV_HEADER, design_rows.get((tid, kind, c), [])))
    if not design_rows:
        (out_dir / "table_empty.csv").write_text(_csv_text(CSV_HEADER, []))
    (out_dir / "comparison.csv").write_text(_csv_text(COMPARISON_HEADER, comparison))
    return EXIT_OK


def case_study_decision(plan, spec_kwargs, prior, data=APPLIANCE_LIFETIMES):
    """Apply one plan (loss, c, gamma, n, t1, t2) to the first ``n`` data values."""
    kind, c, gamma, n, t1, t2 = plan
    scheme = CensoringScheme(n, gamma, spec_kwargs["T"])
    sample = censor(data[:n], scheme)
    theta_mle = mle(sample, scheme)
    est = float(bayes_estimate(theta_mle, sample.D, prior, LossSpec(kind, c)))
    decision = "accept" if est >= t2 else "reject" if est < t1 else "continue"
    return {"loss": str(LossSpec(kind, c)), "gamma": gamma, "n": n, "t1": t1, "t2": t2,
            "D": sample.D, "t_star": sample.t_star, "mle": theta_mle, "estimate": est, "decision": decision}


def cmd_case_study(cfg) -> int:
    raw = cfg["raw"]
    prior = Prior(cfg["a"], cfg["b"])
    spec_kwargs = {k: cfg[k] for k in ("theta_A", "theta_U", "T", "alpha", "beta")}
    lines = [f"appliance data: {len(APPLIANCE_LIFETIMES)} lifetimes; "
             + ", ".join(f"{k}={v:g}" for k, v in spec_kwargs.items())]
    for kind, c, gamma, n, t1, t2, p_est, p_etc in CASE_STUDY_PLANS:
        r = case_study_decision((kind, c, gamma, n, t1, t2), spec_kwargs, prior)
        spec = PlanSpec(**spec_kwargs, C=cfg["C"], prior=prior, loss=LossSpec(kind, c))
        ev = evaluate_plan(spec, CensoringScheme(n, gamma, spec.T), float(t1), float(t2), cfg["d_convention"])
        check = "ok" if abs(r["estimate"] - p_est) <= 1e-3 else "MISMATCH"
        lines.append(
            f"published {r['loss']} plan gamma={gamma} n={n} t1={t1} t2={t2}: D={r['D']} "
            f"T*={_fmt(r['t_star'], raw)} mle={_fmt(r['mle'], raw)} estimate={_fmt(r['estimate'], raw)} "
            f"(published {p_est}, {check}) -> {r['decision']}; model ETC={_fmt(ev.etc, raw)} "
            f"(published {p_etc})"
        )
        own = design_plan(spec, cfg)
        if own.feasible:
            r2 = case_study_decision((kind, c, own.gamma, own.n, own.t1, own.t2), spec_kwargs, prior)
            lines.append(
                f"designed  {r2['loss']} plan gamma={own.gamma} n={own.n} t1={_fmt(own.t1, raw)} "
                f"t2={_fmt(own.t2, raw)}: D={r2['D']} T*={_fmt(r2['t_star'], raw)} "
                f"estimate={_fmt(r2['estimate'], raw)} -> {r2['decision']}; ETC={_fmt(own.etc, raw)}"
            )
        else:
            lines.append(f"designed  {r['loss']} plan: infeasible within n <= {cfg['n_max']}")
    _emit("\n".join(lines) + "\n", cfg["out"])
    return EXIT_OK


COMMANDS = {
    "design": cmd_design,
    "evaluate": cmd_evaluate,
    "simulate": cmd_simulate,
    "tables": cmd_tables,
    "case-study": cmd_case_study,
}


def main(argv=None) -> int:
    try:
        cfg = resolve_settings(argv)
    except (InvalidInput, OSError) as exc:
        print(f"asp: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if cfg.get("verbose") else logging.WARNING)
    try:
        return COMMANDS[cfg["command"]](cfg)
    except InvalidInput as exc:
        print(f"asp: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (PrecisionError, EstimatorDomainError, ZeroDivisionError, RuntimeError) as exc:
        print(f"asp: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
