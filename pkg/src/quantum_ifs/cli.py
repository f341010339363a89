"""``qifs`` command line: validate systems and run every analysis on JSON inputs.

Exit status: 0 success, 2 parse or validation failure, 3 non-convergence,
4 infeasible or degenerate input. Branch and coordinate indices on the
command line and in reports are 1-based.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import fileio
from .errors import (CoordinateUnusable, DegenerateBranch, DominanceWarning, LogOfZero, NoConvergence,
                     NotUnitary, QifsError, ValidationError, ZeroEntry, ZeroPotentialTrace)
from .matrixcore import TOL_PSD, hs_distance, is_unitary, maximally_mixed, validate_density
from .measures import (MERGE_TOL, WORD_CAP, barycenter, entropy_of_measure, invariance_residual,
                       markov_push, markov_push_n, partial_entropy_measure)
from .qifs import (OPERATOR_NORMALIZED, TOL_NORM, fixed_point, kraus_deviation, lambda_map,
                   normalization_deviation)
from .spectral import closed_form_2x2, diagonal_template, embed_markov_kraus, embed_perron, power_eigenpair
from .thermo import (WeightGrid, basic_inequality, basic_inequality_coords, build_basic_from_classic,
                     capacity_from_rows, classic_inequality, evaluate_grid, lagrangian_from_rows,
                     markov_entropy, maximizer_unitary, reduced_basic_inequality, stationary_entropy,
                     stationary_entropy_alt)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000


@dataclass
class Report:
    command: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    wall_time_s: float = 0.0
    csv_rows: list[dict] | None = None

    def add_input(self, name: str, raw: bytes):
        self.inputs[name] = fileio.digest(raw)


def _is_matrix(x) -> bool:
    return isinstance(x, np.ndarray) and x.ndim == 2


def _jsonable(x):
    if _is_matrix(x):
        return fileio.matrix_to_json(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(y) for y in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _fmt_num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (complex, np.complexfloating)):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _fmt_entry(z: complex) -> str:
    return f"{z.real:.17g}" if z.imag == 0 else f"{z.real:.17g}{z.imag:+.17g}j"


def _text_lines(key: str, val, indent: str = "") -> list[str]:
    if _is_matrix(val):
        rows = ["[" + ", ".join(_fmt_entry(complex(z)) for z in row) + "]" for row in val]
        return [f"{indent}{key} ="] + [f"{indent}  {r}" for r in rows]
    if isinstance(val, dict):
        out = [f"{indent}{key}:"]
        for k, v in val.items():
            out += _text_lines(k, v, indent + "  ")
        return out
    if isinstance(val, (list, tuple)) and val and (isinstance(val[0], (dict, np.ndarray))):
        out = [f"{indent}{key}:"]
        for i, v in enumerate(val, 1):
            out += _text_lines(f"[{i}]", v, indent + "  ")
        return out
    if isinstance(val, (list, tuple, np.ndarray)):
        return [f"{indent}{key} = [" + ", ".join(_fmt_num(v) for v in val) + "]"]
    return [f"{indent}{key} = {_fmt_num(val)}"]


def _flatten(prefix: str, val, out: list):
    if _is_matrix(val):
        for i, row in enumerate(val, 1):
            for j, z in enumerate(row, 1):
                out.append((f"{prefix}[{i}][{j}]", _fmt_entry(complex(z))))
    elif isinstance(val, dict):
        for k, v in val.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(val, (list, tuple, np.ndarray)):
        for i, v in enumerate(val, 1):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, _fmt_num(val)))


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        doc = {"command": report.command, "inputs": report.inputs, "log_base": "e",
               "results": _jsonable(report.results), "diagnostics": _jsonable(report.diagnostics),
               "warnings": report.warnings, "timing": {"wall_time_s": report.wall_time_s}}
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        if report.csv_rows is not None:
            w = csv.DictWriter(buf, fieldnames=list(report.csv_rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(report.csv_rows)
            return buf.getvalue()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "key", "value"])
        for section in ("results", "diagnostics"):
            rows: list = []
            _flatten("", getattr(report, section), rows)
            for k, v in rows:
                w.writerow([section, k, v])
        return buf.getvalue()
    lines = [f"command: {' '.join(report.command)}"]
    lines += [f"input {k} sha256 {v}" for k, v in report.inputs.items()]
    lines.append("log base: e")
    lines.append("[results]")
    for k, v in report.results.items():
        lines += _text_lines(k, v)
    if report.diagnostics:
        lines.append("[diagnostics]")
        for k, v in report.diagnostics.items():
            lines += _text_lines(k, v)
    for w in report.warnings:
        lines.append(f"warning: {w}")
    lines.append("[timing]")
    lines.append(f"wall_time_s = {report.wall_time_s:.6f}")
    return "\n".join(lines) + "\n"


def _load(report: Report, args, name: str = "system") -> fileio.SystemFile:
    raw = fileio.read_bytes(args.system)
    report.add_input(name, raw)
    return fileio.parse_system(fileio.loads(raw))


def _tol(args, sf) -> float:
    if args.tol is not None:
        return args.tol
    return sf.options.tol if sf.options.tol is not None else DEFAULT_TOL


def _max_iter(args, sf) -> int:
    if args.max_iter is not None:
        return args.max_iter
    return sf.options.max_iter if sf.options.max_iter is not None else DEFAULT_MAX_ITER


def _start(report: Report, args, dim: int):
    if args.start in (None, "maximally-mixed"):
        return maximally_mixed(dim)
    m, raw = fileio.load_matrix(args.start)
    report.add_input("start", raw)
    return validate_density(m, args.tol_psd)


def _solve_fixed(report, args, sf):
    res = fixed_point(sf.system, _start(report, args, sf.system.dim), tol=_tol(args, sf),
                      max_iter=_max_iter(args, sf), tol_branch=args.tol_branch, tol_psd=args.tol_psd)
    report.diagnostics["fixed_point_iterations"] = res.iterations
    report.diagnostics["fixed_point_residual"] = res.residual
    return res


def _solve_eigen(report, args, sf, check_unique=True):
    e = power_eigenpair(sf.system, _start(report, args, sf.system.dim), tol=_tol(args, sf),
                        max_iter=_max_iter(args, sf), tol_branch=args.tol_branch,
                        potential=getattr(args, "potential", "h"), check_unique=check_unique)
    report.diagnostics["eigen_iterations"] = e.iterations
    report.diagnostics["eigen_residual"] = e.residual
    if e.unique is not None:
        report.diagnostics["eigen_start_independent"] = e.unique
    return e


def cmd_validate(args, report: Report) -> int:
    checks: dict[str, str] = {}
    status = 0
    try:
        sf = _load(report, args)
    except ValidationError as exc:
        if exc.invariant == "parse":
            checks["parse"] = f"FAIL: {exc}"
        else:
            checks["parse"] = "pass"
            checks[exc.invariant or "structure"] = f"FAIL: {exc}"
        report.results["checks"] = checks
        report.results["valid"] = False
        raise
    s = sf.system
    checks["parse"] = "pass"
    checks["dimension"] = f"pass (N={s.dim}, k={s.k})"
    if s.normalization_mode == OPERATOR_NORMALIZED:
        checks["normalization"] = f"pass (max deviation {normalization_deviation(s.weight_ops()):.3e})"
    elif s.normalization_mode is not None:
        checks["normalization"] = f"pass (constant weights sum to {sum(s.constant_weights):.17g})"
    else:
        checks["normalization"] = "not applicable (no weights; eigen-only system)"
    dev = kraus_deviation(s)
    if sf.claims.get("cptp"):
        ok = dev <= s.tol_norm
        checks["cptp"] = f"{'pass' if ok else 'FAIL'} (sum V_i* V_i deviates from I by {dev:.3e})"
        status = status or (0 if ok else 2)
    if sf.claims.get("unitary"):
        bad = [i + 1 for i, v in enumerate(s.v_ops) if not is_unitary(v, s.tol_norm)]
        checks["unitary"] = "pass" if not bad else f"FAIL (branches {bad} are not unitary)"
        status = status or (0 if not bad else 2)
    report.results["checks"] = checks
    report.results["valid"] = status == 0
    report.results["normalization_mode"] = s.normalization_mode or "none"
    report.results["has_potential"] = s.has_potential
    report.diagnostics["kraus_deviation"] = dev
    return status


def cmd_fixed_point(args, report):
    sf = _load(report, args)
    res = _solve_fixed(report, args, sf)
    report.results["rho"] = res.rho.matrix
    report.results["iterations"] = res.iterations
    report.results["residual"] = res.residual
    report.diagnostics["lambda_residual"] = hs_distance(lambda_map(sf.system, res.rho), res.rho)
    report.diagnostics["start"] = args.start or "maximally-mixed"
    return 0


def cmd_eigen(args, report):
    sf = _load(report, args)
    e = _solve_eigen(report, args, sf, check_unique=not args.no_check_unique)
    report.results["beta"] = e.beta
    report.results["rho_beta"] = e.rho_beta.matrix
    report.results["residual"] = e.residual
    coeffs = diagonal_template(sf.system) if args.potential == "h" else None
    if coeffs is not None:
        cf = closed_form_2x2(*coeffs)
        closed = {"coefficients": list(coeffs), "beta": cf.beta, "lambda_minus": cf.eigenvalues[1]}
        if cf.rho_beta is not None:
            closed["rho_beta"] = cf.rho_beta.matrix
            closed["rho_distance"] = hs_distance(cf.rho_beta, e.rho_beta)
        closed["beta_difference"] = abs(cf.beta - e.beta)
        report.results["closed_form"] = closed
    return 0


def cmd_entropy(args, report):
    sf = _load(report, args)
    res = _solve_fixed(report, args, sf)
    s = sf.system
    h = stationary_entropy(s, res.rho, args.tol_branch)
    report.results["rho_w"] = res.rho.matrix
    report.results["entropy"] = h
    report.results["entropy_factored"] = stationary_entropy_alt(s, res.rho, args.tol_branch)
    report.results["log_k"] = float(np.log(s.k))
    if args.markov:
        p, raw = fileio.load_real_matrix(args.markov)
        report.add_input("markov", raw)
        hp = markov_entropy(p)
        report.results["markov_entropy"] = hp
        report.results["markov_difference"] = abs(hp - h)
    return 0


def _one_based(exc: QifsError) -> QifsError:
    """The same error with the 0-based library indices shifted for display."""
    if isinstance(exc, CoordinateUnusable):
        l, m = exc.pair
        if exc.branch is not None:
            return CoordinateUnusable(l + 1, m + 1, branch=exc.branch + 1, ratio=exc.ratio)
        return CoordinateUnusable(l + 1, m + 1, str(exc).split(": ", 1)[-1])
    if isinstance(exc, DegenerateBranch):
        return DegenerateBranch(exc.index + 1 if exc.index >= 0 else exc.index, exc.trace, exc.weight)
    if isinstance(exc, ZeroEntry):
        return ZeroEntry(exc.index[0] + 1, exc.index[1] + 1)
    if isinstance(exc, LogOfZero):
        return LogOfZero(exc.index + 1, exc.value)
    if isinstance(exc, ZeroPotentialTrace):
        return ZeroPotentialTrace(exc.index + 1)
    if isinstance(exc, NotUnitary):
        return NotUnitary(exc.index + 1, exc.deviation)
    return exc


def _pressure_dict(r) -> dict:
    out = {"entropy_term": r.entropy_term, "potential_term": r.potential_term, "pressure": r.pressure,
           "bound_log_beta": r.bound, "gap": r.gap, "equality_residual": r.equality_residual}
    if hasattr(r, "coordinate_pair"):
        out = {"coordinate_pair": [r.coordinate_pair[0] + 1, r.coordinate_pair[1] + 1],
               "potential_h_term": r.potential_h_term, "potential_ratio_term": r.potential_ratio_term,
               **out, "ratios": list(r.ratios)}
    else:
        out["form"] = r.form
    return out


def _pressure_forms(args, s, rho_w, e) -> dict:
    if args.coords:
        l, m = args.coords
        return _pressure_dict(basic_inequality_coords(s, rho_w, e, l - 1, m - 1))
    if args.all_coords:
        out, skipped = [], []
        for l in range(s.dim):
            for m in range(s.dim):
                try:
                    out.append(_pressure_dict(basic_inequality_coords(s, rho_w, e, l, m)))
                except (CoordinateUnusable, LogOfZero) as exc:
                    skipped.append(str(_one_based(exc)))
        return {"admissible": out, "skipped": skipped}
    if args.reduced:
        return _pressure_dict(reduced_basic_inequality(s, rho_w, e))
    return _pressure_dict(basic_inequality(s, rho_w, e))


def cmd_pressure(args, report):
    sf = _load(report, args)
    s = sf.system
    e = _solve_eigen(report, args, sf, check_unique=False)
    report.results["beta"] = e.beta
    if args.construct_maximizer:
        w, alpha = maximizer_unitary(s, e)
        s = s.with_weights(w)
        report.results["maximizer_alpha"] = alpha
        report.results["maximizer_weights"] = w
        report.diagnostics["maximizer_normalization_deviation"] = normalization_deviation(w)
    sf_w = fileio.SystemFile(s, sf.options)
    res = _solve_fixed(report, args, sf_w)
    report.results["rho_w"] = res.rho.matrix
    report.results["rho_beta"] = e.rho_beta.matrix
    report.results["pressure"] = _pressure_forms(args, s, res.rho, e)
    classic = None
    if args.classic:
        a, q, raw = fileio.load_classic(args.classic)
        report.add_input("classic", raw)
        classic = (a, q)
    elif "classic" in sf.extra:
        classic = fileio.parse_classic(sf.extra["classic"])
    if classic is not None:
        c = classic_inequality(*classic)
        red = reduced_basic_inequality(s, res.rho, e)
        report.results["classic"] = {"entropy_term": c.entropy_term, "potential_term": c.potential_term,
                                     "lhs": c.lhs, "bound_log_beta": c.bound, "gap": c.gap}
        report.results["bridge"] = {"basic_reduced_lhs": red.pressure, "basic_reduced_bound": red.bound,
                                    "lhs_difference": abs(red.pressure - c.lhs),
                                    "bound_difference": abs(red.bound - c.bound)}
    return 0


def cmd_capacity(args, report):
    sf = _load(report, args)
    h_op, raw = fileio.load_matrix(args.cost_op)
    report.add_input("cost_op", raw)
    unitaries = None
    if args.unitaries:
        unitaries, raw = fileio.load_matrix_list(args.unitaries)
        report.add_input("unitaries", raw)
        for i, u in enumerate(unitaries):
            if not is_unitary(u, TOL_NORM):
                raise NotUnitary(i, float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))))
        unitaries = tuple(unitaries)
    grid = WeightGrid(tuple(sf.system.v_ops), args.grid, unitaries)
    tol = args.tol if args.tol is not None else (sf.options.tol or 1e-13)
    rows = evaluate_grid(grid, h_op, tol=tol, max_iter=_max_iter(args, sf))
    lam = args.lam if args.lam is not None else 0.0
    if args.a is not None:
        best = capacity_from_rows(rows, args.a)
        report.results["capacity"] = best.entropy
        report.results["a"] = args.a
    else:
        val, best = lagrangian_from_rows(rows, lam)
        report.results["lagrangian"] = val
        report.results["lambda"] = lam
        report.results["entropy_at_max"] = best.entropy
        c = capacity_from_rows(rows, best.cost)
        report.diagnostics["capacity_at_cost"] = c.entropy
        report.diagnostics["capacity_grid_index"] = c.index + 1
    report.results["grid_index"] = best.index + 1
    report.results["t"] = list(best.t)
    report.results["cost_at_max"] = best.cost
    report.results["weights"] = grid.family(best.t)
    report.diagnostics["grid_points"] = len(rows)
    report.diagnostics["points_per_edge"] = args.grid
    table = [{"grid_index": r.index + 1, **{f"t{i + 1}": f"{t:.17g}" for i, t in enumerate(r.t)},
              "entropy": f"{r.entropy:.17g}", "cost": f"{r.cost:.17g}",
              "objective": f"{r.entropy - lam * r.cost:.17g}"} for r in rows]
    if args.dump:
        with open(args.dump, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(table[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(table)
        report.diagnostics["dump"] = args.dump
    if args.format == "csv":
        report.csv_rows = table
    return 0


def cmd_embed(args, report):
    if args.mode == "classic":
        a, q, raw = fileio.load_classic(args.matrix)
        report.add_input("classic", raw)
        s = build_basic_from_classic(a, q)
        sf = fileio.SystemFile(s, claims={}, extra={"classic": {"a": fileio.real_matrix_to_json(a),
                                                                  "q": fileio.real_matrix_to_json(q)}})
    else:
        p, raw = fileio.load_real_matrix(args.matrix)
        report.add_input("matrix", raw)
        if args.mode == "kraus":
            sf = fileio.SystemFile(embed_markov_kraus(p), claims={"cptp": True})
        else:
            sf = fileio.SystemFile(embed_perron(p).to_system())
    report.results["system"] = fileio.system_to_json(sf)
    return 0


def cmd_measure(args, report):
    sf = _load(report, args)
    merge_tol = args.merge_tol or sf.options.merge_tol or MERGE_TOL
    mu, raw = fileio.load_measure(args.measure, merge_tol)
    report.add_input("measure", raw)
    s = sf.system
    mu = markov_push_n(s, mu, args.steps)
    pushed = markov_push(s, mu)
    report.results["steps"] = args.steps
    report.results["atoms"] = [{"weight": w, "state": st.matrix} for w, st in mu.atoms]
    report.results["mass"] = mu.mass
    report.results["barycenter"] = barycenter(mu).matrix
    report.results["invariance_residual"] = invariance_residual(s, mu, pushed)
    report.diagnostics["pushed_mass"] = pushed.mass
    if args.entropy_n:
        est, diffs = entropy_of_measure(s, mu, args.entropy_n, args.word_cap)
        report.results["partial_entropies"] = [partial_entropy_measure(s, mu, n, args.word_cap)
                                               for n in range(args.entropy_n + 1)]
        report.results["entropy_differences"] = diffs
        report.results["entropy_estimate"] = est
    return 0


def _coords(text: str) -> tuple[int, int]:
    try:
        l, m = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected l,m with 1-based integers") from exc
    if l < 1 or m < 1:
        raise argparse.ArgumentTypeError("coordinates are 1-based")
    return l, m


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--tol-psd", type=_positive_float, default=TOL_PSD,
                        help="density-matrix validation tolerance")
    common.add_argument("--tol-branch", type=_positive_float, default=1e-12,
                        help="branch traces at or below this count as unvisited")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--tol", type=_positive_float, default=None, help="iteration stopping tolerance")
    solver.add_argument("--max-iter", type=int, default=None)
    solver.add_argument("--start", default=None, help="'maximally-mixed' (default) or a matrix file")

    p = argparse.ArgumentParser(prog="qifs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="check a system file")
    v.add_argument("system")
    v.set_defaults(func=cmd_validate)

    f = sub.add_parser("fixed-point", parents=[common, solver], help="invariant state of the normalized map")
    f.add_argument("system")
    f.set_defaults(func=cmd_fixed_point)

    e = sub.add_parser("eigen", parents=[common, solver], help="eigenpair of the Ruelle operator")
    e.add_argument("system")
    e.add_argument("--potential", choices=("h", "w"), default="h")
    e.add_argument("--no-check-unique", action="store_true", help="skip the second-start uniqueness probe")
    e.set_defaults(func=cmd_eigen)

    h = sub.add_parser("entropy", parents=[common, solver], help="stationary entropy at the fixed state")
    h.add_argument("system")
    h.add_argument("--markov", help="column-stochastic matrix file to compare against")
    h.set_defaults(func=cmd_entropy)

    pr = sub.add_parser("pressure", parents=[common, solver], help="basic pressure inequality")
    pr.add_argument("system")
    form = pr.add_mutually_exclusive_group()
    form.add_argument("--trace-form", action="store_true", help="trace form (default)")
    form.add_argument("--coords", type=_coords, help="coordinate form at l,m (1-based)")
    form.add_argument("--all-coords", action="store_true", help="coordinate form at every admissible pair")
    form.add_argument("--reduced", action="store_true", help="form without the dynamics trace")
    pr.add_argument("--construct-maximizer", action="store_true",
                    help="replace the weights by the equality family (unitary dynamics)")
    pr.add_argument("--classic", help="file with matrices a and q for a side-by-side classic inequality")
    pr.set_defaults(func=cmd_pressure, potential="h")

    c = sub.add_parser("capacity", parents=[common, solver], help="capacity-cost or Lagrangian on a grid")
    c.add_argument("system")
    c.add_argument("--cost-op", required=True, help="Hermitian cost operator file")
    goal = c.add_mutually_exclusive_group(required=True)
    goal.add_argument("--a", type=float, help="cost budget")
    goal.add_argument("--lambda", dest="lam", type=float, help="Lagrange multiplier")
    c.add_argument("--grid", type=int, default=21, help="points per simplex edge")
    c.add_argument("--unitaries", help="file with the unitaries U_i of W_i = sqrt(t_i) U_i")
    c.add_argument("--dump", help="write the whole grid as CSV to this path")
    c.set_defaults(func=cmd_capacity)

    em = sub.add_parser("embed", parents=[common], help="emit a system file for a stochastic embedding")
    em.add_argument("--matrix", required=True, help="matrix file (classic mode: file with a and q)")
    em.add_argument("--mode", choices=("perron", "kraus", "classic"), default="kraus")
    em.set_defaults(func=cmd_embed)

    m = sub.add_parser("measure", parents=[common], help="push an atomic measure and its entropies")
    m.add_argument("system")
    m.add_argument("--measure", required=True)
    m.add_argument("--steps", type=int, default=0)
    m.add_argument("--entropy-n", type=int, default=0)
    m.add_argument("--merge-tol", type=_positive_float, default=None)
    m.add_argument("--word-cap", type=int, default=WORD_CAP)
    m.set_defaults(func=cmd_measure)
    return p


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    report = Report(["qifs", *argv])
    func: Callable = args.func
    t0 = time.perf_counter()
    status = 0
    error = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DominanceWarning)
        try:
            status = func(args, report)
        except QifsError as exc:
            status = exc.exit_code
            error = _one_based(exc)
    report.warnings = [str(w.message) for w in caught if issubclass(w.category, DominanceWarning)]
    report.wall_time_s = time.perf_counter() - t0
    if error is not None:
        report.results["error"] = {"type": type(error).__name__, "message": str(error),
                                   "exit_code": error.exit_code}
        if isinstance(error, NoConvergence):
            report.diagnostics["iterations"] = error.iterations
            report.diagnostics["residual"] = error.residual
            if error.best is not None:
                report.diagnostics["best_iterate"] = error.best.matrix
            report.diagnostics["dominance_warning"] = error.dominance_warning
        print(f"error: {type(error).__name__}: {error}", file=err)
    for w in report.warnings:
        print(f"warning: {w}", file=err)
    if args.command == "embed" and error is None:
        out.write(fileio.dumps(report.results["system"]))
    else:
        out.write(render(report, args.format))
    return status


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
