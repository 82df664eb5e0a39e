"""Batch command-line interface.

Subcommands map onto the library entry points one to one and emit canonical
JSON (or CSV for divergence tables), so identical inputs produce byte-identical
output.  Exit codes for decisions: 0 = conversion certified / feasible /
found, 1 = refuted / infeasible / not found, 2 = inconclusive; 64 and 65 are
usage and data errors.  The MAJORIZE_THREADS environment variable caps
internal parallelism.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .catalysis import DEFAULT_N_MAX, find_catalytic_n, find_large_sample_n
from .certify import (
    CertReport,
    GridSpec,
    Verdict,
    certify_dichotomy_asymptotic,
    certify_dichotomy_exact,
    certify_dominating,
    certify_general_dichotomy_asymptotic,
    certify_minimal,
    certify_minimal_asymptotic,
)
from .errors import MajorizeError, ParameterError
from .experiment import Experiment, is_dichotomy, is_dominating
from .feasibility import DEFAULT_TOL, majorizes
from .functionals import multivar_divergence, renyi_curve
from .io import (
    canonical_json,
    divergence_csv,
    feasibility_to_dict,
    format_float,
    load_experiment,
    load_thermal,
    power_report_to_dict,
    report_to_dict,
    search_to_dict,
    thermal_to_dict,
)
from .power_universal import classify_dominating, classify_minimal
from .thermal import ThermalAnswer, thermal_check

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65

_VERDICT_CODES = {
    Verdict.SUFFICIENT: EXIT_OK,
    Verdict.NECESSARY_FAIL: EXIT_FAIL,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}
_ANSWER_CODES = {
    ThermalAnswer.YES: EXIT_OK,
    ThermalAnswer.NO: EXIT_FAIL,
    ThermalAnswer.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which collides with the
    # INCONCLUSIVE verdict code; route usage errors to 64 instead
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _alpha_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty order list")
    if any(math.isnan(v) for v in values):
        raise argparse.ArgumentTypeError("orders cannot be NaN")
    return values


def _add_grid_flags(sub) -> None:
    sub.add_argument("--grid-resolution", type=int, default=8,
                     help="simplex and order grid resolution (default 8)")
    sub.add_argument("--alpha-max", type=float, default=64.0,
                     help="largest finite divergence order (default 64)")
    sub.add_argument("--tol", type=float, default=DEFAULT_TOL,
                     help="tie/feasibility tolerance (default 1e-9)")


def _add_output_flags(sub) -> None:
    sub.add_argument("--format", choices=("json", "table"), default="json")
    sub.add_argument("--output", default="-", help="output path (default stdout)")


def _grid(args) -> GridSpec:
    return GridSpec(
        simplex_resolution=args.grid_resolution,
        alpha_max=args.alpha_max,
        tie_tol=args.tol,
    )


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _report_table(report: CertReport) -> str:
    lines = [
        f"regime: {report.regime.value}",
        f"verdict: {report.verdict.value}",
        f"min_margin: {format_float(report.min_margin())}",
    ]
    if report.note:
        lines.append(f"note: {report.note}")
    lines.append("functional\talpha\tcharset\tcolumn\tmargin")
    for c in report.checks:
        alpha = c.alpha
        if isinstance(alpha, tuple):
            alpha = "(" + ",".join(format_float(a) for a in alpha) + ")"
        elif isinstance(alpha, float):
            alpha = format_float(alpha)
        charset = "".join(str(k) for k in c.charset) if c.charset is not None else "-"
        column = c.column if c.column is not None else "-"
        lines.append(
            f"{c.functional}\t{alpha}\t{charset}\t{column}\t{format_float(c.margin)}"
        )
    return "\n".join(lines) + "\n"


def _emit_json_or_table(args, payload: dict, table: str | None = None) -> None:
    if args.format == "table" and table is not None:
        _write(table, args.output)
    else:
        _write(canonical_json(payload), args.output)


# -- subcommand handlers ------------------------------------------------------


def cmd_check_exact(args) -> int:
    p = load_experiment(args.source)
    q = load_experiment(args.target)
    result = majorizes(p, q, tol=args.tol)
    payload = feasibility_to_dict(result)
    table = (
        f"status: {result.status}\n"
        f"max_residual: {format_float(result.max_residual)}\n"
    )
    _emit_json_or_table(args, payload, table)
    return EXIT_OK if result.feasible else EXIT_FAIL


def _pick_certifier(p: Experiment, q: Experiment, regime: str, asymptotic: bool):
    if regime == "auto":
        if is_dichotomy(p) and is_dichotomy(q):
            regime = "dichotomy"
        elif is_dominating(p) and is_dominating(q):
            regime = "dominating"
        else:
            regime = "minimal"
    if regime == "minimal":
        return certify_minimal_asymptotic if asymptotic else certify_minimal
    if regime == "dominating":
        if asymptotic:
            raise ParameterError(
                "asymptotic certification in the dominating regime exists "
                "only for dichotomies"
            )
        return certify_dominating
    if regime == "dichotomy":
        return certify_dichotomy_asymptotic if asymptotic else certify_dichotomy_exact
    if regime == "general-dichotomy":
        if not asymptotic:
            raise ParameterError(
                "the general-dichotomy certifier is asymptotic; pass --asymptotic"
            )
        return certify_general_dichotomy_asymptotic
    raise ParameterError(f"unknown regime {regime!r}")


def cmd_certify(args) -> int:
    p = load_experiment(args.source)
    q = load_experiment(args.target)
    certifier = _pick_certifier(p, q, args.regime, args.asymptotic)
    report = certifier(p, q, _grid(args))
    if args.plot:
        from .plots import margin_figure

        margin_figure(report, args.plot)
    _emit_json_or_table(args, report_to_dict(report), _report_table(report))
    return _VERDICT_CODES[report.verdict]


def cmd_search(args) -> int:
    p = load_experiment(args.source)
    q = load_experiment(args.target)
    search = find_large_sample_n if args.kind == "large-sample" else find_catalytic_n
    result = search(p, q, n_max=args.n_max, tol=args.tol)
    found = result.n_found is not None
    table = (
        f"kind: {result.kind.value}\n"
        f"n_found: {result.n_found if found else '-'}\n"
        f"checked_up_to: {result.checked_up_to}\n"
    )
    _emit_json_or_table(args, search_to_dict(result), table)
    return EXIT_OK if found else EXIT_FAIL


def cmd_divergence(args) -> int:
    exps = [load_experiment(path) for path in args.experiment]
    alphas = args.alphas
    if alphas is None:
        grid = GridSpec(simplex_resolution=args.grid_resolution,
                        alpha_max=args.alpha_max)
        alphas = list(grid.dichotomy_orders(closed_at_zero=True))
        if args.family == "multivar":
            # the two-column weight family lives on the open unit interval
            alphas = [a for a in alphas if 0.0 < a < 1.0]
    c, ref = args.pair
    for exp in exps:
        if not (0 <= c < exp.n_cols and 0 <= ref < exp.n_cols):
            raise ParameterError(
                f"column pair ({c}, {ref}) out of range for {exp.n_cols} columns"
            )
    rows = []
    columns = ["alpha"] + (
        ["value"] if len(exps) == 1 else ["value_p", "value_q", "margin"]
    )
    per_exp = []
    for exp in exps:
        if args.family == "renyi":
            values = renyi_curve(exp.column(c), exp.column(ref), np.array(alphas))
        else:
            if exp.n_cols != 2:
                raise ParameterError(
                    "the multivariate family is tabulated for two columns"
                )
            values = [
                multivar_divergence(exp, (a, 1.0 - a)) for a in alphas
            ]
        per_exp.append(np.asarray(values, dtype=float))
    for i, a in enumerate(alphas):
        row = {"alpha": float(a)}
        if len(exps) == 1:
            row["value"] = float(per_exp[0][i])
        else:
            row["value_p"] = float(per_exp[0][i])
            row["value_q"] = float(per_exp[1][i])
            row["margin"] = float(per_exp[0][i] - per_exp[1][i])
        rows.append(row)
    if args.plot:
        from .plots import divergence_figure

        names = (
            ["value"] if len(exps) == 1 else ["value_p", "value_q"]
        )
        series = {name: np.array([r[name] for r in rows]) for name in names}
        divergence_figure(alphas, series, args.plot)
    _write(divergence_csv(rows, columns), args.output)
    return EXIT_OK


def cmd_thermal(args) -> int:
    rho, sigma, system = load_thermal(args.instance)
    verdict = thermal_check(rho, sigma, system, _grid(args))
    table = (
        f"answer: {verdict.answer.value}\n"
        f"case: {verdict.case.value}\n"
        f"shift: {format_float(verdict.shift)}\n"
    )
    _emit_json_or_table(args, thermal_to_dict(verdict), table)
    return _ANSWER_CODES[verdict.answer]


def cmd_classify(args) -> int:
    exp = load_experiment(args.experiment)
    classify = classify_dominating if args.regime == "dominating" else classify_minimal
    report = classify(exp)
    table = (
        f"regime: {report.regime.value}\n"
        f"power_universal: {report.is_power_universal}\n"
    )
    _emit_json_or_table(args, power_report_to_dict(report), table)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="majorize",
        description="Decide and certify matrix majorization between "
                    "tuples of probability vectors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check-exact", help="LP feasibility of a single stochastic map")
    pc.add_argument("source")
    pc.add_argument("target")
    pc.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_output_flags(pc)
    pc.set_defaults(func=cmd_check_exact)

    pt = sub.add_parser("certify", help="grid-certify large-sample/catalytic conversion")
    pt.add_argument("source")
    pt.add_argument("target")
    pt.add_argument(
        "--regime",
        choices=("auto", "minimal", "dominating", "dichotomy", "general-dichotomy"),
        default="auto",
    )
    pt.add_argument("--asymptotic", action="store_true",
                    help="use the non-strict asymptotic conditions")
    pt.add_argument("--plot", default=None, metavar="PNG",
                    help="also render the margin chart to this file")
    _add_grid_flags(pt)
    _add_output_flags(pt)
    pt.set_defaults(func=cmd_certify)

    ps = sub.add_parser("search", help="smallest working tensor power or catalyst")
    ps.add_argument("source")
    ps.add_argument("target")
    ps.add_argument("--kind", choices=("large-sample", "catalytic"),
                    default="large-sample")
    ps.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    ps.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_output_flags(ps)
    ps.set_defaults(func=cmd_search)

    pd = sub.add_parser("divergence", help="tabulate divergence curves as CSV")
    pd.add_argument("experiment", nargs="+",
                    help="one experiment for values, two for margins")
    pd.add_argument("--pair", type=int, nargs=2, default=(0, 1),
                    metavar=("COL", "REF"),
                    help="column indices compared (default 0 1)")
    pd.add_argument("--alphas", type=_alpha_list, default=None,
                    help="comma-separated orders (inf allowed)")
    pd.add_argument("--family", choices=("renyi", "multivar"), default="renyi")
    pd.add_argument("--plot", default=None, metavar="PNG",
                    help="also render the curves to this file")
    pd.add_argument("--grid-resolution", type=int, default=8)
    pd.add_argument("--alpha-max", type=float, default=64.0)
    pd.add_argument("--output", default="-")
    pd.set_defaults(func=cmd_divergence, format="csv")

    pth = sub.add_parser("thermal", help="asymptotic catalytic thermal majorization")
    pth.add_argument("instance",
                     help='JSON with "energies", "beta", "rho", "sigma"')
    _add_grid_flags(pth)
    _add_output_flags(pth)
    pth.set_defaults(func=cmd_thermal)

    pcl = sub.add_parser("classify", help="power-universality of one experiment")
    pcl.add_argument("experiment")
    pcl.add_argument("--regime", choices=("minimal", "dominating"),
                     default="minimal")
    _add_output_flags(pcl)
    pcl.set_defaults(func=cmd_classify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MajorizeError as exc:
        print(f"majorize: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"majorize: {exc}", file=sys.stderr)
        return EXIT_DATA


def main_entry() -> None:
    sys.exit(main())
