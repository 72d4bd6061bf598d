"""Command line interface: ``mao moments|pmf|diagnose|test|verify``.

Documents go to stdout, logs to stderr.  Exit codes: 0 success, 1 usage
error, 2 budget exceeded, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from decimal import Context as DecimalContext, Decimal
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import approx
from .exact_dist import DEFAULT_BUDGET, exact_marginal_pmf, pmf_moments
from .model import BudgetExceededError, MaoError, ModelParams, VariableSpec
from .moments import MomentReport, formula_report
from .montecarlo import DEFAULT_R, DEFAULT_SEED, simulate
from .pmf import Pmf

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3
SIG_DIGITS = 12
_DEC = DecimalContext(prec=SIG_DIGITS)

log = logging.getLogger("mao")


class UsageError(MaoError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default; 2 means "budget" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- serialization ------------------------------------------------------------


def decimal_string(x: Fraction) -> str:
    d = _DEC.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(d.normalize(_DEC), "f") if d else "0"


def encode_scalar(x: Any) -> Any:
    """Exact values become ``{"decimal", "num", "den"}``; floats stay numbers."""
    if isinstance(x, Fraction):
        return {"decimal": decimal_string(x), "num": x.numerator, "den": x.denominator}
    if isinstance(x, int):
        return x
    return float(x)


def decode_scalar(x: Any) -> Any:
    if isinstance(x, dict) and "num" in x:
        return Fraction(x["num"], x["den"])
    return x


def _csv_cell(x: Any) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


# -- argument handling ----------------------------------------------------------


def parse_params(N: int, m: str, T: Optional[int]) -> ModelParams:
    try:
        sizes = [int(x) for x in m.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--m must be an integer or a comma list, got {m!r}") from None
    if not sizes:
        raise UsageError("--m is empty")
    if len(sizes) == 1:
        if T is None:
            raise UsageError("a single --m needs --T")
        sizes = sizes * T
    elif T is not None and T != len(sizes):
        raise UsageError(f"--T {T} disagrees with {len(sizes)} sizes in --m")
    return ModelParams(N, tuple(sizes))


def selected_specs(args, params: ModelParams) -> list[VariableSpec]:
    if getattr(args, "all_t", False):
        return [VariableSpec(k, t) for t in range(params.T + 1) for k in ("exactly", "at_least")]
    if args.t is None:
        raise UsageError("--t is required (or --all-t)")
    var = VariableSpec(args.kind, args.t)
    var.categories(params.T)
    return [var]


def _model_args(p: argparse.ArgumentParser, with_t: bool = True) -> None:
    p.add_argument("--N", type=int, required=True, help="population size")
    p.add_argument("--m", required=True, help="subset size, or comma list of sizes")
    p.add_argument("--T", type=int, help="number of subsets (needed with a single --m)")
    if with_t:
        p.add_argument("--t", type=int, help="category")
        p.add_argument("--kind", choices=("exactly", "at_least"), default="exactly")
    p.add_argument("--mode", choices=("exact", "float"), help="DP arithmetic (default by N)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="DP state budget")
    p.add_argument("--R", type=int, default=DEFAULT_R, help="simulation replicates")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mao", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("moments", help="mean and central moments 2-4")
    _model_args(p)
    p.add_argument("--method", choices=("formula", "exact", "mc"), default="formula")
    p.add_argument("--all-t", action="store_true", help="every t, both kinds")

    p = sub.add_parser("pmf", help="law of one count with its approximants")
    _model_args(p)
    p.add_argument("--method", choices=("exact", "mc"), default="exact")

    p = sub.add_parser("diagnose", help="Chen-Stein quantities and regime")
    _model_args(p)
    p.add_argument("--threshold", type=float, default=approx.DEFAULT_THRESHOLD)

    p = sub.add_parser("test", help="p-value of an observed count")
    _model_args(p)
    p.add_argument("--observed", type=int, required=True)
    p.add_argument("--side", choices=("upper", "lower", "two_sided"), default="two_sided")
    p.add_argument("--threshold", type=float, default=approx.DEFAULT_THRESHOLD)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--json", action="store_true", help="machine-readable results")
    p.add_argument("--only", help="comma list of criterion numbers")
    return parser


# -- commands -------------------------------------------------------------------


def _params_doc(params: ModelParams) -> dict:
    return {"N": params.N, "T": params.T, "m": list(params.m)}


def _report_doc(var: VariableSpec, rep: MomentReport) -> dict:
    doc = {"variable": var.label, "kind": var.kind, "t": var.t, "method": rep.method}
    for name, value in zip(("mean", "variance", "third", "fourth"), rep.values()):
        doc[name] = encode_scalar(value)
    return doc


def cmd_moments(args, params: ModelParams) -> tuple[dict, Optional[str]]:
    specs = selected_specs(args, params)
    if args.method == "mc":
        result = simulate(params, specs, R=args.R, seed=args.seed, workers=args.threads)
        reports = [result.moments[v] for v in specs]
        mode = "float"
    else:
        reports = []
        for var in specs:
            if args.method == "formula":
                if not params.equal_sizes:
                    raise UsageError("formula moments need equal sizes; use --method exact")
                reports.append(formula_report(params, var))
            else:
                pmf = exact_marginal_pmf(params, var, mode=args.mode, budget=args.budget)
                rep = pmf_moments(pmf)
                reports.append(MomentReport(*rep.values(), rep.mode, "exact_dp"))
        mode = reports[0].mode
    doc = {
        "command": "moments",
        "params": _params_doc(params),
        "mode": mode,
        "results": [_report_doc(v, r) for v, r in zip(specs, reports)],
    }
    if args.method == "mc":
        doc["R"], doc["seed"] = args.R, args.seed
    table = None
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["variable", "method", "mean", "variance", "third", "fourth"])
        for v, r in zip(specs, reports):
            w.writerow([v.label, r.method, *(_csv_cell(x) for x in r.values())])
        table = buf.getvalue()
    return doc, table


def _one_spec(args, params: ModelParams) -> VariableSpec:
    specs = selected_specs(args, params)
    return specs[0]


def cmd_pmf(args, params: ModelParams) -> tuple[dict, Optional[str]]:
    var = _one_spec(args, params)
    N = params.N
    columns: dict[str, Pmf] = {}
    if args.method == "exact":
        law = exact_marginal_pmf(params, var, mode=args.mode, budget=args.budget)
        columns["exact"] = law
        rep = pmf_moments(law)
        mu, variance = rep.mean, rep.variance
        mode = law.mode
    else:
        result = simulate(params, [var], R=args.R, seed=args.seed, workers=args.threads)
        law = result.pmfs[var]
        if params.equal_sizes:
            mu, variance = approx.normal_approximant(params, var)
        else:
            mu, variance = result.moments[var].mean, result.moments[var].variance
        mode = "float"
    lam = approx.marginal_pi_var(params, var) * N
    columns["normal"] = approx.normal_pmf(mu, variance, N)
    columns["poisson"] = approx.poisson_pmf(lam, N)
    if args.method == "mc":
        columns["empirical"] = law
    names = [c for c in ("exact", "normal", "poisson", "empirical") if c in columns]
    rows = [[k] + [columns[c][k] for c in names] for k in range(N + 1)]
    doc = {
        "command": "pmf",
        "params": _params_doc(params),
        "variable": var.label,
        "mode": mode,
        "poisson_lambda": encode_scalar(lam),
        "normal_mean": encode_scalar(mu),
        "normal_variance": encode_scalar(variance),
        "columns": ["value"] + names,
        "rows": [[r[0]] + [encode_scalar(x) for x in r[1:]] for r in rows],
    }
    if args.method == "mc":
        doc["R"], doc["seed"] = args.R, args.seed
    table = None
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value"] + names)
        for r in rows:
            w.writerow([r[0]] + [_csv_cell(x) for x in r[1:]])
        table = buf.getvalue()
    return doc, table


def _try_exact(params: ModelParams, var: VariableSpec, args) -> Optional[Pmf]:
    try:
        return exact_marginal_pmf(params, var, mode=args.mode, budget=args.budget)
    except BudgetExceededError as exc:
        log.info("exact law unavailable: %s", exc)
        return None


def _diag_doc(diag: approx.ApproxDiagnostics) -> dict:
    return {
        "variable": diag.var.label,
        "lambda": encode_scalar(diag.lam),
        "variance": encode_scalar(diag.variance),
        "pi": encode_scalar(diag.pi),
        "joint_P": encode_scalar(diag.joint),
        "delta": encode_scalar(diag.delta_small),
        "Delta": encode_scalar(diag.delta_big),
        "chen_stein_bound": encode_scalar(diag.bound),
        "regime": diag.regime.name,
        "threshold": diag.regime.threshold,
        "distances": diag.distances,
    }


def cmd_diagnose(args, params: ModelParams) -> tuple[dict, Optional[str]]:
    var = _one_spec(args, params)
    if not params.equal_sizes:
        # the moments come from the exact law, so it must be reachable
        _check_exact_reachable(params)
    exact = _try_exact(params, var, args)
    diag = approx.diagnose(params, var, args.threshold, exact)
    doc = {"command": "diagnose", "params": _params_doc(params), "mode": "exact"}
    doc.update(_diag_doc(diag))
    doc["exact_available"] = exact is not None
    return doc, None


def _check_exact_reachable(params: ModelParams) -> None:
    from .exact_dist import MAX_DP_N

    if params.N > MAX_DP_N:
        raise BudgetExceededError(f"unequal sizes need the exact DP, which stops at N={MAX_DP_N}")


def cmd_test(args, params: ModelParams) -> tuple[dict, Optional[str]]:
    var = _one_spec(args, params)
    if not 0 <= args.observed <= params.N:
        raise UsageError(f"--observed must lie in 0..{params.N}")
    regime = approx.select_regime(params, var, args.threshold)
    approx_law = approx.approximant(params, var, regime)
    exact = _try_exact(params, var, args)

    def pvalues(law: Pmf) -> dict:
        return {
            side: encode_scalar(approx.tail_pvalue(law, args.observed, side))
            for side in ("upper", "lower", "two_sided")
        }

    doc = {
        "command": "test",
        "params": _params_doc(params),
        "variable": var.label,
        "observed": args.observed,
        "side": args.side,
        "regime": regime.name,
        "law_used": "exact" if exact is not None else regime.name,
        "approximate": pvalues(approx_law),
    }
    if exact is not None:
        doc["exact"] = pvalues(exact)
    used = doc["exact"] if exact is not None else doc["approximate"]
    doc["p_value"] = used[args.side]
    doc["mode"] = exact.mode if exact is not None else "float"
    return doc, None


def cmd_verify(args) -> int:
    from .verify import run_all

    selection = None
    if args.only:
        try:
            selection = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise UsageError(f"--only takes a comma list of integers, got {args.only!r}") from None
    results = run_all(selection)
    if args.json:
        doc = [
            {
                "criterion": r.number,
                "name": r.name,
                "passed": r.passed,
                "measured": r.measured,
                "seconds": round(r.elapsed, 3),
                "details": r.details,
            }
            for r in results
        ]
        print(json.dumps(doc, indent=2))
    else:
        for r in results:
            print(r.line())
            for d in r.details:
                print(f"      {d}")
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {"moments": cmd_moments, "pmf": cmd_pmf, "diagnose": cmd_diagnose, "test": cmd_test}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.threads < 1 or args.R < 1:
            raise UsageError("--threads and --R must be positive")
        params = parse_params(args.N, args.m, args.T)
        doc, table = COMMANDS[args.command](args, params)
    except BudgetExceededError as exc:
        print(f"mao: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except MaoError as exc:
        print(f"mao: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if table is not None:
        sys.stdout.write(table)
    else:
        print(json.dumps(doc, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
