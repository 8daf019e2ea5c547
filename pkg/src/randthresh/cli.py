"""Command line interface: ``randthresh <subcommand> ...``.

Exit codes: 0 success (or warranted for ``decide``), 1 not warranted /
oracle violation, 2 invalid or unrealizable input, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import __version__
from .errors import RandThreshError, ZeroCellWarning
from .inference import DEFAULT_LEVELS, bootstrap_T
from .latent import optimal_two_point, optimality_oracle
from .realizability import all_ranges, fmt_ext
from .report import AnalysisRecord, bounds_dict, certificate_dict, error_record
from .sweep import sweep_T_over_prevalence, sweep_T_vs_association
from .table import AssociationMeasure, CellProbabilities, ContingencyTable, Measure, read_tables_csv
from .threshold import RandomnessSpec, decide, threshold_from_counts, threshold_from_summary, threshold_from_table

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3


class InputError(Exception):
    pass


def _g(x):
    return fmt_ext(x) if isinstance(x, float) and x in (float("inf"), float("-inf")) else f"{x:.4g}"


def _add_table_input(p, summary=True):
    g = p.add_argument_group("input (choose one form)")
    g.add_argument("--counts", nargs=4, type=int, metavar=("N01", "N11", "N00", "N10"))
    g.add_argument("--cells", nargs=4, type=float, metavar=("P01", "P11", "P00", "P10"))
    if summary:
        g.add_argument("--pe", type=float, help="prevalence of exposure P(e=1)")
        g.add_argument("--pd", type=float, help="prevalence of outcome P(d=1)")
        m = g.add_mutually_exclusive_group()
        for kind in ("rd", "rr", "or", "phi"):
            m.add_argument(f"--{kind}", type=float, metavar="V")


def _resolve_input(args, summary=True):
    """Return (input_echo, report, cells_or_None, table_or_None)."""
    forms = [args.counts is not None, args.cells is not None]
    summary_given = summary and (args.pe is not None or args.pd is not None)
    if sum(forms) + summary_given != 1:
        raise InputError("give exactly one of --counts, --cells, or --pe/--pd with an association")
    if args.counts is not None:
        table = ContingencyTable(*args.counts)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroCellWarning)
            report = threshold_from_counts(table, allow_zero_cells=True)
        echo = {"counts": dict(zip(("n01", "n11", "n00", "n10"), table.as_tuple()))}
        return echo, report, report.cells, table
    if args.cells is not None:
        cells = CellProbabilities(*args.cells)
        echo = {"cells": dict(zip(("p01", "p11", "p00", "p10"), args.cells))}
        return echo, threshold_from_table(cells), cells, None
    if args.pe is None or args.pd is None:
        raise InputError("summary input needs both --pe and --pd")
    given = [(k, getattr(args, k)) for k in ("rd", "rr", "or", "phi") if getattr(args, k) is not None]
    if len(given) != 1:
        raise InputError("summary input needs exactly one of --rd, --rr, --or, --phi")
    kind, value = given[0]
    alpha = AssociationMeasure(Measure.parse(kind), value)
    report = threshold_from_summary(args.pe, args.pd, alpha)
    echo = {"summary": {"p_e": args.pe, "p_d": args.pd, "kind": kind, "value": value}}
    return echo, report, report.cells, None


def _print_report(report, certificate=None, out=None):
    out = sys.stdout if out is None else out
    m = report.margins
    flag = "  [no association]" if report.no_association else ""
    print(f"T = {_g(report.T)}  ({report.computation_path.value}){flag}", file=out)
    print(f"phi = {_g(report.phi)}  sigma_ed = {_g(report.sigma_ed)}  chi2/n = {_g(report.chi_squared_over_n)}", file=out)
    print(f"p_e = {_g(m.p_e)}  p_d = {_g(m.p_d)}  balance b = {_g(m.balance_b)}", file=out)
    parts = []
    for kind in (Measure.RD, Measure.RR, Measure.OR):
        a = report.associations[kind]
        parts.append(f"{kind.name} = {_g(a.value)}" + (" (boundary)" if a.boundary else ""))
    print("  ".join(parts), file=out)
    if certificate is not None:
        print(
            f"certificate: theta1 = {_g(certificate['theta1'])}  theta2 = {_g(certificate['theta2'])}  "
            f"k1 = {_g(certificate['k1'])}  k2 = {_g(certificate['k2'])}",
            file=out,
        )
        for a in certificate["atoms"]:
            print(f"  atom (p, r) = ({_g(a['p'])}, {_g(a['r'])})  weight {_g(a['w'])}", file=out)


def cmd_threshold(args):
    echo, report, cells, _ = _resolve_input(args)
    cert = None
    if args.certificate:
        cert = certificate_dict(*optimal_two_point(cells))
    if args.json:
        print(AnalysisRecord.from_report(echo, report, certificate=cert).to_json())
    else:
        _print_report(report, cert)
    return EXIT_OK


def cmd_decide(args):
    try:
        spec = RandomnessSpec(args.rp2, args.rr2)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _, report, _, _ = _resolve_input(args)
    d = decide(spec, report)
    if args.json:
        print(json.dumps({"eta": d.eta, "T": d.T, "margin": d.margin, "verdict": d.verdict.value}, sort_keys=True))
    else:
        print(f"eta = {_g(d.eta)}  T = {_g(d.T)}  margin = {_g(d.margin)}")
        print("causal inference warranted" if d.warranted else "causal inference NOT warranted")
    return EXIT_OK if d.warranted else EXIT_NO


def cmd_bounds(args):
    ranges = all_ranges(args.pe, args.pd)
    if args.json:
        print(json.dumps(bounds_dict(ranges), sort_keys=True))
        return EXIT_OK
    print(f"realizable ranges at p_e = {_g(args.pe)}, p_d = {_g(args.pd)} (all bounds open)")
    for kind, r in ranges.items():
        print(f"  {kind.name:>3}: ({_g(r.lower)}, {_g(r.upper)})")
    return EXIT_OK


def _parse_levels(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError(f"--levels must be comma-separated numbers, got {text!r}") from None


def cmd_bootstrap(args):
    table = ContingencyTable(*args.counts)
    result = bootstrap_T(table, args.reps, args.seed, _parse_levels(args.levels), n_jobs=args.jobs)
    print(result.to_json(include_samples=args.samples))
    return EXIT_OK


def cmd_sweep(args):
    if args.grid is not None:
        if args.value is None:
            raise InputError("prevalence sweep needs --measure, --value and --grid")
        grid = sweep_T_over_prevalence(args.measure, args.value, args.grid)
    else:
        missing = [n for n in ("pe", "pd", "lo", "hi", "steps") if getattr(args, n) is None]
        if missing:
            raise InputError("association sweep needs --pe --pd --measure --from --to --steps")
        grid = sweep_T_vs_association(args.pe, args.pd, args.measure, args.lo, args.hi, args.steps)
    if args.out in (None, "-"):
        grid.to_csv(sys.stdout)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            grid.to_csv(fh)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _batch_record(row_id, table):
    if isinstance(table, Exception):
        return error_record("InvalidRow", str(table), row_id)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroCellWarning)
            report = threshold_from_counts(table, allow_zero_cells=True)
    except RandThreshError as exc:
        return error_record(exc.code, str(exc), row_id)
    echo = {"counts": dict(zip(("n01", "n11", "n00", "n10"), table.as_tuple()))}
    return AnalysisRecord.from_report(echo, report, id=row_id).to_dict()


def cmd_batch(args):
    try:
        records = [_batch_record(i, t) for i, t in read_tables_csv(args.input)]
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    if args.out in (None, "-"):
        sys.stdout.write(lines)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(lines)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_verify(args):
    _, _, cells, _ = _resolve_input(args, summary=False)
    res = optimality_oracle(cells, samples=args.samples, seed=args.seed)
    ok = res.min_sampled_R2 >= res.abs_phi - 1e-9 and abs(res.optimal_R2 - res.abs_phi) <= 1e-12
    if args.json:
        print(json.dumps({
            "abs_phi": res.abs_phi,
            "optimal_R2": res.optimal_R2,
            "optimal_feasibility_error": res.optimal_feasibility_error,
            "samples": res.samples,
            "min_sampled_R2": res.min_sampled_R2,
            "max_feasibility_error": res.max_feasibility_error,
            "ok": ok,
        }, sort_keys=True))
    else:
        print(f"|phi| = {res.abs_phi:.12g}")
        print(f"R2(mu*) = {res.optimal_R2:.12g}  (feasibility error {res.optimal_feasibility_error:.2e})")
        print(f"min R2 over {res.samples} random feasible distributions = {res.min_sampled_R2:.12g}")
        print("lower bound holds" if ok else "LOWER BOUND VIOLATED")
    return EXIT_OK if ok else EXIT_NO


def build_parser():
    parser = argparse.ArgumentParser(prog="randthresh", description="Threshold of sufficient randomness for causal inference from 2x2 tables.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", help="compute T from a table or a summary triple")
    _add_table_input(p)
    p.add_argument("--certificate", action="store_true", help="include the optimal two-point distribution")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("decide", help="compare elicited randomness with T")
    _add_table_input(p)
    p.add_argument("--rp2", type=float, required=True, help="R^2_p in [0, 1)")
    p.add_argument("--rr2", type=float, required=True, help="R^2_r in [0, 1)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("bounds", help="realizable ranges of RD, RR, OR, phi")
    p.add_argument("--pe", type=float, required=True)
    p.add_argument("--pd", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bootstrap", help="parametric multinomial bootstrap of T")
    p.add_argument("--counts", nargs=4, type=int, required=True, metavar=("N01", "N11", "N00", "N10"))
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--levels", default=",".join(str(q) for q in DEFAULT_LEVELS))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--samples", action="store_true", help="include every bootstrap T value")
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("sweep", help="write a CSV grid of T")
    p.add_argument("--measure", required=True, choices=[m.value for m in Measure])
    p.add_argument("--value", type=float, help="fixed association (prevalence sweep)")
    p.add_argument("--grid", type=int, help="steps per prevalence axis")
    p.add_argument("--pe", type=float)
    p.add_argument("--pd", type=float)
    p.add_argument("--from", dest="lo", type=float)
    p.add_argument("--to", dest="hi", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("batch", help="analyse every table in a CSV file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", help="output JSON lines (default stdout)")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("verify", help="check R2 >= |phi| by random search over feasible distributions")
    _add_table_input(p, summary=False)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, RandThreshError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
