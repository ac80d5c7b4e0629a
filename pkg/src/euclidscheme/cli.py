"""Command-line reports: kloosterman, scheme, intersect, walk, equidist.

Every report is a dict of scalars plus named tables.  JSON output is the dict
itself; CSV output writes one block per table and a key,value block for the
scalars.  Exit status: 0 ok, 1 invalid input, 2 failed internal residual check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import charsums, equidist, intersect, scheme, walks
from .gf import Q_MAX, FieldError, field_for_q, make_field

FLOAT_DIGITS = 12


class ValidationError(ValueError):
    pass


class ResidualFailure(ArithmeticError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _num(x):
    """Normalise a value for serialisation."""
    if isinstance(x, scheme.Distance):
        return str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(format(float(x), f".{FLOAT_DIGITS}g"))
    return x


def _table(columns, rows):
    return {"columns": list(columns), "rows": [[_num(v) for v in row] for row in rows]}


def _resolve_q(args) -> int:
    if args.q is None and args.p is None:
        raise ValidationError("give --q or --p (with --ell-ext)")
    if args.p is not None:
        q = args.p**args.ell_ext
        if args.q is not None and args.q != q:
            raise ValidationError(f"--q {args.q} disagrees with --p {args.p} --ell-ext {args.ell_ext}")
        if q > args.q_max_cap:
            raise ValidationError(f"q={q} exceeds --q-max-cap {args.q_max_cap}")
        make_field(args.p, args.ell_ext, args.q_max_cap)
        return q
    field_for_q(args.q, args.q_max_cap)
    return args.q


def cmd_kloosterman(args) -> dict:
    q = _resolve_q(args)
    f = field_for_q(q)
    kv = charsums.kloosterman_vector(f)
    angles = charsums.kloosterman_angles(f)
    rows = [(a, kv[a], angles[a - 1]) for a in range(1, q)]
    table = charsums.moments(f, args.max_m)
    moments = [(e.ell, e.value, e.exact) for e in table.entries]
    return {
        "command": "kloosterman",
        "q": q,
        "sums": _table(["a", "K", "theta"], rows),
        "moments": _table(["ell", "M", "exact"], moments),
    }


def cmd_scheme(args) -> dict:
    q = _resolve_q(args)
    sm = scheme.scheme_matrices(q, args.d)
    labels = sm.delta.labels
    residual = sm.pq_residual()
    tol = scheme.tol_mat(q, args.d)
    report = {
        "command": "scheme",
        "q": q,
        "d": args.d,
        "labels": labels,
        "D": [_num(v) for v in sm.D],
        "P": _table(["k"] + labels, [[lab, *row] for lab, row in zip(labels, sm.P)]),
        "Q": _table(["i"] + labels, [[lab, *row] for lab, row in zip(labels, sm.Q)]),
        "pq_residual": _num(residual),
        "tol_mat": _num(tol),
    }
    if residual >= tol:
        raise ResidualFailure(report)
    return report


def cmd_intersect(args) -> dict:
    q = _resolve_q(args)
    d = args.d
    ds = scheme.distance_set(q, d)
    report = {"command": "intersect", "q": q, "d": d}
    picked = [args.i, args.j, args.k]
    if any(v is not None for v in picked):
        if any(v is None for v in picked):
            raise ValidationError("give all of --i --j --k or none")
        i, j, k = (scheme.Distance.of(v) for v in picked)
        for v in (i, j, k):
            if v not in ds:
                raise ValidationError(f"{v} is not a distance for q={q}, d={d}")
        value = intersect.intersection_table(q, d)(i, j, k)
        report.update(i=str(i), j=str(j), k=str(k), value=value)
        if args.oracle:
            brute = intersect.brute_force_intersection(i, j, k, q, d)
            report["oracle_value"] = brute
            if brute != value:
                raise ResidualFailure(report)
        return report
    table = intersect.intersection_table(q, d)
    rows = [
        (k, i, j, table.values[kk, ii, jj])
        for kk, k in enumerate(ds)
        for ii, i in enumerate(ds)
        for jj, j in enumerate(ds)
    ]
    report["table"] = _table(["k", "i", "j", "p"], rows)
    if args.oracle:
        mismatches = int(np.count_nonzero(table.values != intersect.brute_force_table(q, d).values))
        report["oracle_mismatches"] = mismatches
        if mismatches:
            raise ResidualFailure(report)
    return report


def cmd_walk(args) -> dict:
    q = _resolve_q(args)
    wr = walks.return_probability(q, args.t, args.steps)
    report = {
        "command": "walk",
        "q": q,
        "t": wr.t,
        "steps": wr.ell,
        "exact": _num(wr.exact_return),
        "float": _num(wr.float_return),
        "asymptotic": _num(wr.asymptotic_prediction),
        "closed_walks": wr.trace_value,
        "moment_exact": wr.moment_exact,
        "q_is_prime": wr.q_is_prime,
    }
    if args.trials > 0:
        mc = walks.simulate_walk(q, args.t, args.steps, args.trials, args.seed)
        report.update(trials=mc.trials, seed=mc.seed, estimate=_num(mc.estimate), stderr=_num(mc.stderr))
    return report


def cmd_equidist(args) -> dict:
    q = _resolve_q(args)
    rows = [
        (r.m, r.catalan, r.even_moment, r.even_ratio, r.odd_moment, r.odd_normalized)
        for r in equidist.moment_asymptotics_report(q, args.max_m)
    ]
    return {
        "command": "equidist",
        "q": q,
        "ks_distance": _num(equidist.ks_distance(q)),
        "moment_ratios": _table(["m", "catalan", "M_even", "even_ratio", "M_odd", "odd_normalized"], rows),
    }


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, f".{FLOAT_DIGITS}g")
    return str(v)


def emit(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    scalars = {k: v for k, v in report.items() if not (isinstance(v, dict) and "columns" in v)}
    w.writerow(["key", "value"])
    for key, val in scalars.items():
        w.writerow([key, " ".join(map(_fmt, val)) if isinstance(val, list) else _fmt(val)])
    for name, tab in report.items():
        if isinstance(tab, dict) and "columns" in tab:
            buf.write(f"\n# {name}\n")
            w.writerow(tab["columns"])
            for row in tab["rows"]:
                w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, help="field size, an odd prime power")
    common.add_argument("--p", type=int, help="characteristic (use with --ell-ext)")
    common.add_argument("--ell-ext", type=int, default=1, help="extension degree")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", help="write to this file instead of stdout")
    common.add_argument("--q-max-cap", type=int, default=Q_MAX)

    parser = _Parser(prog="euclidscheme", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kloosterman", parents=[common], help="K(1,a), angles and moments")
    p.add_argument("--max-m", type=int, default=2, help="report M_{q,l} for l <= this")
    p.set_defaults(func=cmd_kloosterman)

    p = sub.add_parser("scheme", parents=[common], help="P, Q and D matrices")
    p.add_argument("--d", type=int, default=2)
    p.set_defaults(func=cmd_scheme)

    p = sub.add_parser("intersect", parents=[common], help="intersection numbers")
    p.add_argument("--d", type=int, default=2)
    for name in ("i", "j", "k"):
        p.add_argument(f"--{name}", help="distance encoding or 'zbar'")
    p.add_argument("--oracle", action="store_true", help="compare against direct counting")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("walk", parents=[common], help="return probability of the distance-t walk")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("equidist", parents=[common], help="Sato-Tate diagnostics")
    p.add_argument("--max-m", type=int, default=3)
    p.set_defaults(func=cmd_equidist)
    return parser


def _distance_arg(v):
    if v is None or v == "zbar":
        return v
    try:
        return int(v)
    except ValueError:
        raise ValidationError(f"bad distance {v!r}") from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    status = 0
    try:
        if args.command == "intersect":
            args.i, args.j, args.k = (_distance_arg(v) for v in (args.i, args.j, args.k))
        report = args.func(args)
    except ResidualFailure as exc:
        report, status = exc.args[0], 2
    except (ValidationError, FieldError, scheme.SchemeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"residual check failed: {exc}", file=sys.stderr)
        return 2
    text = emit(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
