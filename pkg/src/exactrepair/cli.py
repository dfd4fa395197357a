"""Command-line front end: ``point``, ``region``, ``verify`` and ``oracle``."""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from datetime import datetime, timezone
from typing import Callable, Optional

import numpy as np

from . import codes, simulate, tradeoff
from .exactmath import to_decimal, to_exact
from .records import OutputRecord, render_csv, render_json
from .tradeoff import ParameterError, SystemParams

SERIES = ["functional", "space-share", "baseline", "c1", "c2", "hull"]

_POINT_FUNCS: dict[str, Callable] = {
    "c1": tradeoff.construction1_point,
    "c2": tradeoff.construction2_point,
    "baseline": tradeoff.baseline_point,
}


class UsageError(Exception):
    pass


def _params(args) -> SystemParams:
    try:
        return SystemParams(args.n, args.k, args.d)
    except ParameterError as e:
        raise UsageError(str(e)) from None


def _metadata(args, **extra) -> dict:
    meta = dict(extra)
    if getattr(args, "timestamp", False):
        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def _render(records: list[OutputRecord], fmt: str) -> str:
    return render_json(records) if fmt == "json" else render_csv(records)


def _k_hat_range(params: SystemParams, series: str) -> range:
    top = params.k if series == "c1" else params.d
    return range(1, top + 1)


def cmd_point(args) -> tuple[str, int]:
    params = _params(args)
    normalize = not args.raw
    c = args.construction
    if c == "msr":
        pt = tradeoff.msr_point(params, normalize)
    elif c == "mbr":
        pt = tradeoff.mbr_point(params, normalize)
    else:
        if args.khat is None:
            raise UsageError(f"--khat is required for construction {c}")
        try:
            pt = _POINT_FUNCS[c](params, args.khat, normalize)
        except ParameterError as e:
            raise UsageError(str(e)) from None
    rec = OutputRecord(params, c, [pt], _metadata(args, construction=c, khat=args.khat, raw=args.raw))
    return _render([rec], args.format), 0


def region_records(params: SystemParams, series: list[str], raw: bool = False) -> list[OutputRecord]:
    normalize = not raw
    out = []
    for s in series:
        if s == "functional":
            pts = tradeoff.functional_vertices(params, normalize)
        elif s == "space-share":
            pts = [tradeoff.msr_point(params, normalize), tradeoff.mbr_point(params, normalize)]
        elif s == "hull":
            pts = tradeoff.inner_bound_region(params).hull_vertices()
        else:
            f = _POINT_FUNCS[s]
            pts = [f(params, kh, normalize) for kh in _k_hat_range(params, s)]
        meta = {"construction": s, "raw": raw}
        if s == "hull":
            meta["region"] = "theorem1" if params.d == params.k else "theorem2"
        out.append(OutputRecord(params, s, pts, meta))
    return out


def cmd_region(args) -> tuple[str, int]:
    params = _params(args)
    series = []
    for item in args.series.split(","):
        item = item.strip()
        if item == "all":
            series.extend(SERIES)
        elif item in SERIES:
            series.append(item)
        else:
            raise UsageError(f"unknown series {item!r}; choose from {', '.join(SERIES)} or all")
    series = list(dict.fromkeys(series))
    records = region_records(params, series, args.raw)
    if args.timestamp:
        for r in records:
            r.metadata.update(_metadata(args))
    return _render(records, args.format), 0


def run_verification(
    params: SystemParams,
    k_hat: int,
    seed: int = 0,
    field: int = codes.DEFAULT_FIELD,
    max_n: int = codes.DEFAULT_MAX_N,
    tamper: bool = False,
) -> dict:
    """Build, glue and exhaustively check a concrete code against the analytic point."""
    code = codes.build_concrete(params, k_hat, field, seed, max_n)
    if tamper:
        # flip one stored subsymbol of the first non-empty node in copy 0
        pos = code.placements[0][0]
        code.contents[0, pos, 0] = (code.contents[0, pos, 0] + 1) % code.field.q

    checks: list[dict] = []

    def check(name: str, measured, expected) -> None:
        row = {"check": name, "measured": measured, "expected": expected, "ok": measured == expected}
        checks.append(row)

    expected = tradeoff.construction1_point(params, k_hat)
    storage = code.storage_per_node()
    check("storage homogeneous", len(set(storage)) == 1, True)

    ledger = None
    try:
        ledger = simulate.sweep_repairs(code, params.d)
    except simulate.RepairMismatchError as e:
        checks.append(
            {
                "check": "exact repair",
                "measured": f"mismatch at failed={e.failed} helpers={e.helpers}",
                "expected": "all exact",
                "ok": False,
            }
        )
    if ledger is not None:
        check("exact repair", "all exact", "all exact")
        check("alpha", to_exact(ledger.alpha), to_exact(expected.alpha))
        check("gamma", to_exact(ledger.gamma), to_exact(expected.gamma))
        check(
            "gamma non-empty",
            to_exact(ledger.nonempty_gamma),
            to_exact(tradeoff.construction1_nonempty_gamma(params, k_hat)),
        )

    failures = []
    subsets = list(itertools.combinations(range(params.n), params.k))
    for subset in subsets:
        if not np.array_equal(codes.reconstruct(code, subset), code.files):
            failures.append(subset)
    check("reconstruction", f"{len(subsets) - len(failures)}/{len(subsets)}", f"{len(subsets)}/{len(subsets)}")
    if failures:
        checks[-1]["failed_subsets"] = [list(s) for s in failures]

    report = {
        "params": {"n": params.n, "k": params.k, "d": params.d},
        "khat": k_hat,
        "field": field,
        "seed": seed,
        "copies": code.copies,
        "eval_points": list(code.small.eval_points),
        "storage_per_node": storage[0] if len(set(storage)) == 1 else storage,
        "checks": checks,
        "pass": all(c["ok"] for c in checks),
    }
    if ledger is not None:
        report["ledger"] = ledger.summary()
    return report


def _format_report(report: dict) -> str:
    p = report["params"]
    lines = [
        f"verify (n,k,d)=({p['n']},{p['k']},{p['d']}) khat={report['khat']} "
        f"field=GF({report['field']}) seed={report['seed']} copies={report['copies']}",
        f"storage per node: {report['storage_per_node']} subsymbols",
    ]
    for c in report["checks"]:
        status = "PASS" if c["ok"] else "FAIL"
        lines.append(f"{status} {c['check']}: measured={c['measured']} expected={c['expected']}")
    if "ledger" in report:
        roles = report["ledger"]["role_gamma"]
        lines.append("gamma by role: " + ", ".join(f"{r}={v['exact']}" for r, v in roles.items()))
    lines.append("RESULT " + ("PASS" if report["pass"] else "FAIL"))
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> tuple[str, int]:
    params = _params(args)
    try:
        report = run_verification(
            params, args.khat, args.seed, args.field, args.cap_override or codes.DEFAULT_MAX_N, args.tamper
        )
    except (ParameterError, codes.CodeValidationError, codes.ResourceCapError) as e:
        raise UsageError(str(e)) from None
    if args.dump_code:
        code = codes.build_concrete(
            params, args.khat, args.field, args.seed, args.cap_override or codes.DEFAULT_MAX_N
        )
        _write(args.dump_code, codes.dumps(code))
    text = json.dumps(report, indent=2) + "\n" if args.format == "json" else _format_report(report)
    return text, 0 if report["pass"] else 1


def cmd_oracle(args) -> tuple[str, int]:
    params = _params(args)
    try:
        small = tradeoff.match_small_code(params, args.khat, "repair")
        oracle = simulate.mk_oracle(params, args.khat, max_n=args.cap_override or simulate.ORACLE_MAX_N)
    except ParameterError as e:
        raise UsageError(str(e)) from None
    except simulate.OracleCapError as e:
        raise UsageError(f"{e}; raise it with --cap-override") from None
    closed = tradeoff.construction2_file_size(params, small)
    row = {
        "n": params.n,
        "k": params.k,
        "d": params.d,
        "khat": args.khat,
        "n_hat": small.n_hat,
        "oracle_exact": to_exact(oracle),
        "closed_form_exact": to_exact(closed),
        "oracle": to_decimal(oracle),
        "closed_form": to_decimal(closed),
        "agree": oracle == closed,
    }
    if args.format == "json":
        text = json.dumps(row, indent=2) + "\n"
    else:
        text = ",".join(row) + "\n" + ",".join(str(v).lower() if isinstance(v, bool) else str(v) for v in row.values()) + "\n"
    return text, 0 if row["agree"] else 1


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exactrepair",
        description="Exact-repair storage/bandwidth tradeoff bounds and concrete code checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json")):
        p.add_argument("--n", type=int, required=True, help="number of nodes")
        p.add_argument("--k", type=int, required=True, help="reconstruction degree")
        p.add_argument("--d", type=int, required=True, help="repair degree")
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    p = sub.add_parser("point", help="a single tradeoff point")
    common(p)
    p.add_argument("--construction", choices=["msr", "mbr", "c1", "c2", "baseline"], required=True)
    p.add_argument("--khat", type=int)
    p.add_argument("--raw", action="store_true", help="do not normalize by the file size")
    p.add_argument("--timestamp", action="store_true", help="add a timestamp to the metadata")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("region", help="curves and the inner-bound hull")
    common(p)
    p.add_argument("--series", default="all", help=f"comma list from {','.join(SERIES)} or all")
    p.add_argument("--raw", action="store_true", help="do not normalize by the file size")
    p.add_argument("--timestamp", action="store_true", help="add a timestamp to the metadata")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("verify", help="build a glued code and check it exhaustively")
    common(p, formats=("text", "json"))
    p.add_argument("--khat", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", type=int, default=codes.DEFAULT_FIELD, help="prime field order")
    p.add_argument("--cap-override", type=int, metavar="N", help="allow gluing for n <= N")
    p.add_argument("--dump-code", metavar="PATH", help="write the glued code as text")
    p.add_argument("--tamper", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force M_k against its closed form")
    common(p)
    p.add_argument("--khat", type=int, required=True)
    p.add_argument("--cap-override", type=int, metavar="N", help="allow enumeration for n <= N")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, status = args.func(args)
        if args.out:
            _write(args.out, text)
        else:
            sys.stdout.write(text)
    except UsageError as e:
        parser.error(str(e))
    except OSError as e:
        print(f"exactrepair: error: {e}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
