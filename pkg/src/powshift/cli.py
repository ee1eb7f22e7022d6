"""Command-line surface.

Subcommands: construct, scan-families, census, davenport, constants,
verify.  Every output file starts with a self-describing header block
(`# key: value` lines); timestamps live only in that header so reruns are
byte-identical below it.  Exit codes: 0 success, 1 usage, 2
budget/infeasible, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, TextIO

from . import __version__
from .arith import build_prime_table
from .census import census_grid, enumerate_B, enumerate_Bstar, density_exponents
from .construct import SearchBudget, choose_parameters, construct, verify_membership
from .errors import (
    BudgetExceeded,
    EmptyHarvest,
    InfeasibleParameters,
    PowshiftError,
    RangeOverflow,
)
from .families import (
    TARGET_FUNCTION,
    assemble_products,
    family_scan,
    load_checkpoint,
    mertens_constant,
    s_statistic,
    scan_width,
    totient_ratio_sum,
    write_checkpoint,
)
from .groups import GroupSpec, davenport_n_exact, ebk_bound
from .harvest import ShiftSet

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exit code is 2; usage is 1 here
        raise _UsageError(message)


def parse_bound(text: str) -> int:
    """Accept plain or scientific-notation integers ('1e6')."""
    try:
        return int(text)
    except ValueError:
        val = float(text)
        out = int(round(val))
        if abs(out - val) > 1e-6 * max(1.0, abs(val)):
            raise _UsageError(f"{text!r} is not an integral bound")
        return out


def parse_shifts(text: str) -> ShiftSet:
    try:
        shifts = tuple(int(t) for t in text.split(","))
        return ShiftSet(tuple(sorted(shifts)))
    except (ValueError, TypeError) as exc:
        raise _UsageError(f"bad shift set {text!r}: {exc}")


def _open_out(path: Optional[str]) -> TextIO:
    return open(path, "w") if path and path != "-" else sys.stdout


def write_header(fh: TextIO, command: str, config: Dict[str, object]) -> None:
    fh.write("# powshift-report\n")
    fh.write(f"# version: {__version__}\n")
    fh.write(f"# command: {command}\n")
    fh.write(f"# timestamp: {datetime.now(timezone.utc).isoformat()}\n")
    for key, val in config.items():
        fh.write(f"# {key}: {val}\n")


def _record_line(rec) -> str:
    factors = ",".join(map(str, rec.prime_factors)) or "-"
    roots = ";".join(f"{a:+d}:{b}" for a, b in rec.roots)
    prov = dict(rec.provenance)
    tag = prov.get("witness_indices")
    if tag is not None:
        prov_tag = "subset=" + (",".join(map(str, tag)) or "-")
    else:
        prov_tag = f"family_n={prov.get('family_n')};family_a=" + ",".join(
            map(str, prov.get("family_a", ()))
        )
    return f"{rec.n} {factors} {roots} {prov_tag}"


# -- subcommands ------------------------------------------------------------

def cmd_construct(args) -> int:
    A = parse_shifts(args.shifts)
    overrides: Dict[str, object] = {}
    if args.y_override is not None:
        overrides["y"] = args.y_override
    if args.u_override is not None:
        overrides["u"] = args.u_override
    if args.k_override is not None:
        overrides["k"] = args.k_override
    params = choose_parameters(args.x, A, args.r, eps=args.eps, overrides=overrides)
    table = build_prime_table(params.harvest_bound + max(abs(a) for a in A.shifts) + 1)
    budget = SearchBudget(max_witnesses=args.max_witnesses)
    result = construct(params, table, budget=budget, seed=args.seed,
                       include_trivial=not args.exclude_trivial)
    G = GroupSpec(args.r, A.s * max(params.t, 1))
    fh = _open_out(args.out)
    try:
        write_header(fh, "construct", {
            "x": params.x, "shifts": ",".join(f"{a:+d}" for a in A.shifts),
            "r": params.r, "y": params.y, "u": params.u, "k": params.k,
            "t": params.t, "eps": params.eps,
            "overrides": dict(params.overrides) or "none",
            "seed": args.seed, "jobs": args.jobs,
            "include_trivial": not args.exclude_trivial,
            "harvest_size": result.harvest_size,
            "group_bound_ebk": f"{ebk_bound(G):.6f}",
            "witnesses_found": len(result.records),
            "truncated": result.truncated,
        })
        for rec in result.records:
            fh.write(_record_line(rec) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_scan_families(args) -> int:
    if args.sign not in ("+1", "-1", "1"):
        raise _UsageError("--sign must be +1 or -1")
    sign = 1 if args.sign in ("+1", "1") else -1
    H = scan_width(args.N, args.r)

    start = 1
    prior = []
    if args.resume and args.checkpoint and os.path.exists(args.checkpoint):
        meta, prior = load_checkpoint(args.checkpoint)
        if (meta.get("N") == args.N and meta.get("r") == args.r
                and meta.get("sign") == sign):
            start = meta.get("completed_through", 0) + 1
        else:
            prior = []
    records = prior + family_scan(args.N, args.r, sign, jobs=args.jobs, n_start=start)
    if args.checkpoint:
        write_checkpoint(args.checkpoint, records, args.N, args.r, sign, args.N)

    assembly = assemble_products(records, args.r, sign)
    rich = [rec for rec in records if len(rec.hits) >= args.r]
    stat = s_statistic(args.N, args.r, sign) if not args.skip_s_statistic else None

    fh = _open_out(args.out)
    try:
        write_header(fh, "scan-families", {
            "N": args.N, "r": args.r, "sign": f"{sign:+d}",
            "target_function": TARGET_FUNCTION[sign], "H": H,
            "jobs": args.jobs, "resume": bool(args.resume),
            "families_with_hits": len(records),
            "families_with_r_hits": len(rich),
            "assembled_members": len(assembly.records),
            "duplicate_prime_skips": assembly.duplicate_prime_skips,
            "max_prime_set_multiplicity": assembly.max_multiplicity,
        })
        fh.write("N,families_ge_r,S_N,predicted_main_term\n")
        if stat is not None:
            predicted = stat.c_truncated * args.N * H - (args.r - 1) * args.N * math.log(args.N)
            fh.write(f"{args.N},{len(rich)},{stat.value:.6f},{predicted:.6f}\n")
        else:
            fh.write(f"{args.N},{len(rich)},skipped,skipped\n")
    finally:
        if fh is not sys.stdout:
            fh.close()

    if args.members_out:
        with open(args.members_out, "w") as mfh:
            write_header(mfh, "scan-families members", {
                "N": args.N, "r": args.r, "sign": f"{sign:+d}",
                "target_function": TARGET_FUNCTION[sign],
            })
            for rec in assembly.records:
                mfh.write(_record_line(rec) + "\n")
    return EXIT_OK


def cmd_census(args) -> int:
    grid = [parse_bound(t) for t in args.grid.split(",")] if args.grid else [args.x]
    if max(grid) > args.x:
        raise _UsageError("--grid points must not exceed --x")
    if args.bstar:
        if args.sign is None:
            raise _UsageError("--bstar requires --sign")
        sign = 1 if args.sign in ("+1", "1") else -1
        members = enumerate_Bstar(args.x, sign, args.r, jobs=args.jobs)
        counts = [sum(1 for n in members if n <= x) for x in grid]
        report = density_exponents(grid, counts, {"sign": sign, "r": args.r})
        label = f"Bstar sign={sign:+d}"
    else:
        if not args.shifts:
            raise _UsageError("census needs --shifts (or --bstar --sign)")
        A = parse_shifts(args.shifts)
        members, report = census_grid(grid, A, args.r,
                                      include_trivial=not args.exclude_trivial,
                                      jobs=args.jobs)
        label = f"B shifts={','.join(f'{a:+d}' for a in A.shifts)}"
    fh = _open_out(args.out)
    try:
        write_header(fh, "census", {
            "set": label, "x": args.x, "r": args.r,
            "include_trivial": not args.exclude_trivial,
            "jobs": args.jobs,
            "reference_exponents": "0.7039 (single shift), 1/(2s) (general); "
                                   "asymptotic only, not desk targets",
        })
        fh.write("x,count,exponent\n")
        for x, c, e in report.rows():
            fh.write(f"{x},{c},{'' if e is None else f'{e:.6f}'}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    if args.members_out:
        with open(args.members_out, "w") as mfh:
            write_header(mfh, "census members", {"set": label, "x": args.x, "r": args.r})
            for n in members:
                mfh.write(f"{n}\n")
    return EXIT_OK


def cmd_davenport(args) -> int:
    G = GroupSpec(args.r, args.d)
    bound = ebk_bound(G)
    try:
        exact = davenport_n_exact(G)
        print(f"group=(Z/{args.r}Z)^{args.d} exact={exact} ebk_bound={bound:.6f}")
    except BudgetExceeded:
        print(f"group=(Z/{args.r}Z)^{args.d} exact=budget-exceeded ebk_bound={bound:.6f}")
    return EXIT_OK


def cmd_constants(args) -> int:
    c = mertens_constant(args.cutoff)
    print(f"mertens_constant cutoff={args.cutoff} value={c:.6f}")
    if args.totient_H:
        total = totient_ratio_sum(args.totient_H)
        print(f"totient_ratio_sum H={args.totient_H} value={total:.6f} "
              f"value/H={total / args.totient_H:.6f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    A = parse_shifts(args.shifts)
    values: List[int] = [parse_bound(t) for t in args.n]
    if args.from_file:
        with open(args.from_file) as fh:
            for line in fh:
                line = line.strip()
                if line and not line.startswith("#"):
                    values.append(parse_bound(line))
    if not values:
        raise _UsageError("verify needs integers (arguments or --from-file)")
    limit = max(max(values), 4) + max(abs(a) for a in A.shifts) + 1
    table = build_prime_table(limit)
    for n in values:
        ok, roots = verify_membership(n, A, r=args.r, table=table)
        if ok:
            rts = ";".join(f"{a:+d}:{b}" for a, b in sorted(roots.items()))
            print(f"{n} yes {rts}")
        else:
            print(f"{n} no -")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="powshift",
                description="shifted-prime products that are perfect r-th powers")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--jobs", type=int, default=1, help="worker shards")
        sp.add_argument("--out", default="-", help="output path ('-' = stdout)")

    sp = sub.add_parser("construct", help="subset constructor pipeline")
    sp.add_argument("--x", type=parse_bound, required=True)
    sp.add_argument("--shifts", required=True, help="comma list, e.g. -1 or -1,+1")
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--y-override", type=float, default=None)
    sp.add_argument("--u-override", type=float, default=None)
    sp.add_argument("--k-override", type=int, default=None)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-witnesses", type=int, default=10000)
    sp.add_argument("--exclude-trivial", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("scan-families", help="prime family scan (a^r n +/- 1)")
    sp.add_argument("--N", type=parse_bound, required=True)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--sign", required=True, help="+1 or -1 (family sign)")
    sp.add_argument("--checkpoint", default=None)
    sp.add_argument("--resume", action="store_true")
    sp.add_argument("--members-out", default=None)
    sp.add_argument("--skip-s-statistic", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_scan_families)

    sp = sub.add_parser("census", help="exhaustive enumeration of B / B*")
    sp.add_argument("--x", type=parse_bound, required=True)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--shifts", default=None)
    sp.add_argument("--bstar", action="store_true")
    sp.add_argument("--sign", default=None)
    sp.add_argument("--grid", default=None, help="comma list of bounds")
    sp.add_argument("--members-out", default=None)
    sp.add_argument("--exclude-trivial", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("davenport", help="exact n(G) and the EBK bound")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.set_defaults(func=cmd_davenport)

    sp = sub.add_parser("constants", help="Mertens-type constant and totient sum")
    sp.add_argument("--cutoff", type=parse_bound, default=10**6)
    sp.add_argument("--totient-H", type=parse_bound, default=None)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("verify", help="membership check with witnesses")
    sp.add_argument("--shifts", required=True)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--from-file", default=None)
    sp.add_argument("n", nargs="*", help="integers to verify")
    sp.set_defaults(func=cmd_verify)

    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, InfeasibleParameters, EmptyHarvest, RangeOverflow) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except AssertionError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except PowshiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
