"""Command line interface.

Exit codes: 0 success, 1 a certificate failed verification, 2 invalid input,
3 no equilibrium prices in the searched grid, 64 unknown subcommand.
"""
from __future__ import annotations

import argparse
import json
import sys

from .auction import format_trace, run_ascending_auction, run_extended_auction
from .errors import DomainError, PakmarketError, ResourceLimitError, ValidationError
from .market import all_packages
from .preferences import AdditiveMarginal, RevenueMax, SetUnion
from .serialization import (
    encode_number,
    parse_allocation,
    parse_market,
    parse_prices,
    serialize_allocation,
    serialize_certificate,
    serialize_prices,
)
from .setfunctions import (
    SetFunction,
    is_set_cover_submodular,
    is_set_cover_supermodular,
    is_subadditive,
    is_superadditive,
    set_function_dual,
)
from .welfare import (
    check_pricing_decomposition,
    enumerate_equilibrium_prices,
    solve_welfare,
    verify_equilibrium,
)

EXIT_OK = 0
EXIT_NOT_EQUILIBRIUM = 1
EXIT_INVALID = 2
EXIT_NO_PRICES = 3
EXIT_USAGE = 64

COMMANDS = ("solve", "verify", "prices", "auction", "extended-auction", "dual", "check")


def _read(arg: str) -> str:
    """Inline JSON, or a path to a JSON file."""
    stripped = arg.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return arg
    with open(arg) as fh:
        return fh.read()


def _load(path):
    return parse_market(_read(path))


def _emit(obj, as_json, text):
    print(json.dumps(obj, indent=2) if as_json else text)


def cmd_solve(args):
    inst = _load(args.file)
    result = solve_welfare(inst)
    out = {
        "swp": encode_number(result.swp_value),
        "swlp": encode_number(result.swlp_value),
        "integral": result.integral,
    }
    lines = [f"welfare optimum (integer):  {result.swp_value}",
             f"welfare optimum (relaxed):  {result.swlp_value}",
             f"equilibrium exists:         {'yes' if result.integral else 'no'}"]
    if result.certificate is not None:
        cert = serialize_certificate(inst, result.certificate)
        out["certificate"] = cert
        report = check_pricing_decomposition(inst, result.certificate)
        out["decomposition_ok"] = report.ok
        lines.append("prices:     " + ", ".join(f"{k}={v}" for k, v in cert["prices"].items()))
        lines.append("allocation: " + ", ".join(f"{k}<-{{{', '.join(v)}}}" for k, v in cert["allocation"].items()))
        lines.append(f"price decomposition checks: {'pass' if report.ok else 'FAIL'}")
    _emit(out, args.json, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args):
    inst = _load(args.file)
    prices = parse_prices(inst, _read(args.prices))
    allocation = parse_allocation(inst, _read(args.alloc))
    check = verify_equilibrium(inst, prices, allocation)
    out = {"ok": check.ok, "violations": [v.message for v in check.violations]}
    text = "equilibrium: yes" if check.ok else "equilibrium: no\n" + "\n".join(v.message for v in check.violations)
    _emit(out, args.json, text)
    return EXIT_OK if check.ok else EXIT_NOT_EQUILIBRIUM


def cmd_prices(args):
    inst = _load(args.file)
    found = enumerate_equilibrium_prices(inst, args.bound)
    labels = [inst.label(m) for m in inst.packages]
    out = {"packages": labels, "prices": [list(p) for p in found]}
    text = "(" + ",".join(labels) + ")\n" + "\n".join("(" + ",".join(map(str, p)) + ")" for p in found)
    if not found:
        text = f"no integer equilibrium prices in [0, {args.bound}]"
    _emit(out, args.json, text)
    return EXIT_OK if found else EXIT_NO_PRICES


def _auction_out(inst, result, args):
    out = {
        "prices": serialize_prices(result.instance, result.prices),
        "allocation": serialize_allocation(result.instance, result.allocation),
        "verified": None if result.verification is None else result.verification.ok,
        "warnings": list(result.warnings),
    }
    if args.trace:
        out["trace"] = result.trace_events()
    text = format_trace(result) if args.trace else ""
    summary = [
        "final prices: " + ", ".join(f"{k}={v}" for k, v in out["prices"].items()),
        "allocation:   " + ", ".join(f"{k}<-{{{', '.join(v)}}}" for k, v in out["allocation"].items() if v),
        f"verified equilibrium: {out['verified']}",
    ]
    _emit(out, args.json, "\n".join(filter(None, [text] + summary)))
    return EXIT_OK


def cmd_auction(args):
    inst = _load(args.file)
    return _auction_out(inst, run_ascending_auction(inst), args)


def cmd_extended(args):
    inst = _load(args.file)
    return _auction_out(inst, run_extended_auction(inst), args)


def _seller_table(inst) -> tuple[str, SetFunction]:
    seller = inst.seller
    if isinstance(seller, RevenueMax):
        return "reservation values", seller.values
    if isinstance(seller, SetUnion):
        return "costs", seller.costs
    if isinstance(seller, AdditiveMarginal) and len(seller.table) == (1 << inst.n) - 1:
        return "costs", SetFunction.from_mapping(inst.n, seller.table)
    raise DomainError("the seller has no complete set-function table")


def cmd_dual(args):
    inst = _load(args.file)
    what, f = _seller_table(inst)
    g = set_function_dual(f)
    labels = [inst.label(m) for m in all_packages(inst.n)]
    out = {"table": what, "values": dict(zip(labels, (f[m] for m in all_packages(inst.n)))),
           "dual": dict(zip(labels, (g[m] for m in all_packages(inst.n))))}
    width = max(len(x) for x in labels + ["package"])
    lines = [f"{'package':<{width}}  {what[:12]:>12}  {'dual':>6}"]
    for label, m in zip(labels, all_packages(inst.n)):
        lines.append(f"{label:<{width}}  {f[m]:>12}  {g[m]:>6}")
    _emit(out, args.json, "\n".join(lines))
    return EXIT_OK


def cmd_check(args):
    inst = _load(args.file)
    out = {"buyers": {}, "seller": {}}
    lines = []
    for l, buyer in enumerate(inst.buyers):
        for q in range(buyer.num_agents):
            f = SetFunction.from_mapping(inst.n, buyer.agent_values(q), default=0)
            key = inst.buyer_name(l) + (f"/{q}" if buyer.num_agents > 1 else "")
            out["buyers"][key] = {"superadditive": is_superadditive(f)}
            lines.append(f"buyer {key}: superadditive={is_superadditive(f)}")
    try:
        what, f = _seller_table(inst)
    except DomainError:
        lines.append("seller: no complete set-function table")
    else:
        info = {
            "table": what,
            "superadditive": is_superadditive(f),
            "subadditive": is_subadditive(f),
            "set_cover_submodular": is_set_cover_submodular(f),
            "set_cover_supermodular": is_set_cover_supermodular(f),
        }
        out["seller"] = info
        lines.append(f"seller {what}: " + ", ".join(f"{k}={v}" for k, v in info.items() if k != "table"))
    _emit(out, args.json, "\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pakmarket", description="Package markets with incremental seller costs.")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="market document (JSON)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    add("solve", cmd_solve, "solve the welfare program and report an equilibrium if one exists")
    p = add("verify", cmd_verify, "check prices and an allocation by brute force")
    p.add_argument("--prices", required=True, help="JSON object or file (a certificate works)")
    p.add_argument("--alloc", required=True, help="JSON object or file (a certificate works)")
    p = add("prices", cmd_prices, "enumerate integer equilibrium prices")
    p.add_argument("--bound", type=int, required=True, help="largest price to try")
    p = add("auction", cmd_auction, "run the ascending auction")
    p.add_argument("--trace", action="store_true", help="print every round")
    p = add("extended-auction", cmd_extended, "run the auction with an auctioneer and dummy bidders")
    p.add_argument("--trace", action="store_true", help="print every round")
    add("dual", cmd_dual, "dual of the seller's set function")
    add("check", cmd_check, "superadditivity and related properties")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv or argv[0] in ("-h", "--help"):
        parser.print_help()
        return EXIT_OK if argv else EXIT_USAGE
    if argv[0] not in COMMANDS:
        parser.print_usage(sys.stderr)
        print(f"pakmarket: unknown command {argv[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DomainError, OSError) as exc:
        print(f"pakmarket: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitError as exc:
        print(f"pakmarket: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PakmarketError as exc:
        print(f"pakmarket: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    sys.exit(main())

