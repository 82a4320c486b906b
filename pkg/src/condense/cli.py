"""Command-line interface.

Every subcommand prints a text report by default or a JSON document with
``--json``.  Exit status: 0 on success, 1 when a search finds nothing within
the caps or a verification fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .arith import DEFAULT_CAPS, DEFAULT_RULES, RuleSet, SearchCaps, exact, format_value
from .bounds import base6_digits, dp_delta_bounds, log_bound, log_bound_interval
from .cycles import (
    cycle_report, first_exponent_with_run, leading_zeros_bound_check, max_zero_run,
    predicted_counts, zero_run_witnesses,
)
from .expr import DigitMultiset, leaves, render, try_evaluate
from .pow5 import (
    digit_count, digit_histogram, pow5_text, prove_selfcondensable, validate_selfcondensing,
    zero_fraction,
)
from .search import certify, engine, enumerate_witnesses, load_certificates, save_certificates

EXIT_OK, EXIT_NOT_FOUND, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Config:
    caps: SearchCaps
    rules: RuleSet
    cache_path: Path | None
    output_format: str
    parallelism: int
    meta: bool


def _digits(text: str) -> DigitMultiset:
    try:
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) == 1 and len(parts[0]) > 1:
            parts = list(parts[0])
        return DigitMultiset.of(int(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad digit list {text!r}: {exc}") from None


def _exact(text: str):
    try:
        return exact(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad number {text!r}: {exc}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def config_from(args) -> Config:
    try:
        caps = SearchCaps.parse(args.caps) if args.caps else DEFAULT_CAPS
        rules = RuleSet.parse(args.rules) if args.rules else DEFAULT_RULES
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.no_zero_fact or args.no_zero_pow:
        rules = RuleSet(**{**rules.__dict__,
                           "zero_fact_is_one": rules.zero_fact_is_one and not args.no_zero_fact,
                           "zero_pow_zero_is_one": rules.zero_pow_zero_is_one and not args.no_zero_pow})
    return Config(caps, rules, Path(args.cache) if args.cache else None,
                  "json" if args.json else "text", args.jobs, not args.no_meta)


def _meta(cfg: Config, command: str) -> dict:
    return {"command": command, "version": __version__,
            "caps": {"mag": format_value(cfg.caps.max_magnitude), "den": cfg.caps.max_denominator,
                     "fact": cfg.caps.max_factorial_arg, "exp": cfg.caps.max_exponent_abs},
            "rules": {k: v for k, v in cfg.rules.__dict__.items()},
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}


def _emit(cfg: Config, command: str, doc: dict, text: str) -> None:
    if cfg.output_format == "json":
        if cfg.meta:
            doc = {**doc, "meta": _meta(cfg, command)}
        print(json.dumps(doc, indent=2, sort_keys=False))
    else:
        print(text)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError(f"{args.command} needs " + ", ".join("--" + n for n in missing))


def _with_cache(cfg: Config):
    eng = engine(cfg.caps, cfg.rules)
    if cfg.cache_path:
        try:
            n = eng.seed(load_certificates(cfg.cache_path))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        logging.getLogger(__name__).info("seeded %d cached witnesses", n)
    return eng


def _save_cache(cfg: Config, eng) -> None:
    if cfg.cache_path:
        save_certificates(cfg.cache_path, eng.certificates())


def _witness_doc(target, ms: DigitMultiset, w, cfg: Config) -> dict:
    return {"target": format_value(target), "digits": ms.digits(), "expr": render(w),
            "value_ok": try_evaluate(w, cfg.caps, cfg.rules) == target, "leaves_ok": leaves(w) == ms}


# ----- subcommands ---------------------------------------------------------

def cmd_condense(args, cfg: Config) -> int:
    _require(args, "digits", "target")
    ms, t = args.digits, args.target
    eng = _with_cache(cfg)
    if args.all:
        found = enumerate_witnesses(ms, t, cfg.caps, cfg.rules, limit=args.all)
    else:
        w = eng.find(ms, t)
        found = [w] if w is not None else []
    _save_cache(cfg, eng)
    if not found:
        _emit(cfg, "condense", {"target": format_value(t), "digits": ms.digits(), "found": False,
                                "caps-relative": True},
              f"{format_value(t)} not found from {ms} within caps")
        return EXIT_NOT_FOUND
    docs = [_witness_doc(t, ms, w, cfg) for w in found]
    doc = docs[0] if len(docs) == 1 and not args.all else {"witnesses": docs}
    _emit(cfg, "condense", doc, "\n".join(f"{format_value(t)} = {d['expr']}" for d in docs))
    return EXIT_OK


def cmd_values(args, cfg: Config) -> int:
    _require(args, "digits")
    table = engine(cfg.caps, cfg.rules).table(args.digits)
    values = sorted(table.values())
    if args.max is not None:
        values = values[:args.max]
    doc = {"digits": args.digits.digits(), "count": len(table.values()),
           "values": [{"value": format_value(v), "expr": render(table.witness(v))} for v in values]}
    text = "\n".join([f"{len(table.values())} values from {args.digits}"]
                     + [f"{format_value(v):>16} = {render(table.witness(v))}" for v in values])
    _emit(cfg, "values", doc, text)
    return EXIT_OK


def cmd_ek(args, cfg: Config) -> int:
    _require(args, "k", "max")
    lo = int(args.target) if args.target is not None else 1
    members = {}
    for t in range(lo, args.max + 1):
        cert = certify(t, args.k, cfg.caps, cfg.rules, jobs=cfg.parallelism)
        if cert is not None:
            members[t] = cert
    doc = {"k": args.k, "range": [lo, args.max], "members": sorted(members), "caps-relative": True}
    _emit(cfg, "ek", doc, f"E_{args.k} ∩ [{lo}, {args.max}] contains {sorted(members)}"
                          " (absence means not certified within caps)")
    return EXIT_OK


def cmd_delta(args, cfg: Config) -> int:
    _require(args, "target")
    n = args.target
    if exact(n) != int(n) or int(n) < 1:
        raise UsageError("--target must be a positive integer for delta")
    n = int(n)
    k = args.k if args.k is not None else dp_delta_bounds(max(n, 6)).bound(n)
    eng = _with_cache(cfg)
    cert = certify(n, k, cfg.caps, cfg.rules, jobs=cfg.parallelism)
    _save_cache(cfg, eng)
    ok = cert is not None and cert.validate(cfg.caps, cfg.rules)
    doc = {"target": n, "k": k, "certified": ok,
           "multisets": len(cert.witnesses) if cert else None, "caps-relative": not ok}
    _emit(cfg, "delta", doc, f"delta({n}) <= {k}: " + (
        f"certified over all {len(cert.witnesses)} multisets" if ok else "not certified within caps"))
    return EXIT_OK if ok else EXIT_NOT_FOUND


def cmd_delta_table(args, cfg: Config) -> int:
    max_n = args.max or 60
    if max_n < 6:
        raise UsageError("--max must be at least 6")
    table = dp_delta_bounds(max_n)
    rows = []
    for n in range(1, max_n + 1):
        e = table[n]
        how = "base" if e.kind == "base" else f"{e.a}{'+' if e.kind == 'sum' else '*'}{e.b}"
        rows.append({"n": n, "bound": e.bound, "derivation": how})
    _emit(cfg, "delta-table", {"rows": rows},
          "\n".join(f"{r['n']:>5} {r['bound']:>4}  {r['derivation']}" for r in rows))
    return EXIT_OK


def cmd_bound(args, cfg: Config) -> int:
    _require(args, "target")
    n = int(args.target)
    lo, hi = log_bound_interval(n)
    dp = dp_delta_bounds(max(n, 6)).bound(n)
    doc = {"n": n, "base6": base6_digits(n)[::-1], "log_bound": float(hi),
           "log_bound_interval": [str(lo), str(hi)], "dp_bound": dp}
    _emit(cfg, "bound", doc, f"n = {n} (base 6: {''.join(map(str, base6_digits(n)[::-1]))})\n"
                             f"13*log6(n) + 7 <= {float(log_bound(n)):.6f}\n"
                             f"table bound: {dp}")
    return EXIT_OK


def _prove_doc(n: int, caps, rules) -> dict:
    w = prove_selfcondensable(n, caps, rules)
    ok = validate_selfcondensing(n, w, caps, rules)
    return {"n": n, "method": w.method, "expr": render(w.exponent_expr) if w.exponent_expr else None,
            "identity": w.identity, "valid": ok.ok, "reason": ok.reason}


def _prove_job(args):
    n, caps, rules = args
    return _prove_doc(n, caps, rules)


def cmd_prove_pow5(args, cfg: Config) -> int:
    _require(args, "exp")
    doc = _prove_doc(args.exp, cfg.caps, cfg.rules)
    _emit(cfg, "prove-pow5", doc, doc["identity"])
    return EXIT_OK if doc["valid"] else EXIT_NOT_FOUND


def cmd_verify_pow5(args, cfg: Config) -> int:
    _require(args, "max")
    jobs = [(n, cfg.caps, cfg.rules) for n in range(1, args.max + 1)]
    if cfg.parallelism > 1:
        with ProcessPoolExecutor(cfg.parallelism) as pool:
            docs = list(pool.map(_prove_job, jobs, chunksize=16))
    else:
        docs = [_prove_job(j) for j in jobs]
    bad = [d["n"] for d in docs if not d["valid"]]
    doc = {"max": args.max, "verified": len(docs) - len(bad), "failed": bad}
    _emit(cfg, "verify-pow5", doc, f"5^n selfcondensing verified for {len(docs) - len(bad)} of "
                                   f"{len(docs)} exponents" + (f"; failures: {bad}" if bad else ""))
    return EXIT_OK if not bad else EXIT_NOT_FOUND


def cmd_digit_stats(args, cfg: Config) -> int:
    _require(args, "exp")
    n = args.exp
    hist = digit_histogram(n)
    run = max_zero_run(n)
    zf = zero_fraction(n)
    doc = {"n": n, "length": digit_count(n), "histogram": hist, "zero_fraction": str(zf),
           "max_zero_run": {"length": run.length, "position": run.position}}
    text = [f"5^{n}: {digit_count(n)} digits" + (f" = {pow5_text(n)}" if digit_count(n) <= 60 else "")]
    text += [f"  {d}: {c}" for d, c in enumerate(hist)]
    text.append(f"  zero fraction {zf} = {float(zf):.4f}; longest zero run {run.length}"
                + (f" at position {run.position}" if run.length else ""))
    _emit(cfg, "digit-stats", doc, "\n".join(text))
    return EXIT_OK


def _cycle_job(k: int) -> dict:
    rep = cycle_report(k)
    doc = rep.to_json()
    lz = leading_zeros_bound_check(k)
    doc["verified"] = bool(rep.half_period_shift_verified and list(rep.counts) == predicted_counts(k))
    doc["leading_zero_bound"] = lz[1]
    doc["leading_zero_bound_ok"] = lz[2]
    return doc


def cmd_cycles(args, cfg: Config) -> int:
    if args.k is None and args.max is None:
        raise UsageError("cycles needs --k K or --max K")
    ks = [args.k] if args.k is not None else list(range(2, args.max + 1))
    if any(not 2 <= k <= 24 for k in ks):
        raise UsageError("cycle positions must lie in [2, 24]")
    if cfg.parallelism > 1 and len(ks) > 1:
        with ProcessPoolExecutor(cfg.parallelism) as pool:
            docs = list(pool.map(_cycle_job, ks))
    else:
        docs = [_cycle_job(k) for k in ks]
    ok = all(d["verified"] and d["leading_zero_bound_ok"] for d in docs)
    text = [f"{'k':>3} {'start':>5} {'length':>8} {'lead0':>5}  counts"]
    text += [f"{d['k']:>3} {d['start']:>5} {d['length']:>8} {d['leading_zeros']:>5}  {d['counts']}"
             + ("" if d["verified"] else "  NOT VERIFIED") for d in docs]
    _emit(cfg, "cycles", docs[0] if args.k is not None else {"cycles": docs}, "\n".join(text))
    return EXIT_OK if ok else EXIT_NOT_FOUND


def cmd_zero_runs(args, cfg: Config) -> int:
    max_m = args.max_m or 14
    rows = zero_run_witnesses(max_m)
    doc = {"rows": [{"m": m, "n": n, "run": r, "position": p} for m, n, r, p in rows],
           "non_decreasing": True}
    _emit(cfg, "zero-runs", doc, "\n".join(f"m={m:>2}  n={n:>7}  run {r}  at position {p}"
                                           for m, n, r, p in rows))
    return EXIT_OK


def cmd_first_run(args, cfg: Config) -> int:
    _require(args, "target")
    r = int(args.target)
    limit = args.max or 10_000
    n = first_exponent_with_run(r, limit)
    doc = {"run": r, "n_limit": limit, "n": n}
    if n is None:
        _emit(cfg, "first-run", doc, f"no 5^n with n <= {limit} has {r} zeros in a row")
        return EXIT_NOT_FOUND
    _emit(cfg, "first-run", doc, f"first 5^n with {r} zeros in a row: n = {n}")
    return EXIT_OK


def cmd_verify_paper(args, cfg: Config) -> int:
    from .reference import run_sweep

    def show(r):
        if cfg.output_format == "text":
            print(r.line(), flush=True)

    report = run_sweep(on_result=show)
    if cfg.output_format == "json":
        doc = {"checks": [{"criterion": r.number, "name": r.name, "ok": r.passed,
                           "seconds": round(r.seconds, 3), "budget": r.budget, "detail": r.detail}
                          for r in report.results]}
        _emit(cfg, "verify-paper", doc, "")
    else:
        passed = sum(r.passed for r in report.results)
        print(f"{passed} of {len(report.results)} checks passed")
    return EXIT_OK if report.ok else EXIT_NOT_FOUND


COMMANDS = {
    "condense": (cmd_condense, "condense a digit multiset into a target"),
    "values": (cmd_values, "list every value condensable from a multiset"),
    "ek": (cmd_ek, "integers condensable from every multiset of k digits"),
    "delta": (cmd_delta, "certify that every k-digit multiset condenses to n"),
    "delta-table": (cmd_delta_table, "tabulate digit-count bounds from sums and products"),
    "bound": (cmd_bound, "logarithmic and tabulated digit-count bounds for n"),
    "prove-pow5": (cmd_prove_pow5, "write 5^n using its own digits"),
    "verify-pow5": (cmd_verify_pow5, "prove and validate 5^n for n = 1..max"),
    "digit-stats": (cmd_digit_stats, "digit histogram and zero runs of 5^n"),
    "cycles": (cmd_cycles, "verify the cycle of digit k of 5^n"),
    "zero-runs": (cmd_zero_runs, "longest zero runs of 5^(m+2^m+2)"),
    "first-run": (cmd_first_run, "smallest n with r zeros in a row in 5^n"),
    "verify-paper": (cmd_verify_paper, "replay fixtures and every reference check"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("inputs")
    g.add_argument("--digits", type=_digits, help="digit list, e.g. 2,3,5")
    g.add_argument("--target", type=_exact, help="integer or p/q rational")
    g.add_argument("--all", type=_positive, metavar="K", help="return up to K witnesses")
    g.add_argument("--k", type=_positive, metavar="K", help="multiset size or digit position")
    g.add_argument("--max", type=_positive, metavar="N", help="upper end of a range")
    g.add_argument("--max-m", type=_positive, metavar="M")
    g.add_argument("--exp", type=_positive, metavar="N", help="exponent n of 5^n")
    c = common.add_argument_group("configuration")
    c.add_argument("--rules", help="rule toggles, e.g. -div,-fact")
    c.add_argument("--no-zero-fact", action="store_true", help="leave 0! undefined")
    c.add_argument("--no-zero-pow", action="store_true", help="leave 0^0 undefined")
    c.add_argument("--caps", help="mag=...,den=...,fact=...,exp=...")
    c.add_argument("--cache", metavar="PATH", help="certificate cache file")
    c.add_argument("--json", action="store_true", help="JSON output")
    c.add_argument("--no-meta", action="store_true", help="omit the JSON metadata block")
    c.add_argument("--jobs", type=_positive, default=1, metavar="N", help="worker processes")
    c.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="condense", description="The condensing game and the digits of powers of five.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from(args)
        return COMMANDS[args.command][0](args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"condense {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
