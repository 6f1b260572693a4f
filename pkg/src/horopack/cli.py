"""Command-line front end.

Exit codes: 0 success, 1 a computed value is out of tolerance (or a
pipeline failure), 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import horoball as hb
from . import report as rp
from .coxeter import CATALOG, SymbolError, parse_symbol, realize
from .volume import _thread_cap, mc_volume, vol_truncated_orthoscheme

log = logging.getLogger("horopack")

EXIT_OK, EXIT_TOLERANCE, EXIT_INPUT = 0, 1, 2


class UsageError(ValueError):
    pass


def _slug(symbol: str) -> str:
    return symbol.strip("{}").replace(",", "_")


def _flatten(d, prefix=""):
    """Flatten a nested report into (key, value) pairs for CSV output."""
    if isinstance(d, dict):
        for k, v in d.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(d, list) and any(isinstance(v, (dict, list)) for v in d):
        for i, v in enumerate(d):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(d, ensure_ascii=False) if isinstance(d, list) else d


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, name: str, payload: dict | None = None, header=None, rows=None) -> None:
    """Write ``payload`` (JSON) or ``header``/``rows`` (CSV) to --out or stdout."""
    if args.format == "csv":
        if header is None:
            header, rows = ["key", "value"], list(_flatten(payload))
        text = _csv_text(header, rows)
        suffix = "csv"
    else:
        if payload is None:
            payload = {"header": header, "rows": rows}
        text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
        suffix = "json"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{name}.{suffix}"
        path.write_text(text, encoding="utf-8")
        log.info("wrote %s", path)
    else:
        sys.stdout.write(text)


def _symbols(args) -> list[str]:
    given = list(getattr(args, "symbols", None) or []) + list(getattr(args, "symbol", None) or [])
    if not given or given == ["all"]:
        return [s.symbol for s in CATALOG]
    return [parse_symbol(s, strict=args.strict).symbol for s in given]


def _map_cases(fn, items):
    workers = min(_thread_cap(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


# ----------------------------------------------------------------- commands


def cmd_run_case(args) -> int:
    if args.samples < 0:
        raise UsageError("--samples must be non-negative")
    symbols = _symbols(args)
    reports = _map_cases(
        lambda s: rp.run_case(s, strict=args.strict, samples=args.samples, seed=args.seed), symbols
    )
    status = EXIT_OK
    for r in reports:
        _emit(args, _slug(r.symbol), r.to_dict())
        for c in r.golden_failures:
            log.error("%s: %s computed %.12g, expected %.12g", r.symbol, c.id, c.computed, c.adopted)
            status = EXIT_TOLERANCE
    return status


def cmd_tables(args) -> int:
    ids = args.table or sorted(rp.TABLE_COLUMNS)
    for t in ids:
        if t not in rp.TABLE_COLUMNS:
            raise UsageError(f"no table {t}; choose from {sorted(rp.TABLE_COLUMNS)}")
    results = _map_cases(rp.build_table, ids)
    for t, (header, rows, summary) in zip(ids, results):
        _emit(args, f"table{t}", header=header, rows=rows)
        fields = " ".join(f"{k}={v}" for k, v in summary.items())
        print(f"table {t}: {fields}", file=sys.stderr)
    return EXIT_OK


def cmd_mesh(args) -> int:
    if args.resolution < 2:
        raise UsageError("--resolution must be at least 2")
    spec = parse_symbol(args.symbol[0] if args.symbol else args.symbols[0], strict=args.strict)
    orth = realize(spec)
    if args.vertex not in orth.ideal_indices:
        raise UsageError(f"vertex {args.vertex} is not ideal; ideal vertices are {orth.ideal_indices}")
    s = args.s if args.s is not None else hb.max_admissible_horoball(orth, args.vertex).s
    if not -1.0 < s < 1.0:
        raise UsageError("--s must lie strictly between -1 and 1")
    pts = hb.horosphere_mesh(orth, args.vertex, s, args.resolution)
    header = [f"x{i}" for i in range(pts.shape[1])]
    rows = [[rp._fmt(float(v)) for v in p] for p in pts]
    name = f"mesh_{_slug(spec.symbol)}_A{args.vertex}"
    if args.format == "json":
        _emit(args, name, {"symbol": spec.symbol, "vertex": args.vertex, "s": s, "points": rows})
    else:
        _emit(args, name, header=header, rows=rows)
    return EXIT_OK


def cmd_mc_verify(args) -> int:
    if args.samples <= 0:
        raise UsageError("--samples must be positive")
    symbols = _symbols(args)
    table2 = {e["symbol"]: e for e in rp.published_entries(table=2)}
    rows = []
    worst = 0.0
    for sym in symbols:
        spec = parse_symbol(sym, strict=args.strict)
        analytic = vol_truncated_orthoscheme(spec).value
        mc = mc_volume(realize(spec), samples=args.samples, seed=args.seed)
        z = (mc.value - analytic) / mc.stderr
        worst = max(worst, abs(z))
        printed = rp.evaluate(table2[sym]["exact"]) if sym in table2 else None
        z_printed = None if printed is None else (mc.value - printed) / mc.stderr
        rows.append([sym, rp._fmt(mc.value), rp._fmt(mc.stderr), rp._fmt(analytic), rp._fmt(z),
                     rp._fmt(printed), rp._fmt(z_printed)])
        print(f"{sym}: mc={mc.value:.8g} +- {mc.stderr:.2g} analytic={analytic:.8g} z={z:+.2f}", file=sys.stderr)
    header = ["symbol", "mc_volume", "stderr", "analytic", "z", "printed", "z_printed"]
    _emit(args, "mc_verify", header=header, rows=rows)
    return EXIT_OK if worst < 4.0 else EXIT_TOLERANCE


def cmd_inball(args) -> int:
    status = EXIT_OK
    for sym in _symbols(args):
        r = rp.run_case(sym, strict=args.strict)
        _emit(args, f"inball_{_slug(sym)}", {"symbol": sym, "volume": r.data["volume"], "inball": r.data["inball"]})
        if any("/inradius" in c.id or "ball_" in c.id for c in r.golden_failures):
            status = EXIT_TOLERANCE
    return status


def cmd_horoball(args) -> int:
    status = EXIT_OK
    for sym in _symbols(args):
        r = rp.run_case(sym, strict=args.strict)
        payload = {k: r.data.get(k) for k in ("symbol", "vertex_classes", "horoballs", "reference_frame_horoballs", "pair")}
        _emit(args, f"horoball_{_slug(sym)}", payload)
        if any("horoball" in c.id or "pair" in c.id or "piece" in c.id for c in r.golden_failures):
            status = EXIT_TOLERANCE
    return status


# ------------------------------------------------------------------ parser


def _add_common(p: argparse.ArgumentParser, default_format: str = "json") -> None:
    p.add_argument("--symbol", action="append", help="Schläfli symbol, e.g. '{4,4,3,4,inf}' (repeatable)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=True,
                      help="accept catalog symbols only (default)")
    mode.add_argument("--permissive", dest="strict", action="store_false",
                      help="accept any symbol that passes the signature checks")
    p.add_argument("--out", metavar="DIR", help="write files here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default=default_format)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horopack", description="Ball and horoball packings of truncated orthoschemes.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("run-case", help="full report for one symbol or 'all'")
    _add_common(s)
    s.add_argument("symbols", nargs="*")
    s.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo samples (0 to skip)")
    s.set_defaults(func=cmd_run_case)

    s = sub.add_parser("tables", help="reproduce the reference tables")
    _add_common(s, "csv")
    s.add_argument("--table", type=int, action="append")
    s.set_defaults(func=cmd_tables)

    s = sub.add_parser("mesh", help="sample a horosphere for plotting")
    _add_common(s, "csv")
    s.add_argument("symbols", nargs="*")
    s.add_argument("--vertex", type=int, required=True)
    s.add_argument("--s", type=float, help="horosphere parameter (default: largest admissible horoball)")
    s.add_argument("--resolution", type=int, default=16)
    s.set_defaults(func=cmd_mesh)

    s = sub.add_parser("mc-verify", help="Monte Carlo check of the analytic volumes")
    _add_common(s, "csv")
    s.add_argument("symbols", nargs="*")
    s.add_argument("--samples", type=int, default=1_000_000)
    s.set_defaults(func=cmd_mc_verify)

    for name, fn in (("inball", cmd_inball), ("horoball", cmd_horoball)):
        s = sub.add_parser(name, help=f"{name} section of the report")
        _add_common(s)
        s.add_argument("symbols", nargs="*")
        s.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command == "mesh" and not (args.symbol or args.symbols):
        parser.error("mesh needs a symbol")
    try:
        return args.func(args)
    except (SymbolError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
