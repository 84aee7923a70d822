"""Command line interface: ``doubleoctic <command> ...``.

Exit status is 0 iff every checked row matches (commands that only print
data always exit 0 unless they fail).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import report
from .arrangement import find_kummer_splits, parse_arrangement
from .catalog import catalog_ids, load_catalog, lookup
from .counting import count_projective_cover
from .fibration import classify_quartic_fibration, fiber_table_text
from .fields import primes_between
from .modforms import (as_ref, coefficients, describe, known_forms, provenance, set_cache_dir,
                       sources)
from .verify import (effective_rows, resolution_correction, resolve_variants, verify_involution,
                     verify_kummer_family, verify_modularity)


def _arr(key):
    arr = lookup(key)
    return arr if arr is not None else parse_arrangement(key)


def _emit(args, records, columns=None):
    text = report.render(records, args.format, columns)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_catalog(args):
    if args.forms:
        recs = [{"form": f, "source": describe(sources(f)[0])} for f in known_forms()]
        _emit(args, recs)
        return 0
    recs = []
    for k, a in load_catalog().items():
        recs.append({"id": k, "h11": a.h11, "h12": a.h12, "wt4": a.wt4_form or "",
                     "wt2": a.wt2_form or "", "involution": bool(a.involutions),
                     "equation": a.equation()})
    _emit(args, recs)
    return 0


def cmd_inventory(args):
    arr = _arr(args.id)
    inv = arr.inventory
    s = inv.summary()
    try:
        s["correction"] = resolution_correction(arr).describe()
    except ValueError as exc:
        s["correction"] = f"unavailable: {exc}"
    if args.format == "json":
        print(json.dumps(s, indent=2))
    else:
        for k, v in s.items():
            print(f"{k:28s} {v}")
    return 0


def cmd_count(args):
    arr = _arr(args.id)
    c = count_projective_cover(arr, args.p)
    _emit(args, [{"arrangement": arr.id, "p": c.p, "n_branch": c.n_branch, "n_total": c.n_total}])
    return 0


def cmd_trace(args):
    arr = _arr(args.id)
    rows = verify_modularity(arr, args.pmax, mode=args.correction, jobs=args.jobs)
    seen = {}
    for r in rows:
        seen.setdefault(r.prime, r)
    _emit(args, [{"arrangement": r.arrangement, "prime": r.prime, "trace": r.lhs,
                  "role": r.role, "correction_mode": r.correction_mode} for r in seen.values()])
    return 0


def cmd_twisted(args):
    res = verify_involution(args.id, args.pmax, jobs=args.jobs)
    recs = [{"arrangement": r.arrangement, "prime": r.prime, "N_plus": r.counts[0],
             "N_minus": r.counts[1], "expected": r.expected,
             "lift": "" if r.lift is None else ("+" if r.lift == 0 else "-"),
             "d_p": r.d_p, "plus_trace": r.plus_trace, "minus_trace": r.minus_trace,
             "a_p": r.a_p, "p*b_p": r.pb_p} for r in res["rows"]]
    _emit(args, recs)
    lift = res["uniform_lift"]
    print(f"# uniform lift: {'none' if lift is None else '+-'[lift]}; "
          f"best lift matches {res['matches']}/{res['primes']}", file=sys.stderr)
    return 0 if lift is not None else 1


def cmd_fibers(args):
    arr = _arr(args.id)
    splits = find_kummer_splits(arr)
    if not splits:
        print(f"arrangement {arr.id}: no Kummer splits")
        return 0
    out = []
    for sp in splits:
        cfgs = [classify_quartic_fibration(f) for f in sp.fibrations]
        if args.format == "json":
            out.append({"first": sp.first, "second": sp.second,
                        "fibrations": [c.to_json() for c in cfgs]})
        else:
            print(f"planes {sp.first} | {sp.second}")
            print(fiber_table_text(cfgs, ["first", "second"]))
            print()
    if out:
        print(json.dumps(out, indent=2))
    return 0


def cmd_forms(args):
    ref = as_ref(args.label)
    primes = [p for p in primes_between(5, args.pmax) if ref.level % p]
    vals = coefficients(ref, primes)
    recs = [{"form": ref.label, "p": p, "a_p": a} for p, a in vals.items()]
    _emit(args, recs)
    print(f"# source: {provenance(ref)}", file=sys.stderr)
    return 0


def _verify_targets(key):
    if key in ("all", "table", "rigid"):
        return catalog_ids(key)
    return [key]


def cmd_verify(args):
    rows = []
    for k in _verify_targets(args.id):
        arr = _arr(k)
        rs = verify_modularity(arr, args.pmax, mode=args.correction, jobs=args.jobs)
        if len({r.variant for r in rs}) > 1:
            res = resolve_variants(rs)
            print(f"# {arr.id}: uniform variant {res['uniform'] or 'none'}", file=sys.stderr)
        rows.extend(effective_rows(rs))
    records = report.verification_records(rows)
    _emit(args, records, list(report.SCHEMA) + ["variant", "role"])
    if args.figures:
        for path in report.write_figures(rows, args.figures, stem=f"verify_{args.id}"):
            print(f"# figure: {path}", file=sys.stderr)
    for s in report.summarize(rows):
        print(f"# {s['arrangement']} {s['variant']}: {s['matches']}/{s['primes']} match"
              + (f", failed at {s['failed_primes']}" if s["failed_primes"] else ""), file=sys.stderr)
    checked = [r for r in rows if r.role == "check"]
    return 0 if checked and all(r.match for r in checked) else 1


def cmd_kummer(args):
    res = verify_kummer_family(Fraction(args.lam), Fraction(args.mu), args.pmax, jobs=args.jobs)
    recs = [{"prime": r.prime, "trace": r.trace, "t_lambda": r.t_lam, "t_mu": r.t_mu,
             "sextic_trace": r.charpoly_trace, "sextic_match": r.charpoly_match,
             "character": r.character, "twisted_match": r.twisted_match,
             "special": r.special, "special_match": r.special_match} for r in res["rows"]]
    _emit(args, recs)
    if args.figures:
        Path(args.figures).mkdir(parents=True, exist_ok=True)
        path = report.plot_kummer(res, Path(args.figures) / "kummer.png")
        print(f"# figure: {path}", file=sys.stderr)
    checks = [r.special_match if r.special_match is not None else r.charpoly_match
              for r in res["rows"]]
    checks = [c for c in checks if c is not None]
    return 0 if checks and all(checks) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="doubleoctic", description=__doc__.splitlines()[0])
    ap.add_argument("--cache-dir", help="persist form coefficients here")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for per-prime work")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, helptext):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--format", choices=("table", "csv", "json"), default="table")
        p.add_argument("--out", help="write delimited output to this file")
        p.set_defaults(fn=fn)
        return p

    p = add("catalog", cmd_catalog, "list arrangements (or forms with --forms)")
    p.add_argument("--forms", action="store_true")
    add("inventory", cmd_inventory, "multiple lines and points").add_argument("id")
    p = add("count", cmd_count, "points on the double cover over F_p")
    p.add_argument("id")
    p.add_argument("--p", type=int, required=True)
    p = add("trace", cmd_trace, "traces of Frobenius on H^3")
    p.add_argument("id")
    p.add_argument("--pmax", type=int, default=97)
    p.add_argument("--correction", choices=("derived", "calibrated"), default="derived")
    p = add("twisted", cmd_twisted, "fixed points of Frobenius composed with the involution")
    p.add_argument("id")
    p.add_argument("--pmax", type=int, default=97)
    add("fibers", cmd_fibers, "Kummer splits and their singular fibres").add_argument("id")
    p = add("forms", cmd_forms, "coefficients of a catalog form")
    p.add_argument("label")
    p.add_argument("--pmax", type=int, default=97)
    p = add("verify", cmd_verify, "compare traces with the predicted forms")
    p.add_argument("id", help="arrangement id, 'table', 'rigid' or 'all'")
    p.add_argument("--pmax", type=int, default=97)
    p.add_argument("--correction", choices=("derived", "calibrated"), default="derived")
    p.add_argument("--figures", help="directory for PNG figures")
    p = add("kummer", cmd_kummer, "the two-parameter family D(lambda, mu)")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--pmax", type=int, default=97)
    p.add_argument("--figures", help="directory for PNG figures")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cache_dir:
        set_cache_dir(args.cache_dir)
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
