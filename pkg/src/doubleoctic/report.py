"""Delimited output (table, csv, json) and matplotlib figures for reports."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SCHEMA = ("arrangement", "prime", "lhs", "rhs", "match", "correction_mode", "provenance")


def _as_dict(row) -> dict:
    return row.as_dict() if hasattr(row, "as_dict") else dict(row)


def render(records, fmt: str = "table", columns=None) -> str:
    """Render a list of dicts (or rows with ``as_dict``) in one of three formats."""
    recs = [_as_dict(r) for r in records]
    if columns is None:
        columns = list(recs[0]) if recs else []
    if fmt == "json":
        return json.dumps([{c: r.get(c) for c in columns} for r in recs], indent=2, default=str)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in recs:
            w.writerow(["; ".join(map(str, v)) if isinstance(v, (list, tuple)) else v
                        for v in (r.get(c) for c in columns)])
        return buf.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    cells = [[str(c) for c in columns]]
    for r in recs:
        cells.append([_short(r.get(c)) for c in columns])
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _short(v) -> str:
    if isinstance(v, (list, tuple)):
        return f"[{len(v)} items]" if len(v) > 3 else ",".join(map(str, v))
    return str(v)


def verification_records(rows) -> list[dict]:
    return [{k: _as_dict(r)[k] for k in SCHEMA} | {"variant": r.variant, "role": r.role}
            for r in rows]


def summarize(rows) -> list[dict]:
    out = {}
    for r in rows:
        key = (r.arrangement, r.variant)
        s = out.setdefault(key, {"arrangement": r.arrangement, "variant": r.variant,
                                 "primes": 0, "matches": 0, "fit": 0, "failed_primes": []})
        if r.role == "fit":
            s["fit"] += 1
            continue
        s["primes"] += 1
        s["matches"] += r.match
        if not r.match:
            s["failed_primes"].append(r.prime)
    return list(out.values())


# ---------------------------------------------------------------------------
# figures

def plot_normalized_traces(rows, path, title=None):
    """lhs / p^(3/2) against p; the Deligne band is |x| <= 2 for weight-4 parts."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    groups = {}
    for r in rows:
        groups.setdefault((r.arrangement, r.variant), []).append(r)
    for (name, var), rs in groups.items():
        ps = [r.prime for r in rs]
        ax.plot(ps, [r.lhs / r.prime ** 1.5 for r in rs], "o-", ms=3, lw=0.8,
                label=f"{name} {var}".strip())
        bad = [r for r in rs if not r.match]
        if bad:
            ax.plot([r.prime for r in bad], [r.lhs / r.prime ** 1.5 for r in bad], "x",
                    color="crimson", ms=7)
    ax.axhline(0, color="0.6", lw=0.5)
    ax.set_xlabel("p")
    ax.set_ylabel(r"$\mathrm{tr}(\mathrm{Frob}_p | H^3) / p^{3/2}$")
    if title:
        ax.set_title(title)
    if len(groups) <= 8:
        ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_match_summary(summary, path):
    """Stacked bars of matching and failing primes per arrangement."""
    names = [f"{s['arrangement']} {s['variant']}".strip() for s in summary]
    ok = [s["matches"] for s in summary]
    bad = [s["primes"] - s["matches"] for s in summary]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.35 * len(names) + 1), 3.4))
    x = range(len(names))
    ax.bar(x, ok, color="seagreen", label="match")
    ax.bar(x, bad, bottom=ok, color="crimson", label="mismatch")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=70, fontsize=7)
    ax.set_ylabel("primes")
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_kummer(result, path):
    rows = result["rows"]
    fig, ax = plt.subplots(figsize=(6.0, 3.4))
    ps = [r.prime for r in rows]
    ax.plot(ps, [r.trace / r.prime ** 1.5 for r in rows], "o", ms=4, label="trace")
    ax.plot(ps, [r.charpoly_trace / r.prime ** 1.5 for r in rows], "+", ms=8,
            label="sextic trace")
    ax.set_xlabel("p")
    ax.set_ylabel(r"value $/ p^{3/2}$")
    ax.set_title(f"D(lambda={result['lambda']}, mu={result['mu']})")
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def write_figures(rows, directory, stem="verify") -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    return [plot_normalized_traces(rows, d / f"{stem}_traces.png"),
            plot_match_summary(summarize(rows), d / f"{stem}_summary.png")]
