"""The shipped arrangement catalog (``data/catalog.txt``)."""
from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

from .arrangement import (ArrangementError, InvolutionMatrix, PlaneArrangement,
                          arrangement_from_rows, parse_equation)

# rows of one arrangement number share a trace sequence
BIRATIONAL_GROUPS = {
    "4": ("4a", "4b", "4c"),
    "13": ("13a", "13b", "13c"),
    "21-53": ("21", "53"),
    "267-275": ("267a", "267b", "267c", "275"),
}

TABLE_ROWS = ("4a", "4b", "4c", "8", "13a", "13b", "13c", "21", "53", "154", "244",
              "249a", "249b", "267a", "267b", "267c", "274", "275")
RIGID = ("3", "19", "239")
EXTRA = ("269", "287")


def _parse_record(line: str) -> PlaneArrangement:
    cols = [c.strip() for c in line.split("|")]
    cols += [""] * (8 - len(cols))
    ident, factors, h11, h12, wt4, wt2, inv, extras = cols[:8]
    rows, const = parse_equation("".join(
        f if re.fullmatch(r"-?\d+(/\d+)?", f) else f"({f})" for f in factors.split(";")))
    if len(rows) != 8:
        raise ArrangementError(f"catalog row {ident}: {len(rows)} planes")
    invs = ()
    if inv:
        invs = (InvolutionMatrix.from_entries(inv.split()),)
    meta = dict(kv.split("=") for kv in extras.split()) if extras else {}
    skew = int(meta["skew"]) if "skew" in meta else None
    return arrangement_from_rows(rows, const, id=ident, h11=int(h11), h12=int(h12),
                                 wt4_form=wt4 or None, wt2_form=wt2 or None,
                                 involutions=invs, skew_picard_character=skew)


@lru_cache(maxsize=1)
def load_catalog() -> dict[str, PlaneArrangement]:
    text = resources.files("doubleoctic").joinpath("data/catalog.txt").read_text()
    out = {}
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        arr = _parse_record(line)
        out[arr.id] = arr
    return out


def lookup(key: str) -> PlaneArrangement | None:
    cat = load_catalog()
    k = key.strip()
    k = re.sub(r"^(X_?|arr\.?\s*|no\.?\s*)", "", k, flags=re.I)
    if k in cat:
        return cat[k]
    if k + "a" in cat:  # 'X_4' means the first row of arrangement 4
        return cat[k + "a"]
    return None


def catalog_ids(group: str = "all") -> list[str]:
    if group == "table":
        return list(TABLE_ROWS)
    if group == "rigid":
        return list(RIGID)
    return list(load_catalog())
