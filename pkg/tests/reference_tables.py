"""Published fiber-configuration tables used as oracles.

Each entry: (columns, row1 types, row2 types).  "inf" is the point at infinity.
"""

KUMMER_TABLES = {
    "4": [
        (["0", "1", "2", "3", "inf"], ["I2", "I2", "I2", "I2", "I4"], ["I0", "I2", "I2", "I0", "D6*"]),
        (["-1", "0", "1", "inf"], ["I4", "I2", "I4", "I2"], ["D6*", "I2", "I0", "I2"]),
    ],
    "8": [
        (["0", "1", "4", "inf"], ["D4*", "I2", "I2", "I2"], ["I2", "I2", "I0", "D6*"]),
    ],
    "13": [
        (["0", "1", "inf"], ["D4*", "D4*", "I0"], ["I2", "I2", "D6*"]),
        (["-1", "0", "1", "inf"], ["I2", "I4", "I2", "I4"], ["I0", "D4*", "I0", "D4*"]),
    ],
    "21": [
        (["-1", "0", "1", "inf"], ["I2", "I4", "I2", "I4"], ["D6*", "I0", "I2", "I2"]),
        (["-1", "0", "1", "inf"], ["I2", "I2", "D4*", "I2"], ["D4*", "I2", "I2", "I2"]),
    ],
    "53": [
        (["-1", "0", "1", "inf"], ["I2", "D6*", "I2", "I0"], ["I2", "I0", "I2", "D6*"]),
        (["-1", "0", "1", "inf"], ["I2", "I2", "I2", "D4*"], ["I2", "D4*", "I2", "I2"]),
    ],
    "244": [
        (["-1", "0", "1", "2", "inf"], ["I0", "I2", "I4", "I2", "I4"], ["I4", "I2", "I4", "I0", "I2"]),
        (["-1", "0", "1/3", "1", "3", "inf"], ["I2", "I2", "I2", "I4", "I0", "I2"],
         ["I2", "I2", "I0", "I4", "I2", "I2"]),
    ],
    "249": [
        (["-1", "0", "1/3", "1", "3", "inf"], ["I0", "I2", "I2", "I4", "I2", "I2"],
         ["I2", "I4", "I0", "I2", "I0", "I4"]),
    ],
    "267": [
        (["-1", "0", "1/2", "1", "2", "inf"], ["I2"] * 6, ["I2"] * 6),
    ],
    "274": [
        (["-1", "0", "1/2", "1", "2", "inf"], ["I2", "I4", "I2", "I2", "I0", "I2"],
         ["I4", "I2", "I2", "I0", "I2", "I2"]),
    ],
    "275": [
        (["-1", "0", "1/2", "1", "2", "inf"], ["I2"] * 6, ["I2"] * 6),
    ],
    "269": [
        (["-1", "0", "1/3", "1", "3", "inf"], ["I2"] * 6, ["I2"] * 6),
        (["-1", "0", "1/3", "1", "3", "inf"], ["I0", "I2", "I2", "I4", "I2", "I2"],
         ["I4", "I2", "I0", "I4", "I0", "I2"]),
    ],
}

# rows of the three rigid fiber products: unordered columns, types only
RIGID_ROWS = {
    "3": (["I4", "I4", "I2", "I2"], ["D6*", "I2", "I2", "I0"]),
    "19": (["I2", "I2", "I4", "I4"], ["I0", "D6*", "I2", "I2"]),
    "239": (["I2", "I2", "I4", "I4", "I0"], ["I0", "I4", "I2", "I4", "I2"]),
}

# the six rational configurations with their generic Picard numbers
SURFACES = {
    "S1": (["D4*", "D4*"], 1),
    "S2": (["I2", "I2", "D6*"], 1),
    "S3": (["I2", "I2", "I4", "I4"], 1),
    "S4": (["I2", "I2", "I2", "D4*"], 2),
    "S5": (["I2", "I2", "I2", "I2", "I4"], 2),
    "S6": (["I2", "I2", "I2", "I2", "I2", "I2"], 3),
}

# four lines in general position and the same with a triple point at (0:0:1)
GENERAL = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1))
TRIPLE = ((1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1))

# pencil points realizing S1..S6
SURFACE_DATA = {
    "S1": (TRIPLE, (1, 2, 0)),       # on the line missing the triple point
    "S2": (TRIPLE, (0, 1, 5)),       # on a line of the triple point
    "S3": (GENERAL, (1, -1, -1)),    # where the diagonals x+y=0 and x+z=0 meet
    "S4": (GENERAL, (0, 2, 3)),      # on a branch line
    "S5": (GENERAL, (1, -1, 5)),     # on the diagonal x+y=0
    "S6": (GENERAL, (2, 3, 7)),      # generic
}

# base change of the arrangement-8 row under t -> ((t+1)/(t-1))^2
PULLBACK_8 = (["-1", "0", "1/3", "1", "3", "inf"], ["I0", "I2", "I2", "I4", "I2", "I2"],
              ["I4", "I2", "I0", "I4", "I0", "I2"])


def table_configurations(entry):
    """Two FiberConfigurations (I0 markers kept) from a (columns, row1, row2) entry."""
    from doubleoctic.fibration import FiberConfiguration

    cols, r1, r2 = entry
    return [FiberConfiguration.of(dict(zip(cols, r))) for r in (r1, r2)]


def computed_rows(arr):
    """Classified fibration pairs of every Kummer split of an arrangement."""
    from doubleoctic.arrangement import find_kummer_splits
    from doubleoctic.fibration import classify_quartic_fibration

    return [[classify_quartic_fibration(f) for f in sp.fibrations] for sp in find_kummer_splits(arr)]


def unmatched_tables(arr):
    """Indices of published tables for the arrangement that no split reproduces."""
    from doubleoctic.fibration import align_rows

    rows = computed_rows(arr)
    tables = KUMMER_TABLES.get(arr.id.rstrip("abc"), [])
    return [i for i, t in enumerate(tables)
            if not any(align_rows(r, table_configurations(t)) for r in rows)]
