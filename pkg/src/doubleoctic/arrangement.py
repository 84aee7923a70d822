"""Arrangements of eight planes in P^3 and their combinatorics.

Forms are kept as primitive integer vectors (coprime, first nonzero
coefficient positive).  Whatever constant normalization strips off is
collected in ``PlaneArrangement.scale`` so that the branch octic is
exactly ``scale * prod(forms)``.  The constant matters: it twists every
point count by its quadratic character.
"""
from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import linalg
from .fibration import QuarticFibration
from .fields import is_prime, primes_between

VARS = "xyzt"
INF = math.inf


class ArrangementError(ValueError):
    pass


@dataclass(frozen=True)
class LinearForm:
    coeffs: tuple[int, ...]

    @classmethod
    def normalized(cls, coeffs) -> tuple["LinearForm", Fraction]:
        """Return the primitive form and the scalar c with coeffs = c * form."""
        if not any(Fraction(c) for c in coeffs):
            raise ArrangementError("zero linear form")
        prim = linalg.primitive(coeffs)
        j = next(i for i, c in enumerate(prim) if c)
        return cls(prim), Fraction(coeffs[j]) / prim[j]

    def __call__(self, point):
        return sum(c * x for c, x in zip(self.coeffs, point))

    def mod(self, p: int) -> tuple[int, ...]:
        return tuple(c % p for c in self.coeffs)

    def text(self, names: str = VARS) -> str:
        out = ""
        for c, v in zip(self.coeffs, names):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else str(abs(c))
            out += f"{sign}{mag}{v}"
        return out.lstrip("+")


@dataclass(frozen=True)
class InvolutionMatrix:
    rows: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_entries(cls, entries) -> "InvolutionMatrix":
        vals = [Fraction(e) for e in entries]
        if len(vals) != 16:
            raise ArrangementError("involution needs 16 entries")
        return cls(tuple(tuple(vals[4 * i:4 * i + 4]) for i in range(4)))

    def square_scalar(self) -> Fraction:
        sq = linalg.matmul(self.rows, self.rows)
        c = sq[0][0]
        if c == 0 or any(sq[i][j] != (c if i == j else 0) for i in range(4) for j in range(4)):
            raise ArrangementError("M^2 is not a scalar matrix")
        return c

    def mod(self, p: int) -> list[list[int]]:
        out = []
        for row in self.rows:
            r = []
            for x in row:
                if x.denominator % p == 0:
                    raise ArrangementError(f"involution not defined mod {p}")
                r.append(x.numerator * pow(x.denominator, p - 2, p) % p)
            out.append(r)
        return out

    def entries(self) -> list[Fraction]:
        return [x for row in self.rows for x in row]


@dataclass(frozen=True)
class PlaneArrangement:
    forms: tuple[LinearForm, ...]
    scale: Fraction = Fraction(1)
    id: str = "custom"
    h11: int | None = None
    h12: int | None = None
    wt4_form: str | None = None
    wt2_form: str | None = None
    involutions: tuple[InvolutionMatrix, ...] = ()
    skew_picard_character: int | None = None

    def __post_init__(self):
        if len(self.forms) != 8:
            raise ArrangementError(f"need 8 planes, got {len(self.forms)}")
        for (i, f), (j, g) in itertools.combinations(enumerate(self.forms), 2):
            if f == g:
                raise ArrangementError(f"planes {i} and {j} are proportional")
        if self.scale == 0:
            raise ArrangementError("zero scale")

    @property
    def modulus(self):
        return None

    def rows(self) -> list[tuple[int, ...]]:
        return [f.coeffs for f in self.forms]

    def octic(self, point):
        v = self.scale
        for f in self.forms:
            v *= f(point)
        return v

    def reduce(self, p: int) -> "ModArrangement":
        if self.scale.numerator % p == 0 or self.scale.denominator % p == 0:
            raise ArrangementError(f"scale degenerates mod {p}")
        s = self.scale.numerator * pow(self.scale.denominator, p - 2, p) % p
        return ModArrangement(p, tuple(f.mod(p) for f in self.forms), s)

    def equation(self) -> str:
        const = "" if self.scale == 1 else f"{self.scale} "
        return const + "".join(f"({f.text()})" if sum(map(bool, f.coeffs)) > 1 else f.text()
                               for f in self.forms)

    @cached_property
    def inventory(self) -> "SingularityInventory":
        return singularity_inventory(self)


@dataclass(frozen=True)
class ModArrangement:
    """Eight planes over F_p with a scale constant (used for counting)."""

    p: int
    forms: tuple[tuple[int, ...], ...]
    scale: int = 1

    @property
    def modulus(self):
        return self.p

    def rows(self):
        return [list(f) for f in self.forms]

    def reduce(self, p: int) -> "ModArrangement":
        if p != self.p:
            raise ArrangementError("already reduced at a different prime")
        return self


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\(([^()]*)\)(\^\s*\d+)?|([xyzt])(\^\s*\d+)?|(-?\d+(?:/\d+)?)")
_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*([xyzt])|([+-]?)\s*(\d+(?:/\d+)?)")


def parse_linear(text: str) -> list[Fraction]:
    s = text.replace(" ", "")
    coeffs = [Fraction(0)] * 4
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ArrangementError(f"cannot parse linear factor {text!r}")
        if m.group(3):
            c = Fraction(m.group(2) or 1) * (-1 if m.group(1) == "-" else 1)
            coeffs[VARS.index(m.group(3))] += c
        else:
            if Fraction(m.group(5)) != 0:
                raise ArrangementError(f"affine constant in homogeneous factor {text!r}")
        pos = m.end()
    if any(ch in s for ch in "^²"):
        raise ArrangementError(f"nonlinear factor {text!r}")
    return coeffs


def parse_equation(text: str) -> tuple[list[list[Fraction]], Fraction]:
    """Split an octic like 'u^2 = 2 xyzt(x+y)...' into linear rows and a constant."""
    s = text.strip()
    s = re.sub(r"^\s*[uw]\s*\^\s*2\s*=", "", s)
    s = re.sub(r"=\s*0\s*$", "", s)
    s = s.replace("\\cdot", "").replace("·", "").replace("*", "").replace(" ", "")
    rows, const, pos = [], Fraction(1), 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ArrangementError(f"unexpected text at {s[pos:]!r}")
        if m.group(2) or m.group(4):
            raise ArrangementError("powers of factors are not linear planes")
        if m.group(1) is not None:
            rows.append(parse_linear(m.group(1)))
        elif m.group(3):
            rows.append([Fraction(v == m.group(3)) for v in VARS])
        else:
            const *= Fraction(m.group(5))
        pos = m.end()
    return rows, const


def arrangement_from_rows(rows, scale=Fraction(1), **meta) -> PlaneArrangement:
    forms, scale = [], Fraction(scale)
    for r in rows:
        f, c = LinearForm.normalized(r)
        forms.append(f)
        scale *= c
    return PlaneArrangement(tuple(forms), scale, **meta)


def parse_arrangement(source: str) -> PlaneArrangement:
    """Catalog id ('53', 'X_53', '4b') or an explicit equation."""
    from .catalog import lookup

    key = source.strip()
    found = lookup(key)
    if found is not None:
        return found
    rows, const = parse_equation(key)
    if len(rows) != 8:
        raise ArrangementError(f"need 8 linear factors, got {len(rows)}")
    return arrangement_from_rows(rows, const)


# ---------------------------------------------------------------------------
# singularity inventory

@dataclass(frozen=True)
class MultipleLine:
    planes: frozenset[int]

    @property
    def multiplicity(self) -> int:
        return len(self.planes)


@dataclass(frozen=True)
class MultiplePoint:
    planes: frozenset[int]
    coords: tuple
    triple_lines: tuple[frozenset[int], ...]

    @property
    def multiplicity(self) -> int:
        return len(self.planes)

    @property
    def on_triple_line(self) -> bool:
        return bool(self.triple_lines)

    @property
    def kind(self) -> tuple[int, tuple[int, ...]]:
        return (len(self.planes), tuple(sorted(len(t) for t in self.triple_lines)))


@dataclass(frozen=True)
class SingularityInventory:
    lines: tuple[MultipleLine, ...]
    points: tuple[MultiplePoint, ...]
    modulus: int | None = None

    def lines_of(self, m: int):
        return [ln for ln in self.lines if ln.multiplicity == m]

    @property
    def double_lines(self):
        return self.lines_of(2)

    @property
    def triple_lines(self):
        return self.lines_of(3)

    @property
    def fourfold_points(self):
        return [q for q in self.points if q.multiplicity == 4]

    @property
    def fivefold_points(self):
        return [q for q in self.points if q.multiplicity == 5]

    @property
    def flags(self) -> dict[frozenset, bool]:
        """Per fourfold point: True when it does not lie on a triple line."""
        return {q.planes: not q.on_triple_line for q in self.fourfold_points}

    def signature(self) -> tuple:
        lc = Counter(ln.multiplicity for ln in self.lines)
        pc = Counter(q.kind for q in self.points)
        return (tuple(sorted(lc.items())), tuple(sorted(pc.items())))

    def summary(self) -> dict:
        return {
            "double_lines": len(self.double_lines),
            "triple_lines": len(self.triple_lines),
            "fourfold_points": len(self.fourfold_points),
            "fourfold_off_triple_lines": sum(self.flags.values()),
            "fivefold_points": len(self.fivefold_points),
            "point_kinds": {f"{m}{list(t)}": n for (m, t), n in Counter(q.kind for q in self.points).items()},
        }


def singularity_inventory(arr) -> SingularityInventory:
    """Exact rank scan over all pairs and triples of planes."""
    p = arr.modulus
    F = arr.rows()
    n = len(F)
    lines = {}
    for i, j in itertools.combinations(range(n), 2):
        S = frozenset(k for k in range(n) if linalg.rank([F[i], F[j], F[k]], p) == 2)
        lines[S] = MultipleLine(S)
    points = {}
    for a, b, c in itertools.combinations(range(n), 3):
        if linalg.rank([F[a], F[b], F[c]], p) < 3:
            continue
        S = frozenset(k for k in range(n) if linalg.rank([F[a], F[b], F[c], F[k]], p) == 3)
        if len(S) < 4 or S in points:
            continue
        v = linalg.nullspace([F[k] for k in sorted(S)], 4, p)[0]
        coords = linalg.primitive(v) if p is None else linalg.normalize_mod(v, p)
        triples = tuple(sorted((L for L in lines if len(L) >= 3 and L <= S), key=sorted))
        points[S] = MultiplePoint(S, coords, triples)
    key = lambda s: sorted(s.planes)
    return SingularityInventory(tuple(sorted(lines.values(), key=key)),
                                tuple(sorted(points.values(), key=key)), p)


def cy_admissible(inv: SingularityInventory) -> bool:
    return all(q.multiplicity < 6 for q in inv.points) and all(ln.multiplicity < 4 for ln in inv.lines)


def good_primes(arr: PlaneArrangement, pmax: int) -> list[int]:
    ref = arr.inventory.signature()
    out = []
    for p in primes_between(5, pmax):
        try:
            red = arr.reduce(p)
        except ArrangementError:
            continue
        if any(not any(f) for f in red.forms):
            continue
        if len({linalg.normalize_mod(f, p) for f in red.forms}) < 8:
            continue
        if singularity_inventory(red).signature() == ref:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# cross ratios

def cross_ratio(q1, q2, q3, q4):
    """(q1-q3)(q2-q4) / ((q1-q4)(q2-q3)), with math.inf as the point at infinity."""
    qs = [q1, q2, q3, q4]
    finite = [q for q in qs if not _is_inf(q)]
    for a, b in itertools.combinations(qs, 2):
        if _is_inf(a) and _is_inf(b):
            raise ArrangementError("repeated value in cross ratio")
    for a, b in itertools.combinations(finite, 2):
        if _is_zero(a - b):
            raise ArrangementError("repeated value in cross ratio")

    def diff(a, b):
        return None if _is_inf(a) or _is_inf(b) else a - b

    num = [diff(q1, q3), diff(q2, q4)]
    den = [diff(q1, q4), diff(q2, q3)]
    # the factors containing infinity cancel in pairs in the limit
    out = 1
    for x in num:
        if x is not None:
            out = out * x
    for x in den:
        if x is not None:
            out = out / x
    return out


def is_harmonic(q1, q2, q3, q4) -> bool:
    """Some ordering of the four points has cross ratio -1."""
    return cross_ratio(q1, q2, q3, q4) in (Fraction(-1), Fraction(2), Fraction(1, 2))


def _is_inf(q) -> bool:
    return isinstance(q, float) and math.isinf(q)


def _is_zero(x) -> bool:
    try:
        return x == 0 or (hasattr(x, "expand") and x.expand() == 0)
    except TypeError:
        return False


# ---------------------------------------------------------------------------
# structure finders

def find_ruled_planes(arr: PlaneArrangement) -> list[LinearForm]:
    """Planes through two double lines that also pass through a fourfold point of the other four planes."""
    F = arr.rows()
    doubles = [sorted(ln.planes) for ln in arr.inventory.double_lines]
    found = []
    for L1, L2 in itertools.combinations(doubles, 2):
        if set(L1) & set(L2):
            continue
        four = [F[k] for k in L1 + L2]
        if linalg.rank(four) != 3:
            continue  # the lines are skew
        # S lies in span(F[L1]) and span(F[L2])
        a = linalg.nullspace([[F[L1[0]][c], F[L1[1]][c], -F[L2[0]][c], -F[L2[1]][c]] for c in range(4)], 4)
        if len(a) != 1:
            continue
        v = a[0]
        S = [v[0] * F[L1[0]][c] + v[1] * F[L1[1]][c] for c in range(4)]
        form, _ = LinearForm.normalized(S)
        if form in arr.forms:
            continue
        rest = [F[k] for k in range(8) if k not in L1 + L2]
        if linalg.rank(rest) == 3 and linalg.rank(rest + [form.coeffs]) == 3:
            if form not in found:
                found.append(form)
    return found


@dataclass(frozen=True)
class KummerSplit:
    first: tuple[int, ...]
    second: tuple[int, ...]
    first_point: tuple[int, ...]
    second_point: tuple[int, ...]
    change: tuple[tuple[int, ...], ...]
    fibrations: tuple[QuarticFibration, QuarticFibration] = field(repr=False)

    def transformed_forms(self, arr: PlaneArrangement):
        return [_compose(arr.forms[k].coeffs, self.change) for k in range(8)]


def _compose(form, g):
    """Coefficients of the form f(g x) where g is given by its columns."""
    return tuple(sum(form[r] * g[c][r] for r in range(4)) for c in range(4))


def find_kummer_splits(arr: PlaneArrangement) -> list[KummerSplit]:
    F = arr.rows()
    out = []
    for A in itertools.combinations(range(8), 4):
        if 0 not in A:
            continue
        B = tuple(k for k in range(8) if k not in A)
        if linalg.rank([F[k] for k in A]) != 3 or linalg.rank([F[k] for k in B]) != 3:
            continue
        PA = linalg.primitive(linalg.nullspace([F[k] for k in A], 4)[0])
        PB = linalg.primitive(linalg.nullspace([F[k] for k in B], 4)[0])
        # columns: PB -> (1,0,0,0), PA -> (0,0,0,1), completed by unit vectors
        cols = [PB, None, None, PA]
        fill = []
        for e in ([1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]):
            if linalg.rank([PB, PA] + fill + [e]) == 2 + len(fill) + 1:
                fill.append(e)
            if len(fill) == 2:
                break
        cols[1], cols[2] = tuple(fill[0]), tuple(fill[1])
        g = tuple(tuple(c) for c in cols)
        new = [_compose(F[k], g) for k in range(8)]
        first = [LinearForm.normalized(new[k][:3])[0] for k in A]
        second = [LinearForm.normalized(new[k][1:])[0] for k in B]
        fibs = (QuarticFibration(tuple(first), (1, 0, 0), base=(1, 2)),
                QuarticFibration(tuple(second), (0, 0, 1), base=(0, 1)))
        out.append(KummerSplit(A, B, PA, PB, g, fibs))
    return out


def check_involution(arr: PlaneArrangement, M: InvolutionMatrix):
    """Return (c, permutation) with f(Mx) = c f(x) and forms[i](Mx) ~ forms[perm[i]]."""
    M.square_scalar()
    rows = M.rows
    perm, c = [], Fraction(1)
    for f in arr.forms:
        g = [sum(f.coeffs[r] * rows[r][col] for r in range(4)) for col in range(4)]
        h, s = LinearForm.normalized(g)
        if h not in arr.forms:
            raise ArrangementError(f"form {f.text()} is not mapped into the arrangement")
        perm.append(arr.forms.index(h))
        c *= s
    if sorted(perm) != list(range(8)):
        raise ArrangementError("involution does not permute the planes")
    return c, tuple(perm)


# ---------------------------------------------------------------------------
# the two-parameter Kummer family

def kummer_octic(lam, mu, p: int | None = None):
    """The octic (x-t)(x^2-mu t^2) y z (y+t)(z+t)(y+lam z).

    Over Q this needs mu to be a rational square; with ``p`` given the
    reduction mod p is built whenever mu is a square mod p.
    """
    lam, mu = Fraction(lam), Fraction(mu)
    if lam == 0 or mu in (0, 1):
        raise ArrangementError("excluded parameters: lambda = 0 or mu in {0,1}")
    h11 = 61 if lam == -1 else 56  # lambda = -1 gives the arrangement type of no. 13
    if p is None:
        r = _rational_sqrt(mu)
        if r is None:
            raise ArrangementError("mu is not a rational square; reduce mod p instead")
        rows = [[1, 0, 0, -1], [1, 0, 0, -r], [1, 0, 0, r], [0, 1, 0, 0], [0, 0, 1, 0],
                [0, 1, 0, 1], [0, 0, 1, 1], [0, 1, lam, 0]]
        return arrangement_from_rows(rows, id=f"D({lam},{mu})", h11=h11, h12=2 if h11 == 56 else 1)
    if not is_prime(p):
        raise ArrangementError(f"{p} is not prime")
    m = mu.numerator * pow(mu.denominator, p - 2, p) % p
    r = next((s for s in range(p) if s * s % p == m), None)
    if r is None or m == 0:
        raise ArrangementError(f"mu is not a nonzero square mod {p}")
    ln = lam.numerator * pow(lam.denominator, p - 2, p) % p
    rows = [(1, 0, 0, p - 1), (1, 0, 0, -r % p), (1, 0, 0, r), (0, 1, 0, 0), (0, 0, 1, 0),
            (0, 1, 0, 1), (0, 0, 1, 1), (0, 1, ln, 0)]
    return ModArrangement(p, tuple(rows), 1)


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None
