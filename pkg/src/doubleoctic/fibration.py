"""Elliptic fibrations on double covers of P^2 branched along four lines.

A pencil of lines through a point P fibres the double plane; the type of
the fibre over a pencil member is read off from how the four branch lines
meet that member:

    4 distinct points                         -> I0
    one double point, two simple              -> I2
    two double points                         -> I4
    one triple point, one simple              -> D4*
    member is a branch line, residual 3 points distinct -> D4*
    member is a branch line, two residual points collide -> D6*

Base parameters live in Q with ``math.inf`` for the point at infinity.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from . import linalg

INF = math.inf


class FibrationError(ValueError):
    pass


class KodairaType(Enum):
    I0 = ("I0", 0, 1)
    I2 = ("I2", 2, 2)
    I4 = ("I4", 4, 4)
    I8 = ("I8", 8, 8)
    D4 = ("D4*", 6, 5)
    D6 = ("D6*", 8, 7)

    def __init__(self, label, euler, components):
        self.label, self.euler, self.components = label, euler, components

    def __str__(self):
        return self.label

    @classmethod
    def parse(cls, text: str) -> "KodairaType":
        t = text.strip().replace("_", "").replace("{", "").replace("}", "").replace("^", "")
        for k in cls:
            if k.label == t or k.label.rstrip("*") == t.rstrip("*"):
                return k
        raise FibrationError(f"unknown Kodaira type {text!r}")

    def doubled(self) -> "KodairaType":
        """Type after a ramified base change of index two."""
        if self is KodairaType.I8:
            raise FibrationError("I8 does not double within the supported types")
        return {KodairaType.I0: KodairaType.I0, KodairaType.I2: KodairaType.I4,
                KodairaType.I4: KodairaType.I8, KodairaType.D4: KodairaType.I0,
                KodairaType.D6: KodairaType.I4}[self]


def _coeffs(line):
    return tuple(getattr(line, "coeffs", line))


@dataclass(frozen=True)
class QuarticFibration:
    lines: tuple
    point: tuple[int, int, int]
    base: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(_coeffs(l) for l in self.lines))
        if len(self.lines) != 4:
            raise FibrationError("a quartic fibration needs four lines")
        if linalg.rank(list(self.lines)) < 3:
            raise FibrationError("the four lines are concurrent: the double plane is not rational")

    def pencil(self) -> tuple[tuple, tuple]:
        """(n1, n2) with member(tau) = n1 - tau*n2 and member(inf) = n2."""
        if self.base is not None:
            b0, b1 = self.base
            if self.point[b0] or self.point[b1]:
                raise FibrationError("pencil point must vanish in the base coordinates")
            e = lambda i: tuple(int(i == k) for k in range(3))
            return e(b0), e(b1)
        n = linalg.nullspace([list(self.point)], 3)
        return tuple(n[0]), tuple(n[1])

    def member(self, tau):
        n1, n2 = self.pencil()
        if tau == INF:
            return n2
        return tuple(Fraction(a) - tau * b for a, b in zip(n1, n2))

    def parameter_of_point(self, q):
        n1, n2 = self.pencil()
        a = sum(x * y for x, y in zip(n1, q))
        b = sum(x * y for x, y in zip(n2, q))
        if a == 0 and b == 0:
            raise FibrationError("point coincides with the pencil point")
        return INF if b == 0 else Fraction(a) / b

    def parameter_of_line(self, line):
        """Parameter tau if the line is a pencil member, else None."""
        if sum(c * x for c, x in zip(line, self.point)) != 0:
            return None
        n1, n2 = self.pencil()
        if linalg.rank([line, n2]) == 1:
            return INF
        c = linalg.solve([n1, n2], list(line))
        return Fraction(-c[1]) / c[0]

    def restrict(self, tau):
        """Branch data on a member: (is_line, multiplicity pattern)."""
        m = self.member(tau)
        own = [k for k, l in enumerate(self.lines) if linalg.rank([l, m]) == 1]
        if own:
            k = own[0]
            pts = [_meet(m, l) for j, l in enumerate(self.lines) if j != k]
            if any(linalg.rank([list(q), list(self.point)]) == 1 for q in pts):
                raise FibrationError("pencil point lies on two branch lines")
            return True, _pattern(pts)
        pts = [_meet(m, l) for l in self.lines]
        return False, _pattern(pts)


def _meet(l1, l2):
    v = linalg.nullspace([list(l1), list(l2)], 3)
    return linalg.primitive(v[0])


def _pattern(pts) -> tuple[int, ...]:
    groups = []
    for q in pts:
        for g in groups:
            if linalg.rank([list(q), list(g[0])]) == 1:
                g.append(q)
                break
        else:
            groups.append([q])
    return tuple(sorted((len(g) for g in groups), reverse=True))


_DECISION = {
    (False, (1, 1, 1, 1)): KodairaType.I0,
    (False, (2, 1, 1)): KodairaType.I2,
    (False, (2, 2)): KodairaType.I4,
    (False, (3, 1)): KodairaType.D4,
    (True, (1, 1, 1)): KodairaType.D4,
    (True, (2, 1)): KodairaType.D6,
}


@dataclass(frozen=True)
class FiberConfiguration:
    fibers: tuple[tuple[object, KodairaType], ...]

    def __post_init__(self):
        fixed = tuple(sorted(((_param(t), k) for t, k in self.fibers), key=lambda e: e[0]))
        if len({t for t, _ in fixed}) != len(fixed):
            raise FibrationError("two fibres at the same base point")
        object.__setattr__(self, "fibers", fixed)

    @classmethod
    def of(cls, mapping: dict) -> "FiberConfiguration":
        return cls(tuple((t, k if isinstance(k, KodairaType) else KodairaType.parse(k))
                         for t, k in mapping.items()))

    def euler(self) -> int:
        return sum(k.euler for _, k in self.fibers)

    def singular(self) -> "FiberConfiguration":
        return FiberConfiguration(tuple((t, k) for t, k in self.fibers if k is not KodairaType.I0))

    def points(self) -> list:
        return [t for t, _ in self.fibers]

    def type_at(self, t) -> KodairaType:
        t = _param(t)
        return next((k for s, k in self.fibers if s == t), KodairaType.I0)

    def with_markers(self, points) -> "FiberConfiguration":
        """Add explicit I0 entries at the given base points where nothing is recorded."""
        have = set(self.points())
        extra = tuple((_param(t), KodairaType.I0) for t in points if _param(t) not in have)
        return FiberConfiguration(self.fibers + extra)

    def shape(self) -> tuple[str, ...]:
        return tuple(sorted(k.label for _, k in self.fibers if k is not KodairaType.I0))

    def as_dict(self) -> dict:
        return {fmt_param(t): k.label for t, k in self.fibers}

    def to_json(self) -> list[dict]:
        return [{"t": fmt_param(t), "type": k.label} for t, k in self.fibers]

    def __str__(self):
        return "{" + ", ".join(f"{fmt_param(t)}:{k}" for t, k in self.fibers) + "}"


def _param(t):
    if isinstance(t, float) and math.isinf(t):
        return INF
    if isinstance(t, str):
        return INF if t.strip() in ("inf", "oo", "∞") else Fraction(t)
    return Fraction(t)


def fmt_param(t) -> str:
    return "∞" if t == INF else str(t)


def classify_quartic_fibration(fib: QuarticFibration) -> FiberConfiguration:
    special = set()
    for l in fib.lines:
        tau = fib.parameter_of_line(l)
        if tau is not None:
            special.add(tau)
    for l1, l2 in itertools.combinations(fib.lines, 2):
        q = _meet(l1, l2)
        if linalg.rank([list(q), list(fib.point)]) == 1:
            raise FibrationError("pencil point is a double point of the branch curve")
        special.add(fib.parameter_of_point(q))
    fibers = []
    for tau in special:
        key = fib.restrict(tau)
        if key not in _DECISION:
            raise FibrationError(f"no Kodaira type for branch pattern {key}")
        k = _DECISION[key]
        if k is not KodairaType.I0:
            fibers.append((tau, k))
    cfg = FiberConfiguration(tuple(fibers))
    if cfg.euler() != 12:
        raise FibrationError(f"Euler sum {cfg.euler()} != 12 for {cfg}")
    return cfg


def generic_fiber_picard(cfg: FiberConfiguration) -> int:
    if cfg.euler() != 12:
        raise FibrationError("not a rational elliptic surface configuration")
    rho = 1 + 8 - sum(k.components - 1 for _, k in cfg.fibers)
    if rho < 1:
        raise FibrationError("inconsistent configuration")
    return rho


# ---------------------------------------------------------------------------
# base change

@dataclass(frozen=True)
class RationalMap:
    """t -> num(t)/den(t); coefficient tuples in ascending powers."""

    num: tuple[Fraction, ...]
    den: tuple[Fraction, ...]

    @classmethod
    def mobius(cls, a, b, c, d) -> "RationalMap":
        if Fraction(a) * d - Fraction(b) * c == 0:
            raise FibrationError("degenerate Möbius map")
        return cls((Fraction(b), Fraction(a)), (Fraction(d), Fraction(c)))

    @classmethod
    def identity(cls) -> "RationalMap":
        return cls.mobius(1, 0, 0, 1)

    def squared(self) -> "RationalMap":
        return RationalMap(_pmul(self.num, self.num), _pmul(self.den, self.den))

    @property
    def degree(self) -> int:
        return max(_deg(self.num), _deg(self.den))

    def __call__(self, t):
        if t == INF:
            dn, dd = _deg(self.num), _deg(self.den)
            if dn > dd:
                return INF
            if dn < dd:
                return Fraction(0)
            return Fraction(self.num[dn]) / self.den[dd]
        n, d = _peval(self.num, t), _peval(self.den, t)
        return INF if d == 0 else Fraction(n) / d

    def fiber_over(self, v) -> list[tuple[object, int]]:
        """Preimages of v with ramification indices; rational points only."""
        d = self.degree
        poly = self.den if v == INF else _psub(self.num, tuple(v * c for c in self.den))
        poly = _trim(poly)
        roots = _rational_roots(poly)
        out = list(roots)
        at_inf = d - _deg(poly)
        if at_inf > 0:
            out.append((INF, at_inf))
        if sum(e for _, e in out) != d:
            raise FibrationError(f"preimages of {fmt_param(v)} are not all rational")
        return out


def _deg(p):
    p = _trim(p)
    return len(p) - 1 if any(p) else -1


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def _peval(p, t):
    return sum(c * t ** i for i, c in enumerate(p))


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def _psub(a, b):
    n = max(len(a), len(b))
    a = tuple(a) + (0,) * (n - len(a))
    b = tuple(b) + (0,) * (n - len(b))
    return tuple(Fraction(x) - y for x, y in zip(a, b))


def _rational_roots(p):
    p = _trim(p)
    deg = _deg(p)
    if deg <= 0:
        return []
    if deg == 1:
        return [(-Fraction(p[0]) / p[1], 1)]
    if deg == 2:
        c, b, a = (Fraction(x) for x in p)
        disc = b * b - 4 * a * c
        if disc == 0:
            return [(-b / (2 * a), 2)]
        r = _qsqrt(disc)
        if r is None:
            raise FibrationError("irrational preimages")
        return [((-b - r) / (2 * a), 1), ((-b + r) / (2 * a), 1)]
    raise FibrationError("maps of degree > 2 are not supported")


def _qsqrt(q: Fraction):
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    return Fraction(a, b) if a * a == q.numerator and b * b == q.denominator else None


def base_change_configuration(cfg: FiberConfiguration, phi: RationalMap) -> FiberConfiguration:
    if phi.degree < 1 or phi.degree > 2:
        raise FibrationError("base change map must have degree 1 or 2")
    out = []
    for v, k in cfg.fibers:
        for s, e in phi.fiber_over(v):
            out.append((s, k if e == 1 else k.doubled()))
    return FiberConfiguration(tuple(out))


def isogeny_swap(cfg: FiberConfiguration) -> FiberConfiguration:
    if cfg.singular().shape() != ("I2", "I2", "I4", "I4"):
        raise FibrationError("isogeny swap needs exactly I2, I2, I4, I4")
    swap = {KodairaType.I2: KodairaType.I4, KodairaType.I4: KodairaType.I2}
    return FiberConfiguration(tuple((t, swap.get(k, k)) for t, k in cfg.fibers))


# ---------------------------------------------------------------------------
# matching computed rows to a reference coordinate

def _to_standard(a, b, c):
    """Matrix of the Möbius map sending a, b, c to 0, inf, 1."""
    if a == INF:
        return (0, c - b, 1, -b)
    if b == INF:
        return (1, -a, 0, c - a)
    if c == INF:
        return (1, -a, 1, -b)
    return (c - b, -a * (c - b), c - a, -b * (c - a))


def _apply(m, t):
    a, b, c, d = m
    if t == INF:
        return INF if c == 0 else Fraction(a) / c
    den = c * t + d
    return INF if den == 0 else Fraction(a * t + b) / den


def _inverse(m):
    a, b, c, d = m
    return (d, -b, -c, a)


def _compose(m2, m1):
    a, b, c, d = m2
    e, f, g, h = m1
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def align_rows(rows, target_rows):
    """Möbius map sending the computed rows onto the target rows, or None.

    Every base point carrying a singular fibre in either row must land on a
    target column, and the types (I0 markers included) must agree column by
    column.  The two rows may be swapped; returns (matrix, swapped).
    """
    rows = [r.singular() for r in rows]
    pts = sorted({t for r in rows for t in r.points()})
    target_pts = sorted({t for r in target_rows for t in r.points()})
    if len(pts) != len(target_pts) or len(pts) < 3:
        return None
    for order in (rows, rows[::-1]):
        for img in itertools.permutations(target_pts, 3):
            m = _compose(_inverse(_to_standard(*img)), _to_standard(*pts[:3]))
            if m[0] * m[3] - m[1] * m[2] == 0:
                continue
            ok = True
            for r, tr in zip(order, target_rows):
                for t in pts:
                    s = _apply(m, t)
                    if s not in target_pts or r.type_at(t) is not tr.type_at(s):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return m, order is not rows
    return None


def transport(cfg: FiberConfiguration, m) -> FiberConfiguration:
    return FiberConfiguration(tuple((_apply(m, t), k) for t, k in cfg.fibers))


def fiber_table_text(rows, names=None) -> str:
    pts = sorted({t for r in rows for t in r.points()})
    cols = [fmt_param(t) for t in pts]
    width = max([4] + [len(c) for c in cols])
    head = " " * 6 + " ".join(c.rjust(width) for c in cols)
    lines = [head, " " * 6 + "-" * (len(head) - 6)]
    for i, r in enumerate(rows):
        name = (names[i] if names else f"F{i + 1}").ljust(6)
        lines.append(name + " ".join(str(r.type_at(t)).rjust(width) for t in pts))
    return "\n".join(lines)


def fiber_table_json(rows) -> str:
    return json.dumps([r.to_json() for r in rows])
