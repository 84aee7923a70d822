"""Fourier coefficients of the newforms attached to the catalog.

Every form is resolved to one of a few coefficient sources:

* ``EllipticCurve``: a_p = p + 1 - #E(F_p) from a Weierstrass model,
* ``EtaProduct``: exact q-expansion of a product of eta(mz)^e,
* ``RigidOctic``: trace of Frobenius of a rigid double octic (h12 = 0),
* ``SymmetricCube`` / ``SymmetricSquare`` of a weight-2 form,
* ``ShippedTable``: a coefficient file in ``data/forms``.

Forms that have more than one source are cross-checked by
:func:`cross_check`; a disagreement is reported, never papered over.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .fields import field_tower, is_prime, primes_between

ETA_LIMIT = 10_000


class FormError(ValueError):
    pass


class CoefficientConflict(FormError):
    pass


# ---------------------------------------------------------------------------
# references

_REF = re.compile(r"^\s*(\d+)(?:k(\d+))?([A-Za-z]+)(\d*)(\[[\d,\s]*\])?\s*$")


@dataclass(frozen=True)
class NewformRef:
    """(level, weight, letter) identifies a form; the index and character tag are cosmetic."""

    level: int
    weight: int
    letter: str
    index: str = field(default="1", compare=False)
    character: str = field(default="", compare=False)

    @classmethod
    def parse(cls, text: str) -> "NewformRef":
        m = _REF.match(text)
        if not m:
            raise FormError(f"cannot parse form label {text!r}")
        level, weight, letter, index, char = m.groups()
        return cls(int(level), int(weight or 2), letter.upper(), index or "1",
                   (char or "").replace(" ", ""))

    @property
    def label(self) -> str:
        return f"{self.level}k{self.weight}{self.letter}{self.index}{self.character}"

    def __str__(self):
        return self.label


def as_ref(ref) -> NewformRef:
    return ref if isinstance(ref, NewformRef) else NewformRef.parse(ref)


# ---------------------------------------------------------------------------
# elliptic curves

@dataclass(frozen=True)
class EllipticCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with rational coefficients."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    @classmethod
    def of(cls, *coeffs) -> "EllipticCurve":
        if len(coeffs) == 1:
            coeffs = tuple(coeffs[0])
        if len(coeffs) != 5:
            raise FormError("need five Weierstrass coefficients")
        return cls(*(Fraction(c) for c in coeffs))

    @property
    def coefficients(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.coefficients
        b2 = a1 * a1 + 4 * a2
        b4 = a1 * a3 + 2 * a4
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def discriminant(self) -> Fraction:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def has_good_reduction(self, p: int) -> bool:
        if any(c.denominator % p == 0 for c in self.coefficients):
            return False
        return self.discriminant.numerator % p != 0


def _mod(q: Fraction, p: int) -> int:
    return q.numerator * pow(q.denominator, p - 2, p) % p


def ec_ap(curve: EllipticCurve, p: int) -> int:
    """a_p = p + 1 - #E(F_p) by counting the completed square model."""
    if p < 5 or not is_prime(p):
        raise FormError(f"p={p} must be a prime >= 5")
    if not curve.has_good_reduction(p):
        raise FormError(f"bad reduction at p={p}")
    K = field_tower(p)
    b2, b4, b6, _ = (_mod(b, p) for b in curve.b_invariants)
    xs = np.arange(p, dtype=np.int64)
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    v = (((4 * xs + b2) * xs % p + 2 * b4) * xs + b6) % p
    return -int(K.chi_table[v].sum())


def kummer_curve(mu) -> EllipticCurve:
    """E_mu : u^2 = (x - 1)(x^2 - mu), an integral model over Q.

    With mu = a/b, the substitution x = X/b^2, u = Y/b^3 gives
    Y^2 = (X - b^2)(X^2 - a b^3).
    """
    mu = Fraction(mu)
    if mu in (0, 1):
        raise FormError("mu must avoid 0 and 1")
    a, b = mu.numerator, mu.denominator
    b2 = b * b
    # (X - b^2)(X^2 - a b^3) = X^3 - b^2 X^2 - a b^3 X + a b^5
    return EllipticCurve.of(0, -b2, 0, -a * b ** 3, a * b ** 5)


# ---------------------------------------------------------------------------
# eta products

def _series_mul(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(0, n + 1 - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def _euler_series(m: int, n: int):
    """prod_{k>=1} (1 - q^(mk)) up to q^n, from the pentagonal number theorem."""
    out = [0] * (n + 1)
    k = 0
    while True:
        hit = False
        for j in ((k, -k) if k else (0,)):
            e = m * j * (3 * j - 1) // 2
            if e <= n:
                out[e] += -1 if j % 2 else 1
                hit = True
        if not hit and k:
            break
        k += 1
    return out


def _series_inverse(a, n):
    inv = [0] * (n + 1)
    inv[0] = 1  # a[0] == 1
    for i in range(1, n + 1):
        inv[i] = -sum(a[j] * inv[i - j] for j in range(1, i + 1) if a[j])
    return inv


@dataclass(frozen=True)
class EtaProduct:
    factors: tuple[tuple[int, int], ...]  # (m, e): eta(mz)^e

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(e for _, e in self.factors), 2)

    @property
    def order(self) -> int:
        s = sum(m * e for m, e in self.factors)
        if s % 24:
            raise FormError(f"q-order {s}/24 is not integral")
        return s // 24


def eta_expansion(src: EtaProduct, n: int) -> list[int]:
    """Coefficients a_0..a_n of the q-expansion (a_0 = 0 for cusp forms)."""
    if n > ETA_LIMIT:
        raise FormError(f"bound {n} exceeds {ETA_LIMIT}")
    shift = src.order
    m = n - shift
    if m < 0:
        return [0] * (n + 1)
    ser = [1] + [0] * m
    for mult, e in src.factors:
        base = _euler_series(mult, m)
        if e < 0:
            base = _series_inverse(base, m)
        for _ in range(abs(e)):
            ser = _series_mul(ser, base, m)
    return [0] * shift + ser


# ---------------------------------------------------------------------------
# other sources

@dataclass(frozen=True)
class RigidOctic:
    arrangement: str


@dataclass(frozen=True)
class SymmetricCube:
    base: str


@dataclass(frozen=True)
class SymmetricSquare:
    base: str
    lam: Fraction
    convention: str = "formula"


@dataclass(frozen=True)
class ShippedTable:
    path: str


def _data_dir():
    return resources.files("doubleoctic").joinpath("data/forms")


def read_coefficient_file(text: str):
    """Parse the header and the ``p a_p`` lines of a coefficient file."""
    header, values = {}, {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for kv in line[1:].split():
                k, _, v = kv.partition("=")
                header[k] = v
            continue
        p, a = line.split()[:2]
        values[int(p)] = int(a)
    return header, values


def write_coefficient_file(path, ref: NewformRef, values: dict, source: str):
    lines = [f"# level={ref.level} weight={ref.weight} label={ref.label} source={source}"]
    lines += [f"{p} {values[p]}" for p in sorted(values)]
    Path(path).write_text("\n".join(lines) + "\n")


@lru_cache(maxsize=None)
def _shipped():
    """label -> source, read from the headers of data/forms/*.txt."""
    out = {}
    for entry in _data_dir().iterdir():
        if not entry.name.endswith(".txt"):
            continue
        header, values = read_coefficient_file(entry.read_text())
        ref = NewformRef.parse(header["label"])
        if header["source"] == "EllipticCurve":
            out[ref] = EllipticCurve.of(*(header[k] for k in ("a1", "a2", "a3", "a4", "a6")))
        else:
            out[ref] = ShippedTable(entry.name)
    return out


@lru_cache(maxsize=None)
def _table_values(name: str) -> dict[int, int]:
    return read_coefficient_file(_data_dir().joinpath(name).read_text())[1]


# forms computed from other data; the first entry is the primary source
DERIVED_SOURCES = {
    "8k4A1": [EtaProduct(((2, 4), (4, 4))), RigidOctic("3")],
    "6k4A1": [EtaProduct(((1, 2), (2, 2), (3, 2), (6, 2)))],
    "12k4A1": [RigidOctic("239")],
    "32k4A1": [SymmetricCube("32A1"), RigidOctic("19")],
    "256k4H1": [SymmetricCube("256k2D1")],
    "144k4A1": [SymmetricCube("144k2B1")],
    "49k4D1": [SymmetricCube("49k2A1")],
    "8k3A1[1,1]": [EtaProduct(((1, 2), (2, 1), (4, 1), (8, 2)))],
    "16k3A1[1,0]": [EtaProduct(((4, 6),))],
    "12k3A1[0,1]": [EtaProduct(((2, 3), (6, 3)))],
    "7k3A1[3]": [EtaProduct(((1, 3), (7, 3)))],
    "32k2A1": [EtaProduct(((4, 2), (8, 2)))],
    "144k2B1": [EtaProduct(((12, 12), (24, -4), (6, -4)))],
}

# where a shipped table exists it takes precedence and derived data become checks
TABLE_FIRST = True


def sources(ref) -> list:
    ref = as_ref(ref)
    out = []
    shipped = _shipped().get(ref)
    derived = []
    for k, v in DERIVED_SOURCES.items():
        if as_ref(k) == ref:
            derived = list(v)
    if shipped is not None:
        out.append(shipped)
    out.extend(derived)
    if not out:
        raise FormError(f"unknown form {ref.label}")
    if isinstance(shipped, ShippedTable) and not TABLE_FIRST:
        out = derived + [shipped]
    return out


def describe(src) -> str:
    if isinstance(src, EllipticCurve):
        return "EllipticCurve[" + ",".join(str(c) for c in src.coefficients) + "]"
    if isinstance(src, EtaProduct):
        return "EtaProduct " + " ".join(f"eta({m}z)^{e}" for m, e in src.factors)
    if isinstance(src, RigidOctic):
        return f"RigidOctic(arr {src.arrangement})"
    if isinstance(src, SymmetricCube):
        return f"SymmetricCube({src.base})"
    if isinstance(src, SymmetricSquare):
        return f"SymmetricSquare({src.base}, lambda={src.lam}, {src.convention})"
    if isinstance(src, ShippedTable):
        return f"ShippedTable({src.path})"
    return repr(src)


# ---------------------------------------------------------------------------
# symmetric powers and the Kummer characteristic polynomial

def legendre(q, p: int) -> int:
    q = Fraction(q)
    return field_tower(p).chi_euler(q.numerator * q.denominator)


# congruence columns of the published table, keyed by lambda
TABLE_CONDITIONS = {
    Fraction(1): lambda p: p % 8 in (1, 3),
    Fraction(8): lambda p: p % 4 == 3,
    Fraction(-4): lambda p: p % 3 == 1,
    Fraction(-64): lambda p: p % 7 in (1, 2, 4),
}


def square_condition(lam, p: int, convention: str = "formula") -> bool:
    lam = Fraction(lam)
    if convention == "formula":
        return legendre(-(lam + 1), p) == 1
    if convention == "table":
        if lam not in TABLE_CONDITIONS:
            raise FormError(f"no table column for lambda={lam}")
        return TABLE_CONDITIONS[lam](p)
    raise FormError(f"unknown convention {convention!r}")


def symmetric_power_coeffs(base: dict[int, int], kind: str, lam=None,
                           convention: str = "formula") -> dict[int, int]:
    out = {}
    for p, a in base.items():
        if kind == "cube":
            out[p] = a ** 3 - 3 * p * a
        elif kind == "square":
            out[p] = a * a - 2 * p if square_condition(lam, p, convention) else 0
        else:
            raise FormError(f"unknown power {kind!r}")
    return out


# weight-3 eta forms of the K3 surfaces S_lambda (lambda and 1/lambda differ by a twist)
WEIGHT3_FORMS = {Fraction(1): "8k3A1[1,1]", Fraction(8): "16k3A1[1,0]",
                 Fraction(-4): "12k3A1[0,1]", Fraction(-64): "7k3A1[3]"}
WEIGHT2_FORMS = {Fraction(1): "256k2D1", Fraction(8): "32k2A1",
                 Fraction(-4): "144k2B1", Fraction(-64): "49k2A1"}


def resolve_legendre_convention(lam, pmax: int = 97) -> dict:
    """Test both readings of the b_p = a_p^2 - 2p condition against the eta form.

    a_p comes from E_{1/(lam+1)}; returns the conventions that reproduce the
    weight-3 coefficients at every prime where both sides are defined.
    """
    lam = Fraction(lam)
    if lam not in WEIGHT3_FORMS:
        raise FormError(f"no weight-3 form on record for lambda={lam}")
    ref = as_ref(WEIGHT3_FORMS[lam])
    E = kummer_curve(1 / (lam + 1))
    primes = [p for p in primes_between(5, pmax) if E.has_good_reduction(p) and ref.level % p]
    b = coefficients(ref, primes)
    a = {p: ec_ap(E, p) for p in primes}
    result = {}
    for conv in ("formula", "table"):
        pred = symmetric_power_coeffs(a, "square", lam, conv)
        result[conv] = [p for p in primes if pred[p] != b[p]]
    holds = [c for c, bad in result.items() if not bad]
    return {"lambda": str(lam), "form": ref.label, "primes": primes, "mismatches": result,
            "holds": holds, "a": a, "b": b}


def _polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@dataclass(frozen=True)
class KummerCharpoly:
    """Polynomials as coefficient lists, leading coefficient first."""

    p: int
    quadratic: tuple[int, ...]
    quartic: tuple[int, ...]

    @property
    def sextic(self) -> tuple[int, ...]:
        return tuple(_polymul(self.quadratic, self.quartic))

    @property
    def trace(self) -> int:
        return -self.sextic[1]


def kummer_charpoly(t_lam: int, t_mu: int, p: int) -> KummerCharpoly:
    """Frobenius on H^1(E_lam) x H^1(E_mu) pieces: roots p*beta and alpha^2*beta.

    With s = alpha^2 + conj(alpha)^2 = t_lam^2 - 2p and t = t_mu the quartic
    has elementary symmetric functions e1 = s t, e2 = p s^2 + p^2 t^2 - 2p^3,
    e3 = p^3 s t, e4 = p^6.
    """
    for t in (t_lam, t_mu):
        if t * t > 4 * p:
            raise FormError(f"trace {t} violates the Hasse bound at p={p}")
    s, t = t_lam * t_lam - 2 * p, t_mu
    quad = (1, -p * t, p ** 3)
    e1, e2, e3, e4 = s * t, p * s * s + p * p * t * t - 2 * p ** 3, p ** 3 * s * t, p ** 6
    return KummerCharpoly(p, quad, (1, -e1, e2, -e3, e4))


# ---------------------------------------------------------------------------
# lookup with caching and provenance

@dataclass
class NewformCoefficients:
    ref: NewformRef
    values: dict[int, int]
    provenance: str


class CoefficientCache:
    """Append-only store of (form, p) -> a_p with one provenance string per form.

    With a directory, entries are also persisted as coefficient files.
    A value that contradicts a stored one raises CoefficientConflict.
    """

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory else None
        self._mem: dict[NewformRef, NewformCoefficients] = {}
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)

    def _file(self, ref):
        return self.directory / f"{ref.label.replace('[', '_').replace(']', '').replace(',', '-')}.txt"

    def get(self, ref: NewformRef) -> NewformCoefficients:
        if ref not in self._mem:
            vals, prov = {}, ""
            if self.directory and self._file(ref).exists():
                header, vals = read_coefficient_file(self._file(ref).read_text())
                prov = header.get("source", "")
            self._mem[ref] = NewformCoefficients(ref, vals, prov)
        return self._mem[ref]

    def add(self, ref: NewformRef, values: dict[int, int], provenance: str):
        entry = self.get(ref)
        clash = {p: (entry.values[p], a) for p, a in values.items()
                 if p in entry.values and entry.values[p] != a}
        if clash:
            raise CoefficientConflict(
                f"{ref.label}: {provenance} disagrees with {entry.provenance} at {clash}")
        if not entry.provenance:
            entry.provenance = provenance
        new = {p: a for p, a in values.items() if p not in entry.values}
        entry.values.update(new)
        if self.directory and new:
            write_coefficient_file(self._file(ref), ref, entry.values, entry.provenance.split()[0])


_DEFAULT_CACHE = CoefficientCache()


def set_cache_dir(directory):
    global _DEFAULT_CACHE
    _DEFAULT_CACHE = CoefficientCache(directory)


def deligne_bound(weight: int, p: int) -> float:
    return 2 * p ** ((weight - 1) / 2)


def _compute(src, ref: NewformRef, primes: list[int]) -> dict[int, int]:
    if isinstance(src, EllipticCurve):
        return {p: ec_ap(src, p) for p in primes}
    if isinstance(src, EtaProduct):
        if src.weight != ref.weight:
            raise FormError(f"eta product of weight {src.weight} for {ref.label}")
        c = _eta_cached(src, max(primes))
        return {p: c[p] for p in primes}
    if isinstance(src, ShippedTable):
        table = _table_values(src.path)
        missing = [p for p in primes if p not in table]
        if missing:
            raise FormError(f"{ref.label}: shipped table lacks p={missing}")
        return {p: table[p] for p in primes}
    if isinstance(src, SymmetricCube):
        base = coefficients(src.base, primes)
        return symmetric_power_coeffs(base, "cube")
    if isinstance(src, SymmetricSquare):
        base = coefficients(src.base, primes)
        return symmetric_power_coeffs(base, "square", src.lam, src.convention)
    if isinstance(src, RigidOctic):
        from .catalog import lookup
        from .verify import trace_h3

        arr = lookup(src.arrangement)
        if arr is None or arr.h12 != 0:
            raise FormError(f"arrangement {src.arrangement} is not a rigid catalog entry")
        return {p: trace_h3(arr, p) for p in primes}
    raise FormError(f"unsupported source {src!r}")


def _eta_bound(n):
    b = 128
    while b < n:
        b *= 2
    return min(b, ETA_LIMIT)


def _eta_cached(src: EtaProduct, n: int):
    return _eta_series(src, _eta_bound(n))


@lru_cache(maxsize=None)
def _eta_series(src: EtaProduct, n: int):
    return tuple(eta_expansion(src, n))


def coefficients(ref, primes, source_index: int = 0, cache: CoefficientCache | None = None
                 ) -> dict[int, int]:
    """a_p for the given primes from the chosen source (0 = primary)."""
    ref = as_ref(ref)
    primes = [int(p) for p in primes]
    srcs = sources(ref)
    if source_index >= len(srcs):
        raise FormError(f"{ref.label} has only {len(srcs)} source(s)")
    src = srcs[source_index]
    if source_index:
        return _compute(src, ref, primes)
    cache = cache or _DEFAULT_CACHE
    entry = cache.get(ref)
    todo = [p for p in primes if p not in entry.values]
    if todo:
        vals = _compute(src, ref, todo)
        for p, a in vals.items():
            if p % ref.level and abs(a) > deligne_bound(ref.weight, p):
                raise FormError(f"{ref.label}: a_{p}={a} violates the Deligne bound")
        cache.add(ref, vals, describe(src))
    return {p: entry.values[p] for p in primes}


def coefficient_lookup(ref, p: int) -> int:
    return coefficients(ref, [p])[p]


def provenance(ref) -> str:
    ref = as_ref(ref)
    entry = _DEFAULT_CACHE.get(ref)
    return entry.provenance or describe(sources(ref)[0])


def cross_check(ref, primes) -> dict:
    """Compare every source of a form; returns {source: {p: value}} plus mismatches."""
    ref = as_ref(ref)
    vals = {}
    for i, src in enumerate(sources(ref)):
        usable = [p for p in primes if not isinstance(src, EllipticCurve) or src.has_good_reduction(p)]
        vals[describe(src)] = coefficients(ref, usable, source_index=i) if i else \
            coefficients(ref, usable)
    names = list(vals)
    mismatches = {}
    for other in names[1:]:
        bad = [p for p in vals[other] if p in vals[names[0]] and vals[other][p] != vals[names[0]][p]]
        if bad:
            mismatches[other] = bad
    return {"values": vals, "mismatches": mismatches}


def is_multiplicative(coeffs, bound: int) -> bool:
    """a_mn = a_m a_n for coprime m, n with mn <= bound."""
    for m in range(2, bound + 1):
        for n in range(m + 1, bound // m + 1):
            if math.gcd(m, n) == 1 and coeffs[m * n] != coeffs[m] * coeffs[n]:
                return False
    return True


def known_forms() -> list[str]:
    refs = set(_shipped()) | {as_ref(k) for k in DERIVED_SOURCES}
    return sorted((r.label for r in refs), key=lambda s: (as_ref(s).weight, as_ref(s).level, s))


def good_primes_for(ref, primes) -> list[int]:
    ref = as_ref(ref)
    return [p for p in primes if ref.level % p]



