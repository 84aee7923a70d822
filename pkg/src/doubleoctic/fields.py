"""Exact arithmetic in the tower F_p < F_{p^2} < F_{p^4}.

F_{p^2} = F_p(alpha) with alpha^2 = d, d the smallest non-residue mod p.
F_{p^4} = F_{p^2}(gamma) with gamma^2 = e, e the first non-square of
F_{p^2} in the canonical order (a, b) -> a + b*alpha, lexicographic.

Scalar elements are small immutable objects.  The counting kernels use
the array helpers at the bottom of the module instead, which work on
pairs of numpy integer arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

CHI_TABLE_LIMIT = 10_000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_between(lo: int, hi: int) -> list[int]:
    return [q for q in range(max(lo, 2), hi + 1) if is_prime(q)]


@dataclass(frozen=True, eq=False)
class FieldTower:
    """Immutable context for F_p, F_{p^2}, F_{p^4}; safe to share."""

    p: int
    d: int
    e: tuple[int, int]
    chi_table: np.ndarray = field(repr=False)
    gamma_frob: "Fp2" = field(repr=False, default=None)

    # constructors -------------------------------------------------------
    def fp2(self, a: int, b: int = 0) -> "Fp2":
        return Fp2(a % self.p, b % self.p, self)

    def fp4(self, x, y=0) -> "Fp4":
        return Fp4(self._lift2(x), self._lift2(y), self)

    def _lift2(self, x) -> "Fp2":
        if isinstance(x, Fp2):
            return x
        return Fp2(int(x) % self.p, 0, self)

    # characters ---------------------------------------------------------
    def chi(self, x) -> int:
        """Quadratic character on F_p (ints) or F_{p^2} (Fp2)."""
        if isinstance(x, Fp2):
            return int(self.chi_table[x.norm()])
        if isinstance(x, Fp4):
            raise TypeError("character on F_{p^4} is not needed")
        return int(self.chi_table[int(x) % self.p])

    def chi_euler(self, x: int) -> int:
        x %= self.p
        if x == 0:
            return 0
        return 1 if pow(x, (self.p - 1) // 2, self.p) == 1 else -1

    def sqrt(self, x):
        """Canonical square root (smaller encoding of the two) or None."""
        if isinstance(x, (Fp2, Fp4)):
            return x.sqrt()
        x %= self.p
        if x == 0:
            return 0
        if self.chi_table[x] != 1:
            return None
        r = _tonelli(x, self.p - 1, self.d, lambda a, b: a * b % self.p, 1,
                     lambda a, n: pow(a, n, self.p))
        return min(r, self.p - r)


def _tonelli(x, order, nonsq, mul, one, power):
    """Square root of a known square x in a cyclic group of even order."""
    s, q = 0, order
    while q % 2 == 0:
        s, q = s + 1, q // 2
    z = power(nonsq, q)
    r = power(x, (q + 1) // 2)
    t = power(x, q)
    m = s
    while t != one:
        i, t2 = 0, t
        while t2 != one:
            t2 = mul(t2, t2)
            i += 1
        b = z
        for _ in range(m - i - 1):
            b = mul(b, b)
        r = mul(r, b)
        z = mul(b, b)
        t = mul(t, z)
        m = i
    return r


class Fp2:
    __slots__ = ("a", "b", "K")

    def __init__(self, a: int, b: int, K: FieldTower):
        self.a, self.b, self.K = a, b, K

    def _co(self, o) -> "Fp2":
        if isinstance(o, Fp2):
            return o
        return Fp2(int(o) % self.K.p, 0, self.K)

    def __add__(self, o):
        o = self._co(o)
        p = self.K.p
        return Fp2((self.a + o.a) % p, (self.b + o.b) % p, self.K)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._co(o)
        p = self.K.p
        return Fp2((self.a - o.a) % p, (self.b - o.b) % p, self.K)

    def __rsub__(self, o):
        return self._co(o) - self

    def __neg__(self):
        p = self.K.p
        return Fp2(-self.a % p, -self.b % p, self.K)

    def __mul__(self, o):
        if isinstance(o, Fp4):
            return o * self
        o = self._co(o)
        p, d = self.K.p, self.K.d
        return Fp2((self.a * o.a + d * self.b * o.b) % p,
                   (self.a * o.b + self.b * o.a) % p, self.K)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = Fp2(1, 0, self.K), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, Fp2):
            return (self.a, self.b) == (o.a, o.b)
        if isinstance(o, int):
            return self.b == 0 and self.a == o % self.K.p
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"Fp2({self.a}+{self.b}a mod {self.K.p})"

    def encoding(self) -> tuple[int, int]:
        return (self.a, self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def norm(self) -> int:
        p = self.K.p
        return (self.a * self.a - self.K.d * self.b * self.b) % p

    def frobenius(self) -> "Fp2":
        # alpha^p = alpha * d^((p-1)/2) = -alpha
        return Fp2(self.a, -self.b % self.K.p, self.K)

    def inverse(self) -> "Fp2":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in F_{p^2}")
        ni = pow(n, self.K.p - 2, self.K.p)
        return Fp2(self.a * ni % self.K.p, -self.b * ni % self.K.p, self.K)

    def sqrt(self):
        if self.is_zero():
            return self
        if self.K.chi(self) != 1:
            return None
        K = self.K
        r = _tonelli(self, K.p * K.p - 1, Fp2(K.e[0], K.e[1], K), Fp2.__mul__,
                     Fp2(1, 0, K), Fp2.__pow__)
        return min(r, -r, key=Fp2.encoding)


class Fp4:
    __slots__ = ("x", "y", "K")

    def __init__(self, x: Fp2, y: Fp2, K: FieldTower):
        self.x, self.y, self.K = x, y, K

    def _co(self, o) -> "Fp4":
        if isinstance(o, Fp4):
            return o
        return self.K.fp4(o)

    def __add__(self, o):
        o = self._co(o)
        return Fp4(self.x + o.x, self.y + o.y, self.K)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._co(o)
        return Fp4(self.x - o.x, self.y - o.y, self.K)

    def __neg__(self):
        return Fp4(-self.x, -self.y, self.K)

    def __mul__(self, o):
        o = self._co(o)
        e = Fp2(self.K.e[0], self.K.e[1], self.K)
        return Fp4(self.x * o.x + e * self.y * o.y, self.x * o.y + self.y * o.x, self.K)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out, base = self.K.fp4(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, (Fp2, int)):
            o = self._co(o)
        if isinstance(o, Fp4):
            return self.encoding() == o.encoding()
        return NotImplemented

    def __hash__(self):
        return hash(self.encoding())

    def __repr__(self):
        return f"Fp4({self.x!r} + {self.y!r}*g)"

    def encoding(self) -> tuple[int, int, int, int]:
        return self.x.encoding() + self.y.encoding()

    def is_zero(self) -> bool:
        return self.x.is_zero() and self.y.is_zero()

    def frobenius(self) -> "Fp4":
        # gamma^p = gamma * e^((p-1)/2)
        return Fp4(self.x.frobenius(), self.y.frobenius() * self.K.gamma_frob, self.K)

    def sqrt(self):
        if self.is_zero():
            return self
        K = self.K
        one = K.fp4(1)
        q = K.p ** 4 - 1
        if self ** (q // 2) != one:
            return None
        gamma = Fp4(Fp2(0, 0, K), Fp2(1, 0, K), K)
        r = _tonelli(self, q, gamma, Fp4.__mul__, one, Fp4.__pow__)
        return min(r, -r, key=Fp4.encoding)


@lru_cache(maxsize=None)
def field_tower(p: int) -> FieldTower:
    """Deterministic tower for an odd prime p >= 5."""
    if not isinstance(p, (int, np.integer)) or p < 5 or not is_prime(int(p)):
        raise ValueError(f"p={p} is not a prime >= 5")
    p = int(p)
    if p > CHI_TABLE_LIMIT:
        raise ValueError(f"p={p} exceeds the character-table guard {CHI_TABLE_LIMIT}")
    table = np.full(p, -1, dtype=np.int64)
    table[0] = 0
    table[(np.arange(1, p) ** 2) % p] = 1
    table.setflags(write=False)
    d = next(a for a in range(2, p) if table[a] == -1)
    # scan F_{p^2} in canonical order; x is a non-square iff its norm is one in F_p
    e = next((a, b) for a in range(p) for b in range(p)
             if table[(a * a - d * b * b) % p] == -1)
    K = FieldTower(p, d, e, table)
    ee = Fp2(e[0], e[1], K)
    object.__setattr__(K, "gamma_frob", ee ** ((p - 1) // 2))
    return K


# ---------------------------------------------------------------------------
# array kernels: an F_{p^2} array is a pair (A, B) of int64 arrays meaning A + B*alpha

def qmul(x, y, p: int, d: int):
    a, b = x
    c, e = y
    return ((a * c + d * ((b * e) % p)) % p, (a * e + b * c) % p)


def qpow(x, n: int, p: int, d: int):
    a, b = x
    out = (np.ones_like(a), np.zeros_like(b))
    base = (a % p, b % p)
    while n:
        if n & 1:
            out = qmul(out, base, p, d)
        base = qmul(base, base, p, d)
        n >>= 1
    return out


def qnorm(x, p: int, d: int):
    a, b = x
    return (a * a - d * ((b * b) % p)) % p
