"""Small exact linear algebra over Q (Fractions) or F_p (ints mod p)."""
from __future__ import annotations

from fractions import Fraction
from math import gcd


def _echelon(rows, p=None):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    if p is None:
        M = [[Fraction(x) for x in r] for r in rows]
    else:
        M = [[int(x) % p for x in r] for r in rows]
    ncols = len(M[0]) if M else 0
    pivots, r = [], 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(M)) if M[i][c]), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        if p is None:
            inv = 1 / M[r][c]
            M[r] = [x * inv for x in M[r]]
        else:
            inv = pow(M[r][c], p - 2, p)
            M[r] = [x * inv % p for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                if p is None:
                    M[i] = [x - f * y for x, y in zip(M[i], M[r])]
                else:
                    M[i] = [(x - f * y) % p for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank(rows, p=None) -> int:
    return len(_echelon(rows, p)[1]) if rows else 0


def nullspace(rows, ncols: int, p=None):
    """Basis of {v : rows * v = 0}."""
    if not rows:
        rows = [[0] * ncols]
    M, pivots = _echelon(rows, p)
    basis = []
    for fc in (c for c in range(ncols) if c not in pivots):
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fc] if p is None else (-M[i][fc]) % p
        basis.append(v)
    return basis


def solve(columns, target, p=None):
    """Coefficients c with sum c_i * columns[i] = target, or None."""
    n = len(columns)
    rows = [[col[k] for col in columns] + [target[k]] for k in range(len(target))]
    M, pivots = _echelon(rows, p)
    if n in pivots:
        return None
    out = [0] * n
    for i, pc in enumerate(pivots):
        out[pc] = M[i][n]
    return out


def primitive(v):
    """Scale a rational vector to coprime integers, first nonzero positive."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    w = [int(x * den) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector")
    w = [x // g for x in w]
    if next(x for x in w if x) < 0:
        w = [-x for x in w]
    return tuple(w)


def normalize_mod(v, p):
    """Projective representative mod p with first nonzero entry 1."""
    v = [int(x) % p for x in v]
    lead = next((x for x in v if x), 0)
    if lead == 0:
        raise ValueError("zero vector mod p")
    inv = pow(lead, p - 2, p)
    return tuple(x * inv % p for x in v)


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]
