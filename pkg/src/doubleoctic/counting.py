"""Point counts on double covers over finite fields.

Twisted counts
--------------
For an involution M of P^3 defined over F_p we count fixed points of
Frob_p o Phi, where Phi(x) = Mx.  Such points are F_{p^2}-rational, so a
projective fixed point has a representative x in F_{p^2}^4 with
M x^(p) = mu x.  Applying the map twice gives N(mu) = mu^(p+1) = c where
M^2 = c Id.  Rescaling x by kappa replaces mu by kappa^(p-1) mu, and by
Hilbert 90 the values kappa^(p-1) are exactly the norm-one elements, so
every fixed point has a representative with mu = lam0 for one fixed lam0
of norm c.  The solutions of M x^(p) = lam0 x form an F_p-space V of
dimension 4 and P(V) is the set of fixed points, with #P(V) = #P^3(F_p).

On the cover u^2 = f(x) a lift of Phi is (x, u) -> (Mx, s u) with
s^2 = c_f, f(Mx) = c_f f(x).  Frob o Phi sends (x, u) to
(lam0 x, s^p u^p) ~ (x, lam0^-4 s^p u^p), so a point with v = f(x) != 0
is fixed for the lift s iff some root u of u^2 = v has u^(p-1) = lam0^4 s^-p.
Since u^(p-1) = v^((p-1)/2) this is a test on v alone, and both roots give
the same answer.  u always lies in F_{p^4} because v lies in F_{p^2}.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .fields import field_tower, qmul, qpow

BRUTE_PMAX = 13


class CountingError(ValueError):
    pass


@dataclass(frozen=True)
class CoverCount:
    p: int
    n_branch: int
    n_total: int


@lru_cache(maxsize=8)
def projective_points(p: int) -> np.ndarray:
    """Representatives of P^3(F_p) with first nonzero coordinate 1, lexicographic."""
    a = np.arange(p, dtype=np.int64)
    blocks = []
    for lead in range(4):
        free = 3 - lead
        if free:
            grid = np.stack(np.meshgrid(*([a] * free), indexing="ij"), -1).reshape(-1, free)
        else:
            grid = np.zeros((1, 0), dtype=np.int64)
        head = np.zeros((len(grid), lead + 1), dtype=np.int64)
        head[:, lead] = 1
        blocks.append(np.hstack([head, grid]))
    pts = np.vstack(blocks)
    pts.setflags(write=False)
    return pts


def _forms_mod(obj, p):
    if hasattr(obj, "reduce"):
        red = obj.reduce(p)
        return [np.array(f, dtype=np.int64) % p for f in red.forms], int(red.scale) % p
    return [np.array(f, dtype=np.int64) % p for f in obj], 1


def octic_values(forms, p: int, scale: int = 1, points=None) -> np.ndarray:
    P = projective_points(p) if points is None else points
    v = np.full(len(P), scale % p, dtype=np.int64)
    for f in forms:
        v = v * ((P @ (np.asarray(f, dtype=np.int64) % p)) % p) % p
    return v


def count_projective_cover(forms, p: int, scale: int = 1) -> CoverCount:
    """sum over P^3(F_p) of 1 + chi(scale * prod forms).

    ``forms`` is either an arrangement (reduced mod p here) or a list of
    linear forms; repeated forms give powers, e.g. [x]*8 is x^8.
    """
    K = field_tower(p)
    if hasattr(forms, "reduce"):
        rows, scale = _forms_mod(forms, p)
    else:
        rows = [np.asarray(f, dtype=np.int64) % p for f in forms]
    if any(not r.any() for r in rows) or scale % p == 0:
        raise CountingError("form vanishes identically mod p")
    v = octic_values(rows, p, scale)
    n_branch = int(np.count_nonzero(v == 0))
    n_total = len(v) + int(K.chi_table[v].sum())
    return CoverCount(p, n_branch, n_total)


def affine_chart_count(forms, p: int, scale: int = 1) -> int:
    """Oracle: count {u^2 = f} chart by chart with overlap removed.

    Chart i holds the points with x_i = 1 and x_j = 0 for j < i, so each
    projective point is visited once; solutions u are counted directly.
    """
    if hasattr(forms, "reduce"):
        rows, scale = _forms_mod(forms, p)
    else:
        rows = [np.asarray(f, dtype=np.int64) % p for f in forms]
    squares = np.zeros(p, dtype=np.int64)
    for u in range(p):
        squares[u * u % p] += 1
    total = 0
    a = np.arange(p, dtype=np.int64)
    for lead in range(4):
        free = 3 - lead
        grids = np.meshgrid(*([a] * free), indexing="ij") if free else []
        cols = [np.zeros(1 if not free else grids[0].size, dtype=np.int64)] * lead
        cols = cols + [np.ones_like(cols[0]) if cols else np.ones(1 if not free else grids[0].size, dtype=np.int64)]
        cols += [g.reshape(-1) for g in grids]
        X = np.stack(cols, -1)
        v = np.full(len(X), scale % p, dtype=np.int64)
        for f in rows:
            v = v * ((X @ f) % p) % p
        total += int(squares[v].sum())
    return total


# ---------------------------------------------------------------------------
# fibres of a quartic pencil

def _poly_trim(q, p):
    q = [c % p for c in q]
    while q and q[-1] == 0:
        q.pop()
    return q


def _poly_mod(a, b, p):
    a = a[:]
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b) and a:
        f = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - f * c) % p
        a = _poly_trim(a, p)
    return a


def _squarefree(q, p) -> bool:
    dq = _poly_trim([i * c for i, c in enumerate(q)][1:], p)
    if not dq:
        return len(q) <= 1
    a, b = q[:], dq
    while b:
        a, b = b, _poly_mod(a, b, p)
    return len(a) == 1


@dataclass(frozen=True)
class FiberCount:
    count: int
    trace: int | None
    singular: bool


def count_quartic_fiber(q, p: int) -> FiberCount:
    """Points on the smooth model of u^2 = q(x), q of degree <= 4 (ascending coefficients)."""
    K = field_tower(p)
    q = _poly_trim(list(q), p)
    if not q:
        raise CountingError("zero polynomial")
    xs = np.arange(p, dtype=np.int64)
    vals = np.zeros(p, dtype=np.int64)
    for c in reversed(q):
        vals = (vals * xs + c) % p
    count = p + int(K.chi_table[vals].sum())
    deg = len(q) - 1
    if deg == 4:
        count += 1 + K.chi(q[-1])
    elif deg == 3:
        count += 1
    else:
        count += 2
    smooth = deg >= 3 and _squarefree(q, p)
    return FiberCount(count, p + 1 - count if smooth else None, not smooth)


def _pencil_poly(lines, point, tau, base, p, scale=1):
    """Quartic restricted to the member tau of the pencil through ``point``."""
    b0, b1 = base
    Q = [0, 0, 0]
    if tau is None:
        Q[b0] = 1
    else:
        Q[b0], Q[b1] = tau, 1
    poly = [scale % p]
    for l in lines:
        a = sum(c * x for c, x in zip(l, point)) % p  # coefficient of u
        b = sum(c * x for c, x in zip(l, Q)) % p
        new = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i] = (new[i] + c * b) % p
            new[i + 1] = (new[i + 1] + c * a) % p
        poly = new
    return poly


def fiber_product_trace(split, arr, p: int) -> tuple[int, list]:
    """Sum of a1(t) a2(t) over parameters where both fibres are smooth.

    Diagnostic only: contributions of singular fibres are not folded in;
    their parameters are returned (None stands for infinity).
    """
    forms = split.transformed_forms(arr)
    red = arr.reduce(p)
    first = [[c % p for c in forms[k][:3]] for k in split.first]
    second = [[c % p for c in forms[k][1:]] for k in split.second]
    total, bad = 0, []
    for tau in list(range(p)) + [None]:
        q1 = _pencil_poly(first, (1, 0, 0), tau, (1, 2), p, red.scale)
        q2 = _pencil_poly(second, (0, 0, 1), tau, (0, 1), p)
        if not any(q1) or not any(q2):  # member inside a branch plane
            bad.append(tau)
            continue
        f1, f2 = count_quartic_fiber(q1, p), count_quartic_fiber(q2, p)
        if f1.trace is None or f2.trace is None:
            bad.append(tau)
            continue
        total += f1.trace * f2.trace
    if len(bad) > p:
        raise CountingError("a family is singular for every parameter")
    return total, bad


# ---------------------------------------------------------------------------
# twisted counts

@dataclass(frozen=True)
class TwistedFixedForm:
    p: int
    basis: tuple  # four vectors, each a tuple of (a, b) pairs meaning a + b*alpha
    c: int  # M^2 = c Id
    lam0: tuple[int, int]  # normalization: M x^(p) = lam0 x


def _norm_c_root(K, c):
    """Some lam in F_{p^2} with norm c."""
    p = K.p
    for a in range(p):
        for b in range(p):
            if (a * a - K.d * b * b) % p == c % p:
                return (a, b)
    raise CountingError("norm map not surjective?")


def twisted_fixed_form(M, p: int) -> TwistedFixedForm:
    K = field_tower(p)
    M = [[int(x) % p for x in row] for row in M]
    sq = [[sum(M[i][k] * M[k][j] for k in range(4)) % p for j in range(4)] for i in range(4)]
    c = sq[0][0]
    if c == 0 or any(sq[i][j] != (c if i == j else 0) for i in range(4) for j in range(4)):
        raise CountingError("M^2 is not a nonzero scalar mod p")
    l0, l1 = _norm_c_root(K, c)
    d = K.d
    # unknowns (a, b) in F_p^8 with x = a + alpha b:
    #   M a - l0 a - d l1 b = 0 ;  -M b - l1 a - l0 b = 0
    rows = []
    for i in range(4):
        r = [0] * 8
        for j in range(4):
            r[j] = (M[i][j] - (l0 if i == j else 0)) % p
            r[4 + j] = (-(d * l1 if i == j else 0)) % p
        rows.append(r)
    for i in range(4):
        r = [0] * 8
        for j in range(4):
            r[j] = (-(l1 if i == j else 0)) % p
            r[4 + j] = (-M[i][j] - (l0 if i == j else 0)) % p
        rows.append(r)
    ns = linalg.nullspace(rows, 8, p)
    if len(ns) != 4:
        raise CountingError(f"fixed space has dimension {len(ns)}, expected 4")
    basis = tuple(tuple((v[j] % p, v[4 + j] % p) for j in range(4)) for v in ns)
    return TwistedFixedForm(p, basis, c, (l0, l1))


def _lift_targets(K, cf: int, lam0):
    """u^(p-1) targets lam0^4 s^-p for the two lifts s, -s (s the canonical root of cf)."""
    p = K.p
    s = K.sqrt(K.fp2(cf))
    lam = K.fp2(*lam0) ** 4
    out = []
    for sign in (1, -1):
        ss = s * sign
        out.append(lam * (ss ** p).inverse())
    return out


def _matrix_mod(M, p):
    if hasattr(M, "mod"):
        return M.mod(p)
    return [[int(x) % p for x in row] for row in M]


def _involution_data(arr, M, p):
    """(c_f mod p, M mod p, forms mod p, scale mod p) with f(Mx) = c_f f(x)."""
    rows, scale = _forms_mod(arr, p)
    Mp = _matrix_mod(M, p)
    P = projective_points(p)
    v = octic_values(rows, p, scale)
    w = octic_values(rows, p, scale, points=(P @ np.array(Mp).T) % p)
    nz = np.nonzero(v)[0]
    if not len(nz):
        raise CountingError("octic vanishes on P^3(F_p)")
    cf = int(w[nz[0]]) * pow(int(v[nz[0]]), p - 2, p) % p
    if np.any((w - cf * v) % p):
        raise CountingError("f(Mx) is not a constant multiple of f(x) mod p")
    return cf, Mp, rows, scale


def twisted_fixed_count(arr, M, p: int) -> tuple[int, int]:
    """(N+, N-) for the two lifts of the involution, by descent to P(V)."""
    K = field_tower(p)
    cf, Mp, rows, scale = _involution_data(arr, M, p)
    form = twisted_fixed_form(Mp, p)
    P = projective_points(p)
    d = K.d
    v = (np.full(len(P), scale, dtype=np.int64), np.zeros(len(P), dtype=np.int64))
    for f in rows:
        la = np.array([sum(c * vec[j][0] for j, c in enumerate(f)) % p for vec in form.basis], dtype=np.int64)
        lb = np.array([sum(c * vec[j][1] for j, c in enumerate(f)) % p for vec in form.basis], dtype=np.int64)
        v = qmul(v, ((P @ la) % p, (P @ lb) % p), p, d)
    zero = (v[0] == 0) & (v[1] == 0)
    w = qpow(v, (p - 1) // 2, p, d)
    hits = [(w[0] == t.a) & (w[1] == t.b) & ~zero for t in _lift_targets(K, cf, form.lam0)]
    if np.any(hits[0] & hits[1]):
        raise CountingError("a fibre is fixed by both lifts")
    return tuple(int(zero.sum()) + 2 * int(h.sum()) for h in hits)


def fixed_space_points(form: TwistedFixedForm):
    """All points of P(V) as F_{p^2} pairs (A, B) of shape (#P^3(F_p), 4)."""
    p = form.p
    P = projective_points(p)
    A = (P @ np.array([[c[0] for c in v] for v in form.basis])) % p
    B = (P @ np.array([[c[1] for c in v] for v in form.basis])) % p
    return A, B


def check_fixed_space(M, form: TwistedFixedForm) -> int:
    """Verify M x^(p) = lam0 x on every point of P(V); returns the number of points."""
    p, K = form.p, field_tower(form.p)
    Mp = np.array(_matrix_mod(M, p))
    A, B = fixed_space_points(form)
    ya, yb = (A @ Mp.T) % p, (-(B @ Mp.T)) % p
    lam = (np.full(len(A), form.lam0[0]), np.full(len(A), form.lam0[1]))
    for j in range(4):
        ra, rb = qmul(lam, (A[:, j], B[:, j]), p, K.d)
        if np.any(ra != ya[:, j]) or np.any(rb != yb[:, j]):
            raise CountingError("descent basis is not fixed")
    # distinct projective points: normalize by the first nonzero coordinate
    keys = set()
    for a, b in zip(A.tolist(), B.tolist()):
        k = next(i for i in range(4) if a[i] or b[i])
        inv = K.fp2(a[k], b[k]).inverse()
        keys.add(tuple((K.fp2(x, y) * inv).encoding() for x, y in zip(a, b)))
    return len(keys)


def brute_twisted_count(arr, M, p: int, return_fixed: bool = False):
    """Oracle: scan P^3(F_{p^2}), test fixedness directly, take roots in F_{p^4}."""
    if p > BRUTE_PMAX:
        raise CountingError(f"brute force is limited to p <= {BRUTE_PMAX}")
    K = field_tower(p)
    cf, Mp, rows, scale = _involution_data(arr, M, p)
    d, q = K.d, p * p
    s = K.sqrt(K.fp2(cf))
    lifts = [s, -s]
    elems = np.arange(q, dtype=np.int64)
    EA, EB = elems // p, elems % p  # element index -> (a, b)
    counts = [0, 0]
    fixed = 0
    for lead in range(4):
        free = 3 - lead
        if free:
            grid = np.stack(np.meshgrid(*([elems] * free), indexing="ij"), -1).reshape(-1, free)
        else:
            grid = np.zeros((1, 0), dtype=np.int64)
        n = len(grid)
        xa = np.zeros((n, 4), dtype=np.int64)
        xb = np.zeros((n, 4), dtype=np.int64)
        xa[:, lead] = 1
        for k in range(free):
            xa[:, lead + 1 + k] = EA[grid[:, k]]
            xb[:, lead + 1 + k] = EB[grid[:, k]]
        # y = M x^(p), conjugation negates b
        ya = (xa @ np.array(Mp).T) % p
        yb = (-(xb @ np.array(Mp).T)) % p
        mu = (ya[:, lead], yb[:, lead])
        ok = np.ones(n, dtype=bool)
        for j in range(4):
            rhs = qmul(mu, (xa[:, j], xb[:, j]), p, d)
            ok &= (rhs[0] == ya[:, j]) & (rhs[1] == yb[:, j])
        idx = np.nonzero(ok)[0]
        fixed += len(idx)
        for i in idx:
            x = [K.fp2(int(xa[i, j]), int(xb[i, j])) for j in range(4)]
            val = K.fp2(scale)
            for f in rows:
                val = val * sum((x[j] * c for j, c in enumerate(f)), K.fp2(0))
            if val.is_zero():
                counts[0] += 1
                counts[1] += 1
                continue
            u = K.fp4(val).sqrt()
            m4 = (K.fp2(int(mu[0][i]), int(mu[1][i])) ** 4).inverse()
            for k, sl in enumerate(lifts):
                if K.fp4(m4 * sl ** p) * u.frobenius() == u:
                    counts[k] += 2
    if return_fixed:
        return tuple(counts), fixed
    return tuple(counts)
