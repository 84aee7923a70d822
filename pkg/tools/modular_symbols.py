"""Rational newforms of weight k on Gamma0(N) from Manin symbols.

Standalone generator for the shipped coefficient tables under
``src/doubleoctic/data/forms``.  Not imported by the library.

Conventions: Manin symbols [X^i Y^(k-2-i), (c:d)] with right action
(aX+bY)^i (cX+dY)^(k-2-i), (c:d)g = (ca+dc', cb+dd').  Relations
x + xS, x - sign*xI, x + xT + xT^2.  Hecke operators use Heilbronn
matrices.  Linear algebra is done modulo a 31-bit prime; eigenvalues
are lifted to the symmetric range, which is safe because they are
integers bounded by 2p^((k-1)/2).

Usage:
    python tools/modular_symbols.py 96 4                 # list newforms
    python tools/modular_symbols.py 96 4 --label B1 --match 5:2,7:-12 --out FILE
"""
from __future__ import annotations

import argparse
import math
from math import comb, gcd

MOD = 2147483629


def primes_upto(n):
    return [q for q in range(2, n + 1) if all(q % r for r in range(2, int(q ** 0.5) + 1))]


def signed(x):
    x %= MOD
    return x - MOD if x > MOD // 2 else x


def p1_table(N):
    """Map every pair (c, d) mod N with gcd(c, d, N) = 1 to a P^1(Z/N) index."""
    units = [u for u in range(1, N) if gcd(u, N) == 1] or [1]
    reps, index = [], {}
    for c in range(N):
        for d in range(N):
            if gcd(gcd(c, d), N) != 1 or (c, d) in index:
                continue
            orbit = {((u * c) % N, (u * d) % N) for u in units}
            k = len(reps)
            reps.append(min(orbit))
            for pair in orbit:
                index[pair] = k
    return reps, index


def heilbronn(p):
    mats = [(1, 0, 0, p)]
    for r in range(-(p // 2), p // 2 + 1):
        x1, x2, y1, y2, a, b = p, -r, 0, 1, -p, r
        mats.append((x1, x2, y1, y2))
        while b != 0:
            q = a / b
            q = int(math.floor(q + 0.5)) if q >= 0 else -int(math.floor(-q + 0.5))
            a, b = -b, a - b * q
            x1, x2 = x2, q * x2 - x1
            y1, y2 = y2, q * y2 - y1
            mats.append((x1, x2, y1, y2))
    return mats


def kernel(rows, n):
    rows = [r[:] for r in rows]
    pivots, r = [], 0
    for c in range(n):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], MOD - 2, MOD)
        rows[r] = [x * inv % MOD for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % MOD for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    rows = rows[:r]
    basis = []
    for fc in (c for c in range(n) if c not in pivots):
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-rows[i][fc]) % MOD
        basis.append(v)
    return basis, rows


class ManinSymbols:
    def __init__(self, N, k, sign=1):
        self.N, self.k = N, k
        self.reps, self.index = p1_table(N)
        self.n = len(self.reps)
        self._present(sign)

    def sid(self, i, c, d):
        return i * self.n + self.index[(c % self.N, d % self.N)]

    def act(self, g, i, c, d):
        a, b, cc, dd = g
        w = self.k - 2
        poly = [0] * (w + 1)
        for s1 in range(i + 1):
            x = comb(i, s1) * a ** s1 * b ** (i - s1)
            if not x:
                continue
            for s2 in range(w - i + 1):
                y = comb(w - i, s2) * cc ** s2 * dd ** (w - i - s2)
                if y:
                    poly[s1 + s2] += x * y
        u, v = c * a + d * cc, c * b + d * dd
        out = {}
        for e, co in enumerate(poly):
            if co:
                s = self.sid(e, u, v)
                out[s] = out.get(s, 0) + co
        return out

    def _present(self, sign):
        rels = []
        for i in range(self.k - 1):
            for c, d in self.reps:
                s = self.sid(i, c, d)
                r = self.act((0, -1, 1, 0), i, c, d)
                r[s] = r.get(s, 0) + 1
                rels.append(r)
                r = {kk: -sign * v for kk, v in self.act((-1, 0, 0, 1), i, c, d).items()}
                r[s] = r.get(s, 0) + 1
                rels.append(r)
                r = {s: 1}
                for g in ((0, -1, 1, -1), (-1, 1, -1, 0)):
                    for kk, v in self.act(g, i, c, d).items():
                        r[kk] = r.get(kk, 0) + v
                rels.append(r)
        piv = {}
        for r in rels:
            r = {kk: v % MOD for kk, v in r.items() if v % MOD}
            while r:
                col = max(r)
                if col not in piv:
                    inv = pow(r[col], MOD - 2, MOD)
                    piv[col] = {kk: v * inv % MOD for kk, v in r.items()}
                    break
                f, pr = r[col], piv[col]
                for kk, v in pr.items():
                    r[kk] = (r.get(kk, 0) - f * v) % MOD
                    if not r[kk]:
                        del r[kk]
        total = (self.k - 1) * self.n
        self.free = [s for s in range(total) if s not in piv]
        fidx = {s: j for j, s in enumerate(self.free)}
        self.red = {}
        for col in sorted(piv):
            vec = {}
            for kk, v in piv[col].items():
                if kk == col:
                    continue
                src = {fidx[kk]: 1} if kk in fidx else self.red[kk]
                for j, x in src.items():
                    vec[j] = (vec.get(j, 0) - v * x) % MOD
            self.red[col] = {j: x for j, x in vec.items() if x}
        for s in self.free:
            self.red[s] = {fidx[s]: 1}
        self.dim = len(self.free)

    def hecke_column(self, p, j, mats=None):
        i, r = divmod(self.free[j], self.n)
        c, d = self.reps[r]
        acc = {}
        for h in mats or heilbronn(p):
            for kk, v in self.act(h, i, c, d).items():
                acc[kk] = acc.get(kk, 0) + v
        out = {}
        for s, co in acc.items():
            for jj, x in self.red[s].items():
                out[jj] = (out.get(jj, 0) + co * x) % MOD
        return out

    def hecke_transpose(self, p):
        mats = heilbronn(p)
        T = [[0] * self.dim for _ in range(self.dim)]
        for j in range(self.dim):
            for i, x in self.hecke_column(p, j, mats).items():
                T[j][i] = x
        return T


def rational_newforms(N, k, nsplit=4, pmax=97):
    """Hecke systems with one-dimensional joint eigenspace and cuspidal size."""
    M = ManinSymbols(N, k)
    ps = [p for p in primes_upto(300) if p >= 5 and N % p][:nsplit]
    T = {p: M.hecke_transpose(p) for p in ps}
    found = []

    def split(level, rows, lams):
        p = ps[level]
        bound = int(2 * p ** ((k - 1) / 2))
        for lam in range(-bound, bound + 1):
            A = [[(T[p][i][j] - (lam if i == j else 0)) % MOD for j in range(M.dim)]
                 for i in range(M.dim)]
            K, reduced = kernel(rows + A, M.dim)
            if not K:
                continue
            if len(K) == 1:
                found.append(K[0])
            elif level + 1 < len(ps):
                split(level + 1, reduced, lams + [lam])

    split(0, [], [])
    forms = []
    for w in found:
        j = next(i for i, x in enumerate(w) if x)
        winv = pow(w[j], MOD - 2, MOD)
        ap = {}
        for p in primes_upto(pmax):
            if N % p == 0:
                continue
            col = M.hecke_column(p, j)
            ap[p] = signed(sum(w[i] * x for i, x in col.items()) * winv)
        if all(abs(v) <= 2 * p ** ((k - 1) / 2) for p, v in ap.items()):
            forms.append(ap)
    return forms


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("level", type=int)
    ap.add_argument("weight", type=int)
    ap.add_argument("--pmax", type=int, default=97)
    ap.add_argument("--label")
    ap.add_argument("--match", help="comma list p:a_p selecting one newform")
    ap.add_argument("--out")
    args = ap.parse_args()
    forms = rational_newforms(args.level, args.weight, pmax=args.pmax)
    if not args.match:
        for f in forms:
            print(args.level, args.weight, [f[p] for p in sorted(f)])
        return
    want = dict(tuple(map(int, kv.split(":"))) for kv in args.match.split(","))
    hits = [f for f in forms if all(f[p] == v for p, v in want.items())]
    if len(hits) != 1:
        raise SystemExit(f"{len(hits)} newforms match {want}")
    lines = [f"# level={args.level} weight={args.weight} label={args.label} source=ShippedTable"]
    lines += [f"{p} {v}" for p, v in sorted(hits[0].items())]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")


if __name__ == "__main__":
    main()
