import random

import numpy as np
import pytest

from doubleoctic.fields import field_tower, is_prime, primes_between, qmul, qnorm, qpow

PRIMES = [5, 7, 11, 13, 31, 97]


def test_primes():
    assert primes_between(5, 30) == [5, 7, 11, 13, 17, 19, 23, 29]
    assert not is_prime(1) and is_prime(2) and not is_prime(91)


@pytest.mark.parametrize("bad", [2, 3, 9, 1])
def test_tower_rejects_small_or_composite(bad):
    with pytest.raises(ValueError):
        field_tower(bad)


def test_sqrt_in_f7():
    K = field_tower(7)
    assert K.sqrt(2) == 3
    assert K.sqrt(3) is None
    assert K.sqrt(0) == 0


@pytest.mark.parametrize("p", PRIMES)
def test_character_sums_vanish(p):
    K = field_tower(p)
    assert sum(K.chi(x) for x in range(p)) == 0
    assert sum(K.chi(K.fp2(a, b)) for a in range(p) for b in range(p)) == 0


@pytest.mark.parametrize("p", PRIMES)
def test_table_agrees_with_euler(p):
    K = field_tower(p)
    assert all(K.chi(x) == K.chi_euler(x) for x in range(p))


@pytest.mark.parametrize("p", PRIMES)
def test_frobenius_is_an_automorphism(p):
    K = field_tower(p)
    rng = random.Random(p)
    for _ in range(40):
        x = K.fp2(rng.randrange(p), rng.randrange(p))
        y = K.fp2(rng.randrange(p), rng.randrange(p))
        assert (x * y).frobenius() == x.frobenius() * y.frobenius()
        assert (x + y).frobenius() == x.frobenius() + y.frobenius()
        assert x.frobenius().frobenius() == x
        assert x ** p == x.frobenius()
        u = K.fp4(x, y)
        assert u.frobenius() == u ** p


@pytest.mark.parametrize("p", [5, 7, 13])
def test_square_roots_everywhere(p):
    K = field_tower(p)
    for a in range(p):
        for b in range(p):
            x = K.fp2(a, b)
            r = x.sqrt()
            if r is None:
                assert K.chi(x) == -1
            else:
                assert r * r == x
            s = K.fp4(x).sqrt()
            assert s is not None and s * s == K.fp4(x)


@pytest.mark.parametrize("p", [7, 11])
def test_inverse_and_norm(p):
    K = field_tower(p)
    for a in range(p):
        for b in range(p):
            x = K.fp2(a, b)
            if x.is_zero():
                continue
            assert x * x.inverse() == K.fp2(1)
            assert x.norm() == (x * x.frobenius()).encoding()[0]


def test_array_kernels_match_scalars():
    p = 13
    K = field_tower(p)
    rng = np.random.default_rng(0)
    A, B, C, D = (rng.integers(0, p, 50) for _ in range(4))
    prod = qmul((A, B), (C, D), p, K.d)
    cube = qpow((A, B), 3, p, K.d)
    nrm = qnorm((A, B), p, K.d)
    for i in range(50):
        x, y = K.fp2(int(A[i]), int(B[i])), K.fp2(int(C[i]), int(D[i]))
        assert (x * y).encoding() == (prod[0][i], prod[1][i])
        assert (x ** 3).encoding() == (cube[0][i], cube[1][i])
        assert x.norm() == nrm[i]
