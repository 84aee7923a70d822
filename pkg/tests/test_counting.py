import numpy as np
import pytest

from doubleoctic.arrangement import InvolutionMatrix, find_kummer_splits
from doubleoctic.catalog import lookup
from doubleoctic.counting import (CountingError, affine_chart_count, brute_twisted_count,
                                  check_fixed_space, count_projective_cover, count_quartic_fiber,
                                  fiber_product_trace, projective_points, twisted_fixed_count,
                                  twisted_fixed_form)

X, Y = (1, 0, 0, 0), (0, 1, 0, 0)
IDENTITY = InvolutionMatrix.from_entries([int(i % 5 == 0) for i in range(16)])


@pytest.mark.parametrize("p", [5, 7, 11])
def test_projective_points(p):
    P = projective_points(p)
    assert len(P) == p ** 3 + p ** 2 + p + 1
    lead = [row[np.nonzero(row)[0][0]] for row in P]
    assert all(v == 1 for v in lead)
    assert len({tuple(r) for r in P.tolist()}) == len(P)


def test_pure_power_counts():
    assert count_projective_cover([X] * 8, 5).n_total == 281
    assert count_projective_cover([X] * 4 + [Y] * 4, 5).n_total == 256


@pytest.mark.parametrize("key", ["53", "4c", "267a"])
@pytest.mark.parametrize("p", [5, 7])
def test_cover_count_matches_chart_oracle(key, p):
    arr = lookup(key)
    assert count_projective_cover(arr, p).n_total == affine_chart_count(arr, p)


def test_vanishing_form_rejected():
    with pytest.raises(CountingError):
        count_projective_cover([(5, 0, 0, 0)] + [X] * 7, 5)


def test_cubic_fibre():
    # u^2 = x^3 - x over F_5: 7 affine points + 1 at infinity
    f = count_quartic_fiber([0, -1, 0, 1], 5)
    assert (f.count, f.trace, f.singular) == (8, -2, False)


def test_square_fibre_is_singular():
    f = count_quartic_fiber([1, 0, 2, 0, 1], 7)  # (x^2+1)^2
    assert f.singular and f.trace is None


def test_constant_fibre():
    f = count_quartic_fiber([4], 7)
    assert f.count == 2 * 7 + 2 and f.trace is None


def test_fiber_product_bad_parameters():
    arr = lookup("53")
    for split in find_kummer_splits(arr):
        total, bad = fiber_product_trace(split, arr, 5)
        assert isinstance(total, int)
        assert len(bad) <= 6
    split = find_kummer_splits(arr)[0]
    assert set(fiber_product_trace(split, arr, 5)[1]) == {4, 0, 1, None}


def test_identity_form_is_standard():
    form = twisted_fixed_form(IDENTITY.mod(5), 5)
    assert check_fixed_space(IDENTITY, form) == 156


@pytest.mark.parametrize("key", ["53", "244", "267a", "274"])
@pytest.mark.parametrize("p", [5, 7])
def test_fixed_space_is_full(key, p):
    M = lookup(key).involutions[0]
    form = twisted_fixed_form(M.mod(p), p)
    assert check_fixed_space(M, form) == p ** 3 + p ** 2 + p + 1


def test_non_involution_rejected():
    M = [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    with pytest.raises(CountingError):
        twisted_fixed_form(M, 5)


def test_untwisted_case_reduces_to_plain_count():
    # the second lift is the quadratic twist: only the branch points survive
    forms = [X] * 8
    assert brute_twisted_count(forms, IDENTITY, 5) == (281, 31)
    assert twisted_fixed_count(forms, IDENTITY, 5) == (281, 31)


def test_identity_on_arrangement_gives_plain_count():
    arr = lookup("53")
    plain = count_projective_cover(arr, 7).n_total
    assert twisted_fixed_count(arr, IDENTITY, 7)[0] == plain


@pytest.mark.parametrize("p", [5, 7])
def test_descent_matches_brute_force(p):
    arr = lookup("53")
    M = arr.involutions[0]
    counts, fixed = brute_twisted_count(arr, M, p, return_fixed=True)
    assert counts == twisted_fixed_count(arr, M, p)
    assert fixed == p ** 3 + p ** 2 + p + 1


def test_brute_force_guard():
    arr = lookup("53")
    with pytest.raises(CountingError):
        brute_twisted_count(arr, arr.involutions[0], 17)
