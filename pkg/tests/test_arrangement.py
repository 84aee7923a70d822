import random
from fractions import Fraction

import pytest

from doubleoctic import linalg
from doubleoctic.arrangement import (INF, ArrangementError, InvolutionMatrix, LinearForm,
                                     check_involution, cross_ratio, cy_admissible,
                                     find_kummer_splits, find_ruled_planes, good_primes,
                                     is_harmonic, kummer_octic, parse_arrangement,
                                     singularity_inventory)
from doubleoctic.catalog import TABLE_ROWS, catalog_ids, load_catalog, lookup

def generic():
    # moment-curve normals: no four planes share a point
    return parse_arrangement("xyzt(x+y+z+t)(x+2y+4z+8t)(x+3y+9z+27t)(x+5y+25z+125t)")


# --- linear algebra -------------------------------------------------------

def test_rank_and_nullspace_over_q_and_fp():
    rows = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert linalg.rank(rows) == 2
    (v,) = linalg.nullspace(rows, 3)
    assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)
    assert linalg.rank([[1, 1], [1, 6]], 5) == 1
    assert linalg.rank([[1, 1], [1, 6]]) == 2


def test_primitive_and_normalize():
    assert linalg.primitive([Fraction(1, 2), Fraction(-3, 4), 0]) == (2, -3, 0)
    assert linalg.primitive([0, -2, 4]) == (0, 1, -2)
    assert linalg.normalize_mod((0, 3, 1), 7) == (0, 1, 5)


# --- parsing ---------------------------------------------------------------

def test_parse_x53():
    arr = lookup("X_53")
    texts = {f.text() for f in arr.forms}
    assert texts == {"x", "y", "z", "t", "x+y", "z+t", "x-y-z-t", "x+y-z+t"}
    assert arr.h11 == 53 and arr.h12 == 1


def test_x4_metadata():
    arr = lookup("X_4")
    assert (arr.h11, arr.wt4_form, arr.wt2_form) == (61, "32k4A1", "32A1")


def test_catalog_contents():
    cat = load_catalog()
    assert len(TABLE_ROWS) == 18
    assert set(TABLE_ROWS) | {"3", "19", "239", "269", "287"} == set(cat)
    assert catalog_ids("rigid") == ["3", "19", "239"]
    assert cat["4c"].scale == 2


@pytest.mark.parametrize("text", ["xyzt(x+y)(y+z)(x-y-z-t)",
                                  "xyzt(x+y)(y+z)(x-y-z-t)(x+y-z-t)(x-t)",
                                  "xyzt(x+y)(2x+2y)(x-y-z-t)(x+y-z-t)",
                                  "xyzt(x+y)(y+z)(x-y-z-t)(x^2+y)"])
def test_parse_rejects(text):
    with pytest.raises(ArrangementError):
        parse_arrangement(text)


def test_normalization():
    f, c = LinearForm.normalized([Fraction(-1, 2), 1, 0, 0])
    assert f.coeffs == (1, -2, 0, 0) and c == Fraction(-1, 2)


# --- inventory -------------------------------------------------------------

def test_generic_inventory():
    inv = generic().inventory
    assert len(inv.double_lines) == 28
    assert not inv.triple_lines and not inv.points
    assert cy_admissible(inv)


def test_x53_fourfold_points():
    coords = {q.coords for q in lookup("53").inventory.fourfold_points}
    assert (0, 0, 0, 1) in coords and (1, 0, 0, 0) in coords


def test_inventory_points_lie_on_their_planes():
    for arr in load_catalog().values():
        inv = arr.inventory
        for q in inv.points:
            assert all(arr.forms[k](q.coords) == 0 for k in q.planes)
            assert all(arr.forms[k](q.coords) != 0 for k in set(range(8)) - q.planes)
        for ln in inv.lines:
            assert linalg.rank([arr.forms[k].coeffs for k in ln.planes]) == 2


def test_154_has_no_triple_point_of_the_two_sums():
    inv = lookup("154").inventory
    # x+y+z and x+y+z-t are planes 4 and 5; they meet in a line, never alone in a point
    assert all(not {4, 5} <= q.planes or len(q.planes) >= 4 for q in inv.points)


def test_every_catalog_row_is_admissible():
    assert all(cy_admissible(a.inventory) for a in load_catalog().values())


def test_not_admissible():
    six = parse_arrangement("xyz(x+y)(x+z)(y+z)(t+x)(t+2y+3z)")
    assert not cy_admissible(six.inventory)
    four_on_line = parse_arrangement("xy(x+y)(x-y)zt(x+y+z+t)(x+2y+3z+5t)")
    assert not cy_admissible(four_on_line.inventory)


def test_inventory_is_reduction_stable():
    arr = lookup("53")
    for p in good_primes(arr, 31):
        red = singularity_inventory(arr.reduce(p))
        assert red.signature() == arr.inventory.signature()


def test_good_primes():
    assert good_primes(lookup("53"), 97)[0] == 5 and len(good_primes(lookup("53"), 97)) == 23
    assert good_primes(lookup("275"), 4) == []
    assert 2 not in good_primes(lookup("275"), 97)


# --- cross ratios ----------------------------------------------------------

def test_cross_ratio_of_the_standard_quadruple():
    # (-1, 0, 1, inf) is harmonic; in this ordering the value is 2
    assert cross_ratio(-1, 0, 1, INF) == 2
    assert is_harmonic(-1, 0, 1, INF)
    assert cross_ratio(0, INF, -1, 1) == -1


def test_cross_ratio_rejects_repeats():
    with pytest.raises(ArrangementError):
        cross_ratio(0, 1, 2, 2)


def test_cross_ratio_mobius_invariance():
    rng = random.Random(1)
    for _ in range(50):
        q = [Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(4)]
        if len(set(q)) < 4:
            continue
        a, b, c, d = (rng.randint(-5, 5) for _ in range(4))
        if a * d - b * c == 0:
            continue

        def m(t):
            den = c * t + d
            return INF if den == 0 else (a * t + b) / den
        assert cross_ratio(*q) == cross_ratio(*map(m, q))


def test_birational_quadruples_have_equal_cross_ratio():
    # roots in t of the last four factors of the normalized 267 and 275 equations
    sympy = pytest.importorskip("sympy")
    y, z = sympy.symbols("y z")
    half, third = sympy.Rational(1, 2), sympy.Rational(1, 3)
    q267 = (0, y - half * z, half * y - z, y - z)
    q275 = (0, half * y, half * z, third * (y + z))
    assert sympy.simplify(cross_ratio(*q267) - cross_ratio(*q275)) == 0


# --- structure finders ----------------------------------------------------

def test_ruled_planes():
    assert "x-z" in {f.text() for f in find_ruled_planes(lookup("4a"))}
    assert "x+y+z-t" in {f.text() for f in find_ruled_planes(lookup("244"))}
    assert find_ruled_planes(generic()) == []


def test_kummer_splits():
    assert len(find_kummer_splits(lookup("13a"))) >= 2
    assert find_kummer_splits(lookup("154")) == []
    assert find_kummer_splits(generic()) == []
    for arr in load_catalog().values():
        F = arr.rows()
        for sp in find_kummer_splits(arr):
            assert linalg.rank([F[k] for k in sp.first]) == 3
            assert linalg.rank([F[k] for k in sp.second]) == 3


# --- involutions ----------------------------------------------------------

def test_involutions_preserve_their_arrangements():
    for key in ("53", "244", "267a", "274"):
        arr = lookup(key)
        M = arr.involutions[0]
        c, perm = check_involution(arr, M)
        assert sorted(perm) == list(range(8))
        assert all(perm[perm[i]] == i for i in range(8))


def test_x53_involution_and_identity():
    arr = lookup("53")
    # (x,y,z,t) -> (y,x,-t,-z)
    assert arr.involutions[0].entries() == [0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, -1, 0]
    ident = InvolutionMatrix.from_entries([int(i % 5 == 0) for i in range(16)])
    assert check_involution(arr, ident) == (1, tuple(range(8)))


def test_x267_involution():
    # (x,y,z,t) -> (t,-z,-y,x)
    M = InvolutionMatrix.from_entries([0, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 0])
    check_involution(lookup("267a"), M)


def test_involution_rejects_non_preserving_map():
    M = InvolutionMatrix.from_entries([0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1])
    with pytest.raises(ArrangementError):
        check_involution(lookup("53"), M)


# --- the Kummer family ----------------------------------------------------

def test_kummer_octic():
    arr = kummer_octic(8, Fraction(1, 9))
    assert arr.h11 == 56 and arr.h12 == 2
    assert kummer_octic(-1, Fraction(1, 9)).h11 == 61
    with pytest.raises(ArrangementError):
        kummer_octic(0, 4)
    with pytest.raises(ArrangementError):
        kummer_octic(8, 2)
    red = kummer_octic(8, 2, p=7)  # 2 = 3^2 mod 7
    assert red.p == 7 and (1, 0, 0, 3) in red.forms
