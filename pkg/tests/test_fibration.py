from fractions import Fraction

import pytest

from doubleoctic.arrangement import cross_ratio, is_harmonic
from doubleoctic.catalog import load_catalog, lookup
from doubleoctic.fibration import (INF, FiberConfiguration, FibrationError, KodairaType,
                                   QuarticFibration, RationalMap, align_rows,
                                   base_change_configuration, classify_quartic_fibration,
                                   fiber_table_json, fiber_table_text, generic_fiber_picard,
                                   isogeny_swap, transport)
from reference_tables import (GENERAL, KUMMER_TABLES, PULLBACK_8, RIGID_ROWS, SURFACE_DATA, SURFACES,
                              computed_rows, table_configurations, unmatched_tables)

def classify(name):
    lines, point = SURFACE_DATA[name]
    return classify_quartic_fibration(QuarticFibration(lines, point))


@pytest.mark.parametrize("name", sorted(SURFACES))
def test_six_configurations(name):
    shape, rho = SURFACES[name]
    cfg = classify(name)
    assert cfg.shape() == tuple(sorted(shape))
    assert cfg.euler() == 12
    assert generic_fiber_picard(cfg) == rho


def test_picard_numbers_in_table_order():
    assert [generic_fiber_picard(classify(n)) for n in sorted(SURFACES)] == [1, 1, 1, 2, 2, 3]


def test_s3_parameters_are_harmonic():
    pts = classify("S3").points()
    assert is_harmonic(*pts)


def test_s3_in_standard_coordinates():
    cfg = FiberConfiguration.of({"-1": "I2", "0": "I4", "1": "I2", "inf": "I4"})
    assert generic_fiber_picard(cfg) == 1
    assert cross_ratio(0, INF, -1, 1) == -1


def test_concurrent_lines_rejected():
    with pytest.raises(FibrationError):
        QuarticFibration(((1, 0, 0), (0, 1, 0), (1, 1, 0), (1, -1, 0)), (0, 0, 1))


def test_pencil_point_on_double_point_rejected():
    with pytest.raises(FibrationError):
        classify_quartic_fibration(QuarticFibration(GENERAL, (0, 0, 1)))


# --- base change and the isogeny -------------------------------------------------

S3 = FiberConfiguration.of({"-1": "I2", "0": "I4", "1": "I2", "inf": "I4"})
S3_PRIME = FiberConfiguration.of({"-1": "I4", "0": "I2", "1": "I4", "inf": "I2"})


def test_s3_pullback_by_involution():
    phi = RationalMap.mobius(1, -1, 1, 1)  # t -> (t-1)/(t+1)
    assert base_change_configuration(S3, phi) == S3_PRIME


def test_arrangement_8_pullback():
    phi = RationalMap.mobius(1, 1, 1, -1).squared()  # t -> ((t+1)/(t-1))^2
    row1, row2 = table_configurations(KUMMER_TABLES["8"][0])
    want1, want2 = table_configurations(PULLBACK_8)
    got1 = base_change_configuration(row1, phi)
    got2 = base_change_configuration(row2, phi)
    assert got1.with_markers(want1.points()) == want1
    assert got2.with_markers(want2.points()) == want2


def test_identity_base_change():
    assert base_change_configuration(S3, RationalMap.identity()) == S3


def test_base_change_degree_check():
    cubic = RationalMap((Fraction(0),) * 3 + (Fraction(1),), (Fraction(1),))
    with pytest.raises(FibrationError):
        base_change_configuration(S3, cubic)


def test_isogeny_swap():
    assert isogeny_swap(S3) == S3_PRIME
    assert isogeny_swap(isogeny_swap(S3)) == S3
    with pytest.raises(FibrationError):
        isogeny_swap(FiberConfiguration.of({"-1": "I2", "0": "I2", "inf": "D6*"}))


def test_doubling_rules():
    K = KodairaType
    assert [k.doubled() for k in (K.I0, K.I2, K.I4, K.D4, K.D6)] == [K.I0, K.I4, K.I8, K.I0, K.I4]
    with pytest.raises(FibrationError):
        K.I8.doubled()


# --- catalog splits --------------------------------------------------------------

def test_every_split_is_a_rational_elliptic_surface():
    for arr in load_catalog().values():
        for pair in computed_rows(arr):
            assert all(c.euler() == 12 for c in pair)


@pytest.mark.parametrize("key", ["4a", "4b", "4c", "8", "13a", "13b", "13c", "21", "53", "244",
                                 "249a", "249b", "267a", "267b", "267c", "275"])
def test_kummer_tables_reproduced(key):
    assert unmatched_tables(lookup(key)) == []


def test_known_table_mismatches():
    # 274: the published table has a misprint; 269: the first table has no matching split
    assert unmatched_tables(lookup("274")) == [0]
    assert unmatched_tables(lookup("269")) == [0]


def test_154_has_no_splits():
    assert computed_rows(lookup("154")) == []


def test_rigid_rows():
    got = {}
    for key, (r1, r2) in RIGID_ROWS.items():
        want = (sorted(t for t in r1 if t != "I0"), sorted(t for t in r2 if t != "I0"))
        shapes = [tuple(sorted(c.shape()) for c in pair) for pair in computed_rows(lookup(key))]
        got[key] = any(s in (want, want[::-1]) for s in shapes)
    assert got == {"3": False, "19": True, "239": True}


def test_alignment_and_transport():
    rows = computed_rows(lookup("53"))[0]
    target = table_configurations(KUMMER_TABLES["53"][0])
    m, swapped = align_rows(rows, target)
    moved = [transport(r.singular(), m) for r in (rows[::-1] if swapped else rows)]
    for got, want in zip(moved, target):
        assert got == want.singular()


def test_table_rendering():
    cfg = FiberConfiguration.of({"-1": "I2", "0": "D6*", "inf": "I2"})
    text = fiber_table_text([cfg, S3], ["a", "b"])
    assert "D6*" in text and "∞" in text
    assert '"type": "D6*"' in fiber_table_json([cfg])
