import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openspace import (
    BinaryMask,
    ChangeMap,
    DatedMask,
    ImageMeta,
    change_series,
    despeckle_changes,
    diff_masks,
    summarize,
)

D1 = dt.date(2003, 2, 23)
D2 = dt.date(2006, 2, 18)
D3 = dt.date(2008, 1, 11)


def dated(bits, date):
    return DatedMask(ImageMeta(date), BinaryMask(np.asarray(bits, dtype=bool)))


def random_pair(seed, shape=(32, 32)):
    r = np.random.default_rng(seed)
    return r.random(shape) < 0.5, r.random(shape) < 0.5


# ---------------------------------------------------------------------------
# diff


def test_diff_identical_masks():
    bits = np.eye(6, dtype=bool)
    cm = diff_masks(dated(bits, D1), dated(bits, D2))
    assert not cm.gained.bits.any()
    assert not cm.lost.bits.any()
    assert np.array_equal(cm.unchanged.bits, bits)


def test_diff_all_lost():
    ones = np.ones((4, 4), dtype=bool)
    zeros = np.zeros((4, 4), dtype=bool)
    cm = diff_masks(dated(ones, D1), dated(zeros, D2))
    assert cm.lost.bits.all()
    assert not cm.gained.bits.any()
    assert not cm.unchanged.bits.any()


def test_diff_matches_truth_table():
    a, b = random_pair(0)
    cm = diff_masks(dated(a, D1), dated(b, D2))
    for y in range(a.shape[0]):
        for x in range(a.shape[1]):
            assert cm.lost.bits[y, x] == (a[y, x] and not b[y, x])
            assert cm.gained.bits[y, x] == (not a[y, x] and b[y, x])
            assert cm.unchanged.bits[y, x] == (a[y, x] and b[y, x])


def test_diff_dimension_mismatch():
    with pytest.raises(ValueError):
        diff_masks(dated(np.ones((2, 2)), D1), dated(np.ones((3, 3)), D2))


def test_diff_requires_increasing_dates():
    bits = np.ones((2, 2), dtype=bool)
    with pytest.raises(ValueError):
        diff_masks(dated(bits, D2), dated(bits, D1))
    with pytest.raises(ValueError):
        diff_masks(dated(bits, D1), dated(bits, D1))


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_diff_partition_and_antisymmetry(seed):
    a, b = random_pair(seed, shape=(12, 12))
    cm = diff_masks(dated(a, D1), dated(b, D2))
    # partition: each pixel in exactly one of gained/lost/unchanged/neither
    counts = (
        cm.gained.bits.astype(int) + cm.lost.bits.astype(int) + cm.unchanged.bits.astype(int)
    )
    assert (counts <= 1).all()
    assert ((counts == 0) == (~a & ~b)).all()
    # antisymmetry: swapping inputs swaps gained and lost
    swapped = diff_masks(dated(b, D1), dated(a, D2))
    assert np.array_equal(swapped.gained.bits, cm.lost.bits)
    assert np.array_equal(swapped.lost.bits, cm.gained.bits)
    assert np.array_equal(swapped.unchanged.bits, cm.unchanged.bits)


def test_change_map_rejects_overlapping_masks():
    ones = BinaryMask(np.ones((2, 2), dtype=bool))
    zeros = BinaryMask(np.zeros((2, 2), dtype=bool))
    with pytest.raises(ValueError):
        ChangeMap(gained=ones, lost=ones, unchanged=zeros, earlier=D1, later=D2)


# ---------------------------------------------------------------------------
# summary


def test_summary_identical_masks():
    bits = np.zeros((10, 10), dtype=bool)
    bits[:5, :] = True  # area 50
    cs = summarize(diff_masks(dated(bits, D1), dated(bits, D2)))
    assert cs.earlier_area == cs.later_area == 50
    assert cs.net_change == 0
    assert cs.percent_change == 0.0
    assert cs.percent_defined


def test_summary_worked_example():
    # earlier 100 px, later 80 px, 70 unchanged -> lost 30, gained 10,
    # net -20, percent -20.
    earlier = np.zeros((10, 20), dtype=bool)
    earlier[:5, :] = True  # rows 0-4: 100 px
    later = np.zeros((10, 20), dtype=bool)
    later[:5, :14] = True  # 70 px overlap
    later[6, :10] = True  # 10 px gained
    cs = summarize(diff_masks(dated(earlier, D1), dated(later, D2)))
    assert (cs.earlier_area, cs.later_area) == (100, 80)
    assert (cs.lost_area, cs.gained_area, cs.unchanged_area) == (30, 10, 70)
    assert cs.net_change == -20
    assert cs.percent_change == -20.0


def test_summary_undefined_percent_for_empty_earlier():
    earlier = np.zeros((3, 3), dtype=bool)
    later = np.zeros((3, 3), dtype=bool)
    later[0, :] = True
    cs = summarize(diff_masks(dated(earlier, D1), dated(later, D2)))
    assert cs.percent_change == 0.0
    assert not cs.percent_defined
    assert cs.later_area == 3


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_summary_conservation_identities(seed):
    a, b = random_pair(seed, shape=(10, 10))
    cs = summarize(diff_masks(dated(a, D1), dated(b, D2)))
    assert cs.earlier_area == cs.lost_area + cs.unchanged_area
    assert cs.later_area == cs.gained_area + cs.unchanged_area
    assert cs.net_change == cs.later_area - cs.earlier_area
    assert cs.earlier_area == a.sum()
    assert cs.later_area == b.sum()


# ---------------------------------------------------------------------------
# despeckle


def test_despeckle_drops_small_blobs():
    earlier = np.zeros((12, 12), dtype=bool)
    earlier[2:8, 2:8] = True
    later = earlier.copy()
    later[10, 10] = True  # 1-px gained speckle
    later[2:8, 2:5] = False  # 18-px lost block
    cm = diff_masks(dated(earlier, D1), dated(later, D2))
    pruned = despeckle_changes(cm, min_blob=4)
    assert not pruned.gained.bits.any()
    assert pruned.lost.bits.sum() == 18
    cs = summarize(pruned)
    assert cs.earlier_area == cs.lost_area + cs.unchanged_area
    assert cs.later_area == cs.gained_area + cs.unchanged_area


def test_despeckle_zero_is_identity():
    a, b = random_pair(1)
    cm = diff_masks(dated(a, D1), dated(b, D2))
    assert despeckle_changes(cm, 0) is cm


# ---------------------------------------------------------------------------
# series


def test_series_three_dates_emits_paper_pattern():
    bits = np.ones((4, 4), dtype=bool)
    maps = change_series([dated(bits, D3), dated(bits, D1), dated(bits, D2)])
    assert [(m.earlier, m.later) for m in maps] == [(D1, D2), (D2, D3), (D1, D3)]


def test_series_single_mask_empty():
    assert change_series([dated(np.ones((2, 2)), D1)]) == []


def test_series_two_masks_single_pair():
    bits = np.ones((2, 2), dtype=bool)
    maps = change_series([dated(bits, D2), dated(bits, D1)])
    assert [(m.earlier, m.later) for m in maps] == [(D1, D2)]


def test_series_pair_count_is_n_for_three_plus():
    bits = np.ones((2, 2), dtype=bool)
    dates = [dt.date(2000 + i, 1, 1) for i in range(5)]
    maps = change_series([dated(bits, d) for d in dates])
    assert len(maps) == 5
    assert (maps[-1].earlier, maps[-1].later) == (dates[0], dates[-1])


def test_series_duplicate_dates_error():
    bits = np.ones((2, 2), dtype=bool)
    with pytest.raises(ValueError):
        change_series([dated(bits, D1), dated(bits, D1)])


def test_series_dimension_mismatch_error():
    with pytest.raises(ValueError):
        change_series([dated(np.ones((2, 2)), D1), dated(np.ones((3, 3)), D2)])


def test_series_empty_error():
    with pytest.raises(ValueError):
        change_series([])
