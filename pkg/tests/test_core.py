"""Cycle records, streams, the generic cycle driver, CSV round-trips."""

import math
import pickle

import numpy as np
import pytest

from regenext.core import (
    AUX_STREAM_OFFSET,
    NEG_INF,
    CycleCapExceeded,
    CycleRecord,
    make_stream,
    read_cycles_csv,
    simulate_cycle,
    write_cycles_csv,
)
from regenext.models import GeometricJump


# --- the sentinel ----------------------------------------------------------

def test_neg_inf_total_order():
    assert NEG_INF < -1e300 and NEG_INF <= NEG_INF and not NEG_INF < NEG_INF
    assert -1e300 > NEG_INF and NEG_INF == NEG_INF
    assert float(NEG_INF) == -math.inf
    assert repr(NEG_INF) == "-inf"


def test_neg_inf_is_a_pickle_stable_singleton():
    assert pickle.loads(pickle.dumps(NEG_INF)) is NEG_INF


# --- records ---------------------------------------------------------------

def test_record_validation():
    rec = CycleRecord(length=3, maxima=(5.0, 2.0, NEG_INF))
    assert rec.maxima[2] is NEG_INF
    with pytest.raises(ValueError):
        CycleRecord(length=0, maxima=(1.0,))
    with pytest.raises(ValueError):
        CycleRecord(length=2, maxima=(1.0, 3.0))  # increasing
    with pytest.raises(ValueError):
        CycleRecord(length=1, maxima=(1.0, 0.5))  # finite past the length


def test_record_array_and_from_floats():
    rec = CycleRecord.from_floats(2, [4.0, 1.0, -math.inf])
    arr = rec.maxima_array()
    assert arr.dtype == np.float64
    assert arr[0] == 4.0 and np.isneginf(arr[2])
    assert rec.maxima[2] is NEG_INF


# --- streams ---------------------------------------------------------------

def test_streams_reproducible_and_disjoint():
    a1, a2 = make_stream(7, 0), make_stream(7, 0)
    b = make_stream(7, 1)
    x1, x2, y = a1.random(4), a2.random(4), b.random(4)
    np.testing.assert_array_equal(x1, x2)
    assert not np.array_equal(x1, y)
    # the auxiliary offset is far outside any replica range
    assert AUX_STREAM_OFFSET == 2**32


# --- generic driver --------------------------------------------------------

def test_simulate_cycle_matches_iterator_by_hand():
    model = GeometricJump(p=0.5)
    rng = make_stream(3, 0)
    rec = simulate_cycle(model, 3, make_stream(3, 0))
    states = list(model.cycle_steps(rng))
    assert rec.length == len(states)
    top = sorted(states, reverse=True)[:3]
    top += [NEG_INF] * (3 - len(top))
    assert all(
        (a is NEG_INF and b is NEG_INF) or a == b
        for a, b in zip(rec.maxima, top)
    )


def test_simulate_cycle_cap():
    with pytest.raises(CycleCapExceeded):
        simulate_cycle(GeometricJump(p=1e-9), 1, make_stream(0, 0), cap=10)


def test_geometric_cycle_identity_length_is_peak_plus_one():
    model = GeometricJump(p=0.4)
    rng = make_stream(11, 0)
    for _ in range(200):
        rec = simulate_cycle(model, 2, rng)
        assert rec.length == int(rec.maxima[0]) + 1


# --- CSV round-trip --------------------------------------------------------

def test_cycles_csv_round_trip(tmp_path):
    recs = [
        CycleRecord(length=4, maxima=(7.5, 3.0, 1.0)),
        CycleRecord(length=1, maxima=(0.0, NEG_INF, NEG_INF)),
    ]
    path = tmp_path / "cycles.csv"
    write_cycles_csv(recs, path)
    text = path.read_text()
    assert text.splitlines()[0] == "length,zeta1,zeta2,zeta3"
    assert "-inf" in text
    back = read_cycles_csv(path)
    assert back == recs
    assert back[1].maxima[1] is NEG_INF
