import numpy as np
import pytest
from helpers import ARR, DEP, line, params, timetable

from pathinsert.free_intervals import FreeIntervals, segment_free, station_free, transition_free
from pathinsert.generate import random_instance
from pathinsert.model import Margins, Transition
from pathinsert.oracle import free_mask, oracle_free_check


@pytest.fixture
def ab():
    return line(["A", "B"], tracks=("1", "2"))


def test_station_free_all_day(ab):
    tt = timetable(ab, {})
    assert station_free("A", "1", tt, params(ab), (25200, 50400)) == [(25200, 50400)]


def test_station_single_occupant(ab):
    # an occupant standing at A:1 at t = 1000 only
    tt = timetable(ab, {"T": [("A", 1000, 1000, "1"), ("B", 1300, 1300, "1")]})
    assert station_free("A", "1", tt, params(ab), (0, 3600)) == [(0, 820), (1180, 3600)]


def test_station_gap_between_occupants(ab):
    tt = timetable(
        ab,
        {
            "T1": [("A", 1000, 1000, "1"), ("B", 1300, 1300, "1")],
            "T2": [("A", 2000, 2000, "1"), ("B", 2300, 2300, "1")],
        },
    )
    assert station_free("A", "1", tt, params(ab), (0, 3600)) == [(0, 820), (1180, 1820), (2180, 3600)]


def test_station_short_gap_dropped(ab):
    tt = timetable(
        ab,
        {
            "T1": [("A", 1000, 1000, "1"), ("B", 1400, 1400, "1")],
            "T2": [("A", 1300, 1300, "1"), ("B", 1700, 1700, "1")],
        },
    )
    assert station_free("A", "1", tt, params(ab), (0, 3600)) == [(0, 820), (1480, 3600)]


def _transition_fixture(ab):
    tt = timetable(
        ab,
        {
            "T1": [("A", 1000, 1000, "2"), ("B", 1400, 1400, "1")],
            "T2": [("B", 1600, 1600, "1"), ("A", 2000, 2000, "1")],
        },
    )
    tr = Transition("A", "1", "A-B", "1", DEP)
    assert ab.conflicting(tr) >= {Transition("A", "2", "A-B", "1", DEP), Transition("A", "1", "B-A", "2", ARR)}
    return tt, tr


def test_transition_free_no_conflicts(ab):
    tr = Transition("A", "1", "A-B", "1", DEP)
    assert transition_free(tr, ab, timetable(ab, {}), params(ab), (0, 3600)) == [(0, 3600)]


def test_transition_free_mixed_margins(ab):
    tt, tr = _transition_fixture(ab)
    p = params(ab)
    p.delta[("T1", tr)] = Margins(180, 60)
    p.delta[("T2", tr)] = Margins(60, 60)
    window = (0, 3600)
    free = transition_free(tr, ab, tt, p, window)
    assert free == [(0, 820), (1060, 1940), (2060, 3600)]
    mask = free_mask(("transition", tr), ab, tt, p, window)
    assert np.array_equal(mask, _membership(free, window))


def test_transition_free_defaults(ab):
    # T1's departure onto the same segment track is a block conflict (180 both sides);
    # T2 arrives, x departs afterwards: one minute after, three before.
    tt, tr = _transition_fixture(ab)
    free = transition_free(tr, ab, tt, params(ab), (0, 3600))
    assert free == [(0, 820), (1180, 1820), (2060, 3600)]


def test_transition_close_movements_drop_middle(ab):
    tt = timetable(
        ab,
        {
            "T1": [("A", 1000, 1000, "2"), ("B", 1400, 1400, "1")],
            "T2": [("A", 1090, 1090, "2"), ("B", 1490, 1490, "2")],
        },
    )
    tr = Transition("A", "1", "A-B", "1", DEP)
    p = params(ab, delta_default=180, delta_block_default=180)
    assert transition_free(tr, ab, tt, p, (0, 3600)) == [(0, 820), (1270, 3600)]


def test_segment_free_empty(ab):
    assert segment_free("A-B", "1", ab, timetable(ab, {}), params(ab), (0, 3600)) == [((0, 3600), (0, 3600))]


def _segment_fixture(net):
    return timetable(
        net,
        {
            "A": [("A", 1000, 1000, "1"), ("B", 1600, 1600, "1")],
            "B": [("A", 3000, 3000, "2"), ("B", 3500, 3500, "2")],
        },
    )


def test_segment_free_pair(ab):
    pairs = segment_free("A-B", "1", ab, _segment_fixture(ab), params(ab), (0, 7200))
    assert ((1180, 2820), (1780, 3320)) in pairs
    assert pairs == [((0, 820), (0, 1420)), ((1180, 2820), (1780, 3320)), ((3180, 7200), (3680, 7200))]


def test_segment_free_single_block():
    net = line(["A", "B"], tracks=("1", "2"), blocks=1)
    pairs = segment_free("A-B", "1", net, _segment_fixture(net), params(net), (0, 7200))
    assert ((1780, 2820), (1780, 2820)) in pairs
    window = (0, 7200)
    for kind, side in (("segment_entry", 0), ("segment_exit", 1)):
        mask = free_mask((kind, "A-B", "1"), net, _segment_fixture(net), params(net), window)
        assert np.array_equal(mask, _membership([pr[side] for pr in pairs], window))


def test_single_track_opposing_occupant():
    net = line(["A", "B"], single={("A", "B")})
    tt = timetable(net, {"N": [("B", 1000, 1000, "1"), ("A", 1600, 1600, "1")]})
    pairs = segment_free("A-B", "1", net, tt, params(net), (0, 3600))
    assert pairs == [((0, 820), (0, 820)), ((1780, 3600), (1780, 3600))]


def _membership(intervals, window):
    lo, hi = window
    out = np.zeros(hi - lo + 1, dtype=bool)
    for a, b in intervals:
        out[a - lo : b - lo + 1] = True
    return out


def elements(network):
    for s in sorted(network.stations):
        for j in network.stations[s].tracks:
            yield ("station", s, j)
    for tr in sorted(network.transitions):
        yield ("transition", tr)
    for l in sorted(network.segments):
        for k in network.segments[l].tracks:
            yield ("segment_entry", l, k)
            yield ("segment_exit", l, k)


def free_of(free: FreeIntervals, element):
    kind = element[0]
    if kind == "station":
        return free.station(element[1], element[2])
    if kind == "transition":
        return free.transition(element[1])
    pairs = free.segment(element[1], element[2])
    return [pr[0] if kind == "segment_entry" else pr[1] for pr in pairs]


def mismatches(inst, window):
    """Seconds at which free-interval membership and the oracle disagree."""
    free = FreeIntervals(inst.network, inst.timetable, inst.params, window)
    bad = 0
    for el in elements(inst.network):
        mask = free_mask(el, inst.network, inst.timetable, inst.params, window)
        bad += int(np.count_nonzero(mask != _membership(free_of(free, el), window)))
    return bad


@pytest.mark.parametrize("seed", range(10))
def test_free_intervals_match_oracle(seed):
    inst = random_instance(seed, max_trains=8, grid=None, custom_margins=True)
    lo = inst.window[0] + 1800
    assert mismatches(inst, (lo, lo + 7200)) == 0


def test_free_mask_matches_scalar_check():
    inst = random_instance(3, max_trains=6, grid=None, custom_margins=True)
    window = (inst.window[0], inst.window[0] + 3600)
    for el in list(elements(inst.network))[:12]:
        mask = free_mask(el, inst.network, inst.timetable, inst.params, window)
        for t in range(window[0], window[1] + 1, 37):
            assert mask[t - window[0]] == oracle_free_check(el, t, inst.network, inst.timetable, inst.params, window)


def test_margin_boundary(ab):
    tt = timetable(ab, {"T": [("A", 1000, 1200, "1"), ("B", 1500, 1500, "1")]})
    p = params(ab)
    w = (0, 3600)
    assert not oracle_free_check(("station", "A", "1"), 1200 + 179, ab, tt, p, w)
    assert oracle_free_check(("station", "A", "1"), 1200 + 180, ab, tt, p, w)
