import random

import pytest
from helpers import line, params, timetable

from pathinsert.documents import dump_network, dump_parameters, dump_timetable
from pathinsert.free_intervals import FreeIntervals
from pathinsert.generate import GenConfig, generate, random_instance
from pathinsert.model import InsertionRequest
from pathinsert.oracle import oracle_free_check, oracle_frontier, oracle_pairs
from pathinsert.paths import expand, pareto
from pathinsert.pipeline import insert
from pathinsert.verify import validate
from test_free_intervals import elements, free_of


def grid_points(points, g):
    return [q for q in expand(points) if q[0] % g == 0 and q[1] % g == 0]


def test_unconstrained_corridor():
    net = line(list("ABC"))
    p = params(net, rr=300)
    req = InsertionRequest("A", "C", (0, 3600))
    got = oracle_frontier(net, timetable(net, {}), p, req, g=60)
    assert [(q.departure, q.arrival) for q in got] == [(d, d + 600) for d in range(0, 3001, 60)]


def test_single_track_meet_gap():
    net = line(["A", "B"], single={("A", "B")})
    tt = timetable(net, {"N": [("B", 960, 960, "1"), ("A", 1560, 1560, "1")]})
    req = InsertionRequest("A", "B", (0, 3600))
    got = {q.arrival for q in oracle_frontier(net, tt, params(net), req, g=60)}
    # exit by 960 - 180, or enter from 1560 + 180 onwards
    assert max(a for a in got if a < 1500) == 780
    assert min(a for a in got if a > 1500) == 1740 + 300


def test_pairs_contain_frontier():
    inst = random_instance(7)
    req = InsertionRequest(inst.origin, inst.destination, inst.window)
    pairs = oracle_pairs(inst.network, inst.timetable, inst.params, req, g=60)
    front = oracle_frontier(inst.network, inst.timetable, inst.params, req, g=60)
    assert pareto(pairs) == [(q.departure, q.arrival) for q in front]


@pytest.mark.parametrize("seed", range(30))
def test_dp_equals_oracle_on_grid(seed):
    inst = random_instance(seed)
    req = InsertionRequest(inst.origin, inst.destination, inst.window)
    report = insert(inst.network, inst.timetable, inst.params, req)
    exact = oracle_frontier(inst.network, inst.timetable, inst.params, req, g=60, ordering=report.ordering)
    assert grid_points(report.frontier, 60) == [(q.departure, q.arrival) for q in exact]


@pytest.mark.parametrize("seed", range(5))
def test_free_check_random_instants(seed):
    inst = random_instance(100 + seed, max_trains=8, grid=None, custom_margins=True)
    window = inst.window
    free = FreeIntervals(inst.network, inst.timetable, inst.params, window)
    rng = random.Random(seed)
    els = list(elements(inst.network))
    for _ in range(300):
        el = rng.choice(els)
        t = rng.randint(*window)
        member = any(lo <= t <= hi for lo, hi in free_of(free, el))
        assert member == oracle_free_check(el, t, inst.network, inst.timetable, inst.params, window)


def test_generator_example_seed1():
    inst = generate(GenConfig(stations=5, trains=4, seed=1, grid=60))
    req = InsertionRequest(inst.origin, inst.destination, inst.window)
    report = insert(inst.network, inst.timetable, inst.params, req)
    exact = oracle_frontier(inst.network, inst.timetable, inst.params, req, g=60, ordering=report.ordering)
    assert grid_points(report.frontier, 60) == [(q.departure, q.arrival) for q in exact]


def test_generator_without_trains():
    inst = generate(GenConfig(stations=5, trains=0, seed=2))
    assert inst.timetable.trains == {}
    req = InsertionRequest(inst.origin, inst.destination, inst.window)
    report = insert(inst.network, inst.timetable, inst.params, req)
    assert len(report.frontier) == 1
    pt = report.frontier[0]
    assert pt.departure == inst.window[0] and pt.slack == inst.window[1] - pt.arrival


def test_generator_deterministic():
    def files(seed):
        inst = generate(GenConfig(stations=8, trains=12, seed=seed, custom_margins=True))
        return dump_network(inst.network), dump_timetable(inst.timetable), dump_parameters(inst.params)

    assert files(3) == files(3)
    assert files(3) != files(4)


@pytest.mark.parametrize("seed", range(10))
def test_generated_timetables_validate(seed):
    cfg = GenConfig(stations=12, trains=20, seed=seed, window=(0, 6 * 3600), grid=None, constraints=True)
    cfg.topology = "diamond" if seed % 3 == 0 else "corridor"
    inst = generate(cfg)
    assert [d for d in validate(inst.network, inst.timetable, inst.params) if "margin" in d.message] == []
