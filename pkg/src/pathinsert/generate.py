"""Seeded synthetic instances.

Corridors alternate single-track and double-track stretches. Existing trains
are laid in greedily, one after the other, in both directions; each waits at
a station whenever its next move would break a margin against the trains
already placed, so the resulting timetable is conflict-free.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, replace

from .errors import RequestError
from .model import (
    Direction,
    Margins,
    Network,
    ParameterSet,
    Segment,
    Station,
    StationConstraints,
    Timetable,
    TrainEvent,
    Transition,
)
from .verify import OccupationIndex, path_conflicts

DAY = 86400


@dataclass
class GenConfig:
    stations: int = 5
    trains: int = 4
    window: tuple[int, int] = (0, 4 * 3600)
    seed: int = 1
    grid: int | None = 60  # align every time to this step; None for arbitrary seconds
    double_share: float = 0.5
    topology: str = "corridor"  # or "diamond"
    stop_share: float = 0.3
    local_share: float = 0.3  # trains running between two random stations instead of end to end
    days: int = 1
    max_wait: int = 1800
    custom_margins: bool = False
    constraints: bool = False

    def check(self):
        if self.stations < 2:
            raise RequestError("need at least two stations")
        if self.trains < 0:
            raise RequestError("train count must be non-negative")
        if self.window[0] >= self.window[1]:
            raise RequestError("empty window")
        if not all(0 <= x <= 1 for x in (self.double_share, self.stop_share, self.local_share)):
            raise RequestError("shares must lie in [0, 1]")
        if self.topology not in ("corridor", "diamond"):
            raise RequestError(f"unknown topology {self.topology!r}")
        if self.topology == "diamond" and self.stations < 4:
            raise RequestError("a diamond needs at least four stations")
        if self.days < 1:
            raise RequestError("need at least one day")


@dataclass
class Instance:
    network: Network
    timetable: Timetable
    params: ParameterSet
    origin: str
    destination: str
    window: tuple[int, int]


def _name(i):
    return f"S{i:02d}"


def _links(cfg: GenConfig, rng):
    """Undirected links (a, b, double) between station indices."""
    n = cfg.stations
    if cfg.topology == "diamond":
        # 0 - 1 - ... - (n - 2) on top, 0 - (n - 1) - (n - 2) below
        top = list(range(n - 1))
        pairs = list(zip(top, top[1:])) + [(0, n - 1), (n - 1, n - 2)]
    else:
        pairs = [(i, i + 1) for i in range(n - 1)]
    out = []
    double = rng.random() < cfg.double_share
    run = 0
    for a, b in pairs:
        if run <= 0:
            double = not double if out else double
            # longer stretches of the more common kind
            share = cfg.double_share if double else 1 - cfg.double_share
            run = rng.randint(1, 1 + round(4 * share))
        out.append((a, b, double))
        run -= 1
    return out


def build_network(cfg: GenConfig, rng) -> tuple[Network, dict[str, int]]:
    links = _links(cfg, rng)
    n = cfg.stations
    tracks = {}
    for i in range(n):
        ends = i in (0, n - 1) or (cfg.topology == "diamond" and i == n - 2)
        tracks[i] = ("1", "2") if ends or rng.random() < 0.6 else ("1",)
    g = cfg.grid or 1
    stations = []
    for i in range(n):
        cons = StationConstraints()
        if cfg.constraints and 0 < i < n - 1 and rng.random() < 0.3:
            cons = StationConstraints(min_dwell=g * rng.randint(1, 3))
        stations.append(Station(_name(i), f"Station {i}", tracks[i], cons))
    segments = []
    base = {}
    for a, b, double in links:
        res = f"L{a:02d}{b:02d}"
        blocks = rng.randint(2, 3) if double else 1
        rr = g * max(1, rng.randint(120, 420) // g)
        for s, e, k in ((a, b, "1"), (b, a, "2" if double else "1")):
            sid = f"{_name(s)}-{_name(e)}"
            segments.append(Segment(sid, _name(s), _name(e), (k,), blocks, res))
            base[sid] = rr
    transitions = []
    for seg in segments:
        for k in seg.tracks:
            for j in tracks[int(seg.start[1:])]:
                transitions.append(Transition(seg.start, j, seg.id, k, Direction.DEPARTING))
            for j in tracks[int(seg.end[1:])]:
                transitions.append(Transition(seg.end, j, seg.id, k, Direction.ARRIVING))
    conflicts = default_conflicts(transitions, {s.id: s for s in segments})
    return Network(stations, segments, transitions, conflicts), base


def default_conflicts(transitions, segments) -> list[tuple[Transition, Transition]]:
    """Pairs at one station sharing the station track or the physical segment track."""
    by_station = {}
    for tr in transitions:
        by_station.setdefault(tr.station, []).append(tr)
    out = []
    for trs in by_station.values():
        for a, b in itertools.combinations(sorted(trs), 2):
            same_track = a.station_track == b.station_track
            same_line = (
                segments[a.segment].resource_id == segments[b.segment].resource_id
                and a.segment_track == b.segment_track
            )
            if same_track or same_line:
                out.append((a, b))
    return out


def build_params(cfg: GenConfig, network: Network, base: dict[str, int], rng) -> ParameterSet:
    g = cfg.grid or 60
    params = ParameterSet()
    for sid, rr in base.items():
        extra = g if rng.random() < 0.5 else 2 * g
        params.run_time[(sid, "RR")] = rr
        params.run_time[(sid, "SR")] = rr + extra
        params.run_time[(sid, "RS")] = rr + g
        params.run_time[(sid, "SS")] = rr + extra + g
    return params


def _adjacency(network: Network):
    adj = {}
    for seg in network.segments.values():
        adj.setdefault(seg.start, []).append(seg)
    for lst in adj.values():
        lst.sort(key=lambda s: s.id)
    return adj


def _route(network: Network, a, b, rng):
    """Random shortest (by hops) station route from a to b."""
    adj = _adjacency(network)
    dist = {a: 0}
    queue = deque([a])
    while queue:
        s = queue.popleft()
        for seg in adj.get(s, []):
            if seg.end not in dist:
                dist[seg.end] = dist[s] + 1
                queue.append(seg.end)
    if b not in dist:
        return None
    # walk back choosing among equally short predecessors
    path = [b]
    while path[-1] != a:
        cur = path[-1]
        preds = sorted(
            seg.start for seg in network.segments.values() if seg.end == cur and dist.get(seg.start) == dist[cur] - 1
        )
        path.append(rng.choice(preds))
    return path[::-1]


def _place_train(network, params, index, tid, route, t0, cfg: GenConfig, rng, stops):
    """Lay one train along ``route`` from ``t0``; returns its events or None."""
    g = cfg.grid or 1
    events = []
    st0 = network.stations[route[0]]
    tracks0 = [j for j in st0.tracks if not path_conflicts(network, params, index, [(route[0], j, t0, t0)], [], [])]
    if not tracks0:
        return None
    arr, track = t0, rng.choice(tracks0)
    entry = None
    for i in range(len(route) - 1):
        s1, s2 = route[i], route[i + 1]
        seg = next(seg for seg in network.segments_between(s1, s2))
        k = seg.tracks[0]
        p1 = "S" if i == 0 or stops[i] else "R"
        dwell = 0 if p1 == "R" or i == 0 else g * rng.randint(1, 2)
        placed = None
        for wait in range(0, cfg.max_wait + 1, cfg.grid or 15):
            dep = arr + dwell + wait
            pat1 = "S" if (p1 == "S" or wait) else "R"
            if pat1 == "R" and dep != arr:
                continue
            p2 = "S" if i + 1 == len(route) - 1 or stops[i + 1] else "R"
            run = params.run_time[(seg.id, pat1 + p2)]
            t2 = dep + run
            if t2 > cfg.window[1] + (cfg.days - 1) * DAY + 4 * 3600:
                return _close(events, s1, arr, track, entry)
            dep_tr = network.departing(s1, track, seg.id, k)
            stay = [(s1, track, arr, dep)]
            moves = [(dep_tr, dep)] + ([(entry, arr)] if entry is not None else [])
            if path_conflicts(network, params, index, stay, moves, [(seg.id, k, dep, t2)]):
                continue
            for j2 in rng.sample(list(network.stations[s2].tracks), len(network.stations[s2].tracks)):
                arr_tr = network.arriving(s2, j2, seg.id, k)
                if not path_conflicts(network, params, index, [(s2, j2, t2, t2)], [(arr_tr, t2)], []):
                    placed = (dep, t2, j2, dep_tr, arr_tr)
                    break
            if placed:
                break
        if placed is None:
            return _close(events, s1, arr, track, entry)
        dep, t2, j2, dep_tr, arr_tr = placed
        events.append(TrainEvent(s1, arr, dep, track, entry, dep_tr))
        arr, track, entry = t2, j2, arr_tr
    events.append(TrainEvent(route[-1], arr, arr, track, entry, None))
    return events


def _close(events, station, arr, track, entry):
    """End a train that cannot go on at the station it has reached."""
    if not events:
        return None
    return events + [TrainEvent(station, arr, arr, track, entry, None)]


def build_timetable(cfg: GenConfig, network: Network, params: ParameterSet, rng) -> Timetable:
    n = cfg.stations
    ends = (_name(0), _name(n - 2 if cfg.topology == "diamond" else n - 1))
    index = OccupationIndex(network)
    trains = {}
    lo, hi = cfg.window
    g = cfg.grid or 1
    span = hi - lo
    per_day = cfg.trains
    period = max(g, (span // max(1, per_day)) // g * g)
    count = 0
    first_day = {}
    for day in range(cfg.days):
        if day and _fits_in_day(first_day):
            # one day's timetable repeated: copies a day apart cannot interact
            for events in first_day.values():
                trains[f"T{count:03d}"] = [
                    replace(ev, arrival=ev.arrival + day * DAY, departure=ev.departure + day * DAY) for ev in events
                ]
                count += 1
            continue
        for m in range(per_day):
            forward = m % 2 == 0
            a, b = ends if forward else ends[::-1]
            if cfg.topology == "corridor" and rng.random() < cfg.local_share:
                # a shorter run between two random stations
                i, j = sorted(rng.sample(range(n), 2))
                a, b = (_name(i), _name(j)) if forward else (_name(j), _name(i))
            route = _route(network, a, b, rng)
            if route is None or len(route) < 2:
                continue
            jitter = rng.randint(0, max(0, period // g - 1)) * g
            if cfg.grid is None:
                jitter += rng.randint(0, 59)
            t0 = lo + day * DAY + m * period + jitter
            stops = [rng.random() < cfg.stop_share for _ in route]
            events = _place_train(network, params, index, f"T{count:03d}", route, t0, cfg, rng, stops)
            if events is None or len(events) < 2:
                continue
            tid = f"T{count:03d}"
            trains[tid] = events
            index.add(tid, events)
            if day == 0:
                first_day[tid] = events
            count += 1
    return Timetable(trains, network)


def _fits_in_day(trains) -> bool:
    """True when every margin around these trains stays clear of the same trains a day later."""
    times = [t for evs in trains.values() for ev in evs for t in (ev.arrival, ev.departure)]
    return not times or max(times) - min(times) + 3600 <= DAY


def _custom_margins(cfg: GenConfig, network: Network, timetable: Timetable, params: ParameterSet, rng):
    g = cfg.grid or 60
    choices = [g, 2 * g, 3 * g, 4 * g]
    for tid, events in sorted(timetable.trains.items()):
        for ev in events:
            if rng.random() < 0.3:
                params.gamma[(tid, ev.station, ev.track)] = Margins(rng.choice(choices), rng.choice(choices))
            if ev.exit_transition is not None and rng.random() < 0.3:
                params.beta[(tid, ev.exit_transition.segment)] = Margins(rng.choice(choices), rng.choice(choices))
            for tr in (ev.entry_transition, ev.exit_transition):
                if tr is None or rng.random() >= 0.2:
                    continue
                for x_tr in sorted(network.conflicting(tr)):
                    if rng.random() < 0.5:
                        params.delta[(tid, x_tr)] = Margins(rng.choice(choices), rng.choice(choices))


def generate(cfg: GenConfig) -> Instance:
    cfg.check()
    rng = random.Random(cfg.seed)
    network, base = build_network(cfg, rng)
    params = build_params(cfg, network, base, rng)
    timetable = build_timetable(cfg, network, params, rng)
    if cfg.custom_margins:
        _custom_margins(cfg, network, timetable, params, rng)
    n = cfg.stations
    dest = _name(n - 2 if cfg.topology == "diamond" else n - 1)
    window = (cfg.window[0], cfg.window[1] + (cfg.days - 1) * DAY)
    return Instance(network, timetable, params, _name(0), dest, window)


def random_instance(seed: int, max_stations=6, max_trains=4, hours=4, g=60, **overrides) -> Instance:
    """Small grid-aligned instance for oracle comparisons."""
    rng = random.Random(seed * 7919 + 17)
    topology = "diamond" if rng.random() < 0.3 else "corridor"
    stations = rng.randint(4 if topology == "diamond" else 2, max_stations)
    cfg = GenConfig(
        stations=stations,
        trains=rng.randint(0, max_trains),
        window=(0, g * (rng.randint(hours * 30, hours * 60) * 60 // g)),
        seed=seed,
        grid=g,
        double_share=rng.random(),
        topology=topology,
        stop_share=rng.random() * 0.5,
        custom_margins=rng.random() < 0.4,
        constraints=rng.random() < 0.3,
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return generate(cfg)
