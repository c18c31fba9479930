"""Dynamic program over the arc ordering.

Tables map presence times at a location to the latest origin departure that
reaches it. For every station track and stopping pattern two tables are
kept: ``arrival`` (the train has just arrived, or passes) and ``ready`` (the
train may leave now). Transition tables and segment entry tables are kept
per arc so that paths can be read back without per-item pointers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import intervals as iv
from .errors import RequestError
from .free_intervals import FreeIntervals
from .model import PATTERNS, InsertionRequest, Network, ParameterSet, Pattern, Transition, clip_window, pattern_pair
from .routing import ArcOrdering

log = logging.getLogger(__name__)

S, R = Pattern.STOP, Pattern.RUN


@dataclass
class DpTables:
    network: Network
    request: InsertionRequest
    ordering: ArcOrdering
    free: FreeIntervals
    arrival: dict = field(default_factory=dict)  # (station, track, pattern)
    ready: dict = field(default_factory=dict)  # (station, track, pattern)
    transition: dict = field(default_factory=dict)  # (Transition, pattern)
    entry: dict = field(default_factory=dict)  # (segment, track, p1)
    segment: dict = field(default_factory=dict)  # (segment, track, p2), at the segment's end
    run_times: dict = field(default_factory=dict)  # (segment, "RS") -> seconds

    def destination_arrivals(self):
        v = self.request.destination
        st = self.network.stations.get(v)
        if st is None:
            return []
        return iv.union(*(self.arrival.get((v, j, S), []) for j in st.tracks))

    def sizes(self) -> list[tuple[str, str, int, int]]:
        """(kind, location, table items, free intervals) per location."""
        rows = []
        for sid in sorted(self.network.stations):
            for j in self.network.stations[sid].tracks:
                n = sum(len(self.ready.get((sid, j, p), [])) for p in PATTERNS)
                if sid == self.request.destination:
                    n = len(self.arrival.get((sid, j, S), []))
                rows.append(("station", f"{sid}:{j}", n, len(self.free.station(sid, j))))
        for sid in sorted(self.network.segments):
            for k in self.network.segments[sid].tracks:
                n = sum(len(self.segment.get((sid, k, p), [])) for p in PATTERNS)
                rows.append(("segment", f"{sid}:{k}", n, len(self.free.segment(sid, k))))
        for tr in sorted(self.network.transitions):
            n = sum(len(self.transition.get((tr, p), [])) for p in PATTERNS)
            rows.append(("transition", str(tr), n, len(self.free.transition(tr))))
        return rows

    def dump(self) -> str:
        out = []

        def emit(title, items):
            if items:
                out.append(title)
                out.append(iv.format_table(items))

        for (s, j, p), items in sorted(self.arrival.items()):
            emit(f"# arrival {s}:{j} {p.value}", items)
        for (s, j, p), items in sorted(self.ready.items()):
            emit(f"# ready {s}:{j} {p.value}", items)
        for (tr, p), items in sorted(self.transition.items()):
            emit(f"# transition {tr} {p.value}", items)
        for (l, k, p), items in sorted(self.entry.items()):
            emit(f"# entry {l}:{k} {p.value}", items)
        for (l, k, p), items in sorted(self.segment.items()):
            emit(f"# exit {l}:{k} {p.value}", items)
        return "\n".join(out)


def _window_list(bounds, window):
    w = clip_window(bounds, window)
    return [w] if w is not None else []


def init_origin(tables: DpTables) -> bool:
    """Origin tracks: leave at any free instant, pattern S only."""
    u = tables.request.origin
    st = tables.network.stations[u]
    dep_win = _window_list(st.constraints.departure, tables.request.window)
    any_free = False
    for j in st.tracks:
        items = iv.intersect(iv.from_free(tables.free.station(u, j)), dep_win)
        tables.ready[(u, j, S)] = items
        tables.ready[(u, j, R)] = []
        any_free = any_free or bool(items)
    return any_free


def process_segment(tables: DpTables, seg_id: str, params: ParameterSet) -> None:
    net, req, free = tables.network, tables.request, tables.free
    seg = net.segments[seg_id]
    s1, s2 = seg.start, seg.end
    out_patterns = [p for p in PATTERNS if _allowed(req, s2, p)]
    touched = set()
    for k in seg.tracks:
        pairs = free.segment(seg_id, k)
        if not pairs:
            continue
        entries = free.segment_entries(seg_id, k)
        for p1 in PATTERNS:
            parts = []
            for j in net.stations[s1].tracks:
                src = tables.ready.get((s1, j, p1))
                tr = net.departing(s1, j, seg_id, k)
                if not src or tr is None:
                    continue
                xt = iv.intersect(src, free.transition(tr))  # step 1
                tables.transition[(tr, p1)] = xt
                parts.append(xt)
            tables.entry[(seg_id, k, p1)] = iv.intersect(iv.union(*parts), entries)  # step 2
        for p2 in out_patterns:
            shifted = []
            for p1 in PATTERNS:
                ent = tables.entry[(seg_id, k, p1)]
                if ent:
                    d = tables.run_times[(seg_id, pattern_pair(p1, p2))]
                    shifted.append(iv.shift(ent, d, pairs))  # step 3
            exit_items = iv.union(*shifted)
            tables.segment[(seg_id, k, p2)] = exit_items
            if not exit_items:
                continue
            for j in net.stations[s2].tracks:
                tr = net.arriving(s2, j, seg_id, k)
                if tr is None:
                    continue
                xt = iv.intersect(exit_items, free.transition(tr))  # step 4
                tables.transition[(tr, p2)] = xt
                if xt:
                    touched.add((j, p2))
    for j, p2 in sorted(touched):
        _finish_station(tables, s2, j, p2, seg_id)  # step 5


def _allowed(req: InsertionRequest, station, p) -> bool:
    if p is S:
        return req.may_stop(station)
    return station != req.destination


def arrival_contributions(tables: DpTables, station, track, p, before=None):
    """Arrival transition tables into ``(station, track)`` from arcs ranked below ``before``."""
    pos = tables.ordering.index()
    limit = pos[before] if before is not None else len(pos)
    out = []
    for seg in tables.network.in_segments(station):
        if pos.get(seg.id, limit) >= limit:
            continue
        for k in seg.tracks:
            tr = tables.network.arriving(station, track, seg.id, k)
            if tr is not None and (tr, p) in tables.transition:
                out.append((pos[seg.id], seg.id, k, tr))
    return sorted(out)


def station_arrival(tables: DpTables, station, track, p, parts):
    st = tables.network.stations[station]
    arr = iv.intersect(iv.union(*parts), tables.free.station(station, track))
    if st.constraints.arrival is not None:
        arr = iv.intersect(arr, _window_list(st.constraints.arrival, tables.request.window))
    return arr


def station_ready(tables: DpTables, station, track, p, arrival):
    st = tables.network.stations[station]
    if p is S:
        out = iv.extend(arrival, tables.free.station(station, track), st.constraints.min_dwell)
    else:
        out = arrival
    if st.constraints.departure is not None:
        out = iv.intersect(out, _window_list(st.constraints.departure, tables.request.window))
    return out


def _finish_station(tables: DpTables, station, track, p, seg_id):
    parts = []
    for k in tables.network.segments[seg_id].tracks:
        tr = tables.network.arriving(station, track, seg_id, k)
        if tr is not None:
            parts.append(tables.transition.get((tr, p), []))
    arr = station_arrival(tables, station, track, p, parts)
    merged = iv.union(tables.arrival.get((station, track, p), []), arr)
    tables.arrival[(station, track, p)] = merged
    if station == tables.request.destination:
        return
    tables.ready[(station, track, p)] = station_ready(tables, station, track, p, merged)


def run(
    network: Network,
    timetable,
    params: ParameterSet,
    request: InsertionRequest,
    ordering: ArcOrdering,
    free: FreeIntervals | None = None,
) -> DpTables:
    """Fill all tables for the pruned network described by ``ordering``."""
    pruned = network.restrict(ordering.order) if ordering.order else None
    if pruned is None or request.origin not in pruned.stations or request.destination not in pruned.stations:
        raise RequestError(f"no route from {request.origin} to {request.destination} in the network")
    if free is None:
        free = FreeIntervals(network, timetable, params, request.window)
    tables = DpTables(pruned, request, ordering, free)
    for seg_id in ordering.order:
        for p in ("RR", "SR", "RS", "SS"):
            tables.run_times[(seg_id, p)] = params.resolve_run_time(seg_id, p)
    if not init_origin(tables):
        log.info("origin %s has no free capacity in the window", request.origin)
    for seg_id in ordering.order:
        if network.segments[seg_id].start == request.destination:
            continue
        process_segment(tables, seg_id, params)
    return tables
