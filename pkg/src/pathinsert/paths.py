"""Non-dominated departure/arrival pairs, path reconstruction and checking."""

from __future__ import annotations

from dataclasses import dataclass

from . import intervals as iv
from .dp import DpTables, arrival_contributions, station_arrival
from .errors import DocumentError, InvariantViolation
from .model import Pattern, pattern_pair

S, R = Pattern.STOP, Pattern.RUN


@dataclass(frozen=True, order=True)
class FrontierPoint:
    departure: int
    arrival: int
    slack: int = 0

    def family(self):
        """All (departure, arrival) pairs of the parallel family."""
        return [(self.departure + i, self.arrival + i) for i in range(self.slack + 1)]


@dataclass
class StationVisit:
    station: str
    arrival: int
    departure: int
    track: str
    pattern: Pattern


@dataclass
class SegmentRun:
    segment: str
    track: str
    entry: int
    exit: int


@dataclass
class TrainPath:
    visits: list[StationVisit]
    runs: list[SegmentRun]
    summary: FrontierPoint

    @property
    def stations(self):
        return [v.station for v in self.visits]


def frontier_of(items) -> list[FrontierPoint]:
    """Record points of a canonical list: arrivals whose departure beats every earlier one."""
    out = []
    best = None
    for it in items:
        if it.slope == 0:
            if best is None or it.dep_lo > best:
                out.append(FrontierPoint(it.dep_lo, it.lo, 0))
                best = it.dep_lo
            continue
        t0 = it.lo if best is None else it.lo + max(0, best + 1 - it.dep_lo)
        if t0 <= it.hi:
            out.append(FrontierPoint(it.dep(t0), t0, it.hi - t0))
            best = it.dep_hi
    return out


def frontier(tables: DpTables) -> list[FrontierPoint]:
    return frontier_of(tables.destination_arrivals())


def dominates(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] >= b[0] and a[1] <= b[1] and (a[0] > b[0] or a[1] < b[1])


def pareto(pairs) -> list[tuple[int, int]]:
    """Non-dominated subset of (departure, arrival) pairs."""
    best_arr = {}
    for d, a in pairs:
        if d not in best_arr or a < best_arr[d]:
            best_arr[d] = a
    out = []
    floor = None
    for d in sorted(best_arr, reverse=True):
        a = best_arr[d]
        if floor is None or a < floor:
            out.append((d, a))
            floor = a
    return sorted(out)


def expand(points) -> list[tuple[int, int]]:
    return sorted(p for pt in points for p in pt.family())


# ------------------------------------------------------------ reconstruction


def reconstruct(tables: DpTables, point: FrontierPoint) -> TrainPath:
    """Read one path backwards, preferring the earliest time at each location."""
    net, req = tables.network, tables.request
    D, T = point.departure, point.arrival
    v = req.destination
    track = next(
        (j for j in net.stations[v].tracks if iv.evaluate(tables.arrival.get((v, j, S), []), T) == D),
        None,
    )
    if track is None:
        raise InvariantViolation(f"no destination table reaches {v} at {T} from departure {D}")
    visits = [StationVisit(v, T, T, track, S)]
    runs: list[SegmentRun] = []
    station, t_arr, p = v, T, S
    before = None
    while True:
        contrib = arrival_contributions(tables, station, track, p, before)
        hit = next(((pos, l, k, tr) for pos, l, k, tr in contrib if iv.evaluate(tables.transition[(tr, p)], t_arr) == D), None)
        if hit is None:
            raise InvariantViolation(f"dead end reading back at {station}:{track} time {t_arr}")
        _, seg_id, k, _ = hit
        seg = net.segments[seg_id]
        entry, choices = _segment_entry(tables, seg_id, k, p, D, t_arr)
        runs.append(SegmentRun(seg_id, k, entry, t_arr))
        s1 = seg.start
        if s1 == req.origin:
            j1 = _departure_track(tables, s1, seg_id, k, S, D, entry)
            if S not in choices or entry != D or j1 is None:
                raise InvariantViolation(f"origin departure {entry} does not match {D}")
            visits.append(StationVisit(s1, D, D, j1, S))
            break
        # among equally early entries, the one reached earliest at s1 (a stop when waiting helps)
        best = None
        for p1 in choices:
            j1 = _departure_track(tables, s1, seg_id, k, p1, D, entry)
            if j1 is None:
                continue
            a = entry if p1 is R else _stop_arrival(tables, s1, j1, D, entry, seg_id)
            if best is None or a < best[0]:
                best = (a, p1, j1)
        if best is None:
            raise InvariantViolation(f"no departure from {s1} onto {seg_id}:{k} at {entry}")
        a, p1, j1 = best
        visits.append(StationVisit(s1, a, entry, j1, p1))
        station, track, t_arr, p, before = s1, j1, a, p1, seg_id
    visits.reverse()
    runs.reverse()
    return TrainPath(visits, runs, FrontierPoint(D, T, point.slack))


def _segment_entry(tables: DpTables, seg_id, k, p2, D, t_exit):
    """Earliest entry time leading to exit ``t_exit``, and the patterns achieving it (R first)."""
    pairs = tables.free.segment(seg_id, k)
    pair = next(((e, x) for e, x in pairs if x[0] <= t_exit <= x[1]), None)
    if pair is None:
        raise InvariantViolation(f"exit {t_exit} on {seg_id}:{k} outside every free pair")
    (elo, ehi), _ = pair
    found = {}
    for p1 in (R, S):
        d = tables.run_times[(seg_id, pattern_pair(p1, p2))]
        e = iv.earliest_with_dep(tables.entry.get((seg_id, k, p1), []), D, elo, min(ehi, t_exit - d))
        if e is not None:
            found[p1] = e
    if not found:
        raise InvariantViolation(f"no entry onto {seg_id}:{k} reaching exit {t_exit}")
    e = min(found.values())
    return e, [p1 for p1 in (R, S) if found.get(p1) == e]


def _departure_track(tables: DpTables, station, seg_id, k, p1, D, entry):
    net = tables.network
    for j in net.stations[station].tracks:
        tr = net.departing(station, j, seg_id, k)
        if tr is not None and iv.evaluate(tables.transition.get((tr, p1), []), entry) == D:
            return j
    return None


def _stop_arrival(tables: DpTables, station, track, D, t_dep, next_seg):
    free = tables.free.station(station, track)
    span = next(((lo, hi) for lo, hi in free if lo <= t_dep <= hi), None)
    if span is None:
        raise InvariantViolation(f"departure {t_dep} from {station}:{track} outside free time")
    parts = [tables.transition[(tr, S)] for _, _, _, tr in arrival_contributions(tables, station, track, S, next_seg)]
    arr = station_arrival(tables, station, track, S, parts)
    w = tables.network.stations[station].constraints.min_dwell
    a = iv.earliest_with_dep(arr, D, span[0], t_dep - w)
    if a is None:
        raise InvariantViolation(f"no arrival at {station}:{track} before departing at {t_dep}")
    return a


# ------------------------------------------------------------ records


def path_records(paths: list[TrainPath]) -> list[dict]:
    rows = []
    for n, path in enumerate(paths, start=1):
        for i, vis in enumerate(path.visits):
            rec = {
                "path": n,
                "station": vis.station,
                "arrival": vis.arrival,
                "departure": vis.departure,
                "track": vis.track,
                "pattern": vis.pattern.value,
            }
            if i < len(path.runs):
                rec["out_segment"] = path.runs[i].segment
                rec["out_track"] = path.runs[i].track
            rows.append(rec)
    return rows


def frontier_records(points: list[FrontierPoint]) -> list[dict]:
    return [
        {"path": n, "departure": p.departure, "arrival": p.arrival, "slack": p.slack}
        for n, p in enumerate(points, start=1)
    ]


def paths_from_tree(tree: dict) -> list[TrainPath]:
    """Rebuild paths from ``path`` records (the frontier section is optional)."""
    grouped: dict[str, list[dict]] = {}
    for rec in tree.get("path", []):
        grouped.setdefault(str(rec["path"]), []).append(rec)
    slack = {str(r["path"]): int(r.get("slack", 0)) for r in tree.get("frontier", [])}
    out = []
    for key, recs in grouped.items():
        try:
            visits = [
                StationVisit(r["station"], int(r["arrival"]), int(r["departure"]), str(r["track"]), Pattern(r["pattern"]))
                for r in recs
            ]
            runs = [
                SegmentRun(r["out_segment"], str(r["out_track"]), int(r["departure"]), int(n["arrival"]))
                for r, n in zip(recs, recs[1:])
            ]
        except (KeyError, ValueError) as exc:
            raise DocumentError(f"bad path record: {exc}", line=recs[0].get("__line__")) from None
        out.append(TrainPath(visits, runs, FrontierPoint(visits[0].departure, visits[-1].arrival, slack.get(key, 0))))
    return out

