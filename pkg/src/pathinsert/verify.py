"""Independent conflict checking of train paths and of the base timetable.

Margins are evaluated pair by pair from the timetable events; no free
interval is ever computed here, so this module can catch mistakes in the
interval construction.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .errors import MissingRunTimeError
from .model import InsertionRequest, Network, ParameterSet, Pattern, Timetable, pattern_pair
from .paths import TrainPath

INSERTED = "x"  # name of the inserted train in diagnostics


@dataclass
class Violation:
    kind: str
    element: str
    other: str | None
    margin: int | None
    detail: str
    train: str = INSERTED

    def __str__(self):
        who = f" {self.train} vs {self.other}" if self.other else ""
        m = f" margin {self.margin}" if self.margin is not None else ""
        return f"{self.kind} {self.element}:{who}{m}: {self.detail}"


class OccupationIndex:
    """Existing occupations grouped by the element they use."""

    def __init__(self, network: Network, trains=None):
        self.network = network
        self.stays = defaultdict(list)  # (station, track) -> (train, arr, dep)
        self.moves = defaultdict(list)  # Transition -> (train, time)
        self.runs = defaultdict(list)  # (resource, track) -> (train, segment, entry, exit)
        for tid, events in (trains or {}).items():
            self.add(tid, events)

    def add(self, tid, events):
        for i, ev in enumerate(events):
            self.stays[(ev.station, ev.track)].append((tid, ev.arrival, ev.departure))
            if ev.entry_transition is not None:
                self.moves[ev.entry_transition].append((tid, ev.arrival))
            if ev.exit_transition is not None:
                self.moves[ev.exit_transition].append((tid, ev.departure))
                if i + 1 < len(events):
                    tr = ev.exit_transition
                    res = self.network.segments[tr.segment].resource_id
                    self.runs[(res, tr.segment_track)].append((tid, tr.segment, ev.departure, events[i + 1].arrival))


def occupations_of(events):
    """(stays, moves, runs) of one train's events, in path-check form."""
    stays = [(ev.station, ev.track, ev.arrival, ev.departure) for ev in events]
    moves = []
    runs = []
    for i, ev in enumerate(events):
        if ev.entry_transition is not None:
            moves.append((ev.entry_transition, ev.arrival))
        if ev.exit_transition is not None:
            moves.append((ev.exit_transition, ev.departure))
            if i + 1 < len(events):
                tr = ev.exit_transition
                runs.append((tr.segment, tr.segment_track, ev.departure, events[i + 1].arrival))
    return stays, moves, runs


def path_conflicts(network: Network, params: ParameterSet, index: OccupationIndex, stays, moves, runs, skip=None, name=INSERTED):
    """Margin violations of one train's occupations against the index."""
    out = []
    for s, j, arr, dep in stays:
        for tid, A, D in index.stays.get((s, j), ()):
            if tid == skip:
                continue
            m = params.resolve_gamma(tid, s, j)
            if not (dep <= A - m.before or arr >= D + m.after):
                margin = m.before if arr < A else m.after
                out.append(Violation("station", f"{s}:{j}", tid, margin, f"stay {arr}..{dep} vs {A}..{D}", name))
    for tr, t in moves:
        for other in network.conflicting(tr):
            for tid, u in index.moves.get(other, ()):
                if tid == skip:
                    continue
                m = params.resolve_delta(tid, tr, other.direction)
                if u - m.before < t < u + m.after:
                    margin = m.before if t < u else m.after
                    out.append(Violation("transition", str(tr), tid, margin, f"at {t} vs {other} at {u}", name))
    for seg_id, k, e, x in runs:
        seg = network.segments[seg_id]
        for tid, oseg_id, oe, ox in index.runs.get((seg.resource_id, k), ()):
            if tid == skip:
                continue
            oseg = network.segments[oseg_id]
            p, q = (oe, ox) if oseg.start == seg.start else (ox, oe)
            m = params.resolve_beta(tid, seg_id, oseg_id)
            if seg.blocks == 1:
                lo, hi = min(p, q), max(p, q)
                good = x <= lo - m.before or e >= hi + m.after
            else:
                good = (e <= p - m.before and x <= q - m.before) or (e >= p + m.after and x >= q + m.after)
            if not good:
                margin = m.before if e < p else m.after
                detail = f"traversal {e}..{x} vs {oe}..{ox} on {oseg_id}"
                out.append(Violation("segment", f"{seg_id}:{k}", tid, margin, detail, name))
    return out


def verify_path(
    path: TrainPath,
    timetable: Timetable,
    params: ParameterSet,
    network: Network,
    request: InsertionRequest | None = None,
    index: OccupationIndex | None = None,
) -> list[Violation]:
    """Check every margin, running time and station rule of ``path`` from scratch."""
    out: list[Violation] = []
    S, R = Pattern.STOP, Pattern.RUN

    def bad(kind, element, detail, margin=None):
        out.append(Violation(kind, str(element), None, margin, detail))

    visits, runs = path.visits, path.runs
    if not visits or len(runs) != len(visits) - 1:
        bad("structure", "path", f"{len(visits)} visits but {len(runs)} segment runs")
        return out
    names = [v.station for v in visits]
    if len(set(names)) != len(names):
        bad("structure", "path", f"station revisited in {'-'.join(names)}")
    if path.summary.departure != visits[0].departure or path.summary.arrival != visits[-1].arrival:
        bad("structure", "path", "summary does not match the first departure and last arrival")
    if visits[0].pattern is not S or visits[-1].pattern is not S:
        bad("structure", "path", "origin and destination must use pattern S")
    if request is not None:
        if names[0] != request.origin or names[-1] != request.destination:
            bad("structure", "path", f"runs {names[0]} to {names[-1]}, not {request.origin} to {request.destination}")
        lo, hi = request.window
        for vis in visits:
            if vis.arrival < lo or vis.departure > hi:
                bad("window", vis.station, f"times {vis.arrival}..{vis.departure} outside {lo}..{hi}")
        for vis in visits[1:-1]:
            if vis.pattern is S and vis.station in request.no_stop:
                bad("stop", vis.station, "stops where stopping is not allowed")

    last = len(visits) - 1
    for i, vis in enumerate(visits):
        st = network.stations.get(vis.station)
        if st is None or vis.track not in st.tracks:
            bad("structure", f"{vis.station}:{vis.track}", "unknown station track")
            return out
        c = st.constraints
        if vis.arrival > vis.departure:
            bad("dwell", vis.station, f"departs {vis.departure} before arriving {vis.arrival}")
        if 0 < i < last:
            if vis.pattern is R and vis.arrival != vis.departure:
                bad("dwell", vis.station, "runs through but arrival and departure differ")
            if vis.pattern is S and vis.departure - vis.arrival < c.min_dwell:
                bad("dwell", vis.station, f"dwell {vis.departure - vis.arrival} below {c.min_dwell}", c.min_dwell)
        if i > 0 and c.arrival is not None and not c.arrival[0] <= vis.arrival <= c.arrival[1]:
            bad("window", vis.station, f"arrival {vis.arrival} outside {c.arrival}")
        if i < last and c.departure is not None and not c.departure[0] <= vis.departure <= c.departure[1]:
            bad("window", vis.station, f"departure {vis.departure} outside {c.departure}")

    moves = []
    run_list = []
    for i, run in enumerate(runs):
        seg = network.segments.get(run.segment)
        a, b = visits[i], visits[i + 1]
        if seg is None or run.track not in seg.tracks or (seg.start, seg.end) != (a.station, b.station):
            bad("structure", run.segment, f"does not join {a.station} to {b.station} on track {run.track}")
            return out
        if run.entry != a.departure or run.exit != b.arrival:
            bad("structure", run.segment, "segment times differ from station times")
        pp = pattern_pair(a.pattern, b.pattern)
        try:
            need = params.resolve_run_time(run.segment, pp)
        except MissingRunTimeError as exc:
            bad("running time", run.segment, str(exc))
        else:
            if run.exit - run.entry < need:
                bad("running time", run.segment, f"{run.exit - run.entry} s below d^{pp} = {need} s", need)
        dep_tr = network.departing(a.station, a.track, run.segment, run.track)
        arr_tr = network.arriving(b.station, b.track, run.segment, run.track)
        if dep_tr is None or arr_tr is None:
            bad("structure", run.segment, "missing transition between station track and segment track")
            return out
        moves += [(dep_tr, run.entry), (arr_tr, run.exit)]
        run_list.append((run.segment, run.track, run.entry, run.exit))

    if index is None:
        index = OccupationIndex(network, timetable.trains)
    stays = [(v.station, v.track, v.arrival, v.departure) for v in visits]
    out += path_conflicts(network, params, index, stays, moves, run_list)
    return out


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "warning" or "error"
    message: str
    trains: tuple[str, ...] = ()
    element: str | None = None

    def __str__(self):
        return f"{self.severity}: {self.message}"


def validate(network: Network, timetable: Timetable, params: ParameterSet) -> list[Diagnostic]:
    """Structural problems and margin violations inside the base timetable.

    Each pair of existing trains is checked both ways round: each train in
    turn plays the newcomer against the other's margins.
    """
    diags: list[Diagnostic] = []
    lost = network.unreachable_stations()
    if lost:
        diags.append(Diagnostic("warning", f"unreachable stations: {', '.join(lost)}"))
    for seg in sorted(network.segments.values(), key=lambda s: s.id):
        for k in seg.tracks:
            if not any(
                network.departing(seg.start, j, seg.id, k) for j in network.stations[seg.start].tracks
            ) or not any(network.arriving(seg.end, j, seg.id, k) for j in network.stations[seg.end].tracks):
                diags.append(Diagnostic("warning", f"segment {seg.id} track {k} has no transitions at both ends", element=seg.id))
        missing = [p for p in ("RR", "SR", "RS", "SS") if (seg.id, p) not in params.run_time]
        if missing:
            diags.append(Diagnostic("warning", f"segment {seg.id} has no running time for {','.join(missing)}", element=seg.id))

    index = OccupationIndex(network, timetable.trains)
    seen = set()
    for tid in sorted(timetable.trains):
        stays, moves, runs = occupations_of(timetable.trains[tid])
        for v in path_conflicts(network, params, index, stays, moves, runs, skip=tid, name=tid):
            element = v.element
            if v.kind == "segment":
                seg_id, k = v.element.rsplit(":", 1)
                element = f"{network.segments[seg_id].resource_id}:{k}"
            key = (v.kind, element, frozenset((tid, v.other)))
            if key in seen:
                continue
            seen.add(key)
            diags.append(
                Diagnostic(
                    "warning",
                    f"{v.kind} margin violated on {v.element} between trains {tid} and {v.other} "
                    f"(margin {v.margin} s): {v.detail}",
                    tuple(sorted((tid, v.other))),
                    v.element,
                )
            )
    return diags
