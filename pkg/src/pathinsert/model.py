"""Domain types: infrastructure, timetable, margins and insertion requests.

All times are integer seconds (``TimePoint``) and all durations are
non-negative integer seconds. Intervals are closed.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .errors import (
    DanglingReferenceError,
    MissingRunTimeError,
    ParameterError,
    RequestError,
    TimetableError,
)

TimePoint = int
Duration = int

BETA_DEFAULT = 180
GAMMA_DEFAULT = 180
DELTA_DEFAULT = 180
DELTA_BLOCK_DEFAULT = 60


class Direction(str, Enum):
    DEPARTING = "departing"
    ARRIVING = "arriving"


class Pattern(str, Enum):
    RUN = "R"
    STOP = "S"


PATTERNS = (Pattern.RUN, Pattern.STOP)
PATTERN_PAIRS = ("RR", "SR", "RS", "SS")


def pattern_pair(p1: Pattern, p2: Pattern) -> str:
    return p1.value + p2.value


@dataclass(frozen=True)
class StationConstraints:
    min_dwell: Duration = 0
    arrival: tuple[TimePoint, TimePoint] | None = None
    departure: tuple[TimePoint, TimePoint] | None = None

    @property
    def empty(self) -> bool:
        return not self.min_dwell and self.arrival is None and self.departure is None


@dataclass(frozen=True)
class Station:
    id: str
    name: str
    tracks: tuple[str, ...]
    constraints: StationConstraints = StationConstraints()


@dataclass(frozen=True)
class Segment:
    """A directed connection between two adjacent stations.

    ``resource`` identifies the physical line: two directed segments sharing
    a resource and a track id share that physical track (single-track
    running in both directions). Without a resource the segment id is used.
    """

    id: str
    start: str
    end: str
    tracks: tuple[str, ...]
    blocks: int = 1
    resource: str | None = None

    @property
    def resource_id(self) -> str:
        return self.resource if self.resource is not None else self.id


@dataclass(frozen=True, order=True)
class Transition:
    station: str
    station_track: str
    segment: str
    segment_track: str
    direction: Direction

    def __str__(self):
        if self.direction is Direction.DEPARTING:
            return f"{self.station}:{self.station_track}>{self.segment}:{self.segment_track}"
        return f"{self.segment}:{self.segment_track}>{self.station}:{self.station_track}"


def conflict_key(a: Transition, b: Transition) -> tuple[Transition, Transition]:
    return (a, b) if a <= b else (b, a)


class Network:
    """Stations, directed segments, transitions and transition conflicts.

    Construction checks referential integrity; use ``documents.load_network``
    to also get the connectivity warning.
    """

    def __init__(self, stations, segments, transitions=(), conflicts=()):
        self.stations: dict[str, Station] = {s.id: s for s in stations}
        self.segments: dict[str, Segment] = {l.id: l for l in segments}
        self.transitions: frozenset[Transition] = frozenset(transitions)
        pairs = set()
        for a, b in conflicts:
            pairs.add(conflict_key(a, b))
        self.conflicts: frozenset[tuple[Transition, Transition]] = frozenset(pairs)
        self._check()

        self._out = defaultdict(list)
        self._in = defaultdict(list)
        self._between = defaultdict(list)
        for seg in sorted(self.segments.values(), key=lambda l: l.id):
            self._out[seg.start].append(seg)
            self._in[seg.end].append(seg)
            self._between[(seg.start, seg.end)].append(seg)
        self._conflicting = defaultdict(set)
        for a, b in self.conflicts:
            self._conflicting[a].add(b)
            self._conflicting[b].add(a)
        self._departing = {}
        self._arriving = {}
        for tr in self.transitions:
            key = (tr.station, tr.station_track, tr.segment, tr.segment_track)
            if tr.direction is Direction.DEPARTING:
                self._departing[key] = tr
            else:
                self._arriving[key] = tr

    def _check(self):
        for st in self.stations.values():
            if not st.tracks:
                raise ParameterError(f"station {st.id!r} has no tracks")
        for seg in self.segments.values():
            if seg.start == seg.end:
                raise DanglingReferenceError("segment", seg.id, "starts and ends at the same station")
            for sid in (seg.start, seg.end):
                if sid not in self.stations:
                    raise DanglingReferenceError("station", sid, f"segment {seg.id}")
            if not seg.tracks:
                raise ParameterError(f"segment {seg.id!r} has no tracks")
            if seg.blocks < 1:
                raise ParameterError(f"segment {seg.id!r} must have at least one block")
        for tr in self.transitions:
            self._check_transition(tr)
        for a, b in self.conflicts:
            for tr in (a, b):
                if tr not in self.transitions:
                    raise DanglingReferenceError("transition", str(tr), "conflict pair")
        by_resource = defaultdict(list)
        for seg in self.segments.values():
            by_resource[seg.resource_id].append(seg)
        for res, segs in by_resource.items():
            ends = {frozenset((s.start, s.end)) for s in segs}
            if len(ends) > 1:
                raise ParameterError(f"resource {res!r} is shared by segments between different stations")

    def _check_transition(self, tr: Transition):
        st = self.stations.get(tr.station)
        if st is None:
            raise DanglingReferenceError("station", tr.station, f"transition {tr}")
        seg = self.segments.get(tr.segment)
        if seg is None:
            raise DanglingReferenceError("segment", tr.segment, f"transition {tr}")
        if tr.station_track not in st.tracks:
            raise DanglingReferenceError("track", tr.station_track, f"station {st.id}")
        if tr.segment_track not in seg.tracks:
            raise DanglingReferenceError("track", tr.segment_track, f"segment {seg.id}")
        expected = seg.start if tr.direction is Direction.DEPARTING else seg.end
        if tr.station != expected:
            raise ParameterError(f"transition {tr} is not incident to its segment")

    def out_segments(self, station: str) -> list[Segment]:
        return self._out.get(station, [])

    def in_segments(self, station: str) -> list[Segment]:
        return self._in.get(station, [])

    def segments_between(self, start: str, end: str) -> list[Segment]:
        return self._between.get((start, end), [])

    def departing(self, station, station_track, segment, segment_track) -> Transition | None:
        return self._departing.get((station, station_track, segment, segment_track))

    def arriving(self, station, station_track, segment, segment_track) -> Transition | None:
        return self._arriving.get((station, station_track, segment, segment_track))

    def conflicting(self, tr: Transition) -> set[Transition]:
        return self._conflicting.get(tr, set())

    def unreachable_stations(self) -> list[str]:
        """Stations not weakly connected to the first referenced station."""
        used = set()
        adj = defaultdict(set)
        for seg in self.segments.values():
            used.update((seg.start, seg.end))
            adj[seg.start].add(seg.end)
            adj[seg.end].add(seg.start)
        if not used:
            return []
        root = min(used)
        seen = {root}
        stack = [root]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return sorted(used - seen)

    def restrict(self, segment_ids) -> "Network":
        """Sub-network on the given segments and their incident stations."""
        keep = set(segment_ids)
        segs = [self.segments[i] for i in sorted(keep)]
        names = {s.start for s in segs} | {s.end for s in segs}
        trs = [t for t in self.transitions if t.segment in keep]
        trset = set(trs)
        confs = [(a, b) for a, b in self.conflicts if a in trset and b in trset]
        return Network([self.stations[n] for n in sorted(names)], segs, trs, confs)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.stations == other.stations
            and self.segments == other.segments
            and self.transitions == other.transitions
            and self.conflicts == other.conflicts
        )


@dataclass(frozen=True)
class TrainEvent:
    station: str
    arrival: TimePoint
    departure: TimePoint
    track: str
    entry_transition: Transition | None = None
    exit_transition: Transition | None = None


class StationOccupation(NamedTuple):
    train: str
    arrival: TimePoint
    departure: TimePoint


class SegmentOccupation(NamedTuple):
    train: str
    segment: str
    entry: TimePoint
    exit: TimePoint


class TransitionUse(NamedTuple):
    train: str
    transition: Transition
    time: TimePoint


class Timetable:
    """Existing trains and the occupations derived from their events."""

    def __init__(self, trains: dict[str, list[TrainEvent]], network: Network):
        self.trains = {tid: list(evs) for tid, evs in trains.items()}
        self.station_use: dict[tuple[str, str], list[StationOccupation]] = defaultdict(list)
        self.segment_use: dict[tuple[str, str], list[SegmentOccupation]] = defaultdict(list)
        self.transition_use: dict[Transition, list[TransitionUse]] = defaultdict(list)
        self._resource_use: dict[tuple[str, str], list[SegmentOccupation]] = defaultdict(list)
        for tid, events in self.trains.items():
            self._derive(tid, events, network)
        for lst in self.station_use.values():
            lst.sort(key=lambda o: (o.arrival, o.departure, o.train))
        for table in (self.segment_use, self._resource_use):
            for lst in table.values():
                lst.sort(key=lambda o: (o.entry, o.exit, o.train))
        for lst in self.transition_use.values():
            lst.sort(key=lambda u: (u.time, u.train))
        self.station_use = dict(self.station_use)
        self.segment_use = dict(self.segment_use)
        self.transition_use = dict(self.transition_use)
        self._resource_use = dict(self._resource_use)

    def _derive(self, tid, events, network):
        seen = set()
        for i, ev in enumerate(events):
            st = network.stations.get(ev.station)
            if st is None:
                raise DanglingReferenceError("station", ev.station, f"train {tid}")
            if ev.track not in st.tracks:
                raise DanglingReferenceError("track", ev.track, f"train {tid} at station {ev.station}")
            if ev.station in seen:
                raise TimetableError(
                    f"train {tid} revisits station {ev.station}; each train may visit a station at most once"
                )
            seen.add(ev.station)
            if ev.arrival > ev.departure:
                raise TimetableError(f"train {tid} departs {ev.station} before arriving")
            if i and events[i - 1].departure > ev.arrival:
                raise TimetableError(f"train {tid} arrives at {ev.station} before leaving {events[i - 1].station}")
            self.station_use[(ev.station, ev.track)].append(StationOccupation(tid, ev.arrival, ev.departure))
            if ev.entry_transition is not None:
                self.transition_use[ev.entry_transition].append(TransitionUse(tid, ev.entry_transition, ev.arrival))
            if ev.exit_transition is not None:
                self.transition_use[ev.exit_transition].append(TransitionUse(tid, ev.exit_transition, ev.departure))
            if i + 1 < len(events):
                tr = ev.exit_transition
                if tr is None:
                    raise TimetableError(f"train {tid} has no segment from {ev.station} to {events[i + 1].station}")
                seg = network.segments[tr.segment]
                occ = SegmentOccupation(tid, seg.id, ev.departure, events[i + 1].arrival)
                self.segment_use[(seg.id, tr.segment_track)].append(occ)
                self._resource_use[(seg.resource_id, tr.segment_track)].append(occ)

    def resource_use(self, resource: str, track: str) -> list[SegmentOccupation]:
        """Occupations of one physical track, both directions merged."""
        return self._resource_use.get((resource, track), [])

    def movements(self) -> list[TransitionUse]:
        return [u for lst in self.transition_use.values() for u in lst]

    def span(self) -> tuple[TimePoint, TimePoint] | None:
        times = [t for evs in self.trains.values() for ev in evs for t in (ev.arrival, ev.departure)]
        if not times:
            return None
        return min(times), max(times)


@dataclass(frozen=True)
class Margins:
    """Headway pair relative to the inserted train ``x``.

    ``before`` applies when ``x`` precedes the existing train, ``after`` when
    ``x`` follows it.
    """

    before: Duration
    after: Duration


@dataclass
class ParameterSet:
    beta: dict[tuple[str, str], Margins] = field(default_factory=dict)
    gamma: dict[tuple[str, str, str], Margins] = field(default_factory=dict)
    delta: dict[tuple[str, Transition], Margins] = field(default_factory=dict)
    run_time: dict[tuple[str, str], Duration] = field(default_factory=dict)
    beta_default: Duration = BETA_DEFAULT
    gamma_default: Duration = GAMMA_DEFAULT
    delta_default: Duration = DELTA_DEFAULT
    delta_block_default: Duration = DELTA_BLOCK_DEFAULT

    def resolve_beta(self, train: str, segment: str, occupied_segment: str | None = None) -> Margins:
        m = self.beta.get((train, segment))
        if m is None and occupied_segment is not None:
            m = self.beta.get((train, occupied_segment))
        return m if m is not None else Margins(self.beta_default, self.beta_default)

    def resolve_gamma(self, train: str, station: str, track: str) -> Margins:
        m = self.gamma.get((train, station, track))
        return m if m is not None else Margins(self.gamma_default, self.gamma_default)

    def resolve_delta(self, train: str, transition: Transition, train_action: Direction) -> Margins:
        """Margins between ``train``'s conflicting movement and ``x`` using ``transition``.

        ``train_action`` tells whether the existing train's conflicting
        movement is its arrival or its departure. The reduced block margin
        applies when the first of the two trains arrives and the second departs.
        """
        m = self.delta.get((train, transition))
        if m is not None:
            return m
        x_departs = transition.direction is Direction.DEPARTING
        after = self.delta_block_default if train_action is Direction.ARRIVING and x_departs else self.delta_default
        before = (
            self.delta_block_default
            if train_action is Direction.DEPARTING and not x_departs
            else self.delta_default
        )
        return Margins(before, after)

    def resolve_run_time(self, segment: str, pattern: str) -> Duration:
        try:
            return self.run_time[(segment, pattern)]
        except KeyError:
            raise MissingRunTimeError(segment, pattern) from None

    def min_run_time(self, segment: str) -> Duration:
        return self.resolve_run_time(segment, "RR")

    def check_run_times(self, segments) -> None:
        for seg in segments:
            for p in PATTERN_PAIRS:
                self.resolve_run_time(seg, p)

    def check(self) -> None:
        for table in (self.beta, self.gamma, self.delta):
            for key, m in table.items():
                if m.before < 0 or m.after < 0:
                    raise ParameterError(f"negative margin for {key}")
        for name in ("beta_default", "gamma_default", "delta_default", "delta_block_default"):
            if getattr(self, name) < 0:
                raise ParameterError(f"negative {name}")
        segs = {s for s, _ in self.run_time}
        for seg in sorted(segs):
            vals = {}
            for p in PATTERN_PAIRS:
                v = self.run_time.get((seg, p))
                if v is None:
                    raise MissingRunTimeError(seg, p)
                if v < 0:
                    raise ParameterError(f"negative running time for segment {seg!r} pattern {p}")
                vals[p] = v
            if not (vals["SS"] >= vals["RS"] >= vals["RR"] and vals["SS"] >= vals["SR"] >= vals["RR"]):
                raise ParameterError(f"running times of segment {seg!r} decrease when stopping: {vals}")


@dataclass(frozen=True)
class InsertionRequest:
    origin: str
    destination: str
    window: tuple[TimePoint, TimePoint]
    no_stop: frozenset[str] = frozenset()
    routes: int = 3

    def __post_init__(self):
        if self.origin == self.destination:
            raise RequestError("origin and destination must differ")
        if not self.window[0] < self.window[1]:
            raise RequestError(f"empty window {self.window}")
        if self.routes < 1:
            raise RequestError("route count must be at least 1")

    def may_stop(self, station: str) -> bool:
        return station == self.destination or station not in self.no_stop


def clip_window(bounds, window):
    """Intersect optional closed ``bounds`` with ``window``; None if empty."""
    lo, hi = window
    if bounds is not None:
        lo, hi = max(lo, bounds[0]), min(hi, bounds[1])
    return (lo, hi) if lo <= hi else None
