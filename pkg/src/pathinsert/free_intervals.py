"""Free time intervals of station tracks, transitions and segment tracks.

A free interval is a maximal closed range of instants at which the inserted
train may use an element without violating a margin against any existing
train. Every existing occupation forbids the open interval between its
margins, so free intervals are the window minus the union of those.
"""

from __future__ import annotations

import threading

from .model import Network, ParameterSet, Timetable, Transition


def _gaps(forbidden, window) -> list[tuple[int, int]]:
    """Closed pieces of ``window`` not covered by open ``(a, b)`` intervals."""
    t_min, t_max = window
    out = []
    cur = t_min
    for a, b in sorted(forbidden):
        if b - a < 2:  # open interval with no integer inside
            continue
        if cur <= min(a, t_max):
            out.append((cur, min(a, t_max)))
        cur = max(cur, b)
        if cur > t_max:
            break
    if cur <= t_max:
        out.append((cur, t_max))
    return out


def merge_intervals(intervals) -> list[tuple[int, int]]:
    """Sorted union of closed intervals, joining overlapping or touching ones."""
    out: list[list[int]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [tuple(iv) for iv in out]


def station_free(station, track, timetable: Timetable, params: ParameterSet, window):
    forbidden = []
    for occ in timetable.station_use.get((station, track), ()):
        m = params.resolve_gamma(occ.train, station, track)
        forbidden.append((occ.arrival - m.before, occ.departure + m.after))
    return _gaps(forbidden, window)


def transition_free(tr: Transition, network: Network, timetable: Timetable, params: ParameterSet, window):
    # Coinciding conflict instants simply overlap; the widest margin wins.
    forbidden = []
    for other in network.conflicting(tr):
        for use in timetable.transition_use.get(other, ()):
            m = params.resolve_delta(use.train, tr, other.direction)
            forbidden.append((use.time - m.before, use.time + m.after))
    return _gaps(forbidden, window)


def segment_occupants(segment_id, track, network: Network, timetable: Timetable, params: ParameterSet):
    """Occupations of the physical track seen from ``segment_id``'s direction.

    Yields ``(p, q, margins, train)`` where ``p`` is the occupant's time at
    the segment's start station and ``q`` at its end station.
    """
    seg = network.segments[segment_id]
    for occ in timetable.resource_use(seg.resource_id, track):
        if network.segments[occ.segment].start == seg.start:
            p, q = occ.entry, occ.exit
        else:
            p, q = occ.exit, occ.entry
        yield p, q, params.resolve_beta(occ.train, segment_id, occ.segment), occ.train


def segment_free(segment_id, track, network: Network, timetable: Timetable, params: ParameterSet, window):
    """Pairs ``(entry, exit)`` of intervals for traversing one segment track.

    Any entry time in ``entry`` and exit time in ``exit`` of the same pair
    (with exit not before entry) keeps every headway: the inserted train
    slots in between the same two neighbouring occupations at both ends.
    """
    t_min, t_max = window
    seg = network.segments[segment_id]
    occ = list(segment_occupants(segment_id, track, network, timetable, params))
    if seg.blocks == 1:
        spans = sorted((min(p, q), max(p, q), m) for p, q, m, _ in occ)
        starts = [lo - m.before for lo, _, m in spans]
        ends = [hi + m.after for _, hi, m in spans]
        pairs = []
        for lo, hi in _cuts(ends, starts, t_min, t_max):
            if lo <= hi:
                pairs.append(((lo, hi), (lo, hi)))
        return pairs

    occ.sort(key=lambda o: (o[0], o[1]))
    entry_cuts = _cuts([p + m.after for p, _, m, _ in occ], [p - m.before for p, _, m, _ in occ], t_min, t_max)
    exit_cuts = _cuts([q + m.after for _, q, m, _ in occ], [q - m.before for _, q, m, _ in occ], t_min, t_max)
    pairs = []
    for (elo, ehi), (xlo, xhi) in zip(entry_cuts, exit_cuts):
        ehi = min(ehi, xhi)
        xlo = max(xlo, elo)
        if elo <= ehi and xlo <= xhi:
            pairs.append(((elo, ehi), (xlo, xhi)))
    return pairs


def _cuts(lower, upper, t_min, t_max):
    """For each split ``i``: [max(lower[:i]), min(upper[i:])] clipped to the window."""
    n = len(lower)
    suffix = [t_max] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = min(suffix[i + 1], upper[i])
    out = []
    best = t_min
    for i in range(n + 1):
        if i:
            best = max(best, lower[i - 1])
        out.append((best, suffix[i]))
    return out


class FreeIntervals:
    """Lazily computed, memoized free intervals for one query window."""

    def __init__(self, network: Network, timetable: Timetable, params: ParameterSet, window):
        self.network = network
        self.timetable = timetable
        self.params = params
        self.window = tuple(window)
        self._stations = {}
        self._transitions = {}
        self._segments = {}
        self._lock = threading.Lock()

    def _memo(self, table, key, compute):
        try:
            return table[key]
        except KeyError:
            pass
        value = compute()
        with self._lock:
            return table.setdefault(key, value)

    def station(self, station, track):
        return self._memo(
            self._stations,
            (station, track),
            lambda: station_free(station, track, self.timetable, self.params, self.window),
        )

    def transition(self, tr: Transition):
        return self._memo(
            self._transitions,
            tr,
            lambda: transition_free(tr, self.network, self.timetable, self.params, self.window),
        )

    def segment(self, segment_id, track):
        return self._memo(
            self._segments,
            (segment_id, track),
            lambda: segment_free(segment_id, track, self.network, self.timetable, self.params, self.window),
        )

    def segment_entries(self, segment_id, track):
        return merge_intervals(e for e, _ in self.segment(segment_id, track))

    def precompute(self, network: Network | None = None):
        """Fill the cache for every element of ``network`` (default: all)."""
        net = network or self.network
        for st in net.stations.values():
            for j in st.tracks:
                self.station(st.id, j)
        for seg in net.segments.values():
            for k in seg.tracks:
                self.segment(seg.id, k)
        for tr in net.transitions:
            self.transition(tr)
        return self

    def dump(self, network: Network | None = None) -> str:
        """All free intervals of ``network`` as tab-separated records."""
        net = network or self.network
        lines = []
        for st in sorted(net.stations.values(), key=lambda s: s.id):
            for j in st.tracks:
                for lo, hi in self.station(st.id, j):
                    lines.append(f"station\t{st.id}\t{j}\t{lo}\t{hi}")
        for seg in sorted(net.segments.values(), key=lambda s: s.id):
            for k in seg.tracks:
                for (elo, ehi), (xlo, xhi) in self.segment(seg.id, k):
                    lines.append(f"segment\t{seg.id}\t{k}\t{elo}\t{ehi}\t{xlo}\t{xhi}")
        for tr in sorted(net.transitions):
            for lo, hi in self.transition(tr):
                lines.append(f"transition\t{tr}\t{lo}\t{hi}")
        return "\n".join(lines)
