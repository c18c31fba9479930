"""Small hand-built instances shared by the tests."""

from pathinsert.documents import load_timetable
from pathinsert.generate import default_conflicts
from pathinsert.model import Direction, Margins, Network, ParameterSet, Segment, Station, Transition

DEP, ARR = Direction.DEPARTING, Direction.ARRIVING


def line(names, tracks=("1",), single=(), blocks=2, edges=None):
    """Directed line (or given undirected ``edges``) with transitions for every track pair.

    Links listed in ``single`` are one physical track shared by both
    directions and have one block; the others get track 1 forward, track 2
    backward and ``blocks`` blocks.
    """
    if edges is None:
        edges = list(zip(names, names[1:]))
    stations = [Station(n, n, tuple(tracks)) for n in names]
    segments = []
    for a, b in edges:
        shared = (a, b) in single or (b, a) in single
        res = f"{a}{b}"
        if shared:
            segments.append(Segment(f"{a}-{b}", a, b, ("1",), 1, res))
            segments.append(Segment(f"{b}-{a}", b, a, ("1",), 1, res))
        else:
            segments.append(Segment(f"{a}-{b}", a, b, ("1",), blocks, res))
            segments.append(Segment(f"{b}-{a}", b, a, ("2",), blocks, res))
    trs = []
    for seg in segments:
        for k in seg.tracks:
            for j in tracks:
                trs.append(Transition(seg.start, j, seg.id, k, DEP))
                trs.append(Transition(seg.end, j, seg.id, k, ARR))
    return Network(stations, segments, trs, default_conflicts(trs, {s.id: s for s in segments}))


def params(network, rr=300, stop=0, weights=None, **kw):
    """Run times RR = rr (or weights[segment]), plus ``stop`` seconds per stopping end."""
    p = ParameterSet(**kw)
    for sid in network.segments:
        base = (weights or {}).get(sid, rr)
        p.run_time[(sid, "RR")] = base
        p.run_time[(sid, "SR")] = base + stop
        p.run_time[(sid, "RS")] = base + stop
        p.run_time[(sid, "SS")] = base + 2 * stop
    p.check()
    return p


def timetable(network, trains):
    """``trains``: {tid: [(station, arrival, departure, track), ...]}."""
    lines = ["[events]"]
    for tid, stops in trains.items():
        for s, a, d, j in stops:
            lines.append(f"train={tid} station={s} arrival={a} departure={d} track={j}")
    return load_timetable("\n".join(lines), network)


def margins(v):
    return Margins(v, v)
