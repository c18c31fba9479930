"""Time-distance diagrams as SVG.

Distance along the drawn line is the cumulative minimum running time of its
segments. Existing trains are thin grey-black lines, candidate paths thick
coloured ones, and stations with more than one track (where trains can meet
or overtake) get a grey grid line.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .documents import format_clock
from .errors import DanglingReferenceError, MissingRunTimeError
from .model import Network, ParameterSet, Timetable
from .paths import TrainPath

COLOURS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")
WIDTH, HEIGHT, MARGIN = 960, 540, 70


def corridor(network: Network, stations) -> list[tuple[str, str | None]]:
    """(station, segment from the previous station) along ``stations``."""
    out = [(stations[0], None)]
    for a, b in zip(stations, stations[1:]):
        segs = network.segments_between(a, b)
        if not segs:
            raise DanglingReferenceError("segment", f"{a}-{b}", "plot line")
        out.append((b, segs[0].id))
    return out


def positions(network: Network, params: ParameterSet, stations) -> dict[str, float]:
    pos = {}
    total = 0.0
    for sid, seg in corridor(network, stations):
        if seg is not None:
            try:
                total += params.min_run_time(seg)
            except MissingRunTimeError:
                total += 60
        pos[sid] = total
    return pos


def _pieces(events, pos):
    """Polylines of (time, station) points along the drawn line, split where a train leaves it."""
    out, cur = [], []
    prev = None
    for ev in events:
        here = ev.station in pos
        if here and prev is not None and prev in pos:
            cur += [(ev.arrival, ev.station), (ev.departure, ev.station)]
        else:
            if len(cur) > 2:
                out.append(cur)
            cur = [(ev.departure, ev.station)] if here else []
        prev = ev.station if here else None
    if len(cur) > 2:
        out.append(cur)
    return out


class _Frame:
    def __init__(self, t_range, d_range, flip):
        self.t0, self.t1 = t_range
        self.d0, self.d1 = d_range
        self.flip = flip

    def xy(self, t, d):
        ft = (t - self.t0) / max(1, self.t1 - self.t0)
        fd = (d - self.d0) / max(1e-9, self.d1 - self.d0)
        if self.flip:  # time downwards, distance across
            return MARGIN + fd * (WIDTH - 2 * MARGIN), MARGIN + ft * (HEIGHT - 2 * MARGIN)
        return MARGIN + ft * (WIDTH - 2 * MARGIN), HEIGHT - MARGIN - fd * (HEIGHT - 2 * MARGIN)


def _poly(frame, pts, pos, cls, colour, width, title):
    coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in (frame.xy(t, pos[s]) for t, s in pts))
    return (
        f'<polyline class="{cls}" points="{coords}" fill="none" stroke="{colour}" stroke-width="{width}">'
        f"<title>{escape(title)}</title></polyline>"
    )


def render(
    network: Network,
    timetable: Timetable,
    params: ParameterSet,
    paths: list[TrainPath] = (),
    stations=None,
    window=None,
    flip=False,
    title="",
) -> str:
    """SVG text of the diagram; ``stations`` is the drawn line (default: first path's stations)."""
    paths = list(paths)
    for path in paths:
        for vis in path.visits:
            if vis.station not in network.stations:
                raise DanglingReferenceError("station", vis.station, "path record")
    if stations is None:
        stations = paths[0].stations if paths else sorted(network.stations)
    pos = positions(network, params, list(stations))
    if window is None:
        times = [t for evs in timetable.trains.values() for ev in evs for t in (ev.arrival, ev.departure)]
        times += [t for p in paths for v in p.visits for t in (v.arrival, v.departure)]
        window = (min(times), max(times)) if times else (0, 3600)
    frame = _Frame(window, (0.0, max(pos.values()) or 1.0), flip)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN}" y="24" font-size="14">{escape(title)}</text>')

    for sid in stations:
        d = pos[sid]
        (x0, y0), (x1, y1) = frame.xy(window[0], d), frame.xy(window[1], d)
        meet = len(network.stations[sid].tracks) > 1
        cls, colour, w = ("station meet", "#b0b0b0", 2) if meet else ("station", "#e4e4e4", 1)
        out.append(f'<line class="{cls}" x1="{x0:.1f}" y1="{y0:.1f}" x2="{x1:.1f}" y2="{y1:.1f}" stroke="{colour}" stroke-width="{w}"/>')
        lx, ly = (x0 - 6, y0 + 4) if not flip else (x0, y0 - 8)
        anchor = "end" if not flip else "middle"
        out.append(f'<text class="label" x="{lx:.1f}" y="{ly:.1f}" text-anchor="{anchor}">{escape(sid)}</text>')

    span = window[1] - window[0]
    step = next((s for s in (300, 600, 900, 1800, 3600, 7200, 14400, 43200, 86400) if span / s <= 12), 86400)
    t = -(-window[0] // step) * step
    while t <= window[1]:
        (x0, y0), (x1, y1) = frame.xy(t, frame.d0), frame.xy(t, frame.d1)
        out.append(f'<line class="tick" x1="{x0:.1f}" y1="{y0:.1f}" x2="{x1:.1f}" y2="{y1:.1f}" stroke="#f2f2f2"/>')
        tx, ty = (x0, y0 + 16) if not flip else (MARGIN - 6, y0 + 4)
        anchor = "middle" if not flip else "end"
        out.append(f'<text class="time" x="{tx:.1f}" y="{ty:.1f}" text-anchor="{anchor}">{format_clock(t)}</text>')
        t += step

    for tid in sorted(timetable.trains):
        for piece in _pieces(timetable.trains[tid], pos):
            out.append(_poly(frame, piece, pos, "existing", "#333333", 1, tid))

    for n, path in enumerate(paths, start=1):
        name = f"path {n}: {format_clock(path.summary.departure)} to {format_clock(path.summary.arrival)}"
        for piece in _pieces(path.visits, pos):
            out.append(_poly(frame, piece, pos, "candidate", COLOURS[(n - 1) % len(COLOURS)], 2.5, name))

    out.append("</svg>")
    return "\n".join(out) + "\n"
