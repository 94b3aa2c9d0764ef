"""Minimal deterministic SVG plots (scatter points plus quantile lines)."""

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 720, 440
MARGIN = (60, 20, 30, 50)  # left, right, top, bottom


def _fmt(v):
    return f"{v:.2f}"


def _ticks(lo, hi, n=6):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out, v = [], start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 10))
        v += step
    return out


class _Frame:
    def __init__(self, xs, ys):
        xs = [x for x in xs if x is not None and math.isfinite(x)]
        ys = [y for y in ys if y is not None and math.isfinite(y)]
        self.x0, self.x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
        self.y0, self.y1 = (min(ys), max(ys)) if ys else (0.0, 1.0)
        if self.x1 == self.x0:
            self.x0, self.x1 = self.x0 - 1, self.x1 + 1
        if self.y1 == self.y0:
            self.y0, self.y1 = self.y0 - 1, self.y1 + 1
        left, right, top, bottom = MARGIN
        self.px0, self.px1 = left, WIDTH - right
        self.py0, self.py1 = HEIGHT - bottom, top

    def x(self, v):
        return self.px0 + (v - self.x0) / (self.x1 - self.x0) * (self.px1 - self.px0)

    def y(self, v):
        return self.py0 + (v - self.y0) / (self.y1 - self.y0) * (self.py1 - self.py0)

    def axes(self, xlabel, ylabel, title):
        out = [
            f'<rect x="{self.px0}" y="{self.py1}" width="{self.px1 - self.px0}" '
            f'height="{self.py0 - self.py1}" fill="none" stroke="#444"/>'
        ]
        for t in _ticks(self.x0, self.x1):
            px = _fmt(self.x(t))
            out.append(f'<line x1="{px}" y1="{self.py0}" x2="{px}" y2="{self.py0 + 4}" stroke="#444"/>')
            out.append(f'<text x="{px}" y="{self.py0 + 16}" text-anchor="middle">{t:g}</text>')
        for t in _ticks(self.y0, self.y1):
            py = _fmt(self.y(t))
            out.append(f'<line x1="{self.px0 - 4}" y1="{py}" x2="{self.px0}" y2="{py}" stroke="#444"/>')
            out.append(f'<text x="{self.px0 - 6}" y="{py}" text-anchor="end" dy="4">{t:g}</text>')
        cx = (self.px0 + self.px1) / 2
        out.append(f'<text x="{_fmt(cx)}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text x="14" y="{_fmt((self.py0 + self.py1) / 2)}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {_fmt((self.py0 + self.py1) / 2)})">{escape(ylabel)}</text>')
        out.append(f'<text x="{_fmt(cx)}" y="16" text-anchor="middle" font-weight="bold">{escape(title)}</text>')
        return out


def _doc(body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>'] + body + ["</svg>", ""])


def _polyline(frame, pts, color, width, opacity=1.0):
    if len(pts) < 2:
        return []
    coords = " ".join(f"{_fmt(frame.x(x))},{_fmt(frame.y(y))}" for x, y in pts)
    return [f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width}" '
            f'stroke-opacity="{opacity:.2f}"/>']


def trend_svg(points, rows, xlabel="year", ylabel="value", title="rolling trend"):
    """Scatter of ``points`` [(t, v)] with the 2.5/25/50/75/97.5% lines of ``rows``.

    Segments whose window was stretched are drawn fainter.
    """
    qs = [q for r in rows for q in r.quantiles if q is not None]
    fr = _Frame([p[0] for p in points] + [r.time for r in rows], [p[1] for p in points] + qs)
    body = fr.axes(xlabel, ylabel, title)
    for t, v in points:
        body.append(f'<circle cx="{_fmt(fr.x(t))}" cy="{_fmt(fr.y(v))}" r="1.5" fill="#888" fill-opacity="0.35"/>')
    styles = [("#999", 1), ("#555", 1.5), ("#000", 2), ("#555", 1.5), ("#999", 1)]
    for qi, (color, width) in enumerate(styles[:len(rows[0].quantiles) if rows else 0]):
        seg, stretched = [], None
        for r in rows:
            q = r.quantiles[qi]
            if q is None:
                body += _polyline(fr, seg, color, width, 0.4 if stretched else 1.0)
                seg, stretched = [], None
                continue
            if stretched is not None and r.stretched != stretched:
                body += _polyline(fr, seg + [(r.time, q)], color, width, 0.4 if stretched else 1.0)
                seg = []
            seg.append((r.time, q))
            stretched = r.stretched
        body += _polyline(fr, seg, color, width, 0.4 if stretched else 1.0)
    return _doc(body)


def temporal_svg(years, scores, fit=None, title="temporal resemblance"):
    """Scatter of adjusted temporal resemblance by year with a zero line."""
    pts = [(float(y), float(s)) for y, s in zip(years, scores) if math.isfinite(s)]
    fr = _Frame([p[0] for p in pts], [p[1] for p in pts] + [0.0])
    body = fr.axes("year", "median neighbour offset (years)", title)
    body.append(f'<line x1="{fr.px0}" y1="{_fmt(fr.y(0))}" x2="{fr.px1}" y2="{_fmt(fr.y(0))}" '
                f'stroke="#c00" stroke-dasharray="4 3"/>')
    for x, y in pts:
        body.append(f'<circle cx="{_fmt(fr.x(x))}" cy="{_fmt(fr.y(y))}" r="2" fill="#236" fill-opacity="0.5"/>')
    if fit is not None:
        body += _polyline(fr, sorted(fit), "#000", 2)
    return _doc(body)
