"""Plain SVG drawings of the lattice, syndromes and braid paths."""

from __future__ import annotations

from typing import Mapping
from xml.sax.saxutils import escape

from .lattice import Flavor, Lattice, LinkType, Plaquette

__all__ = ["lattice_svg", "experiment_svg", "PATH_COLORS"]

PATH_COLORS = {"C_T": "#d62728", "C_L": "#d62728", "C_B": "#1f77b4", "C_H": "#1f77b4",
               "A": "#ff9896", "B": "#aec7e8"}
_LINK_COLORS = {LinkType.X: "#2ca02c", LinkType.Y: "#9467bd", LinkType.Z: "#555555"}
SCALE = 28.0
PAD = 1.5


def _corners(p: Plaquette) -> list[tuple[float, float]]:
    # Unwrapped corners in stored order, so torus plaquettes stay hexagons.
    r, c = p.row, p.col
    return [
        (2 * c - r, r + 1), (2 * c - r, r), (2 * c - r + 1, r),
        (2 * c + 2 - r, r), (2 * c + 2 - r, r + 1), (2 * c + 1 - r, r + 1),
    ]


def center(p: Plaquette) -> tuple[float, float]:
    return (2 * p.col - p.row + 1.0, p.row + 0.5)


class _Canvas:
    def __init__(self, lat: Lattice):
        xs = [lat.position(s)[0] for s in lat.sites] + [2 * lat.cols + 1]
        ys = [lat.position(s)[1] for s in lat.sites] + [lat.rows + 1]
        self.x0, self.x1 = min(xs) - PAD, max(xs) + PAD
        self.y0, self.y1 = min(min(ys), 0) - PAD, max(ys) + PAD
        self.items: list[str] = []

    def pt(self, x, y):
        return (x - self.x0) * SCALE, (self.y1 - y) * SCALE

    def line(self, a, b, color, width=1.5, dash=None):
        (x1, y1), (x2, y2) = self.pt(*a), self.pt(*b)
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
                          f'stroke="{color}" stroke-width="{width}"{d}/>')

    def poly(self, pts, fill, opacity=0.35, title=None):
        s = " ".join("%.1f,%.1f" % self.pt(*p) for p in pts)
        t = f"<title>{escape(title)}</title>" if title else ""
        self.items.append(f'<polygon points="{s}" fill="{fill}" fill-opacity="{opacity}" stroke="none">{t}</polygon>')

    def polyline(self, pts, color, width=3, dash=None):
        s = " ".join("%.1f,%.1f" % self.pt(*p) for p in pts)
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<polyline points="{s}" fill="none" stroke="{color}" stroke-width="{width}"{d}/>')

    def circle(self, p, r, fill, stroke="none", title=None):
        x, y = self.pt(*p)
        t = f"<title>{escape(title)}</title>" if title else ""
        self.items.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r}" fill="{fill}" stroke="{stroke}" stroke-width="2">{t}</circle>')

    def text(self, p, s, size=10, color="#000"):
        x, y = self.pt(*p)
        self.items.append(f'<text x="{x:.1f}" y="{y:.1f}" font-size="{size}" fill="{color}" '
                          f'text-anchor="middle" font-family="sans-serif">{escape(s)}</text>')

    def render(self, title="") -> str:
        w = (self.x1 - self.x0) * SCALE
        h = (self.y1 - self.y0) * SCALE
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
                f'viewBox="0 0 {w:.0f} {h:.0f}">')
        t = f"<title>{escape(title)}</title>" if title else ""
        return "\n".join([head, t, '<rect width="100%" height="100%" fill="white"/>', *self.items, "</svg>"]) + "\n"


def _draw_lattice(cv: _Canvas, lat: Lattice, syndrome: Mapping[int, int] | None):
    for p in lat.plaquettes:
        flipped = syndrome is not None and syndrome.get(p.id, 1) == -1
        base = "#fdd49e" if p.flavor is Flavor.E else "#c6dbef"
        fill = "#e6550d" if flipped and p.flavor is Flavor.E else "#3182bd" if flipped else base
        cv.poly(_corners(p), fill, 0.8 if flipped else 0.35,
                f"plaquette {p.id} ({p.row},{p.col}) {p.flavor.value}" + (" W=-1" if flipped else ""))
        cv.text(center(p), p.flavor.value, 9, "#666")
    for link in lat.links:
        a, b = lat.position(link.a), lat.position(link.b)
        if abs(a[0] - b[0]) > 1.5 or abs(a[1] - b[1]) > 1.5:
            continue  # wrap-around link on a torus
        cv.line(a, b, _LINK_COLORS[link.kind])
    for s in lat.sites:
        cv.circle(lat.position(s), 2.5, "#222", title=f"site {s}")


def lattice_svg(lat: Lattice, syndrome=None, title: str | None = None) -> str:
    """Lattice drawing; ``syndrome`` (a Syndrome or id -> sign map) shades flipped plaquettes."""
    cv = _Canvas(lat)
    values = getattr(syndrome, "values", syndrome)
    _draw_lattice(cv, lat, values)
    return cv.render(title or repr(lat))


def experiment_svg(ex, syndrome=None, title: str | None = None) -> str:
    """Braid diagram: vortex paths through plaquette centers and crossing sites ringed."""
    lat = ex.lattice
    cv = _Canvas(lat)
    values = getattr(syndrome, "values", syndrome)
    if values is None:
        values = dict(ex.predicted_syndrome.values)
    _draw_lattice(cv, lat, values)
    for name, path in ex.paths.items():
        pts = [center(lat.plaquettes[i]) for i in path.plaquettes]
        color = PATH_COLORS.get(name, "#000")
        dash = "6,4" if name in ("C_L", "C_H") else None
        cv.polyline(pts, color, 3 if name.startswith("C_") else 2, dash)
        cv.text((pts[0][0], pts[0][1] + 0.25), name, 11, color)
    for s in sorted(set(ex.crossing_sites)):
        cv.circle(lat.position(s), 7, "none", "#000", title=f"crossing site {s}")
        label = "D'" if ex.name.startswith("fig4") else "D"
        cv.text((lat.position(s)[0] + 0.45, lat.position(s)[1] + 0.2), label, 11)
    return cv.render(title or ex.name)
