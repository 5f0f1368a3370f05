"""Minimal deterministic SVG figures: domain, network, nodal heat map, density chart."""

from __future__ import annotations

import math

import numpy as np

_SIZE = 480
_PAD = 16


def _fmt(x):
    return f"{x:.3f}"


class _Frame:
    """Maps world coordinates into a square canvas with y pointing up."""

    def __init__(self, lo, hi, size=_SIZE, pad=_PAD):
        self.lo = np.asarray(lo, float)
        span = max(hi[0] - lo[0], hi[1] - lo[1]) or 1.0
        self.scale = (size - 2 * pad) / span
        self.size, self.pad = size, pad

    def __call__(self, p):
        x = self.pad + (p[0] - self.lo[0]) * self.scale
        y = self.size - self.pad - (p[1] - self.lo[1]) * self.scale
        return _fmt(x), _fmt(y)


def _heat(t):
    """Blue-to-yellow ramp for t in [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    r = int(round(255 * min(1.0, 2 * t)))
    g = int(round(255 * t))
    b = int(round(255 * max(0.0, 1 - 2 * t)))
    return f"#{r:02x}{g:02x}{b:02x}"


def network_svg(domain, net=None, field=None, grid=None, title=""):
    """Domain outline, optional nodal field as cell squares, network on top."""
    (x0, y0), (x1, y1) = domain.bounding_box
    fr = _Frame((x0, y0), (x1, y1))
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
           f'viewBox="0 0 {_SIZE} {_SIZE}">', f"<title>{title}</title>",
           '<rect width="100%" height="100%" fill="white"/>']
    if field is not None and grid is not None:
        vmax = float(np.max(np.abs(field))) or 1.0
        cell = _fmt(grid.h * fr.scale)
        pts = grid.node_points().reshape(grid.nx, grid.ny, 2)
        for i in range(grid.nx):
            for j in range(grid.ny):
                v = field[i, j]
                if v == 0:
                    continue
                cx, cy = fr(pts[i, j] + np.array([-grid.h / 2, grid.h / 2]))
                out.append(f'<rect x="{cx}" y="{cy}" width="{cell}" height="{cell}" '
                           f'fill="{_heat(abs(v) / vmax)}"/>')
    poly = " ".join(",".join(fr(p)) for p in domain.boundary)
    out.append(f'<polygon points="{poly}" fill="none" stroke="black" stroke-width="1.5"/>')
    if net is not None:
        for i, j in net.edges:
            (ax, ay), (bx, by) = fr(net.vertices[i]), fr(net.vertices[j])
            out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="#c00000" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def density_chart_svg(profiles, c1=1.0, c2=2 * math.pi, title="density profile"):
    """Density against log2 radius for every profile, with the [c1, c2] band."""
    if not profiles:
        return f'<svg xmlns="http://www.w3.org/2000/svg"><title>{title}</title></svg>\n'
    radii = np.concatenate([p.radii for p in profiles])
    dens = np.concatenate([p.densities for p in profiles])
    lx = np.log2(radii)
    xlo, xhi = float(lx.min()), float(lx.max())
    if xhi == xlo:
        xhi = xlo + 1
    ylo, yhi = 0.0, max(float(dens.max()), c2) * 1.05
    w, hgt, pad = 560, 360, 40

    def X(v):
        return _fmt(pad + (v - xlo) / (xhi - xlo) * (w - 2 * pad))

    def Y(v):
        return _fmt(hgt - pad - (v - ylo) / (yhi - ylo) * (hgt - 2 * pad))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{hgt}" viewBox="0 0 {w} {hgt}">',
           f"<title>{title}</title>", '<rect width="100%" height="100%" fill="white"/>',
           f'<line x1="{pad}" y1="{hgt - pad}" x2="{w - pad}" y2="{hgt - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{hgt - pad}" stroke="black"/>']
    for level, label in ((c1, "c1"), (c2, "c2")):
        out.append(f'<line x1="{pad}" y1="{Y(level)}" x2="{w - pad}" y2="{Y(level)}" '
                   f'stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{w - pad + 2}" y="{Y(level)}" font-size="10">{label}</text>')
    for p in profiles:
        pts = " ".join(f"{X(math.log2(r))},{Y(d)}" for r, d in zip(p.radii, p.densities))
        colour = "#1f77b4" if p.passed else "#d62728"
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1"/>')
    out.append(f'<text x="{w / 2}" y="{hgt - 8}" font-size="11" text-anchor="middle">log2 r</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write(path, text):
    with open(path, "w") as fh:
        fh.write(text)
