"""Wigner densities of torus states and their Gaussian-level contours.

The transform
-------------
The state is interpolated (band-limited, with the momentum band centered on
the packet) to a grid of ``n_q = r * 2N`` points, giving a continuum
wavefunction ``psi(q)`` with ``int |psi|^2 dq = 1``.  For ``S = 2``::

    W(q, p) = 1/2 sum_k w_k conj(psi(q - k/2N)) psi(q + k/2N) exp(-i pi p k)

with ``|k| <= N/2`` (on the ``S = 1`` torus the prefactor is 1 and the phase
``exp(-2 pi i p k)``).  Restricting the separation ``y = k/N`` to half a period
removes the interference ghosts a periodic correlation would add; the
endpoint weights ``w_{+-N/2} = 1/2`` make the q- and p-marginals exact
(``|psi(q)|^2`` and ``N/S |phi_m|^2``).  The density is periodic in ``p`` with
period ``S`` and sums to one over the grid times the cell area.

Contours are taken at the levels where an ideal minimum-uncertainty Gaussian
has fallen to ``exp(-2)`` (the 2-sigma circle, area ``h``) and ``exp(-1/8)``
(the sigma/2 circle) of its peak ``1/(pi hbar)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from skimage.measure import find_contours

from .quantum import QuantumState, json_header

TWO_SIGMA = "two_sigma"
HALF_SIGMA = "half_sigma"
LEVEL_EXPONENTS = {TWO_SIGMA: 2.0, HALF_SIGMA: 0.125}


class ResolutionError(ValueError):
    pass


@dataclass
class PhaseSpaceDensity:
    """Wigner density on ``q_a = a/n_q``, ``p_b = S b/n_p``; ``grid[a, b]``."""

    grid: np.ndarray
    resolution: tuple[int, int]
    N: int
    S: int
    hbar: float

    @property
    def q(self) -> np.ndarray:
        return np.arange(self.resolution[0]) / self.resolution[0]

    @property
    def p(self) -> np.ndarray:
        return self.S * np.arange(self.resolution[1]) / self.resolution[1]

    @property
    def cell_area(self) -> float:
        return self.S / (self.resolution[0] * self.resolution[1])

    @property
    def total(self) -> float:
        return float(self.grid.sum() * self.cell_area)

    def q_marginal(self) -> np.ndarray:
        return self.grid.sum(axis=1) * self.S / self.resolution[1]

    def p_marginal(self) -> np.ndarray:
        return self.grid.sum(axis=0) / self.resolution[0]


def interpolate_state(state: QuantumState, n_points: int) -> np.ndarray:
    """Band-limited continuum wavefunction ``psi(a / n_points)``.

    Momentum indices are lifted to the ``N`` values nearest the mean momentum
    so a packet near ``p = 0`` is not split across the band edge.
    """
    tq = state.quantization
    N = tq.N
    phi = state.momentum_amplitudes() / state.norm
    weights = np.abs(phi) ** 2
    m = np.arange(N)
    center = np.angle(np.sum(weights * np.exp(2j * np.pi * m / N))) / (2 * np.pi) * N
    lifted = np.round(center + (m - center + N / 2) % N - N / 2).astype(int)
    spec = np.zeros(n_points, dtype=complex)
    spec[lifted % n_points] = phi
    return np.fft.ifft(spec) * n_points


def wigner_transform(state: QuantumState, resolution: tuple[int, int] | None = None) -> PhaseSpaceDensity:
    """Discrete Wigner density of ``state``.

    ``resolution = (n_q, n_p)`` defaults to ``(2N, 2S N)``, square cells of
    side ``1/2N``; ``n_q`` must be a multiple of ``2N`` and ``n_p >= 2N``.
    """
    tq = state.quantization
    N, S = tq.N, tq.S
    n_q, n_p = resolution if resolution is not None else (2 * N, 2 * S * N)
    if n_q < 2 * N or n_p < 2 * N:
        raise ResolutionError(f"resolution {(n_q, n_p)} is coarser than (2N, 2N) = {(2 * N, 2 * N)}")
    if n_q % (2 * N):
        raise ResolutionError(f"n_q = {n_q} must be a multiple of 2N = {2 * N}")
    r = n_q // (2 * N)
    psi = interpolate_state(state, n_q)
    half = N // 2
    ks = np.arange(-half, half + 1)
    w = np.ones(len(ks))
    if N % 2 == 0:
        w[0] = w[-1] = 0.5
    a = np.arange(n_q)[:, None]
    corr = np.conj(psi[(a - r * ks) % n_q]) * psi[(a + r * ks) % n_q] * w
    table = np.zeros((n_q, n_p), dtype=complex)
    np.add.at(table, (slice(None), ks % n_p), corr)
    # dy / (2 pi hbar) = 1/S and p y / hbar = 2 pi b k / n_p for either torus
    W = np.fft.fft(table, axis=1).real / S
    return PhaseSpaceDensity(W, (n_q, n_p), N, S, tq.hbar)


def peak_density(hbar: float) -> float:
    """Maximum of a minimum-uncertainty Gaussian's Wigner density."""
    return 1.0 / (math.pi * hbar)


def level_value(level: str, hbar: float) -> float:
    return peak_density(hbar) * math.exp(-LEVEL_EXPONENTS[level])


@dataclass
class Contour:
    level: str
    value: float
    points: np.ndarray  # (n, 2) lifted (q, p)
    closed: bool

    @property
    def area(self) -> float:
        return polygon_area(self.points)

    @property
    def centroid(self) -> np.ndarray:
        return polygon_centroid(self.points)

    @property
    def circularity(self) -> float:
        return circularity(self.points)


@dataclass
class ContourSet:
    contours: dict = field(default_factory=dict)  # level -> list[Contour]
    offset: tuple[float, float] = (0.0, 0.0)

    def main(self, level: str) -> Contour | None:
        """Largest-area contour at ``level``."""
        items = self.contours.get(level, [])
        return max(items, key=lambda c: c.area) if items else None

    @property
    def multi(self) -> dict:
        """Levels whose contour came out as several polylines."""
        return {k: len(v) > 1 for k, v in self.contours.items()}


def polygon_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def polygon_centroid(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cross = x * y1 - x1 * y
    a = cross.sum() / 2.0
    if a == 0.0:
        return points.mean(axis=0)
    return np.array([((x + x1) * cross).sum(), ((y + y1) * cross).sum()]) / (6.0 * a)


def circularity(points: np.ndarray) -> float:
    """Ratio of largest to smallest vertex distance from the centroid."""
    r = np.hypot(*(points - polygon_centroid(points)).T)
    return float(r.max() / r.min())


def extract_contours(
    density: PhaseSpaceDensity,
    levels: Sequence[str] = (TWO_SIGMA, HALF_SIGMA),
    reference: str = "ideal",
) -> ContourSet:
    """Closed polylines at the 2-sigma and sigma/2 Gaussian levels.

    ``reference="ideal"`` uses thresholds of an ideal Gaussian at this hbar;
    ``reference="peak"`` scales them by the density's own maximum instead.
    The grid is first rolled so the blob's peak sits mid-grid, which keeps a
    packet straddling the torus seam in one piece.
    """
    g = density.grid
    n_q, n_p = g.shape
    ia, ib = np.unravel_index(np.argmax(g), g.shape)
    sa, sb = n_q // 2 - ia, n_p // 2 - ib
    rolled = np.roll(g, (sa, sb), axis=(0, 1))
    dq, dp = 1.0 / n_q, density.S / n_p
    out = ContourSet(offset=(-sa * dq, -sb * dp))
    peak = g.max()
    for level in levels:
        if level not in LEVEL_EXPONENTS:
            raise ValueError(f"unknown contour level {level!r}")
        value = level_value(level, density.hbar)
        if reference == "peak":
            value = peak * math.exp(-LEVEL_EXPONENTS[level])
        elif reference != "ideal":
            raise ValueError(f"unknown reference {reference!r}")
        items = []
        for line in find_contours(rolled, value):
            closed = bool(np.allclose(line[0], line[-1]))
            pts = np.column_stack([(line[:, 0] - sa) * dq, (line[:, 1] - sb) * dp])
            if closed:
                pts = pts[:-1]
            items.append(Contour(level, value, pts, closed))
        out.contours[level] = items
    return out


# ---------------------------------------------------------------------------
# export


def write_density_csv(density: PhaseSpaceDensity, path, config: dict | None = None) -> None:
    qq, pp = np.meshgrid(density.q, density.p, indexing="ij")
    rows = np.column_stack([qq.ravel(), pp.ravel(), density.grid.ravel()])
    body = "\n".join(f"{q:.12g},{p:.12g},{w:.12g}" for q, p, w in rows)
    Path(path).write_text(json_header(config or {}) + "q,p,w\n" + body + "\n")


def write_contours_csv(sets: Sequence[tuple[int, ContourSet]], path, config: dict | None = None) -> None:
    """Rows ``t, level, polyline, vertex, q, p, closed``."""
    lines = [json_header(config or {}), "t,level,polyline,vertex,q,p,closed\n"]
    for t, cs in sets:
        for level in sorted(cs.contours):
            for i, c in enumerate(cs.contours[level]):
                for v, (q, p) in enumerate(c.points):
                    lines.append(f"{t},{level},{i},{v},{q:.17g},{p:.17g},{int(c.closed)}\n")
    Path(path).write_text("".join(lines))


_STYLE = {TWO_SIGMA: ("#1f4e9c", 1.2), HALF_SIGMA: ("#b22222", 0.8)}


def contours_svg(
    sets: Sequence[tuple[int, ContourSet]],
    bounds: tuple[float, float, float, float] | None = None,
    size: int = 480,
    config: dict | None = None,
) -> str:
    """SVG of contour sets in the ``(q, p)`` plane, each labelled with its time."""
    pts = [c.points for _, cs in sets for items in cs.contours.values() for c in items]
    if bounds is None:
        allp = np.vstack(pts) if pts else np.zeros((1, 2))
        lo, hi = allp.min(axis=0), allp.max(axis=0)
        pad = 0.08 * max(hi - lo) + 1e-3
        bounds = (lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad)
    q0, q1, p0, p1 = bounds
    scale = size / max(q1 - q0, p1 - p0)
    width, height = (q1 - q0) * scale, (p1 - p0) * scale

    def xy(q, p):
        return (q - q0) * scale, height - (p - p0) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1f}" height="{height:.1f}" '
        f'viewBox="0 0 {width:.1f} {height:.1f}">'
    ]
    if config is not None:
        out.append("<metadata>" + json.dumps(config, sort_keys=True).replace("<", "&lt;") + "</metadata>")
    out.append(f'<rect width="{width:.1f}" height="{height:.1f}" fill="white" stroke="#888"/>')
    for t, cs in sets:
        for level in sorted(cs.contours):
            color, lw = _STYLE.get(level, ("black", 1.0))
            for c in cs.contours[level]:
                path = " ".join("{:.2f},{:.2f}".format(*xy(q, p)) for q, p in c.points)
                tag = "polygon" if c.closed else "polyline"
                out.append(f'<{tag} points="{path}" fill="none" stroke="{color}" stroke-width="{lw}"/>')
        main = cs.main(TWO_SIGMA) or next((c for v in cs.contours.values() for c in v), None)
        if main is not None:
            x, y = xy(*main.points[np.argmax(main.points[:, 1])])
            out.append(f'<text x="{x:.2f}" y="{y - 4:.2f}" font-size="11" text-anchor="middle">t={t}</text>')
    out.append(
        f'<text x="4" y="{height - 4:.1f}" font-size="10">q [{q0:.4f}, {q1:.4f}]  p [{p0:.4f}, {p1:.4f}]</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_contours_svg(sets, path, bounds=None, config: dict | None = None) -> None:
    Path(path).write_text(contours_svg(sets, bounds, config=config))
