"""Heteroclinic control orbits of the standard map.

Search strategy
---------------
1. *Connections.*  A long orbit segment is pinned at both ends to the
   linearized manifolds (start on the unstable eigendirection of alpha, end on
   the stable eigendirection of beta).  The interior positions solve the
   discrete Euler-Lagrange equations of the standard map,
   ``q[n+1] - 2 q[n] + q[n-1] + K/(2 pi) sin(2 pi q[n]) = 0``, by damped
   Newton iteration.  Seeds are a coarse grid of transit positions, one batch
   per winding signature (the lift of beta reached by the orbit).
2. *Window and refinement.*  Each connection is cut to ``tau`` steps where the
   summed shift distance is smallest.  The start point is then slid along the
   unstable manifold of alpha to the exact minimum of
   ``shift_in + shift_out``; the finite orbit is regenerated by forward
   iteration, so it satisfies the map to rounding.

Shift distances are Euclidean in ``(q, p)`` using the nearest torus image.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .torus import KickedRotorParams, PhasePoint, stability_step_uncontrolled

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

ALPHA = (0.5, 0.0)
BETA = (0.0, 0.0)


def torus_delta(x, y, period_p: float = 2.0) -> np.ndarray:
    """Nearest-image displacement ``x - y`` on the torus."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    d[..., 0] = (d[..., 0] + 0.5) % 1.0 - 0.5
    d[..., 1] = (d[..., 1] + 0.5 * period_p) % period_p - 0.5 * period_p
    return d


def shift_distance(x, y, period_p: float = 2.0) -> float:
    return float(np.hypot(*torus_delta(x, y, period_p)))


@dataclass
class ControlOrbit:
    """A finite orbit segment used as the control trajectory.

    ``points_full[n]`` is the lifted state just before the kick at time n;
    ``points_half[n]`` is the state at n + 1/2, i.e. after the full-step kick
    and half a free flight.
    """

    points_full: list[PhasePoint]
    points_half: list[PhasePoint]
    tau: int
    shift_in: float
    shift_out: float
    K: float
    alpha: tuple[float, float] = ALPHA
    beta: tuple[float, float] = BETA

    @classmethod
    def from_trajectory(cls, traj, K: float, alpha=ALPHA, beta=BETA) -> "ControlOrbit":
        traj = np.asarray(traj, dtype=float)
        q, p = traj[:, 0], traj[:, 1]
        half = np.column_stack([q[:-1] + 0.5 * p[1:], p[1:]])
        return cls(
            points_full=[PhasePoint.from_unreduced(a, b) for a, b in traj],
            points_half=[PhasePoint.from_unreduced(a, b) for a, b in half],
            tau=len(traj) - 1,
            shift_in=shift_distance(traj[0], alpha),
            shift_out=shift_distance(traj[-1], beta),
            K=float(K),
            alpha=tuple(map(float, alpha)),
            beta=tuple(map(float, beta)),
        )

    @property
    def full_array(self) -> np.ndarray:
        return np.array([x.unreduced for x in self.points_full])

    @property
    def half_array(self) -> np.ndarray:
        return np.array([x.unreduced for x in self.points_half])

    @property
    def total_shift(self) -> float:
        return self.shift_in + self.shift_out

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "tau": self.tau,
            "alpha": list(self.alpha),
            "beta": list(self.beta),
            "points_full": self.full_array.tolist(),
            "points_half": self.half_array.tolist(),
            "shift_in": self.shift_in,
            "shift_out": self.shift_out,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ControlOrbit":
        orbit = cls.from_trajectory(
            d["points_full"], d["K"], tuple(d.get("alpha", ALPHA)), tuple(d.get("beta", BETA))
        )
        if "points_half" in d:
            orbit.points_half = [PhasePoint.from_unreduced(a, b) for a, b in d["points_half"]]
        return orbit


def save_orbit(orbit: ControlOrbit, path, config: dict | None = None) -> None:
    payload = orbit.to_dict()
    if config is not None:
        payload["config"] = config
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_orbit(path) -> ControlOrbit:
    return ControlOrbit.from_dict(json.loads(Path(path).read_text()))


def table_one_orbit() -> ControlOrbit:
    """The bundled reference orbit (K = 8, tau = 6, (0.5, 0) -> (0, 0))."""
    raw = resources.files("krcontrol.data").joinpath("table1.json").read_text()
    return ControlOrbit.from_dict(json.loads(raw))


@dataclass
class OrbitReport:
    step_residuals: np.ndarray
    half_residuals: np.ndarray
    shift_in: float
    shift_out: float

    @property
    def max_residual(self) -> float:
        r = np.concatenate([self.step_residuals, self.half_residuals, [0.0]])
        return float(r.max())

    def as_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "step_residuals": self.step_residuals.tolist(),
            "half_residuals": self.half_residuals.tolist(),
            "shift_in": self.shift_in,
            "shift_out": self.shift_out,
        }


def verify_orbit(orbit: ControlOrbit, params: KickedRotorParams) -> OrbitReport:
    """Forward-map residuals (Euclidean, lifted coordinates) along the orbit."""
    full = orbit.full_array
    q, p = full[:-1, 0], full[:-1, 1]
    p1 = p - params.kick_scale * np.sin(TWO_PI * q)
    image = np.column_stack([q + p1, p1])
    step = np.hypot(*(image - full[1:]).T) if len(full) > 1 else np.zeros(0)
    half_pred = np.column_stack([q + 0.5 * p1, p1])
    half = orbit.half_array.reshape(-1, 2)
    half_res = np.hypot(*(half_pred - half).T) if len(half) else np.zeros(0)
    return OrbitReport(
        step_residuals=np.asarray(step),
        half_residuals=np.asarray(half_res),
        shift_in=shift_distance(full[0], orbit.alpha),
        shift_out=shift_distance(full[-1], orbit.beta),
    )


@dataclass
class SearchConfig:
    tau: int = 6
    endpoint_alpha: tuple[float, float] = ALPHA
    endpoint_beta: tuple[float, float] = BETA
    newton_tol: float = 1e-11
    max_iter: int = 60
    candidate_windings: Sequence[int] = (-1, 0, 1, 2)
    capture_radius: float = 0.05
    grid_size: int = 8
    max_transit: int = 3
    padding: int = 8

    def __post_init__(self) -> None:
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if int(self.tau) != self.tau or self.tau < 0:
            raise ValueError(f"tau must be a non-negative integer, got {self.tau}")
        self.tau = int(self.tau)


class OrbitSet(list):
    """List of orbits plus search status and diagnostics."""

    def __init__(self, orbits=(), status: str = "ok", diagnostics: dict | None = None):
        super().__init__(orbits)
        self.status = status if self else "empty"
        self.diagnostics = diagnostics or {}


def _hyperbolic_directions(point, params: KickedRotorParams) -> tuple[float, np.ndarray, np.ndarray]:
    """Unstable multiplier and unit (q, p) eigendirections at a fixed point."""
    M = stability_step_uncontrolled(point[0], params).array
    w, V = np.linalg.eig(M)
    if np.iscomplexobj(w) and np.any(np.abs(w.imag) > 0):
        raise ValueError(f"fixed point {tuple(point)} is not hyperbolic")
    w, V = w.real, V.real
    iu, is_ = int(np.argmax(np.abs(w))), int(np.argmin(np.abs(w)))
    eu = np.array([V[1, iu], V[0, iu]])
    es = np.array([V[1, is_], V[0, is_]])
    eu /= np.linalg.norm(eu) * (1.0 if eu[0] >= 0 else -1.0)
    es /= np.linalg.norm(es) * (1.0 if es[0] >= 0 else -1.0)
    return float(w[iu]), eu, es


def _check_fixed(point, params: KickedRotorParams) -> None:
    q, p = point
    p1 = p - params.kick_scale * math.sin(TWO_PI * q)
    err = shift_distance((q + p1, p1), (q, p), params.torus_action)
    if err > 1e-12:
        raise ValueError(f"endpoint {tuple(point)} is not a fixed point (residual {err:.2e})")


def _solve_connections(seeds, alpha, beta_lift, eu, es, c, cfg):
    """Batched damped Newton on [s, q_1 .. q_{T-1}, t]."""
    X = np.array(seeds, dtype=float)
    B, n = X.shape
    T = n - 1
    idx = np.arange(1, T)
    converged = np.zeros(B, dtype=bool)
    resid = np.full(B, np.inf)
    for _ in range(cfg.max_iter):
        s, t = X[:, 0], X[:, -1]
        q = np.empty((B, T + 1))
        q[:, 0] = alpha[0] + s * eu[0]
        q[:, 1:T] = X[:, 1:T]
        q[:, T] = beta_lift[0] + t * es[0]
        p0 = alpha[1] + s * eu[1]
        pT = beta_lift[1] + t * es[1]
        F = np.empty((B, T + 1))
        F[:, 0] = q[:, 1] - q[:, 0] - p0 + c * np.sin(TWO_PI * q[:, 0])
        F[:, 1:T] = q[:, 2:] - 2 * q[:, 1:T] + q[:, : T - 1] + c * np.sin(TWO_PI * q[:, 1:T])
        F[:, T] = q[:, T] - q[:, T - 1] - pT
        resid = np.abs(F).max(axis=1)
        converged = resid < cfg.newton_tol
        active = ~converged & np.isfinite(resid)
        if not active.any():
            break
        J = np.zeros((B, T + 1, T + 1))
        curv = TWO_PI * c * np.cos(TWO_PI * q)
        J[:, 0, 0] = (-1.0 + curv[:, 0]) * eu[0] - eu[1]
        J[:, 0, 1] = 1.0
        J[:, idx, idx] = -2.0 + curv[:, 1:T]
        J[:, idx, idx + 1] = 1.0
        J[:, idx, idx - 1] = 1.0
        J[:, 1, 0] = eu[0]
        J[:, T - 1, T] = es[0]
        J[:, T, T] = es[0] - es[1]
        J[:, T, T - 1] = -1.0
        a = np.flatnonzero(active)
        try:
            dX = np.linalg.solve(J[a], -F[a][..., None])[..., 0]
        except np.linalg.LinAlgError:
            dX = np.stack([_safe_solve(J[i], -F[i]) for i in a])
        step = np.abs(dX).max(axis=1, keepdims=True)
        dX *= np.minimum(1.0, 0.25 / np.maximum(step, 1e-300))
        X[a] += dX
    return X, converged, resid


def _safe_solve(J, F):
    try:
        return np.linalg.solve(J, F)
    except np.linalg.LinAlgError:
        return np.full_like(F, np.nan)


class _UnstableBranch:
    """Points on the unstable manifold of alpha parametrized by one coordinate.

    ``u`` is the unstable eigen-coordinate after ``depth`` forward steps from
    the linear regime; the deviation from alpha is iterated exactly so that
    the tiny offsets keep full relative precision.
    """

    def __init__(self, alpha, lam, eu, K, depth=6):
        self.alpha = np.asarray(alpha, dtype=float)
        self.eu = eu
        self.scale = lam**-depth
        self.depth = depth
        self.c = K / TWO_PI
        self.K = K
        self.sign = math.cos(TWO_PI * alpha[0])

    def start(self, u: float) -> tuple[np.ndarray, np.ndarray]:
        """Deviation from alpha and its derivative with respect to u."""
        dq, dp = u * self.scale * self.eu
        tq, tp = self.scale * self.eu
        for _ in range(self.depth):
            k = self.sign * self.c * math.sin(TWO_PI * dq)
            dk = self.sign * self.K * math.cos(TWO_PI * dq)
            dp, tp = dp - k, tp - dk * tq
            dq, tq = dq + dp, tq + tp
        return np.array([dq, dp]), np.array([tq, tp])

    def segment(self, u: float, tau: int):
        dev, ddev = self.start(u)
        q, p = self.alpha + dev
        tq, tp = ddev
        c = self.c
        traj = [(q, p)]
        for _ in range(tau):
            kc = self.K * math.cos(TWO_PI * q)
            p = p - c * math.sin(TWO_PI * q)
            tp = tp - kc * tq
            q = q + p
            tq = tq + tp
            traj.append((q, p))
        return dev, ddev, np.array(traj), np.array([tq, tp])


def _refine(branch: _UnstableBranch, u0: float, tau: int, beta, period_p: float):
    """Slide the start along the unstable manifold to minimize the shift sum."""

    def grad(u):
        dev, ddev, traj, dend = branch.segment(u, tau)
        a = float(np.hypot(*dev))
        e = torus_delta(traj[-1], beta, period_p)
        b = float(np.hypot(*e))
        return dev @ ddev / a + e @ dend / b

    _, _, _, dend = branch.segment(u0, tau)
    width = 0.02 / max(float(np.hypot(*dend)), 1e-300)
    lo, hi = u0 - width, u0 + width
    g_lo, g_hi = grad(lo), grad(hi)
    for _ in range(20):
        if g_lo < 0 < g_hi:
            break
        width *= 2.0
        lo, hi = u0 - width, u0 + width
        g_lo, g_hi = grad(lo), grad(hi)
    else:
        return None
    u = brentq(grad, lo, hi, xtol=1e-24, rtol=8.9e-16, maxiter=400)
    dev, _, traj, _ = branch.segment(u, tau)
    return u, dev, traj


def find_orbits(config: SearchConfig, params: KickedRotorParams) -> OrbitSet:
    """All distinct tau-step control orbits from near alpha to near beta."""
    alpha = np.asarray(config.endpoint_alpha, dtype=float)
    beta = np.asarray(config.endpoint_beta, dtype=float)
    _check_fixed(alpha, params)
    _check_fixed(beta, params)
    tau = config.tau
    diagnostics: dict = {"tau": tau, "seeds": 0, "converged": 0, "dropped": {}}
    if tau < 2:
        diagnostics["reason"] = "tau < 2 cannot connect two distinct fixed points"
        return OrbitSet([], diagnostics=diagnostics)

    lam, eu, _ = _hyperbolic_directions(alpha, params)
    _, _, es = _hyperbolic_directions(beta, params)
    P = params.torus_action
    c = params.kick_scale
    pad = config.padding
    grid = (np.arange(config.grid_size) + 0.5) / config.grid_size
    branch = _UnstableBranch(alpha, lam, eu, params.K)
    basis = np.column_stack([eu, _hyperbolic_directions(alpha, params)[2]])

    found: dict[tuple, ControlOrbit] = {}
    for wind in config.candidate_windings:
        beta_lift = beta + np.array([wind, 0.0])
        seeds = []
        for k in range(1, config.max_transit + 1):
            T = 2 * pad + k
            for transit in itertools.product(grid, repeat=k):
                x = np.empty(T + 1)
                x[0] = 0.0
                x[1 : pad + 1] = alpha[0]
                x[pad + 1 : pad + 1 + k] = transit
                x[pad + 1 + k : T] = beta_lift[0]
                x[T] = 0.0
                seeds.append(x)
        by_len: dict[int, list] = {}
        for x in seeds:
            by_len.setdefault(len(x), []).append(x)
        dropped = 0
        for length, group in sorted(by_len.items()):
            diagnostics["seeds"] += len(group)
            X, ok, _ = _solve_connections(group, alpha, beta_lift, eu, es, c, config)
            dropped += int((~ok).sum())
            for row in X[ok]:
                orbit = _connection_to_orbit(row, alpha, beta, beta_lift, eu, es, c, tau, branch, basis, P, config)
                if orbit is None:
                    dropped += 1
                    continue
                diagnostics["converged"] += 1
                key = tuple(np.round(np.mod(orbit.full_array, [1.0, P]).ravel(), 7))
                found.setdefault(key, orbit)
        diagnostics["dropped"][int(wind)] = dropped

    orbits = sorted(found.values(), key=_selection_key)
    diagnostics["distinct"] = len(orbits)
    diagnostics["optimal_ties"] = len(tied_orbits(orbits))
    log.debug("orbit search: %s", diagnostics)
    return OrbitSet(orbits, diagnostics=diagnostics)


def _connection_to_orbit(row, alpha, beta, beta_lift, eu, es, c, tau, branch, basis, P, cfg):
    s, t = row[0], row[-1]
    if not (abs(s) < 1e-3 and abs(t) < 1e-3):
        return None
    q = np.concatenate([[alpha[0] + s * eu[0]], row[1:-1], [beta_lift[0] + t * es[0]]])
    p = np.concatenate([[alpha[1] + s * eu[1]], np.diff(q)])
    traj = np.column_stack([q, p])
    if len(traj) <= tau:
        return None
    costs = [
        shift_distance(traj[k], alpha, P) + shift_distance(traj[k + tau], beta, P)
        for k in range(len(traj) - tau)
    ]
    k = int(np.argmin(costs))
    u0 = float(np.linalg.solve(basis, torus_delta(traj[k], alpha, P))[0])
    if u0 == 0.0:
        return None
    refined = _refine(branch, u0, tau, beta, P)
    if refined is None:
        return None
    _, dev, seg = refined
    orbit = ControlOrbit.from_trajectory(seg, 2 * math.pi * c, tuple(alpha), tuple(beta))
    orbit.shift_in = float(np.hypot(*dev))
    if orbit.shift_in > cfg.capture_radius or orbit.shift_out > cfg.capture_radius:
        return None
    return orbit


TIE_RTOL = 1e-9


def _tie_break(orbit: ControlOrbit):
    # reduced coordinates, momentum first, matching the tangent-vector convention
    red = np.mod(orbit.full_array, [1.0, 2.0])[:, ::-1]
    return (float(f"{orbit.shift_in:.9g}"), tuple(np.round(red.ravel(), 12)))


def _selection_key(orbit: ControlOrbit):
    return (orbit.total_shift, _tie_break(orbit))


def select_optimal(orbits: Sequence[ControlOrbit]) -> ControlOrbit:
    """Orbit with the smallest ``shift_in + shift_out``.

    Sums within a relative ``TIE_RTOL`` count as equal (mirror-image orbits
    tie up to rounding); ties go to the smaller ``shift_in``, then to the
    lexicographically smallest reduced ``(p, q)`` sequence.
    """
    if not orbits:
        raise ValueError("select_optimal needs at least one orbit")
    best = min(o.total_shift for o in orbits)
    tied = [o for o in orbits if o.total_shift <= best * (1.0 + TIE_RTOL)]
    return min(tied, key=_tie_break)


def tied_orbits(orbits: Sequence[ControlOrbit]) -> list[ControlOrbit]:
    """All orbits that tie with the optimum under the shift-sum metric."""
    if not orbits:
        return []
    best = min(o.total_shift for o in orbits)
    return sorted((o for o in orbits if o.total_shift <= best * (1.0 + TIE_RTOL)), key=_tie_break)
