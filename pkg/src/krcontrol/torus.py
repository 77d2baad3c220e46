"""Classical kicked-rotor dynamics on the torus.

The standard map in the dimensionless units used throughout::

    p' = p - K/(2 pi) sin(2 pi q)
    q' = q + p'

Positions live on [0, 1).  Momenta live on [0, S) where S is the torus
action: S = 2 for the controlled rotor (half-step free flights make p and
p + 1 distinguishable), S = 1 for the plain unit-torus rotor.

Tangent vectors are ordered momentum first, ``(dp, dq)``.  Every stability
matrix in this package uses that ordering; swapping it silently breaks the
linear canonical transformations built in :mod:`krcontrol.quantum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .control import ControlScheme, SchemeError, kick_pair

TWO_PI = 2.0 * math.pi

#: Free flight over half a period, momentum-first ordering.
HALF_FLIGHT = np.array([[1.0, 0.0], [0.5, 1.0]])
FULL_FLIGHT = np.array([[1.0, 0.0], [1.0, 1.0]])


@dataclass(frozen=True)
class KickedRotorParams:
    K: float = 8.0
    torus_action: int = 2

    def __post_init__(self) -> None:
        if not self.K >= 0:
            raise ValueError(f"kick strength must be non-negative, got K={self.K}")
        if self.torus_action not in (1, 2):
            raise ValueError(f"torus action must be 1 or 2, got {self.torus_action}")

    @property
    def kick_scale(self) -> float:
        return self.K / TWO_PI


@dataclass(frozen=True)
class PhasePoint:
    """A phase-space point reduced to the fundamental domain, plus windings.

    ``q`` is in [0, 1) and ``p`` in [0, period_p).  The lifted coordinates are
    ``q + wind_q`` and ``p + period_p * wind_p``.
    """

    q: float
    p: float
    wind_q: int = 0
    wind_p: int = 0
    period_p: int = 2

    @classmethod
    def from_unreduced(cls, q: float, p: float, period_p: int = 2) -> "PhasePoint":
        wq = math.floor(q)
        wp = math.floor(p / period_p)
        rq = q - wq
        rp = p - period_p * wp
        # floor/subtract can land exactly on the upper edge for tiny negatives,
        # and p / period_p can underflow to -0.0 for subnormal p
        if rp < 0.0:
            rp, wp = rp + period_p, wp - 1
        if rq >= 1.0:
            rq, wq = rq - 1.0, wq + 1
        if rp >= period_p:
            rp, wp = rp - period_p, wp + 1
        return cls(rq, rp, int(wq), int(wp), period_p)

    @property
    def unreduced(self) -> tuple[float, float]:
        return self.q + self.wind_q, self.p + self.period_p * self.wind_p

    def reduced(self) -> "PhasePoint":
        return PhasePoint(self.q, self.p, 0, 0, self.period_p)

    def as_array(self) -> np.ndarray:
        """Lifted ``(q, p)``."""
        return np.array(self.unreduced)


def _point(x, period_p: int) -> tuple[float, float]:
    if isinstance(x, PhasePoint):
        return x.unreduced
    q, p = x
    return float(q), float(p)


# Lifted coordinates are propagated directly so that unwrapped trajectories
# reproduce to rounding; reduction happens only when a PhasePoint is built.


def standard_map_step(x: PhasePoint, params: KickedRotorParams) -> PhasePoint:
    q, p = _point(x, params.torus_action)
    p = p - params.kick_scale * math.sin(TWO_PI * q)
    q = q + p
    return PhasePoint.from_unreduced(q, p, params.torus_action)


def inverse_map_step(x: PhasePoint, params: KickedRotorParams) -> PhasePoint:
    q, p = _point(x, params.torus_action)
    q = q - p
    p = p + params.kick_scale * math.sin(TWO_PI * q)
    return PhasePoint.from_unreduced(q, p, params.torus_action)


def iterate_map(q: float, p: float, n: int, K: float) -> np.ndarray:
    """Lifted trajectory ``[(q_0, p_0), ..., (q_n, p_n)]`` of the standard map."""
    out = np.empty((n + 1, 2))
    out[0] = q, p
    c = K / TWO_PI
    for i in range(1, n + 1):
        p = p - c * math.sin(TWO_PI * q)
        q = q + p
        out[i] = q, p
    return out


def controlled_map_step(
    x: PhasePoint,
    orbit_point_full: PhasePoint,
    orbit_point_half: PhasePoint,
    scheme: ControlScheme,
    params: KickedRotorParams,
) -> tuple[PhasePoint, PhasePoint]:
    """One period of the controlled rotor.

    Kick with ``V(q; n)``, fly half a period, kick with ``W(q; n + 1/2)``, fly
    the remaining half.  Returns the points at n + 1/2 (after the half flight)
    and at n + 1.
    """
    scheme = ControlScheme.parse(scheme)
    if not scheme.has_potentials:
        raise SchemeError(f"controlled map needs a designed scheme, got {scheme.value!r}")
    V, W = kick_pair(scheme, _point(orbit_point_full, 2)[0], _point(orbit_point_half, 2)[0], params.K)
    q, p = _point(x, params.torus_action)
    p = p - V.derivative(q, 1)
    q = q + 0.5 * p
    half = PhasePoint.from_unreduced(q, p, params.torus_action)
    p = p - W.derivative(q, 1)
    q = q + 0.5 * p
    return half, PhasePoint.from_unreduced(q, p, params.torus_action)


@dataclass(frozen=True)
class StabilityMatrix:
    """2x2 tangent map acting on ``(dp, dq)``."""

    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def from_array(cls, a) -> "StabilityMatrix":
        a = np.asarray(a, dtype=float)
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    @property
    def array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def inverse(self) -> "StabilityMatrix":
        d = self.det
        return StabilityMatrix(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)

    def __matmul__(self, other: "StabilityMatrix") -> "StabilityMatrix":
        return StabilityMatrix.from_array(self.array @ other.array)

    def is_symplectic(self, tol: float = 1e-12) -> bool:
        return abs(self.det - 1.0) <= tol


def kick_matrix(curvature: float) -> np.ndarray:
    """Kick with potential curvature ``V''``: ``dp' = dp - V'' dq``."""
    return np.array([[1.0, -curvature], [0.0, 1.0]])


def stability_step_uncontrolled(q: float, params: KickedRotorParams) -> StabilityMatrix:
    kc = params.K * math.cos(TWO_PI * q)
    return StabilityMatrix(1.0, -kc, 1.0, 1.0 - kc)


def stability_step_controlled(
    x_n: PhasePoint,
    x_half: PhasePoint,
    orbit_full: PhasePoint,
    orbit_half: PhasePoint,
    scheme: ControlScheme,
    params: KickedRotorParams,
) -> StabilityMatrix:
    """Product of the two half-step matrices, second half on the left."""
    scheme = ControlScheme.parse(scheme)
    if not scheme.has_potentials:
        raise SchemeError(f"controlled stability needs a designed scheme, got {scheme.value!r}")
    V, W = kick_pair(scheme, _point(orbit_full, 2)[0], _point(orbit_half, 2)[0], params.K)
    first = HALF_FLIGHT @ kick_matrix(V.derivative(_point(x_n, 2)[0], 2))
    second = HALF_FLIGHT @ kick_matrix(W.derivative(_point(x_half, 2)[0], 2))
    return StabilityMatrix.from_array(second @ first)


def accumulate(matrices: Iterable[StabilityMatrix]) -> StabilityMatrix:
    """Ordered product ``M_{n-1} ... M_1 M_0``."""
    total = np.eye(2)
    for m in matrices:
        total = m.array @ total
    return StabilityMatrix.from_array(total)


def trajectory_stability(qs: Sequence[float], params: KickedRotorParams) -> StabilityMatrix:
    return accumulate(stability_step_uncontrolled(q, params) for q in qs)


def lyapunov_estimate(
    params: KickedRotorParams,
    n_steps: int = 10_000,
    n_samples: int = 10,
    seed: int = 0,
    transient: int = 100,
) -> float:
    """Largest Lyapunov exponent from QR-renormalized tangent dynamics.

    ``n_samples`` random initial conditions are propagated together; the
    exponent is the sample mean of ``sum(log R_11) / n_steps``.
    """
    if n_steps < 1000 or n_samples < 10:
        raise ValueError("need n_steps >= 1000 and n_samples >= 10")
    rng = np.random.default_rng(seed)
    q = rng.random(n_samples)
    p = rng.random(n_samples) * params.torus_action
    c = params.kick_scale
    for _ in range(transient):
        p = p - c * np.sin(TWO_PI * q)
        q = np.mod(q + p, 1.0)
    Q = np.broadcast_to(np.eye(2), (n_samples, 2, 2)).copy()
    log_growth = np.zeros(n_samples)
    for _ in range(n_steps):
        kc = params.K * np.cos(TWO_PI * q)
        M = np.empty((n_samples, 2, 2))
        M[:, 0, 0] = 1.0
        M[:, 0, 1] = -kc
        M[:, 1, 0] = 1.0
        M[:, 1, 1] = 1.0 - kc
        Q, R = np.linalg.qr(M @ Q)
        log_growth += np.log(np.abs(R[:, 0, 0]))
        p = np.mod(p - c * np.sin(TWO_PI * q), params.torus_action)
        q = np.mod(q + p, 1.0)
    return float(np.mean(log_growth / n_steps))


def qr_log_det(qs: Sequence[float], params: KickedRotorParams) -> float:
    """``log|det|`` of the accumulated tangent map, tracked through QR factors.

    Direct products lose the determinant to cancellation once the entries grow
    past ~1e8; the QR route keeps it to rounding.
    """
    Q = np.eye(2)
    total = 0.0
    for q in qs:
        Q, R = np.linalg.qr(stability_step_uncontrolled(q, params).array @ Q)
        total += math.log(abs(R[0, 0] * R[1, 1]))
    return total
