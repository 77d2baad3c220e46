"""Kick potentials of the controlled kicked rotor.

Each control scheme replaces the single kick of the rotor by a full-step kick
``V(q; n)`` and a weak half-step kick ``W(q; n + 1/2)``.  All potentials are
short Fourier series in the angle ``theta = 2*pi*(q - center)`` measured from
the control trajectory, which keeps them 1-periodic and makes every derivative
available in closed form.

Derivative constraints at the trajectory centers (momentum-first tangent
convention, see :mod:`krcontrol.torus`)::

    scheme   V'(c)                  V''(c)   W'(c)   W''(c)
    SolA     K/(2 pi) sin(2 pi c)   0        0       4/5
    SolB     K/(2 pi) sin(2 pi c)   4        0       4

The improved variants substitute the frequency-doubled sine
``(4/3) [sin(theta) - sin(2 theta)/8]`` for ``sin(theta)``, which keeps ``V'``
and ``V''`` at the center and also zeroes ``V'''`` there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

TWO_PI = 2.0 * math.pi


class ControlScheme(str, enum.Enum):
    """Propagation protocols."""

    UNCONTROLLED = "uncontrolled"
    UNWIND_M = "unwind_m"
    SOL_A = "sol_a"
    SOL_A_IMPROVED = "sol_a_improved"
    SOL_B = "sol_b"
    SOL_B_IMPROVED = "sol_b_improved"

    @property
    def has_potentials(self) -> bool:
        return self in _DESIGNED

    @classmethod
    def parse(cls, value: "str | ControlScheme") -> "ControlScheme":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "a": cls.SOL_A,
            "a_improved": cls.SOL_A_IMPROVED,
            "b": cls.SOL_B,
            "b_improved": cls.SOL_B_IMPROVED,
            "unwind": cls.UNWIND_M,
        }
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown control scheme {value!r}") from None


_DESIGNED = frozenset(
    {
        ControlScheme.SOL_A,
        ControlScheme.SOL_A_IMPROVED,
        ControlScheme.SOL_B,
        ControlScheme.SOL_B_IMPROVED,
    }
)
_IMPROVED = frozenset({ControlScheme.SOL_A_IMPROVED, ControlScheme.SOL_B_IMPROVED})
_SOLUTION_B = frozenset({ControlScheme.SOL_B, ControlScheme.SOL_B_IMPROVED})

FULL = "full"
HALF = "half"


class SchemeError(ValueError):
    """A scheme was used where it has no designed kick potential."""


@dataclass(frozen=True)
class KickPotential:
    """One kick of a control scheme.

    Parameters
    ----------
    scheme : ControlScheme
        Must be one of the four designed solutions.
    timing : {"full", "half"}
        Integer-time kick ``V(q; n)`` or half-integer kick ``W(q; n + 1/2)``.
    center : float
        Trajectory position ``q_gamma(n)`` (full) or ``q_gamma(n + 1/2)`` (half).
    K : float
        Kick strength of the original rotor.  Only the full-step kick uses it.
    """

    scheme: ControlScheme
    timing: str
    center: float
    K: float = 8.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", ControlScheme.parse(self.scheme))
        if not self.scheme.has_potentials:
            raise SchemeError(f"scheme {self.scheme.value!r} has no designed kick potential")
        if self.timing not in (FULL, HALF):
            raise ValueError(f"timing must be 'full' or 'half', got {self.timing!r}")

    @property
    def coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """Cosine and sine coefficients ``(a_k, b_k)`` for harmonics k = 1, 2."""
        a = np.zeros(2)
        b = np.zeros(2)
        if self.timing == HALF:
            a[0] = -1.0 / math.pi**2 if self.scheme in _SOLUTION_B else -1.0 / (5.0 * math.pi**2)
            return a, b
        impulse = self.K * math.sin(TWO_PI * self.center) / (4.0 * math.pi**2)
        if self.scheme in _IMPROVED:
            b[0] = impulse * 4.0 / 3.0
            b[1] = -impulse / 6.0
        else:
            b[0] = impulse
        if self.scheme in _SOLUTION_B:
            a[0] = -1.0 / math.pi**2
        return a, b

    def derivative(self, q: Any, order: int = 0) -> Any:
        """``d^order V / dq^order`` at ``q`` (scalar or array)."""
        theta = TWO_PI * (np.asarray(q, dtype=float) - self.center)
        a, b = self.coefficients
        out = np.zeros_like(theta)
        for k in (1, 2):
            if a[k - 1] == 0.0 and b[k - 1] == 0.0:
                continue
            w = TWO_PI * k
            # d^r/dq^r cos(k theta) = w^r cos(k theta + r pi/2), likewise for sin
            shift = order * math.pi / 2.0
            out = out + w**order * (
                a[k - 1] * np.cos(k * theta + shift) + b[k - 1] * np.sin(k * theta + shift)
            )
        return out if out.ndim else float(out)

    def __call__(self, q: Any) -> Any:
        return self.derivative(q, 0)


def potential_value(pot: KickPotential, q: Any) -> Any:
    return pot.derivative(q, 0)


def potential_derivatives(pot: KickPotential, q: Any) -> tuple[Any, Any]:
    """First and second derivatives of the kick potential."""
    return pot.derivative(q, 1), pot.derivative(q, 2)


def kick_pair(scheme: ControlScheme, q_full: float, q_half: float, K: float) -> tuple[KickPotential, KickPotential]:
    """Full- and half-step potentials for one step of the control orbit."""
    return KickPotential(scheme, FULL, q_full, K), KickPotential(scheme, HALF, q_half, K)


def solution_b_amplitude_phase(center: float, K: float) -> tuple[float, float]:
    """``(K(n), phi(n))`` of the single phase-shifted cosine form of the SolB kick.

    ``phi`` comes from ``atan2`` so the quadrant is right for either sign of
    ``sin(2 pi q_gamma(n))``.
    """
    s = math.sin(TWO_PI * center)
    amplitude = K * math.sqrt(16.0 / K**2 + s * s)
    phase = math.atan2(s, 4.0 / K)
    return amplitude, phase


def solution_b_compact(center: float, K: float, q: Any) -> Any:
    """SolB full-step kick written as ``-(K(n)/4 pi^2) cos(theta + phi(n))``."""
    amplitude, phase = solution_b_amplitude_phase(center, K)
    theta = TWO_PI * (np.asarray(q, dtype=float) - center)
    return -amplitude / (4.0 * math.pi**2) * np.cos(theta + phase)


# Target values of (V'', W'') at the centers.
SECOND_DERIVATIVE_TARGETS = {
    ControlScheme.SOL_A: (0.0, 0.8),
    ControlScheme.SOL_A_IMPROVED: (0.0, 0.8),
    ControlScheme.SOL_B: (4.0, 4.0),
    ControlScheme.SOL_B_IMPROVED: (4.0, 4.0),
}


@dataclass
class ConstraintReport:
    scheme: ControlScheme
    impulse_dev: np.ndarray
    half_slope_dev: np.ndarray
    curvature_full_dev: np.ndarray
    curvature_half_dev: np.ndarray

    @property
    def max_deviation(self) -> float:
        parts = [self.impulse_dev, self.half_slope_dev, self.curvature_full_dev, self.curvature_half_dev]
        return float(max(np.max(np.abs(p)) for p in parts))

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "max_deviation": self.max_deviation,
            "impulse": np.abs(self.impulse_dev).max().item(),
            "half_slope": np.abs(self.half_slope_dev).max().item(),
            "curvature_full": np.abs(self.curvature_full_dev).max().item(),
            "curvature_half": np.abs(self.curvature_half_dev).max().item(),
        }


def verify_constraints(orbit, scheme: ControlScheme, centers=None) -> ConstraintReport:
    """Check the kick constraints along a control orbit.

    ``centers`` optionally overrides the ``(q_full, q_half)`` used to build the
    potentials (e.g. perturbed copies); the constraints are always evaluated at
    the orbit's own points.
    """
    scheme = ControlScheme.parse(scheme)
    q_full = np.array([x.unreduced[0] for x in orbit.points_full[:-1]])
    q_half = np.array([x.unreduced[0] for x in orbit.points_half])
    c_full, c_half = (q_full, q_half) if centers is None else centers
    target_full, target_half = SECOND_DERIVATIVE_TARGETS[scheme]
    dev = {k: [] for k in ("imp", "slope", "cf", "ch")}
    for n in range(len(q_full)):
        V, W = kick_pair(scheme, c_full[n], c_half[n], orbit.K)
        v1, v2 = potential_derivatives(V, q_full[n])
        w1, w2 = potential_derivatives(W, q_half[n])
        dev["imp"].append(v1 - orbit.K / TWO_PI * math.sin(TWO_PI * q_full[n]))
        dev["slope"].append(w1)
        dev["cf"].append(v2 - target_full)
        dev["ch"].append(w2 - target_half)
    return ConstraintReport(
        scheme,
        np.array(dev["imp"]),
        np.array(dev["slope"]),
        np.array(dev["cf"]),
        np.array(dev["ch"]),
    )
