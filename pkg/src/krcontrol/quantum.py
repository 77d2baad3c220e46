"""Torus-quantized kicked rotor: states, unitaries and controlled propagation.

Conventions
-----------
* Positions ``q_j = j/N``; momenta ``p_m = S m / N`` for ``m = 0..N-1``.
* ``2 pi hbar = S / N``; null Bloch phases throughout.
* The position/momentum change of basis is the unitary DFT,
  ``phi = fft(psi, norm="ortho")``.
* A kick by potential ``V`` multiplies the position amplitudes by
  ``exp(-i V(q_j) / hbar)``.  A free flight of duration ``t`` multiplies the
  momentum amplitudes by ``exp(-i t p_m^2 / (2 hbar))``.
* Every step kicks first and then flies, so a packet centered on
  ``(q_n, p_n)`` follows the map ``p' = p - V'(q_n)``, ``q' = q_n + t p'``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import polar

from .control import ControlScheme, SchemeError, kick_pair
from .heteroclinic import ControlOrbit, torus_delta
from .torus import KickedRotorParams, StabilityMatrix, accumulate, stability_step_uncontrolled

TWO_PI = 2.0 * math.pi


def _fft(x):
    return np.fft.fft(x, axis=0, norm="ortho")


def _ifft(x):
    return np.fft.ifft(x, axis=0, norm="ortho")


def _lift(x, center, period):
    """Representative of ``x`` (mod period) closest to ``center``."""
    return center + (np.asarray(x) - center + 0.5 * period) % period - 0.5 * period


@dataclass(frozen=True)
class TorusQuantization:
    N: int
    S: int = 2

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"Hilbert-space dimension must be an integer >= 2, got {self.N}")
        if self.S not in (1, 2):
            raise ValueError(f"torus action must be 1 or 2, got {self.S}")

    @property
    def hbar(self) -> float:
        return self.S / (TWO_PI * self.N)

    @property
    def h(self) -> float:
        """Phase-space area of one state, ``2 pi hbar``."""
        return self.S / self.N

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.N) / self.N

    @property
    def momenta(self) -> np.ndarray:
        return self.S * np.arange(self.N) / self.N

    def kinetic_phase(self, t: float) -> np.ndarray:
        """Diagonal of a free flight of duration ``t`` in the momentum basis."""
        m = np.arange(self.N, dtype=float)
        # t p^2 / (2 hbar) = pi t S m^2 / N; when t S is an integer, m^2 can be
        # reduced mod 2N first, which keeps the argument small for large N
        m2 = np.mod(m * m, 2 * self.N) if float(t * self.S).is_integer() else m * m
        return np.exp(-1j * math.pi * t * self.S * m2 / self.N)


class DimensionError(ValueError):
    """States or operators built on different quantizations were combined."""


@dataclass
class QuantumState:
    amplitudes: np.ndarray
    quantization: TorusQuantization

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.quantization.N,):
            raise DimensionError(
                f"expected {self.quantization.N} amplitudes, got shape {self.amplitudes.shape}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def momentum_amplitudes(self) -> np.ndarray:
        return _fft(self.amplitudes)

    def overlap(self, other: "QuantumState") -> complex:
        _same_space(self.quantization, other.quantization)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "QuantumState") -> float:
        """``|<self|other>|^2`` normalized by both norms."""
        ov = self.overlap(other)
        n1 = np.vdot(self.amplitudes, self.amplitudes).real
        n2 = np.vdot(other.amplitudes, other.amplitudes).real
        return float(abs(ov) ** 2 / (n1 * n2))


def _same_space(a: TorusQuantization, b: TorusQuantization) -> None:
    if a != b:
        raise DimensionError(f"quantization mismatch: {a} vs {b}")


@dataclass(frozen=True)
class WavePacketSpec:
    q_c: float
    p_c: float


class TailError(ValueError):
    """The Gaussian tails do not fit on the torus at this hbar."""


def build_gaussian(spec: WavePacketSpec, tq: TorusQuantization) -> QuantumState:
    """Minimum-uncertainty Gaussian centered on ``(q_c, p_c)``.

    Offsets ``q_j - q_c`` are taken in ``[-1/2, 1/2)``; no periodic images are
    summed, so the tails must be negligible at the seam.
    """
    tail = math.exp(-1.0 / (8.0 * tq.hbar))
    if not tail < 1e-6:
        raise TailError(
            f"N={tq.N} is too small: seam amplitude exp(-1/(8 hbar)) = {tail:.2e} >= 1e-6"
        )
    d = (tq.grid - spec.q_c + 0.5) % 1.0 - 0.5
    psi = np.exp(-(d**2) / (2.0 * tq.hbar) + 1j * spec.p_c * d / tq.hbar)
    return QuantumState(psi / np.linalg.norm(psi), tq)


# ---------------------------------------------------------------------------
# moments


def _circular_center(x, weights, period):
    z = np.sum(weights * np.exp(2j * math.pi * x / period))
    return (np.angle(z) / (2.0 * math.pi) * period) % period


def position_distribution(state: QuantumState) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def momentum_distribution(state: QuantumState) -> np.ndarray:
    return np.abs(state.momentum_amplitudes()) ** 2


def expectation_qp(state: QuantumState, center=None) -> tuple[float, float]:
    """Centroid ``(<q>, <p>)`` using the torus lift closest to ``center``.

    Without ``center`` the circular mean of each distribution picks the lift,
    with momenta represented in ``[-S/2, S/2)``.  The returned values lie
    within half a period of ``center``.
    """
    tq = state.quantization
    wq = position_distribution(state)
    wp = momentum_distribution(state)
    if center is None:
        pc = _circular_center(tq.momenta, wp, tq.S)
        center = (_circular_center(tq.grid, wq, 1.0), _lift(pc, 0.0, tq.S))
    q = _lift(tq.grid, center[0], 1.0)
    p = _lift(tq.momenta, center[1], tq.S)
    return float(np.sum(wq * q) / wq.sum()), float(np.sum(wp * p) / wp.sum())


def covariance(state: QuantumState, center=None) -> np.ndarray:
    """Symmetrized ``2x2`` covariance in ``(q, p)`` order about the centroid."""
    tq = state.quantization
    qm, pm = expectation_qp(state, center)
    psi = state.amplitudes / state.norm
    dq = _lift(tq.grid, qm, 1.0) - qm
    dp = _lift(tq.momenta, pm, tq.S) - pm
    phi = _fft(psi)
    vq = float(np.sum(np.abs(psi) ** 2 * dq**2))
    vp = float(np.sum(np.abs(phi) ** 2 * dp**2))
    dp_psi = _ifft(dp * phi)
    cqp = float(np.vdot(dq * psi, dp_psi).real)
    return np.array([[vq, cqp], [cqp, vp]])


# ---------------------------------------------------------------------------
# operators


class UnitaryOperator:
    """Unitary on a torus Hilbert space.

    Held either as a dense matrix or as a chain of factors applied in order:
    ``("q", d)`` multiplies position amplitudes by ``d``, ``("p", d)`` does the
    same in the momentum basis, ``("m", U)`` is a dense matrix.
    """

    def __init__(self, quantization: TorusQuantization, factors: Sequence = (), info: dict | None = None):
        self.quantization = quantization
        self.factors = tuple(factors)
        self.info = dict(info or {})
        for kind, arr in self.factors:
            if kind not in ("q", "p", "m"):
                raise ValueError(f"unknown factor kind {kind!r}")

    @classmethod
    def from_matrix(cls, quantization: TorusQuantization, matrix, info=None) -> "UnitaryOperator":
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (quantization.N, quantization.N):
            raise DimensionError(f"matrix shape {matrix.shape} does not match N={quantization.N}")
        return cls(quantization, [("m", matrix)], info)

    @classmethod
    def identity(cls, quantization: TorusQuantization) -> "UnitaryOperator":
        return cls(quantization)

    @property
    def is_dense(self) -> bool:
        return len(self.factors) == 1 and self.factors[0][0] == "m"

    def apply(self, psi):
        """Apply to a state, an amplitude vector, or the columns of a matrix."""
        if isinstance(psi, QuantumState):
            _same_space(self.quantization, psi.quantization)
            return QuantumState(self.apply(psi.amplitudes), psi.quantization)
        out = np.array(psi, dtype=complex)
        if out.shape[0] != self.quantization.N:
            raise DimensionError(f"vector of length {out.shape[0]} on an N={self.quantization.N} space")
        col = (slice(None),) + (None,) * (out.ndim - 1)
        for kind, arr in self.factors:
            if kind == "q":
                out = arr[col] * out
            elif kind == "p":
                out = _ifft(arr[col] * _fft(out))
            else:
                out = arr @ out
        return out

    def dense(self) -> np.ndarray:
        return self.apply(np.eye(self.quantization.N, dtype=complex))

    def __matmul__(self, other: "UnitaryOperator") -> "UnitaryOperator":
        _same_space(self.quantization, other.quantization)
        return UnitaryOperator(self.quantization, other.factors + self.factors)

    def unitarity_deviation(self) -> float:
        """``max_k |(U^dag U - I) e_k|``."""
        U = self.dense()
        G = U.conj().T @ U - np.eye(self.quantization.N)
        return float(np.max(np.linalg.norm(G, axis=0)))


def kick_factor(tq: TorusQuantization, potential_values) -> tuple[str, np.ndarray]:
    return ("q", np.exp(-1j * np.asarray(potential_values, dtype=float) / tq.hbar))


def kinetic_factor(tq: TorusQuantization, t: float) -> tuple[str, np.ndarray]:
    return ("p", tq.kinetic_phase(t))


def gauss_kernel(N: int) -> np.ndarray:
    """``(1/sqrt(iN)) exp(i pi (j-k)^2 / N)``."""
    j = np.arange(N)
    d2 = np.mod(np.subtract.outer(j, j) ** 2, 2 * N)
    return np.exp(1j * math.pi * d2 / N) / np.sqrt(1j * N)


def floquet_uncontrolled(tq: TorusQuantization, params: KickedRotorParams, dense: bool = False) -> UnitaryOperator:
    """One period of the uncontrolled rotor: kick, then a unit free flight.

    With ``dense=True`` and ``S = 1`` the matrix is built directly from the
    position kernel ``U_jk = gauss_kernel(N)_jk exp(i N K cos(2 pi k/N) / 2 pi)``;
    for ``S = 2`` it is the product of two half-step kernels, the second with
    no kick.
    """
    kick = -params.K / (4.0 * math.pi**2) * np.cos(TWO_PI * tq.grid)
    if not dense:
        return UnitaryOperator(tq, [kick_factor(tq, kick), kinetic_factor(tq, 1.0)], {"kind": "floquet"})
    G = gauss_kernel(tq.N)
    phase = np.exp(-1j * kick / tq.hbar)
    U = G * phase[None, :]
    if tq.S == 2:
        U = G @ U
    return UnitaryOperator.from_matrix(tq, U, {"kind": "floquet"})


def _require_half_steps(tq: TorusQuantization) -> None:
    if tq.S != 2:
        raise ValueError("controlled half steps need the S = 2 torus")


def controlled_kick_values(tq: TorusQuantization, orbit: ControlOrbit, scheme, n: int):
    """Full- and half-step potential values on the grid for step ``n``."""
    scheme = ControlScheme.parse(scheme)
    if not scheme.has_potentials:
        raise SchemeError(f"scheme {scheme.value!r} has no half-step construction")
    if not 0 <= n < orbit.tau:
        raise IndexError(f"step {n} outside orbit of length {orbit.tau}")
    V, W = kick_pair(scheme, orbit.points_full[n].unreduced[0], orbit.points_half[n].unreduced[0], orbit.K)
    return V(tq.grid), W(tq.grid)


def controlled_half_steps(
    tq: TorusQuantization, orbit: ControlOrbit, scheme, n: int, dense: bool = False
) -> tuple[UnitaryOperator, UnitaryOperator]:
    """Factors ``(U(1;n), U(2;n))`` of the controlled step ``U_n = U(2;n) U(1;n)``.

    Each is a kick followed by half a free flight.  ``dense=True`` returns the
    position kernels ``gauss_kernel(N)_jk exp(-i V(q_k)/hbar)``.
    """
    _require_half_steps(tq)
    V, W = controlled_kick_values(tq, orbit, scheme, n)
    out = []
    for vals, label in ((V, "U1"), (W, "U2")):
        info = {"kind": label, "step": n, "scheme": ControlScheme.parse(scheme).value}
        if dense:
            U = gauss_kernel(tq.N) * np.exp(-1j * vals / tq.hbar)[None, :]
            out.append(UnitaryOperator.from_matrix(tq, U, info))
        else:
            out.append(UnitaryOperator(tq, [kick_factor(tq, vals), kinetic_factor(tq, 0.5)], info))
    return out[0], out[1]


def shift_operator(tq: TorusQuantization, dq: float, dp: float, center=(0.0, 0.0)) -> UnitaryOperator:
    """Phase-space displacement ``exp(i (dp q - p dq) / hbar)``.

    Weyl-symmetric splitting: half the momentum boost, the translation done in
    the momentum basis, the other half boost.  ``q`` and ``p`` are lifted to
    the period nearest ``center``, which should be the packet location.
    """
    q = _lift(tq.grid, center[0], 1.0)
    p = _lift(tq.momenta, center[1], tq.S)
    factors = []
    if dp:
        factors.append(("q", np.exp(0.5j * dp * q / tq.hbar)))
    if dq:
        factors.append(("p", np.exp(-1j * p * dq / tq.hbar)))
    if dp:
        factors.append(("q", np.exp(0.5j * dp * q / tq.hbar)))
    return UnitaryOperator(tq, factors, {"kind": "shift", "dq": dq, "dp": dp})


class SingularBlockError(ValueError):
    """The stability matrix has ``m21 ~ 0``; the kernel form does not exist."""


class NotSymplecticError(ValueError):
    pass


UNWIND_METHODS = ("shear", "kernel")


def unwind_operator(
    tq: TorusQuantization,
    M: StabilityMatrix,
    center_q: float,
    center_p: float,
    method: str = "shear",
) -> UnitaryOperator:
    """Quantization of the inverse linear map ``M^-1`` about ``(center_q, center_p)``.

    ``M`` acts on ``(dp, dq)``.  Write ``A = M^-1 = [[a, b], [c, d]]``.

    ``method="shear"`` factors ``A`` into a position chirp, a free flight of
    duration ``c`` and a second chirp, each exactly unitary on the grid.

    ``method="kernel"`` samples the generating-function kernel
    ``(2 pi i hbar c)^(-1/2) exp(i (a x^2 - 2 x x' + d x'^2) / (2 hbar c))``
    (output ``x``, input ``x'``, both measured from ``center_q``), multiplies by the
    momentum-centering phase ``exp(i p_t (q - q') / hbar)`` and replaces the
    result by its closest unitary.  ``info["prepolar_deviation"]`` records the
    sampled kernel's departure from unitarity.
    """
    if not isinstance(M, StabilityMatrix):
        M = StabilityMatrix.from_array(M)
    if abs(M.det - 1.0) > 1e-9:
        raise NotSymplecticError(f"stability matrix has det {M.det!r}, expected 1")
    if abs(M.m21) < 1e-8:
        raise SingularBlockError(f"|m21| = {abs(M.m21):.3g} < 1e-8")
    a, c, d = M.m22, -M.m21, M.m11
    hb = tq.hbar
    q = _lift(tq.grid, center_q, 1.0)
    info = {"kind": "unwind", "method": method, "center": [center_q, center_p]}
    if method == "shear":
        p = _lift(tq.momenta, center_p, tq.S)
        s1, s2 = (a - 1.0) / c, (d - 1.0) / c
        x = q - center_q
        factors = [
            ("q", np.exp(0.5j * s2 * x**2 / hb)),
            ("p", np.exp(-0.5j * c * (p - center_p) ** 2 / hb)),
            ("q", np.exp(0.5j * s1 * x**2 / hb)),
        ]
        return UnitaryOperator(tq, factors, info)
    if method == "kernel":
        x = q - center_q
        X, Xp = np.meshgrid(x, x, indexing="ij")
        action = (a * X**2 - 2.0 * X * Xp + d * Xp**2) / (2.0 * c)
        dq_grid = (np.subtract.outer(tq.grid, tq.grid) + 0.5) % 1.0 - 0.5
        U = np.exp(1j * action / hb + 1j * center_p * dq_grid / hb)
        U *= 1.0 / (np.sqrt(TWO_PI * 1j * hb * c + 0j) * tq.N)
        G = U.conj().T @ U - np.eye(tq.N)
        info["prepolar_deviation"] = float(np.max(np.linalg.norm(G, axis=0)))
        W, _ = polar(U)
        return UnitaryOperator.from_matrix(tq, W, info)
    raise ValueError(f"unknown unwinding method {method!r}; choose from {UNWIND_METHODS}")


# ---------------------------------------------------------------------------
# propagation


@dataclass
class PropagationPlan:
    scheme: ControlScheme
    orbit: ControlOrbit | None
    l: int | None = None
    apply_shifts: bool = True
    unwind_period: int = 1
    unwind_method: str = "shear"

    def __post_init__(self) -> None:
        self.scheme = ControlScheme.parse(self.scheme)
        if self.l is None:
            if self.orbit is None:
                raise ValueError("plan without an orbit needs an explicit l")
            self.l = self.orbit.tau
        if self.l < 0:
            raise ValueError("l must be non-negative")
        if self.apply_shifts and (self.orbit is None or self.l != self.orbit.tau):
            raise ValueError("shifted propagation must run for exactly orbit.tau steps")
        if self.orbit is not None and self.l > self.orbit.tau:
            raise ValueError(f"l={self.l} exceeds the orbit length {self.orbit.tau}")
        if self.orbit is None and self.l > 0 and self.scheme is not ControlScheme.UNCONTROLLED:
            raise ValueError(f"scheme {self.scheme.value!r} needs an orbit")
        if self.unwind_period < 1:
            raise ValueError("unwind_period must be >= 1")
        if self.unwind_method not in UNWIND_METHODS:
            raise ValueError(f"unknown unwinding method {self.unwind_method!r}")


@dataclass
class PropagationResult:
    final: QuantumState
    delta: float
    trace: list[QuantumState] = field(default_factory=list)

    def __iter__(self):
        return iter((self.final, self.delta, self.trace))


def entry_shift(tq: TorusQuantization, orbit: ControlOrbit) -> UnitaryOperator:
    """``U_s(alpha)``: displacement from alpha onto the first orbit point."""
    start = orbit.points_full[0].unreduced
    dq, dp = torus_delta(start, orbit.alpha, tq.S)
    return shift_operator(tq, dq, dp, center=orbit.alpha)


def exit_shift(tq: TorusQuantization, orbit: ControlOrbit) -> UnitaryOperator:
    """``U_s(beta)``: displacement from the last orbit point onto beta."""
    end = orbit.points_full[-1].unreduced
    dq, dp = torus_delta(orbit.beta, end, tq.S)
    return shift_operator(tq, dq, dp, center=end)


def _step_operators(plan: PropagationPlan, tq: TorusQuantization, params: KickedRotorParams):
    scheme = plan.scheme
    if scheme.has_potentials:
        for n in range(plan.l):
            U1, U2 = controlled_half_steps(tq, plan.orbit, scheme, n)
            yield U2 @ U1
        return
    floquet = floquet_uncontrolled(tq, params)
    pending: list[StabilityMatrix] = []
    for n in range(plan.l):
        if scheme is ControlScheme.UNCONTROLLED:
            yield floquet
            continue
        pending.append(stability_step_uncontrolled(plan.orbit.points_full[n].unreduced[0], params))
        if len(pending) == plan.unwind_period or n == plan.l - 1:
            q_t, p_t = plan.orbit.points_full[n + 1].unreduced
            undo = unwind_operator(tq, accumulate(pending), q_t, p_t, plan.unwind_method)
            pending = []
            yield undo @ floquet
        else:
            yield floquet


def propagate(plan: PropagationPlan, initial: QuantumState, target: QuantumState) -> PropagationResult:
    """Run ``U_s(beta) [prod U_n] U_s(alpha)`` on ``initial``.

    ``trace[0]`` is the state after the entry shift and ``trace[n]`` the state
    after step ``n``.  ``delta = 1 - |<target|final>|^2``.
    """
    tq = initial.quantization
    _same_space(tq, target.quantization)
    K = plan.orbit.K if plan.orbit is not None else 8.0
    params = KickedRotorParams(K, tq.S)
    psi = initial
    if plan.apply_shifts:
        psi = entry_shift(tq, plan.orbit).apply(psi)
    trace = [psi]
    for U in _step_operators(plan, tq, params):
        psi = U.apply(psi)
        trace.append(psi)
    if plan.apply_shifts:
        psi = exit_shift(tq, plan.orbit).apply(psi)
    delta = max(0.0, 1.0 - target.fidelity(psi))
    return PropagationResult(psi, delta, trace)


def run_targeting(
    N: int,
    scheme,
    orbit: ControlOrbit,
    S: int = 2,
    unwind_period: int = 1,
    unwind_method: str = "shear",
) -> PropagationResult:
    """Gaussian at ``orbit.alpha`` steered to a Gaussian at ``orbit.beta``."""
    tq = TorusQuantization(N, S)
    alpha = build_gaussian(WavePacketSpec(*orbit.alpha), tq)
    beta = build_gaussian(WavePacketSpec(*orbit.beta), tq)
    plan = PropagationPlan(scheme, orbit, unwind_period=unwind_period, unwind_method=unwind_method)
    return propagate(plan, alpha, beta)


@dataclass
class SweepRow:
    N: int
    h: float
    scheme: str
    delta: float
    status: str = "ok"
    message: str = ""


def _sweep_job(args) -> SweepRow:
    N, scheme, orbit_dict, S, unwind_period, unwind_method = args
    scheme = ControlScheme.parse(scheme)
    try:
        res = run_targeting(N, scheme, ControlOrbit.from_dict(orbit_dict), S, unwind_period, unwind_method)
        return SweepRow(N, S / N, scheme.value, res.delta)
    except Exception as exc:  # per-row failures are reported, not raised
        return SweepRow(N, S / N, scheme.value, float("nan"), "error", f"{type(exc).__name__}: {exc}")


def sweep_dimension(
    Ns: Sequence[int],
    schemes: Sequence,
    orbit: ControlOrbit,
    S: int = 2,
    unwind_period: int = 1,
    unwind_method: str = "shear",
    workers: int = 1,
) -> list[SweepRow]:
    """``delta`` for every ``(N, scheme)`` pair, ordered by scheme then N."""
    Ns = [int(n) for n in Ns]
    if Ns != sorted(Ns):
        raise ValueError("Ns must be sorted ascending")
    schemes = [ControlScheme.parse(s) for s in schemes]
    jobs = [(N, s.value, orbit.to_dict(), S, unwind_period, unwind_method) for s in schemes for N in Ns]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_job, jobs))
    else:
        rows = [_sweep_job(j) for j in jobs]
    return rows


# ---------------------------------------------------------------------------
# CSV output


def json_header(config: dict) -> str:
    return "# " + json.dumps(config, sort_keys=True, separators=(",", ":")) + "\n"


def write_state_csv(state: QuantumState, path, config: dict | None = None) -> None:
    """Columns ``j, q_j, re, im, abs``."""
    tq = state.quantization
    lines = [json_header(config or {}), "j,q_j,re,im,abs\n"]
    for j, (q, a) in enumerate(zip(tq.grid, state.amplitudes)):
        lines.append(f"{j},{q:.17g},{a.real:.17g},{a.imag:.17g},{abs(a):.17g}\n")
    Path(path).write_text("".join(lines))


def read_state_csv(path) -> tuple[dict, np.ndarray]:
    """Inverse of :func:`write_state_csv`: ``(config, amplitudes)``."""
    text = Path(path).read_text().splitlines()
    config = json.loads(text[0][2:])
    data = np.loadtxt(text[2:], delimiter=",", ndmin=2)
    return config, data[:, 2] + 1j * data[:, 3]


def write_sweep_csv(rows: Sequence[SweepRow], path, config: dict | None = None) -> None:
    lines = [json_header(config or {}), "N,h,scheme,delta,status,message\n"]
    for r in rows:
        msg = r.message.replace(",", ";").replace("\n", " ")
        lines.append(f"{r.N},{r.h:.17g},{r.scheme},{r.delta:.17g},{r.status},{msg}\n")
    Path(path).write_text("".join(lines))
