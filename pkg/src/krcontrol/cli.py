"""Command-line front end: ``krcontrol {orbit,propagate,sweep,wigner}``.

Runs are driven by a JSON config (``--config``).  Every file written embeds the
resolved config, and identical configs give byte-identical output.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (no orbit,
non-convergence, unitarity lost).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .control import ControlScheme
from .heteroclinic import (
    ControlOrbit,
    SearchConfig,
    find_orbits,
    load_orbit,
    save_orbit,
    select_optimal,
    tied_orbits,
    verify_orbit,
)
from .quantum import (
    UNWIND_METHODS,
    PropagationPlan,
    TorusQuantization,
    WavePacketSpec,
    build_gaussian,
    expectation_qp,
    propagate,
    sweep_dimension,
    write_state_csv,
    write_sweep_csv,
)
from .torus import KickedRotorParams
from .wigner import (
    TWO_SIGMA,
    HALF_SIGMA,
    extract_contours,
    wigner_transform,
    write_contours_csv,
    write_contours_svg,
    write_density_csv,
)

log = logging.getLogger("krcontrol")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
NORM_TOL = 1e-9


class ConfigError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


@dataclass
class RunConfig:
    """Resolved run configuration.

    Unspecified fields take these documented defaults: ``S = 2``,
    ``unwind_period = 1``, ``unwind_method = "shear"``, ``seed = 0``,
    ``out = "out"``.
    """

    K: float = 8.0
    tau: int = 6
    alpha: tuple[float, float] = (0.5, 0.0)
    beta: tuple[float, float] = (0.0, 0.0)
    scheme: str = "sol_a"
    schemes: list[str] = field(default_factory=list)
    N: int = 200
    Ns: list[int] = field(default_factory=list)
    S: int = 2
    unwind_period: int = 1
    unwind_method: str = "shear"
    wigner_resolution: list[int] | None = None
    out: str = "out"
    seed: int = 0

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        try:
            cfg = cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    def validate(self) -> None:
        try:
            self.K = float(self.K)
            self.alpha = tuple(float(x) for x in self.alpha)
            self.beta = tuple(float(x) for x in self.beta)
            self.N = int(self.N)
            self.Ns = [int(n) for n in self.Ns]
            self.schemes = [ControlScheme.parse(s).value for s in self.schemes]
            self.scheme = ControlScheme.parse(self.scheme).value
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if not self.K > 0:
            raise ConfigError(f"K must be positive, got {self.K}")
        if int(self.tau) != self.tau or self.tau < 0:
            raise ConfigError(f"tau must be a non-negative integer, got {self.tau}")
        self.tau = int(self.tau)
        if len(self.alpha) != 2 or len(self.beta) != 2:
            raise ConfigError("alpha and beta are (q, p) pairs")
        if self.N < 2 or any(n < 2 for n in self.Ns):
            raise ConfigError("Hilbert-space dimensions must be >= 2")
        if self.Ns != sorted(self.Ns):
            raise ConfigError("Ns must be sorted ascending")
        if self.S not in (1, 2):
            raise ConfigError(f"S must be 1 or 2, got {self.S}")
        if int(self.unwind_period) != self.unwind_period or self.unwind_period < 1:
            raise ConfigError("unwind_period must be a positive integer")
        if self.unwind_method not in UNWIND_METHODS:
            raise ConfigError(f"unwind_method must be one of {UNWIND_METHODS}")
        if self.wigner_resolution is not None:
            self.wigner_resolution = [int(x) for x in self.wigner_resolution]

    def as_dict(self) -> dict:
        d = asdict(self)
        d["alpha"], d["beta"] = list(self.alpha), list(self.beta)
        return d


def load_config(path, out: str | None = None) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text()) if path else {}
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if out is not None:
        raw["out"] = out
    return RunConfig.from_dict(raw)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _params(cfg: RunConfig) -> KickedRotorParams:
    return KickedRotorParams(cfg.K, 2)


def search_orbit(cfg: RunConfig):
    """Optimal control orbit for the config, plus the full search result."""
    if cfg.tau == 0:
        trivial = ControlOrbit.from_trajectory([cfg.alpha], cfg.K, cfg.alpha, cfg.beta)
        return trivial, [trivial]
    found = find_orbits(SearchConfig(tau=cfg.tau, endpoint_alpha=cfg.alpha, endpoint_beta=cfg.beta), _params(cfg))
    if not found:
        raise NumericalFailure(f"no orbit found for tau={cfg.tau}: {found.diagnostics}")
    return select_optimal(found), found


def resolve_orbit(cfg: RunConfig, orbit_path) -> ControlOrbit:
    if orbit_path is None:
        return search_orbit(cfg)[0]
    try:
        orbit = load_orbit(orbit_path)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read orbit {orbit_path}: {exc}") from None
    if abs(orbit.K - cfg.K) > 1e-12 or orbit.tau != cfg.tau:
        raise ConfigError(f"orbit file has K={orbit.K}, tau={orbit.tau}; config has K={cfg.K}, tau={cfg.tau}")
    orbit.alpha, orbit.beta = cfg.alpha, cfg.beta
    return orbit


def cmd_orbit(cfg: RunConfig, args) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.tau == 0:
        raise NumericalFailure("no orbit: tau = 0 leaves no steps to connect alpha and beta")
    best, found = search_orbit(cfg)
    conf = cfg.as_dict()
    save_orbit(best, out / "orbit.json", conf)
    report = {
        "config": conf,
        "verification": verify_orbit(best, _params(cfg)).as_dict(),
        "search": found.diagnostics,
        "candidates": [
            {"shift_in": o.shift_in, "shift_out": o.shift_out, "start": o.full_array[0].tolist()} for o in found
        ],
        "ties": [o.full_array.tolist() for o in tied_orbits(found)],
    }
    _write_json(out / "orbit_report.json", report)
    print(f"orbit: tau={best.tau} shift_in={best.shift_in:.6e} shift_out={best.shift_out:.6e} -> {out / 'orbit.json'}")
    return EXIT_OK


def _run(cfg: RunConfig, orbit: ControlOrbit, scheme: str, N: int):
    tq = TorusQuantization(N, cfg.S)
    alpha = build_gaussian(WavePacketSpec(*cfg.alpha), tq)
    beta = build_gaussian(WavePacketSpec(*cfg.beta), tq)
    plan = PropagationPlan(scheme, orbit, unwind_period=cfg.unwind_period, unwind_method=cfg.unwind_method)
    result = propagate(plan, alpha, beta)
    drift = max(abs(s.norm - 1.0) for s in result.trace + [result.final])
    if drift > NORM_TOL:
        raise NumericalFailure(f"norm drifted by {drift:.2e}; unitarity lost")
    return result


def _contour_sets(cfg: RunConfig, states):
    res = tuple(cfg.wigner_resolution) if cfg.wigner_resolution else None
    return [(t, extract_contours(wigner_transform(s, res))) for t, s in enumerate(states)]


def _contour_summary(sets):
    rows = []
    for t, cs in sets:
        row = {"t": t}
        for level in (TWO_SIGMA, HALF_SIGMA):
            c = cs.main(level)
            row[level] = None if c is None else {"area": c.area, "circularity": c.circularity, "closed": c.closed}
        row["multi"] = cs.multi
        rows.append(row)
    return rows


def cmd_propagate(cfg: RunConfig, args) -> int:
    out = Path(cfg.out)
    (out / "states").mkdir(parents=True, exist_ok=True)
    orbit = resolve_orbit(cfg, args.orbit)
    result = _run(cfg, orbit, cfg.scheme, cfg.N)
    conf = cfg.as_dict()
    for t, state in enumerate(result.trace):
        write_state_csv(state, out / "states" / f"state_t{t}.csv", dict(conf, t=t))
    write_state_csv(result.final, out / "states" / "final.csv", dict(conf, t="final"))
    sets = _contour_sets(cfg, result.trace)
    write_contours_csv(sets, out / "contours.csv", conf)
    write_contours_svg(sets, out / "contours.svg", config=conf)
    centroids = [list(expectation_qp(s, x)) for s, x in zip(result.trace, orbit.full_array.tolist())]
    _write_json(
        out / "summary.json",
        {
            "config": conf,
            "delta": result.delta,
            "steps": len(result.trace) - 1,
            "centroids": centroids,
            "orbit": orbit.full_array.tolist(),
            "contours": _contour_summary(sets),
        },
    )
    print(f"propagate: N={cfg.N} scheme={cfg.scheme} delta={result.delta:.6e}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    orbit = resolve_orbit(cfg, args.orbit)
    Ns = cfg.Ns or [cfg.N]
    schemes = cfg.schemes or [cfg.scheme]
    rows = sweep_dimension(
        Ns, schemes, orbit, cfg.S, cfg.unwind_period, cfg.unwind_method, workers=args.workers
    )
    write_sweep_csv(rows, out / "sweep.csv", cfg.as_dict())
    for r in rows:
        print(f"sweep: N={r.N} scheme={r.scheme} delta={r.delta:.6e} {r.status}")
    return EXIT_OK


def cmd_wigner(cfg: RunConfig, args) -> int:
    out = Path(cfg.out)
    (out / "wigner").mkdir(parents=True, exist_ok=True)
    orbit = resolve_orbit(cfg, args.orbit)
    result = _run(cfg, orbit, cfg.scheme, cfg.N)
    conf = cfg.as_dict()
    res = tuple(cfg.wigner_resolution) if cfg.wigner_resolution else None
    sets = []
    for t, state in enumerate(result.trace):
        density = wigner_transform(state, res)
        write_density_csv(density, out / "wigner" / f"density_t{t}.csv", dict(conf, t=t))
        sets.append((t, extract_contours(density)))
    write_contours_csv(sets, out / "wigner" / "contours.csv", conf)
    write_contours_svg(sets, out / "wigner" / "contours.svg", config=conf)
    _write_json(out / "wigner" / "summary.json", {"config": conf, "contours": _contour_summary(sets)})
    print(f"wigner: {len(sets)} densities -> {out / 'wigner'}")
    return EXIT_OK


COMMANDS = {"orbit": cmd_orbit, "propagate": cmd_propagate, "sweep": cmd_sweep, "wigner": cmd_wigner}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="krcontrol", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "orbit": "find and verify the optimal control orbit",
        "propagate": "propagate a Gaussian along the control orbit",
        "sweep": "targeting error over a list of Hilbert-space dimensions",
        "wigner": "Wigner densities and contours of a propagation trace",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--orbit", help="orbit JSON from the orbit command")
        p.add_argument("--workers", type=int, default=1, help="parallel jobs for sweep")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, args.out)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
