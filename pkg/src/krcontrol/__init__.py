"""Coherent targeting of wave packets along chaotic kicked-rotor orbits."""

from .control import ControlScheme, KickPotential, SchemeError, kick_pair, verify_constraints
from .heteroclinic import (
    ControlOrbit,
    SearchConfig,
    find_orbits,
    load_orbit,
    save_orbit,
    select_optimal,
    table_one_orbit,
    verify_orbit,
)
from .quantum import (
    PropagationPlan,
    QuantumState,
    TorusQuantization,
    UnitaryOperator,
    WavePacketSpec,
    build_gaussian,
    controlled_half_steps,
    floquet_uncontrolled,
    propagate,
    run_targeting,
    shift_operator,
    sweep_dimension,
    unwind_operator,
)
from .torus import KickedRotorParams, PhasePoint, StabilityMatrix, iterate_map, lyapunov_estimate
from .wigner import PhaseSpaceDensity, extract_contours, wigner_transform

__version__ = "0.1.0"
