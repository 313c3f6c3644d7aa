"""Time evolution of quantum and population states, with faithfulness guards.

Two guards keep finite runs honest:

* open boundary: before every step the two outermost sites must be exactly
  empty, so nothing is ever pushed off the truncated lattice and the run is
  identical to one on the infinite line;
* reflecting boundary: when the initial state avoids both end sites, the
  weight carried across the cyclic seam must be exactly zero at every step.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, GuardViolation
from .operators import StepOperator, apply, build_quantum_step, build_rw_step
from .scalar import DyadicRoot2, DyadicVector, ScalarMode
from .state import LatticeSpec, PopulationState, QuantumState, lift, project

log = logging.getLogger(__name__)


class EngineKind(enum.Enum):
    QUANTUM = "quantum"
    RANDOM_WALK = "rw"
    BOTH = "both"

    @classmethod
    def parse(cls, text) -> "EngineKind":
        if isinstance(text, EngineKind):
            return text
        for k in cls:
            if k.value == text:
                return k
        raise ConfigError(f"unknown engine {text!r} (expected quantum, rw or both)")


@dataclass(frozen=True)
class RunConfig:
    lattice: LatticeSpec
    steps: int
    kind: EngineKind = EngineKind.BOTH
    mode: ScalarMode = ScalarMode.EXACT
    snapshots: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", EngineKind.parse(self.kind))
        object.__setattr__(self, "mode", ScalarMode.parse(self.mode))
        if self.steps < 0:
            raise ConfigError("steps must be nonnegative")
        snaps = {0, self.steps} if self.snapshots is None else set(self.snapshots) | {0}
        bad = [s for s in snaps if not 0 <= s <= self.steps]
        if bad:
            raise ConfigError(f"snapshot steps {sorted(bad)} outside 0..{self.steps}")
        object.__setattr__(self, "snapshots", tuple(sorted(snaps)))


@dataclass
class Trajectory:
    config: RunConfig
    quantum: dict[int, QuantumState] = field(default_factory=dict)
    rw: dict[int, PopulationState] = field(default_factory=dict)
    # per step n >= 1: True when weight crossed the cyclic seam during step n
    seam_crossed: dict[str, list[bool]] = field(default_factory=dict)


def check_size_bound(lattice: LatticeSpec, steps: int, support: list[int]) -> None:
    """Open-boundary size check: the light cone must stay inside 1..S.

    Equivalent to ``S >= 2*steps + w`` for an initial support of width ``w``
    placed with room on both sides.
    """
    if not support:
        return
    lo, hi = support[0], support[-1]
    if lo - steps < 1 or hi + steps > lattice.sites:
        need = 2 * steps + (hi - lo + 1)
        raise ConfigError(
            f"guard bound violated: open boundary with {steps} steps from sites "
            f"{lo}..{hi} needs the light cone inside 1..{lattice.sites} "
            f"(at least {need} sites, centred)"
        )


def _edges_empty(vec, per_site: int, sites: int) -> bool:
    idx = list(range(per_site)) + list(range((sites - 1) * per_site, sites * per_site))
    if isinstance(vec, DyadicVector):
        return not any(vec.a[i] or vec.b[i] for i in idx)
    return not np.any(np.asarray(vec)[idx])


def _crosses_seam(op: StepOperator, vec) -> bool:
    if not op.seam:
        return False
    if isinstance(vec, DyadicVector):
        return any((vec.a[j] or vec.b[j]) for _, j, v in op.seam)
    v = np.asarray(vec)
    return any(v[j] != 0 for _, j, _ in op.seam)


def _check_lattice(state, op: StepOperator, kind: str) -> None:
    if op.kind != kind:
        raise ConfigError(f"expected a {kind} operator, got {op.kind}")
    lat = state.lattice
    if op.sites != lat.sites or op.boundary is not lat.boundary:
        raise ConfigError("operator was built for a different lattice")


def step_quantum(psi: QuantumState, op: StepOperator) -> QuantumState:
    _check_lattice(psi, op, "quantum")
    return QuantumState(psi.lattice, apply(op, psi.amps), psi.mode, psi.scale)


def step_rw(P: PopulationState, op: StepOperator) -> PopulationState:
    _check_lattice(P, op, "rw")
    return PopulationState(P.lattice, apply(op, P.pops), P.mode, P.scale)


def _evolve(state, op, config: RunConfig, stepper, per_site: int, store: dict, crossed: list):
    lat = config.lattice
    open_guard = lat.boundary.value == "open"
    seam_guard = lat.boundary.reflecting and not (
        {1, lat.sites} & set(state.support_sites())
    )
    wanted = set(config.snapshots)
    vec_of = (lambda s: s.amps) if per_site == 2 else (lambda s: s.pops)
    store[0] = state
    for n in range(1, config.steps + 1):
        vec = vec_of(state)
        if open_guard and not _edges_empty(vec, per_site, lat.sites):
            raise GuardViolation(
                f"edge-touch guard: weight reached an outermost site before step {n}; "
                "the lattice is too small"
            )
        hit = _crosses_seam(op, vec)
        crossed.append(hit)
        if hit and seam_guard:
            raise GuardViolation(f"weight crossed the cyclic seam during step {n}")
        state = stepper(state, op)
        if n in wanted:
            store[n] = state
    return state


def run(config: RunConfig, initial: QuantumState | PopulationState) -> Trajectory:
    """Evolve for ``config.steps`` steps, storing the requested snapshots.

    ``initial`` is a quantum state for the quantum and combined engines (the
    RW start is ``lift(initial)``) or a population state for the RW engine.
    """
    lat = config.lattice
    if initial.lattice != lat:
        raise ConfigError("initial state lattice does not match the run configuration")
    if initial.mode is not config.mode:
        raise ConfigError("initial state scalar mode does not match the run configuration")
    if lat.boundary.value == "open":
        check_size_bound(lat, config.steps, initial.support_sites())
    traj = Trajectory(config)
    if isinstance(initial, QuantumState):
        psi0, P0 = initial, None
        if config.kind is not EngineKind.QUANTUM:
            P0 = lift(initial)
        if config.kind is EngineKind.RANDOM_WALK:
            psi0 = None
    else:
        if config.kind is not EngineKind.RANDOM_WALK:
            raise ConfigError("quantum runs need a QuantumState initial condition")
        psi0, P0 = None, initial
    if psi0 is not None:
        traj.seam_crossed["quantum"] = []
        _evolve(psi0, build_quantum_step(lat.sites, lat.boundary), config, step_quantum, 2,
                traj.quantum, traj.seam_crossed["quantum"])
    if P0 is not None:
        traj.seam_crossed["rw"] = []
        _evolve(P0, build_rw_step(lat.sites, lat.boundary), config, step_rw, 4,
                traj.rw, traj.seam_crossed["rw"])
    log.debug("run finished: %s steps, snapshots %s", config.steps, config.snapshots)
    return traj


@dataclass(frozen=True)
class EquivalenceReport:
    steps: int
    max_abs_diff: object  # DyadicRoot2 in exact mode, float otherwise
    identical: bool
    steps_checked: tuple[int, ...]

    @property
    def max_abs_diff_float(self) -> float:
        return float(self.max_abs_diff)


def _max_abs(vec) -> object:
    if isinstance(vec, DyadicVector):
        best = DyadicRoot2()
        for d in vec:
            if d:
                d = abs(d)
                if d > best:
                    best = d
        return best
    return float(np.max(np.abs(vec))) if len(vec) else 0.0


def verify_equivalence(config: RunConfig, psi0: QuantumState, every_step: bool = False) -> EquivalenceReport:
    """Compare ``u^n psi0`` with ``(sqrt2)^n (I (x) B) U^n lift(psi0)``.

    In exact mode the two must agree entry for entry; ``max_abs_diff`` is
    then exactly zero. With ``every_step`` every n in 1..steps is compared,
    otherwise only the configured snapshots.
    """
    if every_step:
        config = RunConfig(config.lattice, config.steps, EngineKind.BOTH, config.mode,
                           tuple(range(config.steps + 1)))
    elif config.kind is not EngineKind.BOTH:
        config = RunConfig(config.lattice, config.steps, EngineKind.BOTH, config.mode, config.snapshots)
    traj = run(config, psi0)
    worst = DyadicRoot2() if config.mode is ScalarMode.EXACT else 0.0
    for n in config.snapshots:
        psi = traj.quantum[n]
        table = project(traj.rw[n], n)
        # lift() carries the scale over, so raw values are directly comparable
        assert psi.scale == table.scale
        diff = _max_abs(psi.amps - table.values)
        if diff > worst:
            worst = diff
    identical = (not worst) if config.mode is ScalarMode.EXACT else worst == 0.0
    return EquivalenceReport(config.steps, worst, bool(identical), config.snapshots)
