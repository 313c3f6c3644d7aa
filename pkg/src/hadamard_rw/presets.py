"""Initial-state specs and the two reference experiments.

Init spec grammar::

    origin:ket0 | origin:ket1 | origin:ket0-minus-ket1 | origin:ket0-plus-ket1
    uniform-interior:ket0-minus-ket1
    file:<path>     JSON list of {"site": s, "coin": c, "value": "<scalar>"}

``uniform-interior`` puts ``(|0> - |1>)/sqrt(2*(S-2))`` on every non-end site
(``1/sqrt(46)`` for 25 sites). In exact mode the amplitudes are stored as
``+-1`` with the normalisation kept in the state's ``scale``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .engine import EngineKind, RunConfig
from .errors import ConfigError
from .operators import BoundaryMode
from .scalar import INV_SQRT2, DyadicRoot2, DyadicVector, QSqrt2, Scale, ScalarMode, parse_exact
from .state import LatticeSpec, QuantumState

_ORIGIN_COINS = {
    "ket0": ((1, 0), False),
    "ket1": ((0, 1), False),
    "ket0-minus-ket1": ((1, -1), True),
    "ket0-plus-ket1": ((1, 1), True),
}


def parse_init_spec(text: str, lattice: LatticeSpec, mode: ScalarMode | str) -> QuantumState:
    mode = ScalarMode.parse(mode)
    S = lattice.sites
    kind, _, arg = text.partition(":")
    if not arg:
        raise ConfigError(f"malformed init spec {text!r}")

    if kind == "origin":
        if arg not in _ORIGIN_COINS:
            raise ConfigError(f"unknown origin state {arg!r}")
        (c0, c1), halve = _ORIGIN_COINS[arg]
        i = 2 * (lattice.origin - 1)
        if mode is ScalarMode.EXACT:
            vals = [DyadicRoot2()] * (2 * S)
            unit = INV_SQRT2 if halve else DyadicRoot2(1)
            vals[i], vals[i + 1] = unit * c0, unit * c1
            return QuantumState(lattice, DyadicVector.from_scalars(vals), mode)
        v = np.zeros(2 * S)
        f = 1 / math.sqrt(2) if halve else 1.0
        v[i], v[i + 1] = c0 * f, c1 * f
        return QuantumState(lattice, v, mode)

    if kind == "uniform-interior":
        if arg != "ket0-minus-ket1":
            raise ConfigError(f"unknown uniform-interior state {arg!r}")
        if S < 3:
            raise ConfigError("uniform-interior needs at least 3 sites")
        count = 2 * (S - 2)
        if mode is ScalarMode.EXACT:
            a = [0] * (2 * S)
            a[2:-2:2] = [1] * (S - 2)
            a[3:-2:2] = [-1] * (S - 2)
            return QuantumState(lattice, DyadicVector(a, [0] * (2 * S)), mode, Scale(Fraction(1, count)))
        v = np.zeros(2 * S)
        v[2:-2:2] = 1.0
        v[3:-2:2] = -1.0
        return QuantumState(lattice, v / math.sqrt(count), mode)

    if kind == "file":
        raw_text = Path(arg).read_text()  # OSError propagates: I/O failure, not config
        try:
            entries = json.loads(raw_text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"init file {arg} is not valid JSON: {exc}") from None
        vals = [DyadicRoot2()] * (2 * S)
        fvals = np.zeros(2 * S)
        for e in entries:
            try:
                site, coin, raw = int(e["site"]), int(e["coin"]), str(e["value"])
            except (KeyError, TypeError, ValueError):
                raise ConfigError(f"bad init entry {e!r}") from None
            if not (1 <= site <= S and coin in (0, 1)):
                raise ConfigError(f"init entry {e!r} outside the lattice")
            i = 2 * (site - 1) + coin
            if mode is ScalarMode.EXACT:
                try:
                    val = parse_exact(raw)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
                if isinstance(val, QSqrt2):
                    raise ConfigError(f"{raw!r} is not a dyadic sqrt2 value")
                vals[i] = val
            else:
                try:
                    fvals[i] = float(raw)
                except ValueError:
                    try:
                        fvals[i] = float(parse_exact(raw))
                    except ValueError as exc:
                        raise ConfigError(str(exc)) from None
        if mode is ScalarMode.EXACT:
            return QuantumState(lattice, DyadicVector.from_scalars(vals), mode)
        return QuantumState(lattice, fvals, mode)

    raise ConfigError(f"unknown init spec kind {kind!r}")


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    sites: int
    origin: int
    boundary: BoundaryMode
    steps: int
    snapshots: tuple[int, ...]
    init: str

    def lattice(self) -> LatticeSpec:
        return LatticeSpec(self.sites, self.boundary, self.origin)

    def config(self, mode: ScalarMode | str = ScalarMode.EXACT) -> RunConfig:
        return RunConfig(self.lattice(), self.steps, EngineKind.BOTH, mode, self.snapshots)

    def initial(self, mode: ScalarMode | str = ScalarMode.EXACT) -> QuantumState:
        return parse_init_spec(self.init, self.lattice(), mode)


# sites -100..100, a single |0> at the origin, 100 steps on the open line
FIG3 = ExperimentPreset("fig3", 201, 101, BoundaryMode.OPEN, 100, (100,), "origin:ket0")
# 25-site chain with R1 ends, (|0> - |1>)/sqrt(46) on the 23 interior sites
FIG6 = ExperimentPreset("fig6", 25, 13, BoundaryMode.REFLECT_R1, 65, (35, 65), "uniform-interior:ket0-minus-ket1")

PRESETS = {"fig3": FIG3, "fig6": FIG6}
