"""State layouts and the maps between quantum amplitudes and RW populations.

Quantum states hold two amplitudes per site (coin |0>, coin |1>); population
states hold four nonnegative rows per site in the order |0>, |1>, -|1>, -|0>.
Both are flat and site-major. In exact mode the vector is a
:class:`DyadicVector`; in float mode a NumPy array.

Every state carries a ``scale``: the physical vector is ``scale * values``.
This keeps normalisations such as ``1/sqrt(46)``, which fall outside the
dyadic ring, exact.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .operators import BoundaryMode
from .scalar import DyadicRoot2, DyadicVector, QSqrt2, Scale, ScalarMode, format_exact, parse_exact

ROW_KET0, ROW_KET1, ROW_MKET1, ROW_MKET0 = 1, 2, 3, 4
ROW_NAMES = ("row_0", "row_1", "row_m1", "row_m0")
COIN_NAMES = ("ket0", "ket1")


@dataclass(frozen=True)
class LatticeSpec:
    """Site count, boundary policy and the 1-based site shown as position 0."""

    sites: int
    boundary: BoundaryMode = BoundaryMode.OPEN
    origin: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "boundary", BoundaryMode.parse(self.boundary))
        if self.origin is None:
            object.__setattr__(self, "origin", (self.sites + 1) // 2)
        if self.sites < 2:
            raise ConfigError(f"need at least 2 sites, got {self.sites}")
        if self.boundary.reflecting and self.sites < 3:
            raise ConfigError("reflecting boundaries need at least 3 sites")
        if not 1 <= self.origin <= self.sites:
            raise ConfigError(f"origin {self.origin} outside 1..{self.sites}")

    @property
    def positions(self) -> np.ndarray:
        return np.arange(1, self.sites + 1) - self.origin

    def site_of(self, offset: int) -> int:
        site = self.origin + offset
        if not 1 <= site <= self.sites:
            raise ConfigError(f"offset {offset} falls outside the lattice")
        return site


def index_of(lattice: LatticeSpec, site: int, row: int) -> int:
    """1-based flat RW index of ``row`` (1..4) at ``site`` (1..S)."""
    if not 1 <= site <= lattice.sites:
        raise IndexError(f"site {site} outside 1..{lattice.sites}")
    if not 1 <= row <= 4:
        raise IndexError(f"row {row} outside 1..4")
    return 4 * (site - 1) + row


def _check_mode(values, mode: ScalarMode) -> None:
    if mode is ScalarMode.EXACT and not isinstance(values, DyadicVector):
        raise TypeError("exact-mode states need a DyadicVector")
    if mode is ScalarMode.FLOAT64 and isinstance(values, DyadicVector):
        raise TypeError("float-mode states need a NumPy array")


@dataclass(frozen=True, eq=False)
class QuantumState:
    lattice: LatticeSpec
    amps: object
    mode: ScalarMode
    scale: Scale = field(default_factory=Scale)

    def __post_init__(self):
        _check_mode(self.amps, self.mode)
        if len(self.amps) != 2 * self.lattice.sites:
            raise ValueError("amplitude vector must have length 2*sites")

    @classmethod
    def zeros(cls, lattice: LatticeSpec, mode: ScalarMode) -> "QuantumState":
        n = 2 * lattice.sites
        amps = DyadicVector.zeros(n) if mode is ScalarMode.EXACT else np.zeros(n)
        return cls(lattice, amps, mode)

    @classmethod
    def basis(cls, lattice: LatticeSpec, site: int, coin: int, mode: ScalarMode) -> "QuantumState":
        n = 2 * lattice.sites
        i = 2 * (site - 1) + coin
        if mode is ScalarMode.EXACT:
            a = [0] * n
            a[i] = 1
            return cls(lattice, DyadicVector(a, [0] * n), mode)
        v = np.zeros(n)
        v[i] = 1.0
        return cls(lattice, v, mode)

    def norm_sq(self):
        """``sum |amp|^2`` including the scale; exact ``QSqrt2`` in exact mode."""
        if self.mode is ScalarMode.EXACT:
            tot = QSqrt2()
            for d in self.amps:
                if d:
                    tot = tot + (d * d).to_qsqrt2()
            return tot * self.scale.sq
        return float(np.sum(np.abs(self.amps) ** 2)) * float(self.scale.sq)

    def support_sites(self) -> list[int]:
        nz = self.amps.nonzero() if self.mode is ScalarMode.EXACT else np.flatnonzero(self.amps)
        return sorted({int(i) // 2 + 1 for i in nz})

    def equals(self, other: "QuantumState") -> bool:
        if self.mode is not other.mode or self.lattice != other.lattice:
            return False
        if self.mode is ScalarMode.EXACT:
            return self.scale == other.scale and self.amps == other.amps
        return bool(np.array_equal(self.amps * float(self.scale), other.amps * float(other.scale)))


@dataclass(frozen=True, eq=False)
class PopulationState:
    lattice: LatticeSpec
    pops: object
    mode: ScalarMode
    scale: Scale = field(default_factory=Scale)

    def __post_init__(self):
        _check_mode(self.pops, self.mode)
        if len(self.pops) != 4 * self.lattice.sites:
            raise ValueError("population vector must have length 4*sites")

    def total(self):
        """Sum of the stored entries (without the scale factor)."""
        if self.mode is ScalarMode.EXACT:
            return self.pops.total()
        return float(np.sum(self.pops))

    def row_vectors(self) -> dict[str, list | np.ndarray]:
        """The four per-row vectors P_|0>, P_|1>, P_-|1>, P_-|0> over sites."""
        if self.mode is ScalarMode.EXACT:
            vals = self.pops.to_list()
            return {name: vals[r::4] for r, name in enumerate(ROW_NAMES)}
        return {name: self.pops[r::4].copy() for r, name in enumerate(ROW_NAMES)}

    def support_sites(self) -> list[int]:
        nz = self.pops.nonzero() if self.mode is ScalarMode.EXACT else np.flatnonzero(self.pops)
        return sorted({int(i) // 4 + 1 for i in nz})

    def is_nonnegative(self) -> bool:
        if self.mode is ScalarMode.EXACT:
            return all(d.sign() >= 0 for d in self.pops)
        return bool(np.all(self.pops >= 0))

    def equals(self, other: "PopulationState") -> bool:
        if self.mode is not other.mode or self.lattice != other.lattice:
            return False
        if self.mode is ScalarMode.EXACT:
            return self.scale == other.scale and self.pops == other.pops
        return bool(np.array_equal(self.pops * float(self.scale), other.pops * float(other.scale)))


def stack_rows(lattice: LatticeSpec, rows: dict, mode: ScalarMode) -> PopulationState:
    """Inverse of :meth:`PopulationState.row_vectors` (column stacking)."""
    S = lattice.sites
    if mode is ScalarMode.EXACT:
        flat = [None] * (4 * S)
        for r, name in enumerate(ROW_NAMES):
            flat[r::4] = list(rows[name])
        return PopulationState(lattice, DyadicVector.from_scalars(flat), mode)
    flat = np.empty(4 * S)
    for r, name in enumerate(ROW_NAMES):
        flat[r::4] = rows[name]
    return PopulationState(lattice, flat, mode)


def lift(psi: QuantumState) -> PopulationState:
    """Route each real amplitude to its + or - row so that ``(I (x) B) P == psi``."""
    S = psi.lattice.sites
    if psi.mode is ScalarMode.EXACT:
        v = psi.amps
        a = [0] * (4 * S)
        b = [0] * (4 * S)
        for s in range(S):
            for coin, (pos, neg) in enumerate(((0, 3), (1, 2))):
                d = v[2 * s + coin]
                sgn = d.sign()
                if sgn == 0:
                    continue
                tgt = 4 * s + (pos if sgn > 0 else neg)
                # all entries share psi's exponent after re-expansion below
                a[tgt] = v.a[2 * s + coin] * sgn
                b[tgt] = v.b[2 * s + coin] * sgn
        return PopulationState(psi.lattice, DyadicVector(a, b, v.k), psi.mode, psi.scale)
    amps = np.asarray(psi.amps)
    if np.iscomplexobj(amps):
        if np.any(amps.imag != 0):
            raise ValueError("lift needs real amplitudes; the 4-row model cannot carry phases")
        amps = amps.real
    pops = np.zeros(4 * S)
    c0, c1 = amps[0::2], amps[1::2]
    pops[0::4] = np.where(c0 > 0, c0, 0.0)
    pops[3::4] = np.where(c0 < 0, -c0, 0.0)
    pops[1::4] = np.where(c1 > 0, c1, 0.0)
    pops[2::4] = np.where(c1 < 0, -c1, 0.0)
    return PopulationState(psi.lattice, pops, psi.mode, psi.scale)


@dataclass(frozen=True, eq=False)
class AmplitudeTable:
    """``(sqrt2)^n * (I (x) B) P(n)`` laid out like quantum amplitudes.

    ``values`` is flat, site-major with (coin |0>, coin |1>) per site; the
    physical amplitudes are ``scale * values``.
    """

    lattice: LatticeSpec
    values: object
    steps: int
    mode: ScalarMode
    scale: Scale = field(default_factory=Scale)

    @property
    def ket0(self):
        return self.values.to_list()[0::2] if self.mode is ScalarMode.EXACT else self.values[0::2]

    @property
    def ket1(self):
        return self.values.to_list()[1::2] if self.mode is ScalarMode.EXACT else self.values[1::2]

    def as_quantum_state(self) -> QuantumState:
        return QuantumState(self.lattice, self.values, self.mode, self.scale)


def project(P: PopulationState, n: int) -> AmplitudeTable:
    """Apply ``I (x) B`` and rescale by ``(sqrt2)**n``."""
    if n < 0:
        raise ValueError("step count must be nonnegative")
    S = P.lattice.sites
    if P.mode is ScalarMode.EXACT:
        pa, pb = P.pops.a, P.pops.b
        a = [0] * (2 * S)
        b = [0] * (2 * S)
        a[0::2] = [x - y for x, y in zip(pa[0::4], pa[3::4])]
        a[1::2] = [x - y for x, y in zip(pa[1::4], pa[2::4])]
        b[0::2] = [x - y for x, y in zip(pb[0::4], pb[3::4])]
        b[1::2] = [x - y for x, y in zip(pb[1::4], pb[2::4])]
        vals = DyadicVector(a, b, P.pops.k).scale_sqrt2_pow(n)
    else:
        p = P.pops
        vals = np.empty(2 * S)
        vals[0::2] = p[0::4] - p[3::4]
        vals[1::2] = p[1::4] - p[2::4]
        vals *= math.ldexp(1.0, n // 2) * (math.sqrt(2.0) if n % 2 else 1.0)
    return AmplitudeTable(P.lattice, vals, n, P.mode, P.scale)


@dataclass(frozen=True, eq=False)
class ProbabilityGrid:
    """Per-site probabilities for each coin plus their totals."""

    ket0: list
    ket1: list
    total_ket0: object
    total_ket1: object
    grand_total: object


def probabilities(table: AmplitudeTable | QuantumState) -> ProbabilityGrid:
    """Elementwise ``|amplitude|^2`` including the scale; exact values are ``QSqrt2``."""
    vals = table.values if isinstance(table, AmplitudeTable) else table.amps
    if table.mode is ScalarMode.EXACT:
        w = table.scale.sq
        sq = [(d * d).to_qsqrt2() * w if d else QSqrt2() for d in vals]
        p0, p1 = sq[0::2], sq[1::2]
        t0 = sum(p0, QSqrt2())
        t1 = sum(p1, QSqrt2())
        return ProbabilityGrid(p0, p1, t0, t1, t0 + t1)
    sq = np.abs(np.asarray(vals)) ** 2 * float(table.scale.sq)
    p0, p1 = sq[0::2], sq[1::2]
    return ProbabilityGrid(p0, p1, float(p0.sum()), float(p1.sum()), float(sq.sum()))


def normalize_population(P: PopulationState) -> PopulationState:
    """Divide the entries by their sum and fold that sum into ``scale``.

    In exact mode the sum must be ``2**j`` or ``sqrt2 * 2**j`` so that the
    division stays in the dyadic ring; other totals raise ``ValueError``.
    """
    total = P.total()
    if P.mode is ScalarMode.EXACT:
        if total.sign() <= 0:
            raise ValueError("cannot normalise a population with zero total")
        t = total
        if t.b == 0 and t.a & (t.a - 1) == 0:
            # 1 / (2**j / 2**k) = 1 / 2**(j-k)
            inv = DyadicRoot2(1, 0, t.a.bit_length() - 1 - t.k)
        elif t.a == 0 and t.b > 0 and t.b & (t.b - 1) == 0:
            # 1 / (sqrt2 * 2**j / 2**k) = sqrt2 / 2**(j+1-k)
            inv = DyadicRoot2(0, 1, t.b.bit_length() - t.k)
        else:
            raise ValueError(
                f"total {t} is not a power of sqrt2; exact normalisation would leave the ring"
            )
        return PopulationState(P.lattice, P.pops.scale(inv), P.mode, P.scale * Scale.of(t))
    if total <= 0:
        raise ValueError("cannot normalise a population with zero total")
    return PopulationState(
        P.lattice, P.pops / total, P.mode, P.scale * Scale(Fraction(total) ** 2)
    )


# -- snapshot JSON ---------------------------------------------------------


def state_to_json(state: QuantumState | PopulationState) -> str:
    """Sparse snapshot: ``{"sites", "boundary", "mode", "kind", "scale_sq", "entries"}``."""
    vec = state.amps if isinstance(state, QuantumState) else state.pops
    if state.mode is ScalarMode.EXACT:
        entries = [[int(i), str(vec[i])] for i in vec.nonzero()]
    else:
        entries = [[int(i), repr(float(vec[i]))] for i in np.flatnonzero(vec)]
    return json.dumps(
        {
            "sites": state.lattice.sites,
            "boundary": state.lattice.boundary.value,
            "origin": state.lattice.origin,
            "mode": state.mode.value,
            "kind": "quantum" if isinstance(state, QuantumState) else "population",
            "scale_sq": str(state.scale.sq),
            "entries": entries,
        }
    )


def state_from_json(text: str) -> QuantumState | PopulationState:
    doc = json.loads(text)
    lattice = LatticeSpec(doc["sites"], doc["boundary"], doc.get("origin"))
    mode = ScalarMode.parse(doc["mode"])
    kind = doc.get("kind", "quantum")
    n = (2 if kind == "quantum" else 4) * lattice.sites
    if mode is ScalarMode.EXACT:
        vals = [DyadicRoot2()] * n
        for i, s in doc["entries"]:
            vals[i] = parse_exact(s)
        vec = DyadicVector.from_scalars(vals)
    else:
        vec = np.zeros(n)
        for i, s in doc["entries"]:
            vec[i] = float(s)
    scale = Scale(doc.get("scale_sq", "1"))
    cls = QuantumState if kind == "quantum" else PopulationState
    return cls(lattice, vec, mode, scale)


__all__ = [
    "ROW_KET0",
    "ROW_KET1",
    "ROW_MKET1",
    "ROW_MKET0",
    "ROW_NAMES",
    "COIN_NAMES",
    "LatticeSpec",
    "QuantumState",
    "PopulationState",
    "AmplitudeTable",
    "ProbabilityGrid",
    "index_of",
    "lift",
    "project",
    "probabilities",
    "normalize_population",
    "stack_rows",
    "state_to_json",
    "state_from_json",
    "format_exact",
]
