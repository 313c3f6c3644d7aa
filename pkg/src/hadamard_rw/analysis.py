"""Distributions, coin masses, moments and cross-engine comparisons.

Exact-mode values are :class:`QSqrt2`. A distribution may carry a ``weight``
(physical value = ``weight * value``); it is 1 except for RW marginals of
states whose scale is irrational, such as the ``1/sqrt(46)`` chain start.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .scalar import QSqrt2, Scale, ScalarMode
from .state import (
    COIN_NAMES,
    ROW_NAMES,
    AmplitudeTable,
    PopulationState,
    QuantumState,
    probabilities,
    project,
)


@dataclass(frozen=True, eq=False)
class Distribution:
    positions: np.ndarray
    rows: dict[str, list]
    mode: ScalarMode
    weight: Scale = field(default_factory=Scale)

    @property
    def exact(self) -> bool:
        return self.mode is ScalarMode.EXACT

    def site_totals(self) -> list:
        names = list(self.rows)
        if self.exact:
            return [sum((self.rows[k][i] for k in names), QSqrt2()) for i in range(len(self.positions))]
        return np.sum([np.asarray(self.rows[k], dtype=float) for k in names], axis=0)

    def row_total(self, name: str):
        if self.exact:
            return sum(self.rows[name], QSqrt2())
        return float(np.sum(self.rows[name]))

    def grand_total(self):
        """Unweighted sum over every row and site."""
        if self.exact:
            return sum((self.row_total(k) for k in self.rows), QSqrt2())
        return float(sum(self.row_total(k) for k in self.rows))

    def float_rows(self) -> dict[str, np.ndarray]:
        """Weighted float columns, ready for CSV output."""
        w = float(self.weight)
        return {k: np.array([float(x) for x in v]) * w for k, v in self.rows.items()}

    def float_site_totals(self) -> np.ndarray:
        return np.sum(list(self.float_rows().values()), axis=0)


@dataclass(frozen=True)
class Moments:
    mean: object
    variance: object
    std: float


def quantum_distribution(source: PopulationState | QuantumState | AmplitudeTable, n: int | None = None) -> Distribution:
    """Per-coin position probabilities.

    A population state is projected first (``n`` required); a quantum state
    or amplitude table is squared directly. Both routes must agree.
    """
    if isinstance(source, PopulationState):
        if n is None:
            raise ValueError("the step count n is needed to project a population state")
        source = project(source, n)
    grid = probabilities(source)
    rows = {"ket0": list(grid.ket0), "ket1": list(grid.ket1)}
    if source.mode is ScalarMode.FLOAT64:
        rows = {k: np.asarray(v, dtype=float) for k, v in rows.items()}
    return Distribution(source.lattice.positions, rows, source.mode)


def rw_marginal(P: PopulationState) -> Distribution:
    """Per-row populations by position; no squaring, no rescaling."""
    rv = P.row_vectors()
    if P.mode is ScalarMode.EXACT:
        c = P.scale.rational()
        if c is not None:
            rows = {k: [d.to_qsqrt2() * c for d in rv[k]] for k in ROW_NAMES}
            return Distribution(P.lattice.positions, rows, P.mode)
        rows = {k: [d.to_qsqrt2() for d in rv[k]] for k in ROW_NAMES}
        return Distribution(P.lattice.positions, rows, P.mode, P.scale)
    w = float(P.scale)
    return Distribution(P.lattice.positions, {k: rv[k] * w for k in ROW_NAMES}, P.mode)


def coin_mass(dist: Distribution) -> tuple:
    """Total probability on coin |0> and on coin |1>."""
    missing = [k for k in COIN_NAMES if k not in dist.rows]
    if missing:
        raise ValueError("coin_mass needs a quantum distribution (rows ket0, ket1)")
    m0, m1 = dist.row_total("ket0"), dist.row_total("ket1")
    c = dist.weight.rational()
    if dist.exact and c is not None:
        return m0 * c, m1 * c
    w = float(dist.weight)
    return float(m0) * w, float(m1) * w


def moments(dist: Distribution) -> Moments:
    """Mean and variance of position (in site units) over the site totals."""
    totals = dist.site_totals()
    x = [int(p) for p in dist.positions]
    if dist.exact:
        mass = sum(totals, QSqrt2())
        if not mass:
            raise ValueError("moments of an all-zero distribution")
        m1 = sum((t * xi for t, xi in zip(totals, x) if t), QSqrt2())
        m2 = sum((t * (xi * xi) for t, xi in zip(totals, x) if t), QSqrt2())
        mean = m1 / mass
        var = m2 / mass - mean * mean
        return Moments(mean, var, math.sqrt(max(float(var), 0.0)))
    t = np.asarray(totals, dtype=float)
    mass = t.sum()
    if mass == 0:
        raise ValueError("moments of an all-zero distribution")
    xa = np.asarray(x, dtype=float)
    mean = float((xa * t).sum() / mass)
    var = float((xa * xa * t).sum() / mass - mean * mean)
    return Moments(mean, var, math.sqrt(max(var, 0.0)))


def _weighted_exact(d: Distribution):
    c = d.weight.rational() if d.exact else None
    if c is None:
        return None
    rows = {k: [x * c for x in v] if c != 1 else list(v) for k, v in d.rows.items()}
    totals = d.site_totals()
    return rows, [t * c for t in totals] if c != 1 else totals


def compare(a: Distribution, b: Distribution) -> tuple:
    """``(max abs difference, total variation distance)``.

    The max difference runs over the per-coin rows when both distributions
    have the same rows, else over the site totals. Total variation always
    uses site totals. Results are exact when both inputs are exact with
    rational weights, floats otherwise.
    """
    if not np.array_equal(a.positions, b.positions):
        raise ValueError("distributions are on different position grids")
    same_rows = set(a.rows) == set(b.rows)
    ea, eb = _weighted_exact(a), _weighted_exact(b)
    if ea is not None and eb is not None:
        (ra, ta), (rb, tb) = ea, eb
        pairs = (
            [(x, y) for k in ra for x, y in zip(ra[k], rb[k])] if same_rows else list(zip(ta, tb))
        )
        worst = QSqrt2()
        for x, y in pairs:
            d = abs(x - y)
            if d > worst:
                worst = d
        tv = sum((abs(x - y) for x, y in zip(ta, tb)), QSqrt2()) * QSqrt2(Fraction(1, 2))
        return worst, tv
    ta, tb = a.float_site_totals(), b.float_site_totals()
    if same_rows:
        fa, fb = a.float_rows(), b.float_rows()
        worst = max(float(np.max(np.abs(fa[k] - fb[k]))) for k in fa)
    else:
        worst = float(np.max(np.abs(ta - tb)))
    return worst, 0.5 * float(np.sum(np.abs(ta - tb)))
