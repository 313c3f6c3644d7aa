"""Coin, shift and step operators for the Hadamard walk and its 4-row RW model.

All matrices are built exactly (entries are :class:`DyadicRoot2`) and stored
sparsely. Index conventions:

* quantum flat index ``2*(site-1) + coin`` with coin 0 = |0>, 1 = |1>;
* RW flat index ``4*(site-1) + row`` with rows ordered |0>, |1>, -|1>, -|0>.

Direction convention: ``Right[j, j+1] = 1``, so ``x = Right (x) Zero + Left (x)
One`` moves the coin-|0> component one site toward *lower* index and the
coin-|1> component one site toward *higher* index.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import ConfigError
from .scalar import HALF, INV_SQRT2, ONE, ZERO, DyadicRoot2, DyadicVector

__all__ = [
    "BoundaryMode",
    "SparseMatrix",
    "StepOperator",
    "hadamard",
    "transition_a",
    "interference_b",
    "reflect_coin",
    "reflect_qcoin",
    "swap_coin",
    "coin_projectors",
    "shift_matrices",
    "boundary_mask",
    "identity",
    "kron",
    "build_quantum_step",
    "build_rw_step",
    "apply",
]


class BoundaryMode(enum.Enum):
    OPEN = "open"
    CYCLIC = "cyclic"
    REFLECT_R1 = "r1"
    REFLECT_R2 = "r2"

    @property
    def reflecting(self) -> bool:
        return self in (BoundaryMode.REFLECT_R1, BoundaryMode.REFLECT_R2)

    @property
    def cyclic_shift(self) -> bool:
        # reflecting chains close the shift into a ring so it stays square
        return self is not BoundaryMode.OPEN

    @classmethod
    def parse(cls, text: "str | BoundaryMode") -> "BoundaryMode":
        if isinstance(text, BoundaryMode):
            return text
        for mode in cls:
            if mode.value == text:
                return mode
        raise ConfigError(
            f"unknown boundary {text!r} (expected one of open, cyclic, r1, r2)"
        )


class SparseMatrix:
    """Exact sparse matrix: a shape plus a dict of nonzero entries."""

    __slots__ = ("shape", "entries")

    def __init__(self, shape: tuple[int, int], entries: Mapping | None = None):
        self.shape = (int(shape[0]), int(shape[1]))
        self.entries: dict[tuple[int, int], DyadicRoot2] = {}
        if entries:
            for (i, j), v in entries.items():
                v = DyadicRoot2.coerce(v)
                if v:
                    self.entries[(i, j)] = v

    @classmethod
    def from_dense(cls, rows: Iterable[Iterable], scale=ONE) -> "SparseMatrix":
        rows = [list(r) for r in rows]
        scale = DyadicRoot2.coerce(scale)
        ent = {}
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                if v:
                    ent[(i, j)] = scale * DyadicRoot2.coerce(v)
        return cls((len(rows), len(rows[0]) if rows else 0), ent)

    def __getitem__(self, ij: tuple[int, int]) -> DyadicRoot2:
        return self.entries.get(ij, ZERO)

    def to_dense(self) -> list[list[DyadicRoot2]]:
        m, n = self.shape
        out = [[ZERO] * n for _ in range(m)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def to_float(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for (i, j), v in self.entries.items():
            out[i, j] = float(v)
        return out

    @property
    def T(self) -> "SparseMatrix":
        return SparseMatrix(
            (self.shape[1], self.shape[0]), {(j, i): v for (i, j), v in self.entries.items()}
        )

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        ent = dict(self.entries)
        for ij, v in other.entries.items():
            ent[ij] = ent.get(ij, ZERO) + v
        return SparseMatrix(self.shape, ent)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.shape, {ij: -v for ij, v in self.entries.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scaled(self, c) -> "SparseMatrix":
        c = DyadicRoot2.coerce(c)
        return SparseMatrix(self.shape, {ij: c * v for ij, v in self.entries.items()})

    def __rmul__(self, c) -> "SparseMatrix":
        return self.scaled(c)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        by_row: dict[int, list[tuple[int, DyadicRoot2]]] = {}
        for (k, j), w in other.entries.items():
            by_row.setdefault(k, []).append((j, w))
        ent: dict[tuple[int, int], DyadicRoot2] = {}
        for (i, k), v in self.entries.items():
            for j, w in by_row.get(k, ()):
                ent[(i, j)] = ent.get((i, j), ZERO) + v * w
        return SparseMatrix((self.shape[0], other.shape[1]), ent)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    __hash__ = None

    def column_nnz(self) -> list[int]:
        counts = [0] * self.shape[1]
        for _, j in self.entries:
            counts[j] += 1
        return counts

    def column_sums(self) -> list[DyadicRoot2]:
        sums = [ZERO] * self.shape[1]
        for (_, j), v in self.entries.items():
            sums[j] = sums[j] + v
        return sums

    def row_sums(self) -> list[DyadicRoot2]:
        sums = [ZERO] * self.shape[0]
        for (i, _), v in self.entries.items():
            sums[i] = sums[i] + v
        return sums

    def det(self) -> DyadicRoot2:
        """Exact determinant by cofactor expansion (small square matrices only)."""
        m, n = self.shape
        if m != n:
            raise ValueError("determinant of a non-square matrix")
        if n > 8:
            raise ValueError("cofactor expansion is limited to n <= 8")
        return _det(self.to_dense())

    def __repr__(self) -> str:
        return f"SparseMatrix(shape={self.shape}, nnz={len(self.entries)})"


def _det(rows: list[list[DyadicRoot2]]) -> DyadicRoot2:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = ZERO
    for j, v in enumerate(rows[0]):
        if not v:
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = v * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def identity(n: int) -> SparseMatrix:
    return SparseMatrix((n, n), {(i, i): ONE for i in range(n)})


def kron(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """Kronecker product; block ``(i, j)`` equals ``a[i, j] * b``."""
    p, q = b.shape
    ent = {}
    for (i, j), v in a.entries.items():
        for (k, l), w in b.entries.items():
            ent[(i * p + k, j * q + l)] = v * w
    return SparseMatrix((a.shape[0] * p, a.shape[1] * q), ent)


# -- the named matrices ----------------------------------------------------


def hadamard() -> SparseMatrix:
    return SparseMatrix.from_dense([[1, 1], [1, -1]], scale=INV_SQRT2)


def transition_a() -> SparseMatrix:
    """Doubly stochastic 4x4 transition matrix of the four-state chain."""
    return SparseMatrix.from_dense(
        [[1, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 1]], scale=HALF
    )


def interference_b() -> SparseMatrix:
    return SparseMatrix.from_dense([[1, 0, 0, -1], [0, 1, -1, 0]])


def reflect_coin(kind: str) -> SparseMatrix:
    """Boundary coin ``R1`` (swap rows 1<->2, 3<->4) or ``R2`` (1<->3, 2<->4), times 1/sqrt2."""
    kind = kind.upper()
    if kind == "R1":
        perm = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    elif kind == "R2":
        perm = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    else:
        raise ValueError(f"unknown reflecting coin {kind!r}")
    return SparseMatrix.from_dense(perm, scale=INV_SQRT2)


def swap_coin() -> SparseMatrix:
    """The 2x2 coin swap ``r1 = [[0, 1], [1, 0]]``."""
    return SparseMatrix.from_dense([[0, 1], [1, 0]])


def reflect_qcoin(kind: str) -> SparseMatrix:
    """Quantum boundary coin matching ``reflect_coin(kind)``: ``r1`` or ``-r1``.

    Chosen so that ``B @ R == (1/sqrt2) * r @ B`` holds for both kinds.
    """
    kind = kind.upper()
    if kind == "R1":
        return swap_coin()
    if kind == "R2":
        return -swap_coin()
    raise ValueError(f"unknown reflecting coin {kind!r}")


def coin_projectors() -> tuple[SparseMatrix, SparseMatrix, SparseMatrix, SparseMatrix]:
    """``(Zero, One, ZeroHat, OneHat)``; the hatted ones act on the 4 RW rows."""
    zero = SparseMatrix.from_dense([[1, 0], [0, 0]])
    one = SparseMatrix.from_dense([[0, 0], [0, 1]])
    zero_hat = SparseMatrix((4, 4), {(0, 0): ONE, (3, 3): ONE})
    one_hat = SparseMatrix((4, 4), {(1, 1): ONE, (2, 2): ONE})
    return zero, one, zero_hat, one_hat


def shift_matrices(sites: int, cyclic: bool = False) -> tuple[SparseMatrix, SparseMatrix]:
    """``(Right, Left)`` on ``sites`` sites; ``cyclic`` closes the ring."""
    if sites < 2:
        raise ConfigError(f"shift matrices need at least 2 sites, got {sites}")
    right = {(j, j + 1): ONE for j in range(sites - 1)}
    left = {(j + 1, j): ONE for j in range(sites - 1)}
    if cyclic:
        right[(sites - 1, 0)] = ONE
        left[(0, sites - 1)] = ONE
    return SparseMatrix((sites, sites), right), SparseMatrix((sites, sites), left)


def boundary_mask(sites: int) -> SparseMatrix:
    if sites < 2:
        raise ConfigError(f"boundary mask needs at least 2 sites, got {sites}")
    return SparseMatrix((sites, sites), {(0, 0): ONE, (sites - 1, sites - 1): ONE})


# -- step operators --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StepOperator:
    """One walk step as a sparse square operator on the flat state vector.

    ``entries`` are ``(row, col, value)`` triplets sorted column-major.
    ``seam`` holds the subset of entries that carry weight across the cyclic
    seam (site ``S`` <-> site 1); it is empty unless the shift is cyclic.
    """

    kind: str
    sites: int
    boundary: BoundaryMode
    dim: int
    entries: tuple[tuple[int, int, DyadicRoot2], ...]
    seam: tuple[tuple[int, int, DyadicRoot2], ...] = field(default=())

    @classmethod
    def from_matrix(cls, kind, sites, boundary, mat: SparseMatrix) -> "StepOperator":
        per_site = mat.shape[0] // sites
        ent = sorted(((i, j, v) for (i, j), v in mat.entries.items()), key=lambda t: (t[1], t[0]))
        seam = ()
        if boundary.cyclic_shift and sites >= 3:
            ends = {(sites - 1, 0), (0, sites - 1)}
            seam = tuple(t for t in ent if (t[0] // per_site, t[1] // per_site) in ends)
        return cls(kind, sites, boundary, mat.shape[0], tuple(ent), seam)

    def matrix(self) -> SparseMatrix:
        return SparseMatrix((self.dim, self.dim), {(i, j): v for i, j, v in self.entries})

    def seam_operator(self) -> "StepOperator":
        return StepOperator(self.kind, self.sites, self.boundary, self.dim, self.seam)

    def column_nnz(self) -> list[int]:
        counts = [0] * self.dim
        for _, j, _ in self.entries:
            counts[j] += 1
        return counts

    @cached_property
    def _csc(self):
        n = self.dim
        rows = np.fromiter((t[0] for t in self.entries), dtype=np.intp, count=len(self.entries))
        cols = np.fromiter((t[1] for t in self.entries), dtype=np.intp, count=len(self.entries))
        colptr = np.zeros(n + 1, dtype=np.intp)
        np.add.at(colptr, cols + 1, 1)
        colptr = np.cumsum(colptr).astype(np.intp)
        return colptr, rows

    @cached_property
    def _float_vals(self) -> np.ndarray:
        return np.array([float(v) for _, _, v in self.entries], dtype=np.float64)

    @cached_property
    def _exact_parts(self):
        kop = max((v.k for _, _, v in self.entries), default=0)
        oa = [v.a << (kop - v.k) for _, _, v in self.entries]
        ob = [v.b << (kop - v.k) for _, _, v in self.entries]
        kind = np.array(
            [0 if b == 0 else (1 if a == 0 else 2) for a, b in zip(oa, ob)], dtype=np.int8
        )
        return kop, oa, ob, kind

    def to_json(self) -> str:
        """Debug dump of the triplets; not a stable format."""
        return json.dumps(
            {
                "kind": self.kind,
                "sites": self.sites,
                "boundary": self.boundary.value,
                "dim": self.dim,
                "entries": [[i, j, str(v)] for i, j, v in self.entries],
            }
        )

    def __repr__(self) -> str:
        return (
            f"StepOperator({self.kind}, sites={self.sites}, boundary={self.boundary.value}, "
            f"nnz={len(self.entries)})"
        )


def _check_sites(sites: int, boundary: BoundaryMode) -> None:
    if sites < 2:
        raise ConfigError(f"need at least 2 sites, got {sites}")
    if boundary.reflecting and sites < 3:
        raise ConfigError(f"reflecting boundaries need at least 3 sites, got {sites}")


def _shift(sites: int, boundary: BoundaryMode, hatted: bool) -> SparseMatrix:
    right, left = shift_matrices(sites, boundary.cyclic_shift)
    zero, one, zero_hat, one_hat = coin_projectors()
    if hatted:
        return kron(right, zero_hat) + kron(left, one_hat)
    return kron(right, zero) + kron(left, one)


def _coin_stage(sites: int, boundary: BoundaryMode, bulk: SparseMatrix, edge: SparseMatrix | None):
    if not boundary.reflecting:
        return kron(identity(sites), bulk)
    z = boundary_mask(sites)
    return kron(identity(sites) - z, bulk) + kron(z, edge)


@lru_cache(maxsize=64)
def build_quantum_step(sites: int, boundary: BoundaryMode | str) -> StepOperator:
    """``u = x @ y`` with ``y = I (x) H`` (or ``r1``/``-r1`` on the two end sites)."""
    boundary = BoundaryMode.parse(boundary)
    _check_sites(sites, boundary)
    edge = reflect_qcoin("R1" if boundary is BoundaryMode.REFLECT_R1 else "R2") if boundary.reflecting else None
    y = _coin_stage(sites, boundary, hadamard(), edge)
    x = _shift(sites, boundary, hatted=False)
    return StepOperator.from_matrix("quantum", sites, boundary, x @ y)


@lru_cache(maxsize=64)
def build_rw_step(sites: int, boundary: BoundaryMode | str) -> StepOperator:
    """``U = X @ Y`` with ``Y = I (x) A`` (or ``R1``/``R2`` on the two end sites)."""
    boundary = BoundaryMode.parse(boundary)
    _check_sites(sites, boundary)
    edge = reflect_coin("R1" if boundary is BoundaryMode.REFLECT_R1 else "R2") if boundary.reflecting else None
    y = _coin_stage(sites, boundary, transition_a(), edge)
    x = _shift(sites, boundary, hatted=True)
    return StepOperator.from_matrix("rw", sites, boundary, x @ y)


def apply(op: StepOperator, v, backend=None):
    """Return ``op @ v`` for a ``DyadicVector`` (exact) or a float/complex array."""
    impl = kernels if backend is None else backend
    if len(v) != op.dim:
        raise ValueError(f"vector length {len(v)} does not match operator dimension {op.dim}")
    colptr, rows = op._csc
    if isinstance(v, DyadicVector):
        kop, oa, ob, kind = op._exact_parts
        na, nb = impl.apply_exact(colptr, rows, kind, oa, ob, v.a, v.b)
        return DyadicVector(na, nb, v.k + kop)
    v = np.asarray(v)
    if np.iscomplexobj(v):
        re_ = impl.apply_float(colptr, rows, op._float_vals, np.ascontiguousarray(v.real, dtype=np.float64))
        im_ = impl.apply_float(colptr, rows, op._float_vals, np.ascontiguousarray(v.imag, dtype=np.float64))
        return re_ + 1j * im_
    if v.dtype == object:
        raise TypeError("exact vectors must be DyadicVector instances, not object arrays")
    return impl.apply_float(colptr, rows, op._float_vals, np.ascontiguousarray(v, dtype=np.float64))
