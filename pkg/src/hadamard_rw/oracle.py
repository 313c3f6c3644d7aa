"""Brute-force reference evaluators used only for verification.

``path_sum`` enumerates every coin history of the Hadamard walk and never
builds a matrix. ``dense_power_reference`` materialises an operator densely
and multiplies naively with scalar arithmetic, sharing nothing with the
sparse kernels. The two fail in unrelated ways.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import StepOperator
from .scalar import INV_SQRT2, ONE, ZERO, DyadicRoot2, DyadicVector

MAX_PATH_STEPS = 20
MAX_DENSE_DIM = 2000


@dataclass(frozen=True)
class PathSumResult:
    """Final amplitudes keyed by ``(offset, coin)``; zero entries omitted."""

    steps: int
    amplitudes: dict[tuple[int, int], object]

    def probability_by_offset(self) -> dict[int, object]:
        out: dict[int, object] = {}
        for (x, _), amp in self.amplitudes.items():
            out[x] = out.get(x, 0) + amp * amp
        return out

    def norm_sq(self):
        return sum((a * a for a in self.amplitudes.values()), ZERO)


def path_sum(n: int, psi0) -> PathSumResult:
    """Sum over all ``2**n`` coin histories starting at offset 0.

    ``psi0`` is ``(amp_ket0, amp_ket1)``; integers or ``DyadicRoot2`` give exact
    results, floats give float results. Each step picks a new coin ``c'`` with
    weight ``H[c', c]`` (``-1/sqrt2`` only for 1 -> 1, else ``+1/sqrt2``), then
    moves coin |0> to offset -1 and coin |1> to offset +1.
    """
    if n < 0 or n > MAX_PATH_STEPS:
        raise ValueError(f"path_sum supports 0 <= n <= {MAX_PATH_STEPS}, got {n}")
    c = list(psi0)
    exact = all(isinstance(x, (int, DyadicRoot2)) for x in c)
    if exact:
        c = [DyadicRoot2.coerce(x) for x in c]
    if n == 0:
        return PathSumResult(0, {(0, k): c[k] for k in (0, 1) if c[k]})

    hist = np.arange(1 << n, dtype=np.int64)  # bit t-1 = coin chosen at step t
    mask = (1 << n) - 1
    ones = np.bitwise_count(hist).astype(np.int64)
    offset = 2 * ones - n
    final_coin = (hist >> (n - 1)) & 1
    # signed path counts per (offset index, final coin), per starting coin
    counts = {}
    for start in (0, 1):
        if not c[start]:
            continue
        prev = ((hist << 1) | start) & mask
        flips = np.bitwise_count(hist & prev).astype(np.int64)
        sign = 1 - 2 * (flips & 1)
        grid = np.zeros((2 * n + 1, 2), dtype=np.int64)
        np.add.at(grid, (offset + n, final_coin), sign)
        counts[start] = grid

    if exact:
        factor = ONE
        for _ in range(n):
            factor = factor * INV_SQRT2
    else:
        factor = 2.0 ** (-n / 2)
    amps: dict[tuple[int, int], object] = {}
    for start, grid in counts.items():
        for xi, coin in zip(*np.nonzero(grid)):
            key = (int(xi) - n, int(coin))
            term = c[start] * factor * int(grid[xi, coin])
            amps[key] = amps[key] + term if key in amps else term
    amps = {k: v for k, v in amps.items() if v}
    return PathSumResult(n, amps)


def dense_power_reference(op: StepOperator, n: int, v):
    """Apply ``op`` densely ``n`` times to ``v`` (``DyadicVector`` or float array)."""
    if op.dim > MAX_DENSE_DIM:
        raise ValueError(f"dense reference limited to dimension {MAX_DENSE_DIM}, got {op.dim}")
    if len(v) != op.dim:
        raise ValueError("vector length does not match operator dimension")
    dim = op.dim
    if isinstance(v, DyadicVector):
        mat = [[ZERO] * dim for _ in range(dim)]
        for i, j, val in op.entries:
            mat[i][j] = val
        cur = v.to_list()
        for _ in range(n):
            nxt = []
            for row in mat:
                acc = ZERO
                for mij, xj in zip(row, cur):
                    if mij and xj:
                        acc = acc + mij * xj
                nxt.append(acc)
            cur = nxt
        return DyadicVector.from_scalars(cur)
    mat = np.zeros((dim, dim))
    for i, j, val in op.entries:
        mat[i, j] = float(val)
    cur = np.array(v, dtype=float)
    for _ in range(n):
        cur = mat @ cur
    return cur
