"""Invariant battery behind ``hadamard-rw verify``.

Each check returns ``(ok, detail)``. The default battery finishes in well
under a minute; ``deep=True`` adds the full 201-site, 100-step exact
equivalence and the n = 50 variance law.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analysis, engine, operators, oracle
from .operators import (
    BoundaryMode,
    SparseMatrix,
    apply,
    build_quantum_step,
    build_rw_step,
    coin_projectors,
    hadamard,
    identity,
    interference_b,
    kron,
    reflect_coin,
    reflect_qcoin,
    transition_a,
)
from .presets import FIG6, parse_init_spec
from .scalar import HALF, INV_SQRT2, ONE, DyadicRoot2, ScalarMode
from .state import LatticeSpec, QuantumState, lift, project

EXACT = ScalarMode.EXACT
FLOAT = ScalarMode.FLOAT64
STARTS = ("origin:ket0", "origin:ket1", "origin:ket0-minus-ket1")


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def corrupted_a() -> SparseMatrix:
    """Transition matrix with the sign of entry (1, 1) flipped."""
    a = transition_a()
    ent = dict(a.entries)
    ent[(0, 0)] = -ent[(0, 0)]
    return SparseMatrix(a.shape, ent)


def check_factorization(a: SparseMatrix | None = None):
    a = transition_a() if a is None else a
    b = interference_b()
    lhs = (b @ a @ b.T).scaled(INV_SQRT2)
    exact_ok = lhs == hadamard()
    err = float(np.max(np.abs(lhs.to_float() - hadamard().to_float())))
    fl = interference_b().to_float()
    ferr = float(np.max(np.abs(fl @ a.to_float() @ fl.T / np.sqrt(2) - hadamard().to_float())))
    return exact_ok and ferr <= 1e-15, f"exact equal={exact_ok}, float max err={ferr:.2e} (exact-route err {err:.2e})"


def check_coin_intertwining():
    b = interference_b()
    h = hadamard()
    zero, one, zh, oh = coin_projectors()
    checks = {
        "BA=HB/sqrt2": b @ transition_a() == (h @ b).scaled(INV_SQRT2),
        "BR1=r1B/sqrt2": b @ reflect_coin("R1") == (reflect_qcoin("R1") @ b).scaled(INV_SQRT2),
        "BR2=-r1B/sqrt2": b @ reflect_coin("R2") == (reflect_qcoin("R2") @ b).scaled(INV_SQRT2),
        "Zero B=B ZeroHat": zero @ b == b @ zh,
        "One B=B OneHat": one @ b == b @ oh,
    }
    bad = [k for k, v in checks.items() if not v]
    return not bad, "all hold" if not bad else f"failed: {bad}"


def check_structure(sites: int = 25):
    a = transition_a()
    h = hadamard()
    msgs = []
    ok = True
    doubly = all(s == ONE for s in a.row_sums() + a.column_sums())
    nonneg = all(v.sign() > 0 for v in a.entries.values())
    sym = a == a.T
    det_a = a.det()
    det_h = h.det()
    unitary_h = h.T @ h == identity(2)
    u = build_quantum_step(sites, BoundaryMode.CYCLIC).matrix()
    unitary_u = u.T @ u == identity(2 * sites)
    stoch_U = all(s == ONE for s in build_rw_step(sites, BoundaryMode.CYCLIC).matrix().column_sums())
    for name, val in [
        ("A doubly stochastic", doubly and nonneg),
        ("A symmetric", sym),
        ("det A == 0", det_a == 0),
        ("det H == -1", det_h == -1),
        ("H unitary", unitary_h),
        (f"cyclic u unitary (S={sites})", unitary_u),
        (f"cyclic U column-stochastic (S={sites})", stoch_U),
    ]:
        ok &= bool(val)
        if not val:
            msgs.append(name)
    return ok, "all hold" if ok else f"failed: {msgs}"


def check_step_intertwining(sites: int = 9):
    bad = []
    ib = kron(identity(sites), interference_b())
    for bd in BoundaryMode:
        u = build_quantum_step(sites, bd).matrix()
        U = build_rw_step(sites, bd).matrix()
        if ib @ U != (u @ ib).scaled(INV_SQRT2):
            bad.append(bd.value)
    return not bad, "holds for open, cyclic, r1, r2" if not bad else f"failed: {bad}"


def check_sparsity(sites: int = 25):
    worst = 0
    for bd in BoundaryMode:
        for op in (build_quantum_step(sites, bd), build_rw_step(sites, bd)):
            worst = max(worst, max(op.column_nnz()))
    return worst <= 4, f"max nonzeros per column = {worst}"


def check_path_sum(max_n: int = 12):
    lat = LatticeSpec(2 * max_n + 3, BoundaryMode.OPEN)
    starts = {
        "ket0": (1, 0),
        "ket1": (0, 1),
        "ket0-minus-ket1": (INV_SQRT2, -INV_SQRT2),
        "ket0-plus-ket1": (INV_SQRT2, INV_SQRT2),
    }
    for name, coins in starts.items():
        psi = parse_init_spec(f"origin:{name}", lat, EXACT)
        op = build_quantum_step(lat.sites, lat.boundary)
        for n in range(max_n + 1):
            ref = oracle.path_sum(n, coins)
            for (x, c), amp in ref.amplitudes.items():
                if psi.amps[2 * (lat.site_of(x) - 1) + c] != amp:
                    return False, f"mismatch at n={n}, start {name}, offset {x}, coin {c}"
            nz = len(psi.amps.nonzero())
            if nz != len(ref.amplitudes):
                return False, f"support mismatch at n={n}, start {name}"
            psi = engine.step_quantum(psi, op)
    return True, f"exact agreement for n <= {max_n}, 4 starts"


def check_dense_oracle(sites: int = 25, steps: int = 65):
    lat_mid = (sites + 1) // 2
    for bd in BoundaryMode:
        n = steps if bd is not BoundaryMode.OPEN else (sites - 1) // 2
        lat = LatticeSpec(sites, bd, lat_mid)
        psi0 = parse_init_spec("origin:ket0-minus-ket1", lat, EXACT)
        traj = engine.run(engine.RunConfig(lat, n, "both", EXACT, (n,)), psi0)
        q_ref = oracle.dense_power_reference(build_quantum_step(sites, bd), n, psi0.amps)
        p_ref = oracle.dense_power_reference(build_rw_step(sites, bd), n, lift(psi0).pops)
        if traj.quantum[n].amps != q_ref or traj.rw[n].pops != p_ref:
            return False, f"engine differs from dense reference ({bd.value}, n={n})"
    return True, f"exact agreement, S={sites}, n={steps} (open: light-cone limit)"


def _equivalence_cases(deep: bool):
    open_sites, open_n = (201, 100) if deep else (81, 40)
    for start in STARTS:
        yield LatticeSpec(open_sites, BoundaryMode.OPEN), open_n, start
    for bd in (BoundaryMode.CYCLIC, BoundaryMode.REFLECT_R1, BoundaryMode.REFLECT_R2):
        starts = STARTS + (("uniform-interior:ket0-minus-ket1",) if bd.reflecting else ())
        for start in starts:
            yield LatticeSpec(25, bd), (100 if deep else 65), start


def check_equivalence(deep: bool = False):
    count = 0
    for lat, n, start in _equivalence_cases(deep):
        psi0 = parse_init_spec(start, lat, EXACT)
        rep = engine.verify_equivalence(engine.RunConfig(lat, n, "both", EXACT), psi0, every_step=True)
        if not rep.identical:
            return False, f"differs: {lat.boundary.value}, {start}, n={n}: {rep.max_abs_diff}"
        count += 1
    return True, f"{count} configurations identical at every step"


def check_float_equivalence(steps: int = 30):
    worst = 0.0
    for bd in BoundaryMode:
        lat = LatticeSpec(2 * steps + 3 if bd is BoundaryMode.OPEN else 25, bd)
        for start in STARTS:
            psi0 = parse_init_spec(start, lat, FLOAT)
            rep = engine.verify_equivalence(engine.RunConfig(lat, steps, "both", FLOAT), psi0, every_step=True)
            worst = max(worst, rep.max_abs_diff_float)
    return worst <= 1e-8, f"max abs error {worst:.2e} for n <= {steps} (tolerance 1e-8)"


def check_conservation(sites: int = 25, steps: int = 60):
    lat = LatticeSpec(sites, BoundaryMode.CYCLIC)
    psi = parse_init_spec("origin:ket0", lat, EXACT)
    P = lift(psi)
    uq, ur = build_quantum_step(sites, lat.boundary), build_rw_step(sites, lat.boundary)
    n0, t0 = psi.norm_sq(), P.total()
    for _ in range(steps):
        psi = engine.step_quantum(psi, uq)
        P = engine.step_rw(P, ur)
        if psi.norm_sq() != n0 or P.total() != t0 or not P.is_nonnegative():
            return False, "norm or population drifted"
    return True, f"exact over {steps} cyclic steps"


def rw_position_variance(n: int):
    lat = LatticeSpec(2 * n + 3, BoundaryMode.OPEN)
    psi0 = parse_init_spec("origin:ket0", lat, EXACT)
    traj = engine.run(engine.RunConfig(lat, n, "rw", EXACT, (n,)), psi0)
    return analysis.moments(analysis.rw_marginal(traj.rw[n])).variance


def check_variance_law(ns=(10, 25)):
    bad = [n for n in ns if rw_position_variance(n) != n]
    return not bad, f"variance == n exactly for n in {list(ns)}" if not bad else f"failed for {bad}"


def check_seam(steps: int = 65, sites: int = 25):
    for bd in (BoundaryMode.REFLECT_R1, BoundaryMode.REFLECT_R2):
        lat = LatticeSpec(sites, bd)
        for site in range(2, sites):
            psi0 = QuantumState.basis(lat, site, 0, EXACT)
            try:
                traj = engine.run(engine.RunConfig(lat, steps, "both", EXACT, (steps,)), psi0)
            except engine.GuardViolation as exc:
                return False, f"{bd.value}, start site {site}: {exc}"
            if any(traj.seam_crossed["rw"]) or any(traj.seam_crossed["quantum"]):
                return False, f"seam crossed ({bd.value}, start site {site})"
    return True, f"no seam crossing for any interior start, n <= {steps}"


def float_cancellation_error(steps: int = 100) -> tuple[float, bool]:
    """Float-mode equivalence error at ``steps`` and whether exact mode is exact."""
    lat = LatticeSpec(2 * steps + 1, BoundaryMode.OPEN)
    fl = engine.verify_equivalence(
        engine.RunConfig(lat, steps, "both", FLOAT, (steps,)), parse_init_spec("origin:ket0", lat, FLOAT)
    )
    ex = engine.verify_equivalence(
        engine.RunConfig(lat, steps, "both", EXACT, (steps,)), parse_init_spec("origin:ket0", lat, EXACT)
    )
    return fl.max_abs_diff_float, ex.identical


def check_float_health(steps: int = 100):
    err, exact_ok = float_cancellation_error(steps)
    return err > 1e-3 and exact_ok, (
        f"float max abs error at n={steps}: {err:.3e} (> 1e-3 expected from 2^n-amplified "
        f"cancellation); exact mode identical: {exact_ok}"
    )


def battery(deep: bool = False, negative: bool = False) -> list[tuple[str, Callable]]:
    a = corrupted_a() if negative else None
    checks = [
        ("factorization (1/sqrt2) B A B^T == H", lambda: check_factorization(a)),
        ("coin and projector intertwining", check_coin_intertwining),
        ("structural facts (A, H, cyclic u/U)", check_structure),
        ("step intertwining (I(x)B)U == u(I(x)B)/sqrt2", check_step_intertwining),
        ("sparsity <= 4 per column", check_sparsity),
        ("path-sum oracle vs engine", check_path_sum),
        ("dense oracle vs engine", check_dense_oracle),
        ("exact equivalence u^n psi == (sqrt2)^n (I(x)B) U^n P", lambda: check_equivalence(deep)),
        ("float equivalence n <= 30", check_float_equivalence),
        ("conservation (cyclic)", check_conservation),
        ("RW variance law", lambda: check_variance_law((10, 25, 50) if deep else (10, 25))),
        ("reflecting seam containment", check_seam),
        ("float cancellation at n = 100", check_float_health),
    ]
    return checks


def run_battery(deep: bool = False, negative: bool = False, echo=print) -> list[CheckResult]:
    results = []
    for name, fn in battery(deep, negative):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        res = CheckResult(name, bool(ok), detail, time.perf_counter() - t0)
        results.append(res)
        if echo:
            echo(f"[{'PASS' if res.ok else 'FAIL'}] {name}: {detail} ({res.seconds:.2f}s)")
    return results
