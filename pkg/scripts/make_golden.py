"""Regenerate the frozen reference values in tests/golden/.

fig6 coin masses come from the dense oracle (not the sparse engine); the
fig3 peak comes from the exact engine and is cross-checked against a plain
NumPy dense matrix power before writing.
"""

import json
from pathlib import Path

import numpy as np

from hadamard_rw import analysis, engine, oracle
from hadamard_rw.operators import build_quantum_step, build_rw_step
from hadamard_rw.presets import FIG3, FIG6
from hadamard_rw.scalar import ScalarMode, format_exact
from hadamard_rw.state import PopulationState, lift

OUT = Path(__file__).resolve().parent.parent / "tests" / "golden"


def fig6():
    lat = FIG6.lattice()
    psi0 = FIG6.initial(ScalarMode.EXACT)
    op = build_rw_step(lat.sites, lat.boundary)
    P0 = lift(psi0)
    rows = []
    for n in FIG6.snapshots:
        pops = oracle.dense_power_reference(op, n, P0.pops)
        P = PopulationState(lat, pops, ScalarMode.EXACT, P0.scale)
        m0, m1 = analysis.coin_mass(analysis.quantum_distribution(P, n))
        rows.append({"step": n, "mass_ket0": format_exact(m0), "mass_ket1": format_exact(m1),
                     "mass_ket0_float": float(m0), "mass_ket1_float": float(m1)})
    return {"source": "dense_power_reference on the RW operator", "coin_mass": rows}


def fig3():
    lat = FIG3.lattice()
    n = FIG3.steps
    traj = engine.run(FIG3.config(ScalarMode.EXACT), FIG3.initial(ScalarMode.EXACT))
    q = analysis.quantum_distribution(traj.rw[n], n)
    totals = q.float_site_totals()
    # independent float cross-check: dense u^n on the quantum state
    u = build_quantum_step(lat.sites, lat.boundary).matrix().to_float()
    psi = FIG3.initial(ScalarMode.FLOAT64).amps
    dense = np.linalg.matrix_power(u, n) @ psi
    dense_tot = dense[0::2] ** 2 + dense[1::2] ** 2
    assert np.max(np.abs(dense_tot - totals)) < 1e-12
    order = np.argsort(-totals)
    peak = int(q.positions[order[0]])
    second = int(q.positions[order[1]])
    rw = analysis.rw_marginal(traj.rw[n])
    _, tv = analysis.compare(q, rw)
    return {
        "steps": n,
        "peak_offset": peak,
        "peak_probability": float(totals[order[0]]),
        "second_peak_offset": second,
        "tv_quantum_vs_rw_marginal": float(tv),
        "sigma_quantum": analysis.moments(q).std,
    }


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "fig6_coin_mass.json").write_text(json.dumps(fig6(), indent=1) + "\n")
    (OUT / "fig3_peak.json").write_text(json.dumps(fig3(), indent=1) + "\n")
    print("wrote", *sorted(p.name for p in OUT.iterdir()))
