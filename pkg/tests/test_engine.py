import numpy as np
import pytest

from hadamard_rw import engine
from hadamard_rw.errors import ConfigError, GuardViolation
from hadamard_rw.operators import build_quantum_step, build_rw_step
from hadamard_rw.presets import FIG3, FIG6, parse_init_spec
from hadamard_rw.scalar import HALF, INV_SQRT2, ONE, DyadicRoot2, QSqrt2, ScalarMode
from hadamard_rw.state import LatticeSpec, PopulationState, QuantumState, lift

EXACT, FLOAT = ScalarMode.EXACT, ScalarMode.FLOAT64


def test_step_quantum_examples():
    lat = LatticeSpec(7, "cyclic")
    op = build_quantum_step(7, "cyclic")
    psi = engine.step_quantum(parse_init_spec("origin:ket0", lat, EXACT), op)
    assert psi.amps[2 * 2] == INV_SQRT2 and psi.amps[2 * 4 + 1] == INV_SQRT2
    psi = engine.step_quantum(psi, op)
    amps = {i: psi.amps[i] for i in psi.amps.nonzero()}
    assert amps == {2: HALF, 6: HALF, 7: HALF, 11: -HALF}
    zero = QuantumState.zeros(lat, EXACT)
    assert engine.step_quantum(zero, op).amps.is_zero()


def test_step_rw_examples():
    lat = LatticeSpec(7, "cyclic")
    P = lift(parse_init_spec("origin:ket0", lat, EXACT))
    P1 = engine.step_rw(P, build_rw_step(7, "cyclic"))
    assert P1.pops[8] == HALF and P1.pops[17] == HALF
    assert P1.total() == P.total()

    rlat = LatticeSpec(7, "r1")
    edge = PopulationState(rlat, lift(QuantumState.basis(rlat, 1, 0, EXACT)).pops, EXACT)
    after = engine.step_rw(edge, build_rw_step(7, "r1"))
    assert after.total() == INV_SQRT2


def test_mismatched_lattice():
    psi = parse_init_spec("origin:ket0", LatticeSpec(7), EXACT)
    with pytest.raises(ConfigError):
        engine.step_quantum(psi, build_quantum_step(9, "open"))
    with pytest.raises(ConfigError):
        engine.step_quantum(psi, build_rw_step(7, "open"))


def test_zero_steps():
    lat = LatticeSpec(5)
    psi = parse_init_spec("origin:ket1", lat, EXACT)
    traj = engine.run(engine.RunConfig(lat, 0), psi)
    assert list(traj.quantum) == [0] and list(traj.rw) == [0]
    assert traj.quantum[0] is psi


def test_snapshot_validation():
    lat = LatticeSpec(9)
    assert engine.RunConfig(lat, 4).snapshots == (0, 4)
    assert engine.RunConfig(lat, 4, snapshots=(2,)).snapshots == (0, 2)
    with pytest.raises(ConfigError):
        engine.RunConfig(lat, 4, snapshots=(5,))
    with pytest.raises(ConfigError):
        engine.RunConfig(lat, -1)
    with pytest.raises(ConfigError):
        engine.RunConfig(lat, 1, kind="both-ish")


def test_size_bound():
    lat = LatticeSpec(11)
    psi = parse_init_spec("origin:ket0", lat, EXACT)
    engine.run(engine.RunConfig(lat, 5), psi)  # light cone touches sites 1 and 11
    with pytest.raises(ConfigError, match="guard bound"):
        engine.run(engine.RunConfig(lat, 6), psi)


def test_open_start_on_end_site_rejected():
    lat = LatticeSpec(9)
    P = lift(QuantumState.basis(lat, 1, 1, EXACT))
    with pytest.raises(ConfigError, match="guard bound"):
        engine.run(engine.RunConfig(lat, 1, "rw", EXACT), P)


def test_runtime_guard_fires(monkeypatch):
    monkeypatch.setattr(engine, "check_size_bound", lambda *a: None)
    lat = LatticeSpec(5)
    psi = parse_init_spec("origin:ket0", lat, EXACT)
    with pytest.raises(GuardViolation, match="edge-touch"):
        engine.run(engine.RunConfig(lat, 4, "quantum"), psi)


def test_figure3_run():
    traj = engine.run(FIG3.config(EXACT), FIG3.initial(EXACT))
    assert set(traj.quantum) == {0, 100}
    assert traj.quantum[100].norm_sq() == QSqrt2(1)


def test_figure6_snapshots():
    traj = engine.run(FIG6.config(EXACT), FIG6.initial(EXACT))
    assert set(traj.rw) == {0, 35, 65}
    assert not any(traj.seam_crossed["rw"])


def test_mode_mismatch():
    lat = LatticeSpec(9)
    with pytest.raises(ConfigError):
        engine.run(engine.RunConfig(lat, 2, mode=FLOAT), parse_init_spec("origin:ket0", lat, EXACT))


def test_rw_engine_needs_population_or_lifts():
    lat = LatticeSpec(9)
    psi = parse_init_spec("origin:ket0", lat, EXACT)
    traj = engine.run(engine.RunConfig(lat, 3, "rw"), psi)
    assert not traj.quantum and 3 in traj.rw
    with pytest.raises(ConfigError):
        engine.run(engine.RunConfig(lat, 3, "quantum"), lift(psi))


def test_verify_equivalence_examples():
    lat = LatticeSpec(45)
    psi = parse_init_spec("origin:ket0", lat, EXACT)
    rep = engine.verify_equivalence(engine.RunConfig(lat, 1), psi)
    assert rep.identical and rep.max_abs_diff == DyadicRoot2()
    rep = engine.verify_equivalence(engine.RunConfig(lat, 20), psi, every_step=True)
    assert rep.identical and rep.steps_checked == tuple(range(21))
    fpsi = parse_init_spec("origin:ket0", lat, FLOAT)
    rep = engine.verify_equivalence(engine.RunConfig(lat, 20, mode=FLOAT), fpsi)
    assert rep.max_abs_diff_float <= 1e-8


@pytest.mark.parametrize("mode", [EXACT, FLOAT])
def test_determinism(mode):
    lat = LatticeSpec(25, "r2")
    psi = parse_init_spec("uniform-interior:ket0-minus-ket1", lat, mode)
    a = engine.run(engine.RunConfig(lat, 30, mode=mode), psi)
    b = engine.run(engine.RunConfig(lat, 30, mode=mode), psi)
    assert a.quantum[30].equals(b.quantum[30])
    assert a.rw[30].equals(b.rw[30])
    if mode is FLOAT:
        assert np.array_equal(a.rw[30].pops, b.rw[30].pops)


def test_exact_and_float_agree_for_short_runs():
    lat = LatticeSpec(25, "r1")
    ex = engine.run(engine.RunConfig(lat, 20), parse_init_spec("origin:ket0-plus-ket1", lat, EXACT))
    fl = engine.run(engine.RunConfig(lat, 20, mode=FLOAT), parse_init_spec("origin:ket0-plus-ket1", lat, FLOAT))
    np.testing.assert_allclose(ex.quantum[20].amps.to_float(), fl.quantum[20].amps, atol=1e-14)
