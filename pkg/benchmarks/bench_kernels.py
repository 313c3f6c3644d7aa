"""Time the compiled and pure-Python step kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat N]

Exact workload: 100 steps of the 4-row model on 201 open sites from a point
start. Float workload: 2000 steps on a 2001-site cyclic ring. Both backends
must produce identical output; the script exits non-zero otherwise.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from hadamard_rw import kernels
from hadamard_rw.operators import apply, build_rw_step
from hadamard_rw.presets import parse_init_spec
from hadamard_rw.scalar import ScalarMode
from hadamard_rw.state import LatticeSpec, lift


def exact_workload(impl, sites=201, steps=100):
    lat = LatticeSpec(sites, "open")
    P = lift(parse_init_spec("origin:ket0", lat, ScalarMode.EXACT)).pops
    op = build_rw_step(sites, "open")
    for _ in range(steps):
        P = apply(op, P, backend=impl)
    return P


def float_workload(impl, sites=2001, steps=2000):
    op = build_rw_step(sites, "cyclic")
    v = np.zeros(op.dim)
    v[4 * (sites // 2)] = 1.0
    for _ in range(steps):
        v = apply(op, v, backend=impl)
    return v


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    if "cython" not in kernels.BACKENDS:
        print("compiled kernels are not built; only the Python fallback is available")
    results = {}
    for name, impl in sorted(kernels.BACKENDS.items()):
        te, oe = best_of(lambda: exact_workload(impl), args.repeat)
        tf, of = best_of(lambda: float_workload(impl), args.repeat)
        results[name] = (te, tf, oe, of)
        print(f"{name:>7}: exact 201x100 {te * 1e3:8.1f} ms   float 2001x2000 {tf * 1e3:8.1f} ms")

    if len(results) == 2:
        (te_c, tf_c, oe_c, of_c), (te_p, tf_p, oe_p, of_p) = results["cython"], results["python"]
        print(f"speedup: exact {te_p / te_c:.1f}x, float {tf_p / tf_c:.1f}x")
        if oe_c != oe_p or not np.array_equal(of_c, of_p):
            print("backends disagree", file=sys.stderr)
            return 1
        print("outputs identical")
    return 0


if __name__ == "__main__":
    sys.exit(main())
