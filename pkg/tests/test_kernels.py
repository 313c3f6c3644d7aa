"""Both kernel backends against each other and against a dense product."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hadamard_rw import kernels
from hadamard_rw.operators import BoundaryMode, StepOperator, apply, build_rw_step
from hadamard_rw.oracle import dense_power_reference
from hadamard_rw.scalar import DyadicRoot2, DyadicVector

entry_values = st.sampled_from(
    [DyadicRoot2(1, 0, 1), DyadicRoot2(0, 1, 1), DyadicRoot2(-1), DyadicRoot2(1), DyadicRoot2(3, -1, 2)]
)


@st.composite
def sparse_ops(draw):
    dim = draw(st.integers(min_value=1, max_value=10))
    entries = {}
    for j in range(dim):
        rows = draw(st.lists(st.integers(0, dim - 1), max_size=4, unique=True))
        for i in rows:
            entries[(i, j)] = draw(entry_values)
    trip = tuple(sorted(((i, j, v) for (i, j), v in entries.items()), key=lambda t: (t[1], t[0])))
    op = StepOperator("rw", dim, BoundaryMode.CYCLIC, dim, trip)
    vec = draw(st.lists(st.builds(DyadicRoot2, st.integers(-50, 50), st.integers(-50, 50),
                                  st.integers(0, 4)), min_size=dim, max_size=dim))
    return op, DyadicVector.from_scalars(vec)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in kernels.BACKENDS


@settings(max_examples=60, deadline=None)
@given(sparse_ops(), st.integers(min_value=0, max_value=5))
def test_exact_apply_matches_dense(case, n):
    op, v = case
    expected = dense_power_reference(op, n, v)
    for impl in kernels.BACKENDS.values():
        out = v
        for _ in range(n):
            out = apply(op, out, backend=impl)
        assert out == expected


@settings(max_examples=40, deadline=None)
@given(sparse_ops())
def test_float_backends_bit_identical(case):
    op, v = case
    fv = v.to_float()
    outs = [apply(op, fv, backend=impl) for impl in kernels.BACKENDS.values()]
    for o in outs[1:]:
        assert np.array_equal(o, outs[0])
    np.testing.assert_allclose(outs[0], dense_power_reference(op, 1, fv), rtol=1e-13, atol=1e-13)


def test_complex_vectors_split_real_imag():
    op = build_rw_step(5, "cyclic")
    v = np.zeros(20, dtype=complex)
    v[8] = 1 + 2j
    out = apply(op, v)
    np.testing.assert_array_equal(out.real, apply(op, v.real))
    np.testing.assert_array_equal(out.imag, apply(op, v.imag))


def test_dimension_mismatch():
    op = build_rw_step(5, "cyclic")
    with pytest.raises(ValueError):
        apply(op, np.zeros(7))


def test_object_arrays_rejected():
    op = build_rw_step(3, "cyclic")
    with pytest.raises(TypeError):
        apply(op, np.array([DyadicRoot2(1)] * 12, dtype=object))


def test_env_forces_python_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, HADAMARD_RW_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import hadamard_rw; print(hadamard_rw.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
