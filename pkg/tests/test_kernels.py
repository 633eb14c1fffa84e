import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubbard_ring import kernels
from hubbard_ring.basis import SectorSpec, enumerate_sector
from hubbard_ring.hamiltonian import BarrierSpec, ModelParams, build_hamiltonian


@pytest.mark.parametrize("L,n", [(1, 0), (1, 1), (4, 2), (8, 2), (10, 5)])
def test_masks_backends_agree(L, n):
    a = kernels.masks_with_popcount(L, n, "numba")
    b = kernels.masks_with_popcount(L, n, "numpy")
    np.testing.assert_array_equal(a, b)
    assert np.all(np.diff(a) > 0)
    assert all(bin(int(m)).count("1") == n for m in a)


@st.composite
def sectors(draw):
    L = draw(st.integers(2, 7))
    return SectorSpec(L, draw(st.integers(0, L)), draw(st.integers(0, L)))


@settings(max_examples=40, deadline=None)
@given(sectors(), st.data())
def test_hop_coo_backends_agree(spec, data):
    basis = enumerate_sector(spec)
    n_terms = data.draw(st.integers(1, 6))
    src, dst, spin, coef = [], [], [], []
    for _ in range(n_terms):
        a, b = data.draw(st.lists(st.integers(0, spec.L - 1), min_size=2, max_size=2, unique=True))
        src.append(a)
        dst.append(b)
        spin.append(data.draw(st.integers(0, 1)))
        coef.append(data.draw(st.floats(-3, 3, allow_nan=False)))
    out = {}
    for be in kernels.BACKENDS:
        r, c, v = kernels.hop_coo(basis.up_masks, basis.dn_masks, spec.L, src, dst, spin, coef, be)
        order = np.lexsort((v, c, r))
        out[be] = (r[order], c[order], v[order])
    for x, y in zip(out["numba"], out["numpy"]):
        np.testing.assert_array_equal(x, y)


@settings(max_examples=30, deadline=None)
@given(sectors(), st.floats(-5, 5), st.data())
def test_diagonal_and_occupations_backends_agree(spec, U, data):
    basis = enumerate_sector(spec)
    pot = np.array(data.draw(st.lists(st.floats(-5, 5), min_size=spec.L, max_size=spec.L)))
    a = kernels.diagonal(basis.up_masks, basis.dn_masks, spec.L, U, pot, "numba")
    b = kernels.diagonal(basis.up_masks, basis.dn_masks, spec.L, U, pot, "numpy")
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(
        kernels.occupations(basis.up_masks, spec.L, "numba"),
        kernels.occupations(basis.up_masks, spec.L, "numpy"),
    )


def test_default_hamiltonian_identical_across_backends():
    spec = SectorSpec(8, 2, 1)
    H = {be: build_hamiltonian(spec, ModelParams(), be).matrix for be in kernels.BACKENDS}
    d = H["numba"] - H["numpy"]
    assert d.nnz == 0 or np.abs(d.data).max() == 0


def test_unknown_backend_rejected():
    with pytest.raises(ValueError, match="backend"):
        kernels.backend("fortran")


def test_env_flag_selects_numpy_path():
    code = "from hubbard_ring import kernels; print(kernels.backend())"
    env = dict(os.environ, HUBBARD_RING_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env.pop("HUBBARD_RING_DISABLE_NUMBA")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"


def test_rank_table_inverts_masks():
    masks = kernels.masks_with_popcount(6, 3)
    table = kernels.rank_table(masks, 6)
    np.testing.assert_array_equal(table[masks], np.arange(len(masks)))
    assert (table >= 0).sum() == len(masks)


def test_barrier_params_do_not_change_sparsity_between_backends():
    spec = SectorSpec(8, 3, 3)
    p = ModelParams(1.0, 7.0, BarrierSpec(13.0, 0.3))
    a = build_hamiltonian(spec, p, "numba").matrix
    b = build_hamiltonian(spec, p, "numpy").matrix
    np.testing.assert_array_equal(a.indptr, b.indptr)
    np.testing.assert_array_equal(a.indices, b.indices)
    np.testing.assert_array_equal(a.data, b.data)


def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--L", "6", "--n-up", "2", "--n-dn", "1", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "hop_coo" in out and "speedup" in out
