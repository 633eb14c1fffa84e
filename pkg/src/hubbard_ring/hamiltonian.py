"""Sparse Fermi-Hubbard ring Hamiltonian with a two-barrier potential.

    H = -J sum_{bonds (i, i+1 mod L)} sum_s (c^dag_{i,s} c_{i+1,s} + h.c.)
        + U sum_i n_{i,up} n_{i,dn} + sum_i h_i n_i

Energies are in units of the tunnelling amplitude, with hbar = 1.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .basis import BasisError, SectorBasis, SectorSpec, check_site, enumerate_sector, spin_index


@dataclass(frozen=True)
class BarrierSpec:
    h: float = 20.0
    alpha: float = 0.5

    def __post_init__(self):
        if not np.isfinite(self.h):
            raise ValueError(f"barrier height must be finite, got {self.h}")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")


@dataclass(frozen=True)
class ModelParams:
    J: float = 1.0
    U: float = 10.0
    barrier: BarrierSpec = BarrierSpec()

    def __post_init__(self):
        # J = 0 is allowed as the frozen-dynamics limit
        if not np.isfinite(self.J) or self.J < 0:
            raise ValueError(f"J must be >= 0, got {self.J}")
        if not np.isfinite(self.U):
            raise ValueError(f"U must be finite, got {self.U}")

    def with_alpha(self, alpha):
        return ModelParams(self.J, self.U, BarrierSpec(self.barrier.h, alpha))


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Square operator on one sector basis, stored as canonical CSR."""

    matrix: sp.csr_matrix
    hermitian: bool = False

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def dtype(self):
        return self.matrix.dtype

    def entries(self):
        """Nonzero entries as (row, col, value) triplets in row-major order."""
        coo = self.matrix.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def toarray(self):
        return self.matrix.toarray()

    def __matmul__(self, other):
        return self.matrix @ other

    def expectation(self, psi):
        """<psi|A|psi> for a vector, or per column for a (dim, n) array."""
        psi = np.asarray(psi)
        val = np.sum(psi.conj() * (self.matrix @ psi), axis=0)
        return val.real if self.hermitian else val

    def norm(self):
        """Max absolute row sum, a cheap bound on the spectral norm."""
        return float(abs(self.matrix).sum(axis=1).max()) if self.matrix.nnz else 0.0


def _canonical_csr(rows, cols, vals, dim, dtype=np.float64):
    m = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=dtype).tocsr()
    m.sum_duplicates()
    m.eliminate_zeros()
    m.sort_indices()
    return m


def _as_basis(basis_or_spec):
    if isinstance(basis_or_spec, SectorBasis):
        return basis_or_spec
    if isinstance(basis_or_spec, SectorSpec):
        return enumerate_sector(basis_or_spec)
    raise TypeError(f"expected SectorSpec or SectorBasis, got {type(basis_or_spec).__name__}")


def barrier_potential(barrier, L):
    """Site energies h_1..h_L as a length-L array (index 0 is site 1).

    Height ``h`` on sites 2 and L/2 + 2, ``alpha * h`` on sites 3 and L/2 + 3.
    """
    if L % 2:
        raise BasisError(f"barrier layout needs even L, got L={L}")
    if L < 6:
        raise BasisError(f"barrier sites fall off the ring for L={L}; need L >= 6")
    pot = np.zeros(L)
    for i in (2, L // 2 + 2):
        pot[i - 1] += barrier.h
    for i in (3, L // 2 + 3):
        pot[i - 1] += barrier.alpha * barrier.h
    return pot


def ring_bonds(L):
    """Directed bonds (i, i+1 mod L), 1-based; on L = 2 the two bonds coincide."""
    if L < 2:
        raise BasisError(f"a ring needs L >= 2, got L={L}")
    return [(i, i % L + 1) for i in range(1, L + 1)]


def _potential(params, L):
    if params.barrier.h == 0:
        return np.zeros(L)
    return barrier_potential(params.barrier, L)


def build_hamiltonian(basis, params, backend=None, potential=None):
    """Real symmetric sparse Hamiltonian on a sector (``SectorSpec`` or ``SectorBasis``).

    ``potential`` replaces the barrier layout by explicit site energies h_1..h_L.
    """
    basis = _as_basis(basis)
    L = basis.L
    if potential is None:
        potential = _potential(params, L)
    else:
        potential = np.asarray(potential, dtype=np.float64)
        if potential.shape != (L,):
            raise ValueError(f"potential must have length L={L}, got shape {potential.shape}")
    src, dst, spin, coef = [], [], [], []
    for i, j in ring_bonds(L):
        for s in (0, 1):
            for a, b in ((i, j), (j, i)):
                dst.append(a - 1)
                src.append(b - 1)
                spin.append(s)
                coef.append(-params.J)
    rows, cols, vals = kernels.hop_coo(basis.up_masks, basis.dn_masks, L, src, dst, spin, coef, backend)
    diag = kernels.diagonal(basis.up_masks, basis.dn_masks, L, params.U, potential, backend)
    idx = np.arange(basis.dim)
    rows = np.concatenate([rows, idx])
    cols = np.concatenate([cols, idx])
    vals = np.concatenate([vals, diag])
    return SparseOperator(_canonical_csr(rows, cols, vals, basis.dim), hermitian=True)


def build_hop_operator(basis, i, j, spin, backend=None):
    """``c^dag_{i,spin} c_{j,spin}`` as a real sparse matrix (not Hermitian)."""
    basis = _as_basis(basis)
    i, j = check_site(i, basis.L), check_site(j, basis.L)
    if i == j:
        raise BasisError("hop needs two distinct sites")
    rows, cols, vals = kernels.hop_coo(
        basis.up_masks, basis.dn_masks, basis.L, [j - 1], [i - 1], [spin_index(spin)], [1.0], backend
    )
    return SparseOperator(_canonical_csr(rows, cols, vals, basis.dim))


def number_diagonal(basis, i, spin="both"):
    """Diagonal of n_{i,spin} (or n_i for ``spin="both"``) as a float array."""
    i = check_site(i, basis.L)
    if spin == "both":
        return (basis.occ_up[:, i - 1] + basis.occ_dn[:, i - 1]).astype(np.float64)
    table = basis.occ_up if spin_index(spin) == 0 else basis.occ_dn
    return table[:, i - 1].astype(np.float64)


def build_number_operator(basis, i, spin="both"):
    basis = _as_basis(basis)
    return SparseOperator(sp.diags(number_diagonal(basis, i, spin), format="csr"), hermitian=True)


def build_total_number_operator(basis, spin="both"):
    basis = _as_basis(basis)
    if spin == "both":
        d = basis.occ_up.sum(axis=1) + basis.occ_dn.sum(axis=1)
    else:
        d = (basis.occ_up if spin_index(spin) == 0 else basis.occ_dn).sum(axis=1)
    return SparseOperator(sp.diags(d.astype(np.float64), format="csr"), hermitian=True)


def reflection_permutation(basis):
    """Permutation ``p`` with ``basis[p[k]]`` the mirror image (site i -> L+1-i) of ``basis[k]``.

    The mirror keeps the set of sites between any two sites, so hopping signs
    are unchanged and no extra phases are needed.
    """
    L = basis.L
    rev = np.zeros(1 << L, dtype=np.int64)
    for m in range(1 << L):
        rev[m] = int(format(m, f"0{L}b")[::-1], 2)
    up = basis._rank_up[rev[basis.up_masks]]
    dn = basis._rank_dn[rev[basis.dn_masks]]
    return (up[:, None] * basis.n_dn_states + dn[None, :]).ravel()
