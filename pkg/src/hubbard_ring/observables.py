"""Spin-resolved currents, transferred charge and site densities.

The bond current on the directed bond b = (i, i+1 mod L) is

    j_{b,s} = -i J (c^dag_{i,s} c_{i+1,s} - c^dag_{i+1,s} c_{i,s}),

positive when particles move towards increasing site index (and from L to 1
across the closing bond). With this sign the lattice continuity equation reads
d<n_{i,s}>/dt = <j_{(i-1,i),s}> - <j_{(i,i+1),s}>. The total current of a
species is the plain sum over all L bonds.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .basis import SPINS, spin_index
from .hamiltonian import SparseOperator, _as_basis, build_hop_operator, ring_bonds


@dataclass(frozen=True, eq=False)
class CurrentOperatorSet:
    bonds: list
    total_current: dict
    bond_current: dict

    def expectations(self, amplitudes):
        """Total and bond-resolved current expectations for (n_times, dim) amplitudes.

        Returns ``(total, bond)`` where ``total[s]`` has shape (n_times,) and
        ``bond[s]`` has shape (n_times, n_bonds).
        """
        psi = np.atleast_2d(amplitudes).T
        total, bond = {}, {}
        for s in SPINS:
            total[s] = _real_expectation(self.total_current[s], psi)
            bond[s] = np.stack([_real_expectation(op, psi) for op in self.bond_current[s]], axis=1)
        return total, bond


def _real_expectation(op, psi):
    val = np.sum(psi.conj() * (op.matrix @ psi), axis=0)
    if np.abs(val.imag).max(initial=0.0) > 1e-12 * max(1.0, np.abs(val.real).max(initial=0.0)):
        raise ArithmeticError("current expectation acquired an imaginary part")
    return val.real


def build_current_operators(basis, params, backend=None):
    basis = _as_basis(basis)
    J = params.J
    bonds = ring_bonds(basis.L)
    bond_current = {}
    total_current = {}
    for s in SPINS:
        ops = []
        for i, j in bonds:
            fwd = build_hop_operator(basis, i, j, s, backend).matrix
            # c^dag_j c_i is the transpose of c^dag_i c_j, signs included
            m = (-1j * J) * (fwd - fwd.T).tocsr()
            m.sort_indices()
            ops.append(SparseOperator(m, hermitian=True))
        bond_current[s] = ops
        tot = sum((op.matrix for op in ops[1:]), ops[0].matrix.copy()).tocsr()
        tot.sum_duplicates()
        tot.eliminate_zeros()
        tot.sort_indices()
        total_current[s] = SparseOperator(tot, hermitian=True)
    return CurrentOperatorSet(bonds, total_current, bond_current)


def transferred_charge(current, times):
    """Cumulative trapezoid integral of a current series, Q(0) = 0."""
    current = np.asarray(current, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if current.shape[0] != times.shape[0]:
        raise ValueError(f"{current.shape[0]} current samples for {times.shape[0]} grid times")
    if times.shape[0] < 2:
        return np.zeros_like(current)
    steps = np.diff(times)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise ValueError("transferred charge needs a uniform time grid")
    return cumulative_trapezoid(current, dx=steps[0], axis=0, initial=0.0)


def densities(amplitudes, basis, probs=None):
    """Site densities from amplitudes of shape (dim,) or (n_times, dim).

    Returns ``(n, n_up, n_dn)`` with the site index last. Uses the diagonal
    occupation tables directly instead of building number operators. Pass
    ``probs`` to supply basis-state probabilities in place of ``|amplitudes|^2``.
    """
    if probs is None:
        probs = np.abs(np.asarray(amplitudes)) ** 2
    n_up = probs @ basis.occ_up
    n_dn = probs @ basis.occ_dn
    return n_up + n_dn, n_up, n_dn


def spin_density(amplitudes, basis, spin):
    probs = np.abs(np.asarray(amplitudes)) ** 2
    return probs @ (basis.occ_up if spin_index(spin) == 0 else basis.occ_dn)


def continuity_residual(density, bond_current, times):
    """Max |dn_i/dt - (j_{i-1,i} - j_{i,i+1})| over sites and interior times.

    ``density`` is (n_times, L) for one spin and ``bond_current`` is
    (n_times, L) with column b holding bond (b+1, b+2 mod L). The derivative is
    a centred difference, so the residual is O(dt^2).
    """
    density = np.asarray(density)
    bond_current = np.asarray(bond_current)
    times = np.asarray(times)
    if density.shape != bond_current.shape or density.shape[0] != times.shape[0]:
        raise ValueError("density, bond current and grid must be aligned")
    if times.shape[0] < 3:
        return 0.0
    dt = times[1] - times[0]
    dndt = (density[2:] - density[:-2]) / (2 * dt)
    inflow = np.roll(bond_current, 1, axis=1) - bond_current
    return float(np.abs(dndt - inflow[1:-1]).max())


def continuity_check(series):
    """Continuity residual of a time series, maximised over both spins."""
    return max(
        continuity_residual(series.n_up, series.bond_J_up, series.t),
        continuity_residual(series.n_dn, series.bond_J_dn, series.t),
    )
