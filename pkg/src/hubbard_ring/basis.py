"""Fixed-particle-number Fock sector of the spinful ring.

Sites are 1-based on every public surface. A Fock state is a pair of bit masks
(site ``i`` at bit ``i - 1``) and stands for the product of creation operators
in canonical order: all spin-up operators by ascending site, then all spin-down
operators by ascending site, acting on the vacuum. The Hamiltonian conserves
each species, so hopping signs only ever involve same-species parity.
"""

from dataclasses import dataclass, field
from functools import cached_property
from math import comb

import numpy as np

from . import kernels

UP = "up"
DN = "dn"
SPINS = (UP, DN)

_SPIN_ALIASES = {
    "up": 0,
    "u": 0,
    "↑": 0,
    0: 0,
    "dn": 1,
    "down": 1,
    "d": 1,
    "↓": 1,
    1: 1,
}


class BasisError(ValueError):
    """Invalid sector, site or spin."""


def spin_index(spin):
    """0 for spin up, 1 for spin down."""
    key = spin.lower() if isinstance(spin, str) else spin
    try:
        return _SPIN_ALIASES[key]
    except (KeyError, TypeError):
        raise BasisError(f"unknown spin {spin!r}; use 'up' or 'dn'") from None


def check_site(i, L):
    if not isinstance(i, (int, np.integer)) or isinstance(i, bool) or not 1 <= i <= L:
        raise BasisError(f"site {i!r} out of range 1..{L}")
    return int(i)


@dataclass(frozen=True)
class SectorSpec:
    L: int
    n_up: int
    n_dn: int

    def __post_init__(self):
        for name in ("L", "n_up", "n_dn"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise BasisError(f"{name} must be an integer, got {value!r}")
        if self.L < 1:
            raise BasisError(f"L must be positive, got {self.L}")
        if self.L > 30:
            raise BasisError(f"L={self.L} is beyond exact-diagonalisation reach")
        if not 0 <= self.n_up <= self.L:
            raise BasisError(f"n_up={self.n_up} outside 0..{self.L}")
        if not 0 <= self.n_dn <= self.L:
            raise BasisError(f"n_dn={self.n_dn} outside 0..{self.L}")

    @property
    def dim(self):
        return comb(self.L, self.n_up) * comb(self.L, self.n_dn)


@dataclass(frozen=True, order=True)
class FockState:
    up_mask: int
    dn_mask: int

    @classmethod
    def from_sites(cls, up=(), dn=()):
        """Build from 1-based site lists; repeated sites within a species are rejected."""
        masks = []
        for name, sites in (("up", up), ("dn", dn)):
            m = 0
            for i in sites:
                if i < 1:
                    raise BasisError(f"site {i} out of range (sites are 1-based)")
                bit = 1 << (i - 1)
                if m & bit:
                    raise BasisError(f"two {name} fermions on site {i}")
                m |= bit
            masks.append(m)
        return cls(*masks)

    def mask(self, spin):
        return self.up_mask if spin_index(spin) == 0 else self.dn_mask

    @property
    def up_sites(self):
        return _sites(self.up_mask)

    @property
    def dn_sites(self):
        return _sites(self.dn_mask)

    def __str__(self):
        return f"up{list(self.up_sites)} dn{list(self.dn_sites)}"


def _sites(mask):
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Canonically ordered basis of one (L, n_up, n_dn) sector.

    State ``k`` has ``up_masks[k // n_dn_states]`` and
    ``dn_masks[k % n_dn_states]``, which is ascending lexicographic order on
    ``(up_mask, dn_mask)``.
    """

    spec: SectorSpec
    up_masks: np.ndarray = field(repr=False)
    dn_masks: np.ndarray = field(repr=False)

    @property
    def L(self):
        return self.spec.L

    @property
    def n_dn_states(self):
        return self.dn_masks.shape[0]

    def __len__(self):
        return self.up_masks.shape[0] * self.dn_masks.shape[0]

    @property
    def dim(self):
        return len(self)

    def __getitem__(self, k):
        if not -len(self) <= k < len(self):
            raise IndexError(k)
        ku, kd = divmod(k % len(self), self.n_dn_states)
        return FockState(int(self.up_masks[ku]), int(self.dn_masks[kd]))

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    @property
    def states(self):
        return list(self)

    @cached_property
    def _rank_up(self):
        return kernels.rank_table(self.up_masks, self.L)

    @cached_property
    def _rank_dn(self):
        return kernels.rank_table(self.dn_masks, self.L)

    def index(self, state):
        """Ordinal of ``state``; raises ``KeyError`` if it is not in the sector."""
        limit = 1 << self.L
        if not (0 <= state.up_mask < limit and 0 <= state.dn_mask < limit):
            raise KeyError(state)
        ku = self._rank_up[state.up_mask]
        kd = self._rank_dn[state.dn_mask]
        if ku < 0 or kd < 0:
            raise KeyError(state)
        return int(ku) * self.n_dn_states + int(kd)

    def __contains__(self, state):
        try:
            self.index(state)
        except KeyError:
            return False
        return True

    @cached_property
    def occ_up(self):
        """(dim, L) spin-up occupations, read-only."""
        return self._expand(kernels.occupations(self.up_masks, self.L), up=True)

    @cached_property
    def occ_dn(self):
        """(dim, L) spin-down occupations, read-only."""
        return self._expand(kernels.occupations(self.dn_masks, self.L), up=False)

    def _expand(self, table, up):
        n_up_states, n_dn_states = self.up_masks.shape[0], self.n_dn_states
        out = np.repeat(table, n_dn_states, axis=0) if up else np.tile(table, (n_up_states, 1))
        out.flags.writeable = False
        return out


def enumerate_sector(spec, backend=None):
    """All Fock states of ``spec`` in canonical order."""
    if not isinstance(spec, SectorSpec):
        raise BasisError(f"expected SectorSpec, got {type(spec).__name__}")
    up = kernels.masks_with_popcount(spec.L, spec.n_up, backend)
    dn = kernels.masks_with_popcount(spec.L, spec.n_dn, backend)
    up.flags.writeable = False
    dn.flags.writeable = False
    return SectorBasis(spec, up, dn)


def occupation(state, i, spin, L=None):
    """Occupation (0 or 1) of site ``i`` for ``spin``."""
    if L is not None:
        check_site(i, L)
    elif i < 1:
        raise BasisError(f"site {i} out of range (sites are 1-based)")
    return (state.mask(spin) >> (i - 1)) & 1


def hop_sign(mask, i, j):
    """(-1)**(number of set bits strictly between 1-based sites i and j)."""
    lo, hi = min(i, j), max(i, j)
    between = ((1 << (hi - 1)) - 1) ^ ((1 << lo) - 1)
    return -1 if (mask & between).bit_count() & 1 else 1


def apply_hop(state, i, j, spin, L):
    """Apply ``c^dag_{i,spin} c_{j,spin}`` to a Fock state.

    Returns ``(new_state, sign)`` or ``None`` when the hop is Pauli-blocked or
    site ``j`` is empty. The ring-closing hop between sites 1 and L is an
    ordinary long-range hop in the site ordering, so it picks up the parity of
    every same-spin fermion on sites 2..L-1.
    """
    i = check_site(i, L)
    j = check_site(j, L)
    if i == j:
        raise BasisError("hop needs two distinct sites")
    s = spin_index(spin)
    m = state.up_mask if s == 0 else state.dn_mask
    bit_i, bit_j = 1 << (i - 1), 1 << (j - 1)
    if not m & bit_j or m & bit_i:
        return None
    new = m ^ (bit_i | bit_j)
    sign = hop_sign(m, i, j)
    if s == 0:
        return FockState(new, state.dn_mask), sign
    return FockState(state.up_mask, new), sign
