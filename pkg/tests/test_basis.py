from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubbard_ring.basis import (
    BasisError,
    FockState,
    SectorSpec,
    apply_hop,
    enumerate_sector,
    occupation,
)
from hubbard_ring.reference import apply_string, masks_of, sector_states


@pytest.mark.parametrize(
    "L,n_up,n_dn,size",
    [(8, 2, 1, 224), (2, 1, 1, 4), (4, 0, 0, 1)],
)
def test_sector_sizes(L, n_up, n_dn, size):
    basis = enumerate_sector(SectorSpec(L, n_up, n_dn))
    assert len(basis) == size == comb(L, n_up) * comb(L, n_dn)


@pytest.mark.parametrize("args", [(8, 9, 0), (8, 0, -1), (0, 0, 0), (8, 2.0, 1)])
def test_invalid_spec_rejected(args):
    with pytest.raises(BasisError):
        SectorSpec(*args)


def test_canonical_order_is_lexicographic(ring_basis):
    keys = [(s.up_mask, s.dn_mask) for s in ring_basis]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


def test_enumeration_is_deterministic():
    a = enumerate_sector(SectorSpec(6, 3, 2))
    b = enumerate_sector(SectorSpec(6, 3, 2))
    assert a.states == b.states


def test_bijection(ring_basis):
    for k, s in enumerate(ring_basis):
        assert ring_basis.index(s) == k
        assert ring_basis[ring_basis.index(s)] == s


def test_index_rejects_foreign_state(ring_basis):
    with pytest.raises(KeyError):
        ring_basis.index(FockState.from_sites(up=[1], dn=[2]))
    assert FockState.from_sites(up=[1], dn=[2]) not in ring_basis
    assert FockState.from_sites(up=[1, 2], dn=[2]) in ring_basis


def test_hop_examples():
    assert apply_hop(FockState.from_sites(up=[3]), 2, 3, "up", 8) == (FockState.from_sites(up=[2]), 1)
    assert apply_hop(FockState.from_sites(up=[1, 2, 8]), 1, 8, "up", 8) is None
    assert apply_hop(FockState.from_sites(up=[3, 8]), 1, 8, "up", 8) == (FockState.from_sites(up=[1, 3]), -1)


def test_hop_boundary_sign_by_hand():
    # c^dag_1 c_8 c^dag_3 c^dag_8 |0> = c^dag_1 (-c^dag_3 c_8 c^dag_8)|0> = -c^dag_1 c^dag_3 |0>
    assert apply_string([("+", (0, 1)), ("-", (0, 8))], ((0, 3), (0, 8))) == (((0, 1), (0, 3)), -1)


def test_hop_errors():
    s = FockState.from_sites(up=[1])
    with pytest.raises(BasisError):
        apply_hop(s, 0, 1, "up", 8)
    with pytest.raises(BasisError):
        apply_hop(s, 1, 9, "up", 8)
    with pytest.raises(BasisError):
        apply_hop(s, 2, 2, "up", 8)
    with pytest.raises(BasisError):
        apply_hop(s, 2, 1, "sideways", 8)


def test_occupation_examples():
    assert occupation(FockState.from_sites(up=[4, 5]), 4, "up") == 1
    assert occupation(FockState.from_sites(dn=[4]), 5, "dn") == 0
    for i in range(1, 9):
        for s in ("up", "dn"):
            assert occupation(FockState(0, 0), i, s, L=8) == 0
    with pytest.raises(BasisError):
        occupation(FockState(0, 0), 9, "up", L=8)


def test_from_sites_rejects_double_occupation():
    with pytest.raises(BasisError):
        FockState.from_sites(up=[2, 2])


@st.composite
def hop_cases(draw):
    L = draw(st.integers(2, 8))
    n_up = draw(st.integers(0, L))
    n_dn = draw(st.integers(0, L))
    basis = enumerate_sector(SectorSpec(L, n_up, n_dn))
    state = basis[draw(st.integers(0, len(basis) - 1))]
    i, j = draw(st.lists(st.integers(1, L), min_size=2, max_size=2, unique=True))
    return basis, state, i, j, draw(st.sampled_from(["up", "dn"]))


@settings(max_examples=300, deadline=None)
@given(hop_cases())
def test_hop_roundtrip_and_sector_closure(case):
    basis, state, i, j, spin = case
    out = apply_hop(state, i, j, spin, basis.L)
    if out is None:
        return
    new, sign = out
    assert new in basis
    back = apply_hop(new, j, i, spin, basis.L)
    assert back is not None
    assert back[0] == state
    assert sign * back[1] == 1


@pytest.mark.parametrize("L", [2, 3, 4])
def test_signs_match_operator_strings(L):
    """Every hop on every state of every L <= 4 sector, against explicit anticommutation."""
    checked = 0
    for n_up in range(L + 1):
        for n_dn in range(L + 1):
            for st_ in sector_states(L, n_up, n_dn):
                up, dn = masks_of(st_)
                fock = FockState(up, dn)
                for s in (0, 1):
                    for i in range(1, L + 1):
                        for j in range(1, L + 1):
                            if i == j:
                                continue
                            ref, ref_sign = apply_string([("+", (s, i)), ("-", (s, j))], st_)
                            got = apply_hop(fock, i, j, ("up", "dn")[s], L)
                            if ref is None:
                                assert got is None
                            else:
                                assert got == (FockState(*masks_of(ref)), ref_sign)
                                checked += 1
    assert checked > 0


def test_basis_occupation_tables(ring_basis):
    assert ring_basis.occ_up.shape == (224, 8)
    assert (ring_basis.occ_up.sum(axis=1) == 2).all()
    assert (ring_basis.occ_dn.sum(axis=1) == 1).all()
    with pytest.raises(ValueError):
        ring_basis.occ_up[0, 0] = 1
