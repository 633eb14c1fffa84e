"""Bit-mask kernels for the spinful Fock sector.

Every kernel exists twice: an ``@njit`` loop version and a vectorised numpy
version. :func:`backend` picks one (see :mod:`hubbard_ring._accel`); callers
may also pass ``backend="numba"`` or ``backend="numpy"`` explicitly, which is
what the benchmark and the equivalence tests do.

Conventions shared by all kernels: site ``i`` (1-based) lives at bit ``i - 1``;
a directed hop term ``coef * c^dag_{a,s} c_{b,s}`` is given by 0-based bit
positions ``a`` and ``b`` and spin ``s`` (0 = up, 1 = down).
"""

import numpy as np

from ._accel import njit, numba_enabled

BACKENDS = ("numba", "numpy")


def backend(name=None):
    if name is None:
        return "numba" if numba_enabled() else "numpy"
    if name not in BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; expected one of {BACKENDS}")
    return name


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def _popcount(m):
    c = 0
    while m:
        m &= m - 1
        c += 1
    return c


@njit(cache=True)
def _masks_with_popcount_nb(L, n):
    count = 0
    for m in range(1 << L):
        if _popcount(m) == n:
            count += 1
    out = np.empty(count, dtype=np.int64)
    k = 0
    for m in range(1 << L):
        if _popcount(m) == n:
            out[k] = m
            k += 1
    return out


@njit(cache=True)
def _hop_coo_nb(up_masks, dn_masks, n_dn_states, rank_up, rank_dn, src, dst, spin, coef):
    dim = up_masks.shape[0] * n_dn_states
    n_terms = src.shape[0]
    rows = np.empty(dim * n_terms, dtype=np.int64)
    cols = np.empty(dim * n_terms, dtype=np.int64)
    vals = np.empty(dim * n_terms, dtype=np.float64)
    nnz = 0
    for ku in range(up_masks.shape[0]):
        for kd in range(n_dn_states):
            col = ku * n_dn_states + kd
            for t in range(n_terms):
                a = dst[t]
                b = src[t]
                m = up_masks[ku] if spin[t] == 0 else dn_masks[kd]
                if not (m >> b) & 1 or (m >> a) & 1:
                    continue
                lo = min(a, b)
                hi = max(a, b)
                between = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
                sign = 1.0 - 2.0 * (_popcount(m & between) & 1)
                new = m ^ ((1 << a) | (1 << b))
                if spin[t] == 0:
                    row = rank_up[new] * n_dn_states + kd
                else:
                    row = ku * n_dn_states + rank_dn[new]
                rows[nnz] = row
                cols[nnz] = col
                vals[nnz] = sign * coef[t]
                nnz += 1
    return rows[:nnz], cols[:nnz], vals[:nnz]


@njit(cache=True)
def _diagonal_nb(up_masks, dn_masks, L, U, potential):
    n_dn_states = dn_masks.shape[0]
    out = np.empty(up_masks.shape[0] * n_dn_states, dtype=np.float64)
    for ku in range(up_masks.shape[0]):
        mu = up_masks[ku]
        for kd in range(n_dn_states):
            md = dn_masks[kd]
            e = U * _popcount(mu & md)
            for i in range(L):
                e += potential[i] * (((mu >> i) & 1) + ((md >> i) & 1))
            out[ku * n_dn_states + kd] = e
    return out


@njit(cache=True)
def _occupations_nb(masks, L):
    out = np.empty((masks.shape[0], L), dtype=np.int8)
    for k in range(masks.shape[0]):
        for i in range(L):
            out[k, i] = (masks[k] >> i) & 1
    return out


# ---------------------------------------------------------------- numpy path


def _masks_with_popcount_np(L, n):
    m = np.arange(1 << L, dtype=np.int64)
    return m[np.bitwise_count(m) == n]


def _hop_coo_np(up_masks, dn_masks, n_dn_states, rank_up, rank_dn, src, dst, spin, coef):
    n_up_states = up_masks.shape[0]
    ku, kd = np.divmod(np.arange(n_up_states * n_dn_states, dtype=np.int64), n_dn_states)
    mu = up_masks[ku]
    md = dn_masks[kd]
    rows, cols, vals = [], [], []
    for a, b, s, c in zip(dst, src, spin, coef):
        m = mu if s == 0 else md
        ok = ((m >> b) & 1).astype(bool) & ~((m >> a) & 1).astype(bool)
        idx = np.flatnonzero(ok)
        mm = m[idx]
        lo, hi = min(a, b), max(a, b)
        between = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
        sign = 1.0 - 2.0 * (np.bitwise_count(mm & between) & 1)
        new = mm ^ ((1 << a) | (1 << b))
        if s == 0:
            r = rank_up[new] * n_dn_states + kd[idx]
        else:
            r = ku[idx] * n_dn_states + rank_dn[new]
        rows.append(r)
        cols.append(idx)
        vals.append(sign * c)
    if not rows:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0, dtype=np.float64)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def _diagonal_np(up_masks, dn_masks, L, U, potential):
    occ_up = _occupations_np(up_masks, L)
    occ_dn = _occupations_np(dn_masks, L)
    e = U * np.bitwise_count(up_masks[:, None] & dn_masks[None, :]).astype(np.float64)
    # same accumulation order as the loop kernel, so both paths agree bit for bit
    for i in range(L):
        e += potential[i] * (occ_up[:, i, None] + occ_dn[None, :, i]).astype(np.float64)
    return e.ravel()


def _occupations_np(masks, L):
    return ((masks[:, None] >> np.arange(L)) & 1).astype(np.int8)


# ---------------------------------------------------------------- dispatch


def masks_with_popcount(L, n, backend_name=None):
    """Ascending array of all ``L``-bit integers with exactly ``n`` set bits."""
    if backend(backend_name) == "numba":
        return _masks_with_popcount_nb(L, n)
    return _masks_with_popcount_np(L, n)


def rank_table(masks, L):
    """Inverse of a sorted mask array: ``table[mask] = position`` or -1."""
    table = np.full(1 << L, -1, dtype=np.int64)
    table[masks] = np.arange(masks.shape[0], dtype=np.int64)
    return table


def hop_coo(up_masks, dn_masks, L, src, dst, spin, coef, backend_name=None):
    """COO triplets of ``sum_t coef[t] c^dag_{dst[t]} c_{src[t]}`` on a product sector.

    ``src``/``dst`` are 0-based bit positions and ``spin`` holds 0 (up) or 1
    (down). Duplicate (row, col) pairs are returned as-is; summing them is the
    caller's job.
    """
    up_masks = np.ascontiguousarray(up_masks, dtype=np.int64)
    dn_masks = np.ascontiguousarray(dn_masks, dtype=np.int64)
    args = (
        up_masks,
        dn_masks,
        dn_masks.shape[0],
        rank_table(up_masks, L),
        rank_table(dn_masks, L),
        np.asarray(src, dtype=np.int64),
        np.asarray(dst, dtype=np.int64),
        np.asarray(spin, dtype=np.int64),
        np.asarray(coef, dtype=np.float64),
    )
    if backend(backend_name) == "numba":
        return _hop_coo_nb(*args)
    return _hop_coo_np(*args)


def diagonal(up_masks, dn_masks, L, U, potential, backend_name=None):
    """``U * #doublons + sum_i h_i n_i`` for every state of the product sector."""
    up_masks = np.ascontiguousarray(up_masks, dtype=np.int64)
    dn_masks = np.ascontiguousarray(dn_masks, dtype=np.int64)
    potential = np.ascontiguousarray(potential, dtype=np.float64)
    if backend(backend_name) == "numba":
        return _diagonal_nb(up_masks, dn_masks, L, float(U), potential)
    return _diagonal_np(up_masks, dn_masks, L, float(U), potential)


def occupations(masks, L, backend_name=None):
    """(len(masks), L) int8 table of bit occupations."""
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    if backend(backend_name) == "numba":
        return _occupations_nb(masks, L)
    return _occupations_np(masks, L)
