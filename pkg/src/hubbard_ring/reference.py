"""Brute-force operator-string reference for small rings.

States are sorted tuples of modes ``(spin, site)`` meaning the ordered product
of creation operators on the vacuum. Operators are applied by explicit
anticommutation, with no bit tricks and no parity formula, so this serves
as an independent check of the sparse builders. Exponential cost; use it
on L <= 4.
"""

from itertools import combinations

import numpy as np


def annihilate(state, mode):
    if mode not in state:
        return None, 0
    p = state.index(mode)
    return state[:p] + state[p + 1:], (-1) ** p


def create(state, mode):
    if mode in state:
        return None, 0
    # c^dag lands in front, then anticommutes past every mode that sorts before it
    swaps = sum(1 for m in state if m < mode)
    return tuple(sorted(state + (mode,))), (-1) ** swaps


def apply_string(ops, state):
    """Apply ``ops`` (list of ("+"|"-", mode), leftmost acts last) to a state."""
    sign = 1
    for kind, mode in reversed(ops):
        state, s = (create if kind == "+" else annihilate)(state, mode)
        if state is None:
            return None, 0
        sign *= s
    return state, sign


def sector_states(L, n_up, n_dn):
    ups = list(combinations(range(1, L + 1), n_up))
    dns = list(combinations(range(1, L + 1), n_dn))
    return [tuple((0, i) for i in u) + tuple((1, i) for i in d) for u in ups for d in dns]


def hubbard_terms(L, J, U, potential):
    """List of (coefficient, operator string) for the ring Hamiltonian."""
    terms = []
    for i in range(1, L + 1):
        j = i % L + 1
        for s in (0, 1):
            terms.append((-J, [("+", (s, i)), ("-", (s, j))]))
            terms.append((-J, [("+", (s, j)), ("-", (s, i))]))
    for i in range(1, L + 1):
        terms.append((U, [("+", (0, i)), ("-", (0, i)), ("+", (1, i)), ("-", (1, i))]))
        for s in (0, 1):
            terms.append((potential[i - 1], [("+", (s, i)), ("-", (s, i))]))
    return terms


def operator_matrix(terms, states):
    """Dense matrix of a sum of operator strings, rows/cols in ``states`` order."""
    index = {s: k for k, s in enumerate(states)}
    out = np.zeros((len(states), len(states)), dtype=np.result_type(*[c for c, _ in terms], float))
    for col, st in enumerate(states):
        for coef, ops in terms:
            new, sign = apply_string(ops, st)
            if new is not None:
                out[index[new], col] += sign * coef
    return out


def masks_of(state):
    up = sum(1 << (i - 1) for s, i in state if s == 0)
    dn = sum(1 << (i - 1) for s, i in state if s == 1)
    return up, dn


def reference_hamiltonian(L, n_up, n_dn, J, U, potential):
    """(states, dense H) for the ring, built from explicit operator strings."""
    states = sector_states(L, n_up, n_dn)
    return states, operator_matrix(hubbard_terms(L, J, U, potential), states)
