"""Unitary time evolution psi(t) = exp(-i H t) psi(0).

Two propagators share one interface:

* ``exact``: dense eigendecomposition of H once, then spectral synthesis at
  every output time independently. Default up to ``EXACT_DIM_LIMIT`` states.
* ``krylov``: Lanczos approximation of the exponential, stepped sequentially
  along the output grid with a-posteriori error control and step halving.
"""

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.linalg import eigh_tridiagonal

logger = logging.getLogger(__name__)

EXACT_DIM_LIMIT = 5000


class EvolutionError(RuntimeError):
    """Numerical failure during propagation."""

    def __init__(self, message, step=None, time=None):
        if step is not None:
            message = f"{message} (output step {step}, t={time:g})"
        super().__init__(message)
        self.step = step
        self.time = time


@dataclass(frozen=True, eq=False)
class QuantumState:
    basis: object
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (len(self.basis),):
            raise ValueError(f"amplitude vector has shape {amps.shape}, basis has {len(self.basis)} states")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        n = self.norm
        if n == 0 or not np.isfinite(n):
            raise ValueError("cannot normalise a zero or non-finite state")
        return QuantumState(self.basis, self.amplitudes / n)


@dataclass(frozen=True)
class TimeGrid:
    t_max: float = 40.0
    dt: float = 0.05

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_max >= 0:
            raise ValueError(f"t_max must be >= 0, got {self.t_max}")
        n = self.t_max / self.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ValueError(f"t_max={self.t_max} is not a whole number of dt={self.dt} steps")

    @property
    def n_steps(self):
        return int(round(self.t_max / self.dt))

    @property
    def times(self):
        return np.arange(self.n_steps + 1) * self.dt

    def __len__(self):
        return self.n_steps + 1


@dataclass(frozen=True)
class Propagator:
    mode: Literal["auto", "exact", "krylov"] = "auto"
    krylov_dim: int = 30
    tol: float = 1e-12
    max_halvings: int = 40

    def __post_init__(self):
        if self.mode not in ("auto", "exact", "krylov"):
            raise ValueError(f"unknown propagator mode {self.mode!r}")
        if self.krylov_dim < 2:
            raise ValueError("Krylov subspace dimension must be >= 2")
        if not self.tol > 0:
            raise ValueError("Krylov tolerance must be positive")

    def resolve(self, dim):
        if self.mode != "auto":
            return self.mode
        return "exact" if dim <= EXACT_DIM_LIMIT else "krylov"


@dataclass(frozen=True, eq=False)
class Eigensystem:
    energies: np.ndarray
    vectors: np.ndarray

    def coefficients(self, psi):
        return self.vectors.conj().T @ psi

    def synthesize(self, coeffs, times):
        """(len(times), dim) array of exp(-iHt) psi from eigen-coefficients."""
        phases = np.exp(-1j * np.outer(times, self.energies))
        return (phases * coeffs[None, :]) @ self.vectors.T


def diagonalize(H, residual_tol=1e-10):
    """Dense eigendecomposition with a residual check ||Hv - Ev|| <= tol * ||H||."""
    dense = H.toarray()
    try:
        energies, vectors = np.linalg.eigh(dense)
    except np.linalg.LinAlgError as exc:
        raise EvolutionError(f"eigensolver failed: {exc}") from exc
    scale = max(H.norm(), 1.0)
    resid = np.abs(dense @ vectors - vectors * energies).max() if len(energies) else 0.0
    if resid > residual_tol * scale:
        raise EvolutionError(f"eigenpair residual {resid:.3e} exceeds {residual_tol:g} * ||H||")
    return Eigensystem(energies, vectors)


def _lanczos(H, v, m):
    """Lanczos tridiagonalisation with full reorthogonalisation.

    Returns (alpha, beta, V, beta_next); ``beta_next == 0`` signals an
    invariant subspace, in which case the projection is exact.
    """
    dim = v.shape[0]
    m = min(m, dim)
    V = np.zeros((m, dim), dtype=np.complex128)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    V[0] = v
    k = 0
    for k in range(m):
        w = H @ V[k]
        alpha[k] = np.vdot(V[k], w).real
        w = w - V[: k + 1].T @ (V[: k + 1].conj() @ w)
        # second pass keeps the basis orthonormal to working precision
        w = w - V[: k + 1].T @ (V[: k + 1].conj() @ w)
        b = np.linalg.norm(w)
        beta[k] = b
        if b <= 1e-14 * max(1.0, abs(alpha[k])):
            return alpha[: k + 1], beta[:k], V[: k + 1], 0.0
        if k + 1 < m:
            V[k + 1] = w / b
    return alpha, beta[: m - 1], V, beta[m - 1]


def _small_expm_e1(alpha, beta, tau):
    if alpha.shape[0] == 1:
        return np.array([np.exp(-1j * alpha[0] * tau)])
    theta, S = eigh_tridiagonal(alpha, beta)
    return S @ (np.exp(-1j * theta * tau) * S[0])


def krylov_step(psi, H, dt, m=30, tol=1e-12, max_halvings=40):
    """Lanczos approximation to exp(-i H dt) psi for a vector ``psi``.

    Each substep builds one Krylov space and takes the largest step
    dt / 2**k whose error estimate ``beta_m * |e_m^T exp(-i T tau) e_1|`` is
    below ``tol``.
    """
    if m < 2:
        raise ValueError("Krylov subspace dimension must be >= 2")
    if dt < 0:
        raise ValueError("dt must be >= 0")
    psi = np.asarray(psi, dtype=np.complex128)
    if dt == 0:
        return psi.copy()
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        return psi.copy()
    remaining = dt
    tau = dt
    while remaining > 0:
        alpha, beta, V, beta_next = _lanczos(H, psi / nrm, m)
        tau = min(tau * 2, remaining)
        for _ in range(max_halvings + 1):
            y = _small_expm_e1(alpha, beta, tau)
            err = beta_next * abs(y[-1])
            if err <= tol:
                break
            tau /= 2
        else:
            raise EvolutionError(f"Krylov error {err:.3e} above tolerance {tol:g} after {max_halvings} halvings")
        psi = nrm * (V.T @ y)
        remaining -= tau
        if remaining <= 1e-15 * dt:
            break
    return psi


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States on a time grid; ``amplitudes[k]`` is psi(times[k])."""

    basis: object
    times: np.ndarray
    amplitudes: np.ndarray
    mode: str = field(default="exact")

    def __len__(self):
        return self.times.shape[0]

    def __getitem__(self, k):
        return QuantumState(self.basis, self.amplitudes[k])

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    @property
    def norms(self):
        return np.linalg.norm(self.amplitudes, axis=1)


def evolve(psi0, H, grid, prop=None, eigensystem=None):
    """Propagate ``psi0`` under ``H`` to every time of ``grid``.

    ``eigensystem`` may carry a precomputed diagonalisation of ``H`` for
    exact mode.
    """
    prop = prop or Propagator()
    amps = psi0.amplitudes
    if H.dim != amps.shape[0]:
        raise ValueError(f"Hamiltonian dimension {H.dim} does not match state dimension {amps.shape[0]}")
    if not H.hermitian:
        raise ValueError("evolution needs a Hermitian generator")
    if abs(np.linalg.norm(amps) - 1) > 1e-10:
        raise ValueError("initial state is not normalised")
    times = grid.times
    mode = prop.resolve(H.dim)
    if mode == "exact":
        eig = eigensystem or diagonalize(H)
        out = eig.synthesize(eig.coefficients(amps), times)
        out[times == 0] = amps
    else:
        out = np.empty((times.shape[0], amps.shape[0]), dtype=np.complex128)
        out[0] = amps
        psi = amps
        for k in range(1, times.shape[0]):
            try:
                psi = krylov_step(psi, H.matrix, times[k] - times[k - 1], prop.krylov_dim, prop.tol, prop.max_halvings)
            except EvolutionError as exc:
                raise EvolutionError(str(exc), step=k, time=times[k]) from exc
            out[k] = psi
    drift = np.abs(np.linalg.norm(out, axis=1) - 1).max()
    if drift > 1e-10:
        bad = int(np.argmax(np.abs(np.linalg.norm(out, axis=1) - 1)))
        raise EvolutionError(f"norm drift {drift:.3e}", step=bad, time=times[bad])
    logger.debug("evolved dim=%d over %d times in %s mode", H.dim, times.shape[0], mode)
    return Trajectory(psi0.basis, times, out, mode)
