"""Invariant suite on the default configuration, used by ``hubbard-ring selftest``."""

import time
from dataclasses import dataclass

import numpy as np

from .basis import FockState, SectorSpec, enumerate_sector
from .evolution import Propagator, QuantumState, TimeGrid
from .hamiltonian import BarrierSpec, ModelParams, build_hamiltonian
from .observables import continuity_check
from .reference import masks_of, reference_hamiltonian
from .scenarios import (
    InitialStateSpec,
    Simulator,
    config_placements,
    final_half_mean,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _fermion_signs():
    worst = 0.0
    rng = np.random.default_rng(7)
    for L, nu, nd in [(2, 1, 1), (3, 2, 1), (3, 2, 2), (4, 2, 1), (4, 2, 2), (4, 3, 1)]:
        pot = rng.integers(-3, 4, size=L).astype(float)
        basis = enumerate_sector(SectorSpec(L, nu, nd))
        H = build_hamiltonian(basis, ModelParams(1.0, 2.5, BarrierSpec(0.0, 0.0)), potential=pot).toarray()
        states, ref = reference_hamiltonian(L, nu, nd, 1.0, 2.5, pot)
        perm = [basis.index(FockState(*masks_of(s))) for s in states]
        worst = max(worst, np.abs(H[np.ix_(perm, perm)] - ref).max())
    return worst == 0.0, f"max |H - H_ref| = {worst:g} on L<=4 sectors"


def _conservation(sim):
    grid = TimeGrid()
    worst = {"norm": 0.0, "energy": 0.0, "N": 0.0}
    runs = [(0.5, InitialStateSpec()), (1.0, InitialStateSpec())]
    runs += [(0.5, InitialStateSpec("product-fock", placements=config_placements(c))) for c in "AB"]
    for alpha, init in runs:
        s = sim.run(ModelParams().with_alpha(alpha), init, grid)
        worst["norm"] = max(worst["norm"], np.abs(s.norm - 1).max())
        worst["energy"] = max(worst["energy"], np.abs(s.energy - s.energy[0]).max() / max(abs(s.energy[0]), 1e-300))
        worst["N"] = max(worst["N"], np.abs(s.N_up - 2).max(), np.abs(s.N_dn - 1).max())
    ok = worst["norm"] <= 1e-10 and worst["energy"] <= 1e-9 and worst["N"] <= 1e-9
    return ok, ", ".join(f"{k} drift {v:.1e}" for k, v in worst.items())


def _symmetry_null(sim):
    s = sim.run(ModelParams().with_alpha(1.0), InitialStateSpec(), TimeGrid())
    a = sim.run(ModelParams().with_alpha(0.5), InitialStateSpec(), TimeGrid())
    resid = max(np.abs(s.Q_up).max(), np.abs(s.Q_dn).max())
    act = min(np.abs(a.Q_up).max(), np.abs(a.Q_dn).max())
    return resid <= 1e-9 and act >= 1e3 * resid, f"alpha=1 max|Q| = {resid:.1e}, alpha=0.5 min_s max|Q| = {act:.3f}"


def _direction_flip(sim):
    q = {}
    for c in "AB":
        s = sim.run(ModelParams(), InitialStateSpec("product-fock", placements=config_placements(c)), TimeGrid())
        q[c] = (final_half_mean(s.Q_up, s.t), final_half_mean(s.Q_dn, s.t))
    ok = np.sign(q["A"][0]) == -np.sign(q["B"][0]) and all(np.sign(u) == -np.sign(d) for u, d in q.values())
    return ok, ", ".join(f"{c}: Qbar_up={u:+.3f} Qbar_dn={d:+.3f}" for c, (u, d) in q.items())


def _krylov(sim):
    e = sim.run(ModelParams(), InitialStateSpec(), TimeGrid(), Propagator("exact"))
    k = sim.run(ModelParams(), InitialStateSpec(), TimeGrid(), Propagator("krylov"))
    d = max(np.abs(e.Q_up - k.Q_up).max(), np.abs(e.Q_dn - k.Q_dn).max())
    return d <= 1e-8, f"max |Q_krylov - Q_exact| = {d:.1e}"


def _continuity(sim):
    init = InitialStateSpec()
    r = [continuity_check(sim.run(ModelParams(), init, TimeGrid(40.0, dt))) for dt in (0.05, 0.025)]
    ratio = r[0] / r[1]
    return 3.5 <= ratio <= 4.5, f"residuals {r[0]:.2e} / {r[1]:.2e}, ratio {ratio:.3f}"


def _two_site():
    sim2 = Simulator(SectorSpec(2, 1, 0))
    basis = sim2.basis
    psi = np.zeros(len(basis), dtype=complex)
    psi[basis.index(FockState.from_sites(up=[1]))] = 1
    grid = TimeGrid(10.0, 0.01)
    s = sim2.run(ModelParams(1.0, 0.0, BarrierSpec(0.0, 0.0)), QuantumState(basis, psi), grid)
    err = np.abs(s.n_up[:, 0] - np.cos(2 * s.t) ** 2).max()
    return err <= 1e-10, f"max |n_1 - cos^2(2t)| = {err:.1e}"


def run_selftest():
    sim = Simulator()
    checks = [
        ("fermionic signs vs operator strings", _fermion_signs),
        ("conservation (norm, energy, particle number)", lambda: _conservation(sim)),
        ("symmetric null / asymmetric activation", lambda: _symmetry_null(sim)),
        ("direction flip and counter-propagation", lambda: _direction_flip(sim)),
        ("Krylov vs exact propagation", lambda: _krylov(sim)),
        ("continuity equation O(dt^2)", lambda: _continuity(sim)),
        ("two-site Rabi oscillation", _two_site),
    ]
    results = []
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
