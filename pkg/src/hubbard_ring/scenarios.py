"""Initial states and the three transport experiments on the 8-site ring.

* ``barrier-comparison``: the mirror-symmetric superposition state under
  asymmetric (alpha = 0.5) and symmetric (alpha = 1) barriers.
* ``direction-flip``: a doublon placed next to the low (config A) or the high
  (config B) barrier, with the unpaired spin-up fermion across the ring.
* ``alpha-scan``: configs A and B over a grid of asymmetry parameters.

Fock components given by the user are taken as canonical basis states (see
:mod:`hubbard_ring.basis`), so no reordering signs are applied to amplitudes.
"""

import logging
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Literal

import numpy as np
import scipy.sparse as sp

from .basis import FockState, SectorSpec, enumerate_sector
from .evolution import Propagator, QuantumState, TimeGrid, diagonalize, evolve
from .hamiltonian import ModelParams, build_hamiltonian, build_total_number_operator
from .observables import build_current_operators, densities, transferred_charge

logger = logging.getLogger(__name__)

DEFAULT_SECTOR = SectorSpec(8, 2, 1)
CONTENTS = ("up", "dn", "doublon")
SCENARIOS = ("barrier-comparison", "direction-flip", "alpha-scan")
CONFIGS = ("A", "B")


class ScenarioError(ValueError):
    """Inconsistent initial state or scenario definition."""


@dataclass(frozen=True)
class InitialStateSpec:
    """How to prepare psi(0).

    ``product-fock`` uses ``placements``, a sequence of ``(site, content)``
    with content in ``up``/``dn``/``doublon``. ``custom-superposition`` uses
    ``components``, a sequence of ``(amplitude, placements)``; amplitudes may be
    complex and are normalised afterwards. ``symmetric-superposition`` needs
    no data.
    """

    kind: Literal["symmetric-superposition", "product-fock", "custom-superposition"] = "symmetric-superposition"
    placements: tuple = ()
    components: tuple = ()

    def __post_init__(self):
        if self.kind not in ("symmetric-superposition", "product-fock", "custom-superposition"):
            raise ScenarioError(f"unknown initial-state kind {self.kind!r}")
        if self.kind == "product-fock" and not self.placements:
            raise ScenarioError("product-fock needs placements")
        if self.kind == "custom-superposition" and not self.components:
            raise ScenarioError("custom-superposition needs components")


def fock_from_placements(placements):
    up, dn = [], []
    for site, content in placements:
        if content not in CONTENTS:
            raise ScenarioError(f"unknown site content {content!r}; expected one of {CONTENTS}")
        if content in ("up", "doublon"):
            if site in up:
                raise ScenarioError(f"two up fermions on site {site}")
            up.append(site)
        if content in ("dn", "doublon"):
            if site in dn:
                raise ScenarioError(f"two dn fermions on site {site}")
            dn.append(site)
    return FockState.from_sites(up=up, dn=dn)


def symmetric_components(L):
    """(1/2)(|up>_1 + |up>_L) x (|updn>_{L/2} + |updn>_{L/2+1}) as Fock components."""
    if L != 8:
        raise ScenarioError(f"the symmetric superposition is defined for the 8-site ring, got L={L}")
    out = []
    for single in (1, L):
        for pair in (L // 2, L // 2 + 1):
            out.append((0.5, ((single, "up"), (pair, "doublon"))))
    return tuple(out)


def config_placements(config, L=8):
    """Biased product states: doublon next to a barrier, up fermion diametrically opposite.

    A: doublon on site 4 next to the alpha*h barrier (site 3), up on site 4 + L/2.
    B: doublon on site L/2 + 1 next to the h barrier (site L/2 + 2), up on site 1.

    On the 8-site ring these are (4, 8) and (5, 1): three empty sites separate
    the doublon from the unpaired fermion, every particle sits on a
    zero-potential site, and B is the mirror image of A.
    """
    if L < 8 or L % 2:
        raise ScenarioError(f"biased configurations need an even L >= 8, got L={L}")
    if config == "A":
        return ((4, "doublon"), (4 + L // 2, "up"))
    if config == "B":
        return ((L // 2 + 1, "doublon"), (1, "up"))
    raise ScenarioError(f"unknown configuration {config!r}; expected 'A' or 'B'")


def build_initial_state(spec, basis):
    if spec.kind == "symmetric-superposition":
        components = symmetric_components(basis.L)
    elif spec.kind == "product-fock":
        components = ((1.0, tuple(spec.placements)),)
    else:
        components = tuple(spec.components)
    amps = np.zeros(len(basis), dtype=np.complex128)
    for amplitude, placements in components:
        state = fock_from_placements(placements)
        try:
            k = basis.index(state)
        except KeyError:
            raise ScenarioError(f"component {state} is not in sector {basis.spec}") from None
        amps[k] += complex(amplitude)
    try:
        return QuantumState(basis, amps).normalized()
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


@dataclass(frozen=True)
class ScenarioSpec:
    name: str = "barrier-comparison"
    sector: SectorSpec = DEFAULT_SECTOR
    params: ModelParams = ModelParams()
    initial: InitialStateSpec = InitialStateSpec()
    grid: TimeGrid = TimeGrid()
    scan: tuple | None = None

    def __post_init__(self):
        if self.scan is not None:
            if self.name != "alpha-scan":
                raise ScenarioError("an alpha scan is only valid for the alpha-scan scenario")
            a = np.asarray(self.scan, dtype=float)
            if a.size == 0 or np.any(np.diff(a) <= 0) or np.any(a < 0):
                raise ScenarioError("scan alphas must be non-negative and strictly increasing")


def alpha_grid(start=0.1, stop=1.2, step=0.02):
    """Inclusive grid rounded to 10 decimals so that e.g. 0.5 and 1.0 are exact."""
    n = int(round((stop - start) / step))
    if n < 0 or abs(start + n * step - stop) > 1e-9:
        raise ScenarioError(f"alpha range [{start}, {stop}] is not a whole number of {step} steps")
    return tuple(float(round(start + k * step, 10)) for k in range(n + 1))


TimeSeriesRecord = namedtuple("TimeSeriesRecord", "t J_up J_dn Q_up Q_dn n n_up n_dn")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Observables of one run on its output grid (time along axis 0)."""

    label: str
    alpha: float
    t: np.ndarray
    J_up: np.ndarray
    J_dn: np.ndarray
    Q_up: np.ndarray
    Q_dn: np.ndarray
    n: np.ndarray
    n_up: np.ndarray
    n_dn: np.ndarray
    bond_J_up: np.ndarray = field(repr=False)
    bond_J_dn: np.ndarray = field(repr=False)
    norm: np.ndarray = field(repr=False)
    energy: np.ndarray = field(repr=False)
    N_up: np.ndarray = field(repr=False)
    N_dn: np.ndarray = field(repr=False)
    mode: str = "exact"

    def __len__(self):
        return self.t.shape[0]

    def rows(self):
        for k in range(len(self)):
            yield TimeSeriesRecord(
                self.t[k], self.J_up[k], self.J_dn[k], self.Q_up[k], self.Q_dn[k],
                self.n[k], self.n_up[k], self.n_dn[k],
            )

    @property
    def Qbar_up(self):
        return final_half_mean(self.Q_up, self.t)

    @property
    def Qbar_dn(self):
        return final_half_mean(self.Q_dn, self.t)

    def counterpropagating(self):
        return bool(np.sign(self.Qbar_up) * np.sign(self.Qbar_dn) < 0)


def final_half_mean(values, t):
    """Mean of ``values`` over samples with t >= t_max / 2."""
    t = np.asarray(t)
    mask = t >= t[-1] / 2
    return float(np.mean(np.asarray(values)[mask]))


class Simulator:
    """Sector data shared by every run on one (sector, J) pair.

    The basis, current operators and number operators do not depend on U,
    h or alpha, so scans reuse them; only the Hamiltonian is rebuilt.
    """

    def __init__(self, sector=DEFAULT_SECTOR, J=1.0, backend=None):
        self.sector = sector
        self.J = J
        self.backend = backend
        self.basis = enumerate_sector(sector, backend)

    @cached_property
    def currents(self):
        return build_current_operators(self.basis, ModelParams(J=self.J), self.backend)

    @cached_property
    def particle_numbers(self):
        return (
            build_total_number_operator(self.basis, "up"),
            build_total_number_operator(self.basis, "dn"),
        )

    def run(self, params, initial, grid=TimeGrid(), prop=None, label="run"):
        if params.J != self.J:
            raise ScenarioError(f"simulator built for J={self.J}, run requested J={params.J}")
        H = build_hamiltonian(self.basis, params, self.backend)
        psi0 = initial if isinstance(initial, QuantumState) else build_initial_state(initial, self.basis)
        prop = prop or Propagator()
        eig = diagonalize(H) if prop.resolve(H.dim) == "exact" else None
        traj = evolve(psi0, H, grid, prop, eigensystem=eig)
        amps = traj.amplitudes
        total, bond = self.currents.expectations(amps)
        probs = None
        offdiag = H.matrix - sp.diags(H.matrix.diagonal())
        if offdiag.count_nonzero() == 0:
            # diagonal H: Fock populations are constants of motion, keep them exact
            probs = np.broadcast_to(np.abs(psi0.amplitudes) ** 2, amps.shape)
        n, n_up, n_dn = densities(amps, self.basis, probs)
        Nu, Nd = self.particle_numbers
        psi_cols = amps.T
        return TimeSeries(
            label=label,
            alpha=params.barrier.alpha,
            t=traj.times,
            J_up=total["up"],
            J_dn=total["dn"],
            Q_up=transferred_charge(total["up"], traj.times),
            Q_dn=transferred_charge(total["dn"], traj.times),
            n=n,
            n_up=n_up,
            n_dn=n_dn,
            bond_J_up=bond["up"],
            bond_J_dn=bond["dn"],
            norm=traj.norms,
            energy=H.expectation(psi_cols),
            N_up=Nu.expectation(psi_cols),
            N_dn=Nd.expectation(psi_cols),
            mode=traj.mode,
        )


def run_scenario_spec(spec, prop=None, backend=None, workers=None):
    """Run a :class:`ScenarioSpec`; returns a dict label -> TimeSeries (or an AlphaScan)."""
    sim = Simulator(spec.sector, spec.params.J, backend)
    if spec.name == "barrier-comparison":
        return run_barrier_comparison(spec.params, grid=spec.grid, prop=prop, initial=spec.initial, simulator=sim)
    if spec.name == "direction-flip":
        return {
            c: run_direction_flip(c, spec.params, spec.grid, prop, simulator=sim)
            for c in CONFIGS
        }
    if spec.name == "alpha-scan":
        alphas = spec.scan if spec.scan is not None else alpha_grid()
        return {
            c: run_alpha_scan(alphas, c, spec.params, spec.grid, prop, workers=workers, simulator=sim)
            for c in CONFIGS
        }
    raise ScenarioError(f"unknown scenario {spec.name!r}; expected one of {SCENARIOS}")


def run_barrier_comparison(params=ModelParams(), alphas=(0.5, 1.0), grid=TimeGrid(), prop=None,
                           initial=InitialStateSpec(), simulator=None):
    """Same initial state under each alpha; returns {"alpha=<a>": TimeSeries}."""
    sim = simulator or Simulator(DEFAULT_SECTOR, params.J)
    out = {}
    for a in alphas:
        label = f"alpha={a:g}"
        out[label] = sim.run(params.with_alpha(a), initial, grid, prop, label=label)
    return out


def run_direction_flip(config, params=ModelParams(), grid=TimeGrid(), prop=None, simulator=None):
    sim = simulator or Simulator(DEFAULT_SECTOR, params.J)
    initial = InitialStateSpec("product-fock", placements=config_placements(config, sim.basis.L))
    return sim.run(params, initial, grid, prop, label=f"config-{config}")


@dataclass(frozen=True, eq=False)
class AlphaScan:
    config: str
    alphas: np.ndarray
    t: np.ndarray
    Q_up: np.ndarray  # (n_alpha, n_times)
    Q_dn: np.ndarray
    series: tuple = field(repr=False)

    @cached_property
    def Qbar_up(self):
        return np.array([s.Qbar_up for s in self.series])

    @cached_property
    def Qbar_dn(self):
        return np.array([s.Qbar_dn for s in self.series])

    @property
    def counterprop(self):
        return np.sign(self.Qbar_up) * np.sign(self.Qbar_dn) < 0

    def summary_rows(self):
        for a, qu, qd, flag in zip(self.alphas, self.Qbar_up, self.Qbar_dn, self.counterprop):
            yield float(a), float(qu), float(qd), bool(flag)


def run_alpha_scan(alphas=None, config="A", params=ModelParams(), grid=TimeGrid(), prop=None,
                   workers=None, simulator=None):
    """Independent runs of ``config`` for each alpha, merged in alpha order."""
    alphas = alpha_grid() if alphas is None else tuple(float(a) for a in alphas)
    sim = simulator or Simulator(DEFAULT_SECTOR, params.J)
    initial = InitialStateSpec("product-fock", placements=config_placements(config, sim.basis.L))
    # touch shared operators before fanning out
    sim.currents, sim.particle_numbers

    def one(a):
        return sim.run(params.with_alpha(a), initial, grid, prop, label=f"config-{config}_alpha={a:g}")

    if workers is None or workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            series = tuple(pool.map(one, alphas))
    else:
        series = tuple(one(a) for a in alphas)
    logger.info("alpha scan %s: %d points", config, len(series))
    return AlphaScan(
        config=config,
        alphas=np.array(alphas),
        t=series[0].t,
        Q_up=np.stack([s.Q_up for s in series]),
        Q_dn=np.stack([s.Q_dn for s in series]),
        series=series,
    )


def with_grid(spec, t_max=None, dt=None):
    grid = TimeGrid(spec.grid.t_max if t_max is None else t_max, spec.grid.dt if dt is None else dt)
    return replace(spec, grid=grid)
