"""YAML run configuration.

Schema (every key optional; omitted keys take the defaults shown)::

    scenario: barrier-comparison     # barrier-comparison | direction-flip | alpha-scan
    sector:     {L: 8, n_up: 2, n_dn: 1}
    model:      {J: 1.0, U: 10.0, h: 20.0, alpha: 0.5}   # alpha: direction-flip only
    grid:       {t_max: 40.0, dt: 0.05}
    alphas:     [0.5, 1.0]                               # barrier-comparison only
    initial:                                             # barrier-comparison only
      kind: symmetric-superposition                      # | product-fock | custom-superposition
      placements: [[4, doublon], [8, up]]                # product-fock
      components:                                        # custom-superposition
        - {amplitude: 0.5, placements: [[1, up], [4, doublon]]}
        - {amplitude: [0.0, 0.5], placements: [[8, up], [4, doublon]]}   # [re, im]
    configs:    [A, B]                                   # direction-flip / alpha-scan
    scan:       {start: 0.1, stop: 1.2, step: 0.02}      # alpha-scan only
    propagator: {mode: auto, krylov_dim: 30, tol: 1.0e-12}
    output:     {dir: <$HUBBARD_RING_OUTPUT_DIR or ./hubbard_ring_out>, formats: [csv, json], plots: true}
    workers: null                                        # thread count for alpha-scan points

Unknown keys are rejected. Errors carry the key path and, when available,
the line in the source text.
"""

import os
from dataclasses import asdict, dataclass, field

import yaml

from .basis import BasisError, SectorSpec
from .evolution import Propagator, TimeGrid
from .hamiltonian import BarrierSpec, ModelParams
from .scenarios import CONFIGS, SCENARIOS, InitialStateSpec, ScenarioError, alpha_grid

OUTPUT_ENV = "HUBBARD_RING_OUTPUT_DIR"
DEFAULT_OUTPUT = "hubbard_ring_out"
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key:
            where.append(f"key '{key}'")
        if line:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "barrier-comparison"
    sector: SectorSpec = SectorSpec(8, 2, 1)
    params: ModelParams = ModelParams()
    grid: TimeGrid = TimeGrid()
    alphas: tuple = (0.5, 1.0)
    initial: InitialStateSpec = InitialStateSpec()
    configs: tuple = CONFIGS
    scan: tuple = field(default_factory=alpha_grid)
    propagator: Propagator = Propagator()
    out_dir: str = DEFAULT_OUTPUT
    formats: tuple = FORMATS
    plots: bool = True
    workers: int | None = None

    def to_dict(self):
        d = {
            "scenario": self.scenario,
            "sector": asdict(self.sector),
            "model": {
                "J": self.params.J,
                "U": self.params.U,
                "h": self.params.barrier.h,
                "alpha": self.params.barrier.alpha,
            },
            "grid": asdict(self.grid),
            "propagator": asdict(self.propagator),
            "output": {"dir": str(self.out_dir), "formats": list(self.formats), "plots": self.plots},
            "workers": self.workers,
        }
        if self.scenario == "barrier-comparison":
            d["alphas"] = list(self.alphas)
            d["initial"] = {
                "kind": self.initial.kind,
                "placements": [list(p) for p in self.initial.placements],
                "components": [
                    {"amplitude": [complex(a).real, complex(a).imag], "placements": [list(p) for p in pl]}
                    for a, pl in self.initial.components
                ],
            }
        else:
            d["configs"] = list(self.configs)
        if self.scenario == "alpha-scan":
            d["scan"] = list(self.scan)
            del d["model"]["alpha"]
        elif self.scenario == "barrier-comparison":
            del d["model"]["alpha"]
        return d


_TOP_KEYS = {
    "scenario", "sector", "model", "grid", "alphas", "initial", "configs", "scan", "propagator", "output", "workers",
}
_SCENARIO_ONLY = {
    "alphas": {"barrier-comparison"},
    "initial": {"barrier-comparison"},
    "configs": {"direction-flip", "alpha-scan"},
    "scan": {"alpha-scan"},
}


class _Lines:
    """Key path -> 1-based source line, from the YAML node tree."""

    def __init__(self, node):
        self.map = {}
        if node is not None:
            self._walk(node, "")

    def _walk(self, node, prefix):
        self.map.setdefault(prefix, node.start_mark.line + 1)
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                path = f"{prefix}.{k.value}" if prefix else str(k.value)
                self.map[path] = k.start_mark.line + 1
                self._walk(v, path)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                self._walk(v, f"{prefix}[{i}]")

    def __call__(self, key):
        while key:
            if key in self.map:
                return self.map[key]
            key = key.rsplit(".", 1)[0] if "." in key else ""
        return None


def _number(value, key, lines, *, integer=False, minimum=None, exclusive=False):
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok:
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"expected {kind}, got {value!r}", key, lines(key))
    if minimum is not None and (value <= minimum if exclusive else value < minimum):
        op = ">" if exclusive else ">="
        raise ConfigError(f"value {value!r} must be {op} {minimum}", key, lines(key))
    return value


def _mapping(value, key, allowed, lines):
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"expected a mapping, got {type(value).__name__}", key, lines(key))
    unknown = sorted(set(map(str, value)) - allowed)
    if unknown:
        k = f"{key}.{unknown[0]}" if key else unknown[0]
        raise ConfigError(f"unknown key '{unknown[0]}'; allowed: {', '.join(sorted(allowed))}", k, lines(k))
    return value


def _placements(value, key, lines):
    if not isinstance(value, list) or not value:
        raise ConfigError("placements must be a non-empty list of [site, content]", key, lines(key))
    out = []
    for i, p in enumerate(value):
        k = f"{key}[{i}]"
        if not (isinstance(p, list) and len(p) == 2):
            raise ConfigError(f"placement must be [site, content], got {p!r}", k, lines(k))
        site = _number(p[0], k, lines, integer=True, minimum=1)
        if p[1] not in ("up", "dn", "doublon"):
            raise ConfigError(f"content must be up, dn or doublon, got {p[1]!r}", k, lines(k))
        out.append((site, p[1]))
    return tuple(out)


def _amplitude(value, key, lines):
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError("complex amplitude must be [re, im]", key, lines(key))
        return complex(_number(value[0], key, lines), _number(value[1], key, lines))
    return _number(value, key, lines)


def parse_config(text, overrides=None):
    """Parse YAML text into a fully resolved :class:`RunConfig`.

    ``overrides`` holds operational settings from the command line
    (``out_dir``, ``plots``, ``mode``, ``workers``, ``t_max``, ``dt``).
    """
    overrides = overrides or {}
    try:
        node = yaml.compose(text)
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise ConfigError(f"YAML syntax error: {exc.problem}", line=line) from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML error: {exc}") from None
    lines = _Lines(node)
    raw = _mapping(raw, "", _TOP_KEYS, lines)

    scenario = raw.get("scenario", "barrier-comparison")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}",
                          "scenario", lines("scenario"))
    for k, allowed in _SCENARIO_ONLY.items():
        if k in raw and scenario not in allowed:
            raise ConfigError(f"'{k}' does not apply to scenario {scenario}", k, lines(k))

    sec = _mapping(raw.get("sector"), "sector", {"L", "n_up", "n_dn"}, lines)
    L = _number(sec.get("L", 8), "sector.L", lines, integer=True, minimum=2)
    if L % 2:
        raise ConfigError(f"L must be even for the barrier layout, got {L}", "sector.L", lines("sector.L"))
    n_up = _number(sec.get("n_up", 2), "sector.n_up", lines, integer=True, minimum=0)
    n_dn = _number(sec.get("n_dn", 1), "sector.n_dn", lines, integer=True, minimum=0)
    try:
        sector = SectorSpec(L, n_up, n_dn)
    except BasisError as exc:
        raise ConfigError(str(exc), "sector", lines("sector")) from None

    model = _mapping(raw.get("model"), "model", {"J", "U", "h", "alpha"}, lines)
    if "alpha" in model and scenario != "direction-flip":
        raise ConfigError(f"model.alpha does not apply to scenario {scenario}; "
                          "use 'alphas' or 'scan'", "model.alpha", lines("model.alpha"))
    J = _number(model.get("J", 1.0), "model.J", lines, minimum=0)
    U = _number(model.get("U", 10.0), "model.U", lines)
    h = _number(model.get("h", 20.0), "model.h", lines)
    alpha = _number(model.get("alpha", 0.5), "model.alpha", lines, minimum=0)
    params = ModelParams(float(J), float(U), BarrierSpec(float(h), float(alpha)))

    g = _mapping(raw.get("grid"), "grid", {"t_max", "dt"}, lines)
    t_max = overrides["t_max"] if overrides.get("t_max") is not None else _number(g.get("t_max", 40.0), "grid.t_max", lines, minimum=0)
    dt = overrides["dt"] if overrides.get("dt") is not None else _number(g.get("dt", 0.05), "grid.dt", lines, minimum=0, exclusive=True)
    try:
        grid = TimeGrid(float(t_max), float(dt))
    except ValueError as exc:
        raise ConfigError(str(exc), "grid", lines("grid")) from None

    alphas = raw.get("alphas", [0.5, 1.0])
    if not isinstance(alphas, list) or not alphas:
        raise ConfigError("alphas must be a non-empty list", "alphas", lines("alphas"))
    alphas = tuple(float(_number(a, f"alphas[{i}]", lines, minimum=0)) for i, a in enumerate(alphas))

    initial = InitialStateSpec()
    if "initial" in raw:
        ini = _mapping(raw["initial"], "initial", {"kind", "placements", "components"}, lines)
        kind = ini.get("kind", "symmetric-superposition")
        placements, components = (), ()
        if kind == "product-fock":
            placements = _placements(ini.get("placements"), "initial.placements", lines)
        elif kind == "custom-superposition":
            comps = ini.get("components")
            if not isinstance(comps, list) or not comps:
                raise ConfigError("components must be a non-empty list", "initial.components",
                                  lines("initial.components"))
            out = []
            for i, c in enumerate(comps):
                k = f"initial.components[{i}]"
                c = _mapping(c, k, {"amplitude", "placements"}, lines)
                out.append((_amplitude(c.get("amplitude", 1.0), f"{k}.amplitude", lines),
                            _placements(c.get("placements"), f"{k}.placements", lines)))
            components = tuple(out)
        elif kind != "symmetric-superposition":
            raise ConfigError(f"unknown initial-state kind {kind!r}", "initial.kind", lines("initial.kind"))
        try:
            initial = InitialStateSpec(kind, placements, components)
        except ScenarioError as exc:
            raise ConfigError(str(exc), "initial", lines("initial")) from None

    configs = raw.get("configs", list(CONFIGS))
    if not isinstance(configs, list) or not configs or any(c not in CONFIGS for c in configs):
        raise ConfigError(f"configs must be a non-empty subset of {list(CONFIGS)}", "configs", lines("configs"))

    sc = _mapping(raw.get("scan"), "scan", {"start", "stop", "step"}, lines)
    start = _number(sc.get("start", 0.1), "scan.start", lines, minimum=0)
    stop = _number(sc.get("stop", 1.2), "scan.stop", lines, minimum=0)
    step = _number(sc.get("step", 0.02), "scan.step", lines, minimum=0, exclusive=True)
    if stop < start:
        raise ConfigError("scan.stop must not be below scan.start", "scan", lines("scan"))
    try:
        scan = alpha_grid(start, stop, step)
    except ScenarioError as exc:
        raise ConfigError(str(exc), "scan", lines("scan")) from None

    pr = _mapping(raw.get("propagator"), "propagator", {"mode", "krylov_dim", "tol"}, lines)
    mode = overrides.get("mode") or pr.get("mode", "auto")
    if mode not in ("auto", "exact", "krylov"):
        raise ConfigError(f"mode must be auto, exact or krylov, got {mode!r}", "propagator.mode",
                          lines("propagator.mode"))
    m = _number(pr.get("krylov_dim", 30), "propagator.krylov_dim", lines, integer=True, minimum=2)
    tol = _number(pr.get("tol", 1e-12), "propagator.tol", lines, minimum=0, exclusive=True)
    propagator = Propagator(mode, m, float(tol))

    out = _mapping(raw.get("output"), "output", {"dir", "formats", "plots"}, lines)
    out_dir = overrides.get("out_dir") or out.get("dir") or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    formats = out.get("formats", list(FORMATS))
    if not isinstance(formats, list) or not formats or any(f not in FORMATS for f in formats):
        raise ConfigError(f"formats must be a non-empty subset of {list(FORMATS)}", "output.formats",
                          lines("output.formats"))
    plots = out.get("plots", True)
    if not isinstance(plots, bool):
        raise ConfigError("plots must be true or false", "output.plots", lines("output.plots"))
    if overrides.get("plots") is False:
        plots = False

    workers = overrides.get("workers", raw.get("workers"))
    if workers is not None:
        workers = _number(workers, "workers", lines, integer=True, minimum=1)

    return RunConfig(
        scenario=scenario,
        sector=sector,
        params=params,
        grid=grid,
        alphas=alphas,
        initial=initial,
        configs=tuple(dict.fromkeys(configs)),
        scan=scan,
        propagator=propagator,
        out_dir=str(out_dir),
        formats=tuple(dict.fromkeys(formats)),
        plots=plots,
        workers=workers,
    )


def load_config(path, overrides=None):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return parse_config(text, overrides)
