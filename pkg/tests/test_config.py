import pytest

from hubbard_ring.config import DEFAULT_OUTPUT, OUTPUT_ENV, ConfigError, load_config, parse_config
from hubbard_ring.basis import SectorSpec
from hubbard_ring.evolution import TimeGrid
from hubbard_ring.hamiltonian import BarrierSpec, ModelParams
from hubbard_ring.scenarios import InitialStateSpec, alpha_grid


def test_empty_config_gives_defaults(monkeypatch):
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    cfg = parse_config("")
    assert cfg.scenario == "barrier-comparison"
    assert cfg.sector == SectorSpec(8, 2, 1)
    assert cfg.params == ModelParams(1.0, 10.0, BarrierSpec(20.0, 0.5))
    assert cfg.grid == TimeGrid(40.0, 0.05)
    assert cfg.alphas == (0.5, 1.0)
    assert cfg.initial == InitialStateSpec()
    assert cfg.scan == alpha_grid()
    assert cfg.out_dir == DEFAULT_OUTPUT
    assert cfg.formats == ("csv", "json")
    assert cfg.plots is True


def test_output_dir_precedence(monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, "/tmp/from-env")
    assert parse_config("").out_dir == "/tmp/from-env"
    assert parse_config("output: {dir: here}").out_dir == "here"
    assert parse_config("output: {dir: here}", {"out_dir": "cli"}).out_dir == "cli"


def test_negative_alpha_rejected():
    with pytest.raises(ConfigError, match=">= 0") as info:
        parse_config("scenario: direction-flip\nmodel:\n  alpha: -0.5\n")
    assert info.value.key == "model.alpha"
    assert info.value.line == 3
    with pytest.raises(ConfigError):
        parse_config("alphas: [0.5, -0.5]")


def test_odd_ring_rejected():
    with pytest.raises(ConfigError, match="even") as info:
        parse_config("sector:\n  L: 7\n")
    assert info.value.key == "sector.L"
    assert info.value.line == 2


def test_unknown_key_rejected_with_line():
    with pytest.raises(ConfigError, match="unknown key 'Uu'") as info:
        parse_config("scenario: barrier-comparison\nmodel:\n  J: 1.0\n  Uu: 3\n")
    assert info.value.line == 4
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("colour: blue")


def test_syntax_error_reports_line():
    with pytest.raises(ConfigError, match="syntax") as info:
        parse_config("model:\n  J: [1,\n")
    assert info.value.line is not None


@pytest.mark.parametrize(
    "text",
    [
        "scenario: fig5",
        "scenario: alpha-scan\nalphas: [0.5]",
        "scenario: barrier-comparison\nconfigs: [A]",
        "scenario: barrier-comparison\nmodel: {alpha: 0.3}",
        "scenario: direction-flip\nscan: {start: 0.1}",
        "grid: {dt: 0}",
        "grid: {t_max: 1.0, dt: 0.3}",
        "sector: {L: 8, n_up: 9}",
        "model: {J: -1}",
        "model: {U: yes}",
        "sector: {L: 8.0}",
        "propagator: {mode: rk4}",
        "output: {formats: [xml]}",
        "output: {plots: maybe}",
        "workers: 0",
        "scenario: direction-flip\nconfigs: [C]",
        "scenario: alpha-scan\nscan: {start: 1.0, stop: 0.5}",
        "scenario: alpha-scan\nscan: {start: 0.1, stop: 0.15, step: 0.02}",
        "initial: {kind: thermal}",
        "initial: {kind: product-fock}",
        "initial: {kind: product-fock, placements: [[1, hole]]}",
        "initial: {kind: custom-superposition, components: []}",
        "[1, 2]",
    ],
)
def test_invalid_configs_rejected(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_full_config_resolves():
    text = """
scenario: alpha-scan
sector: {L: 8, n_up: 2, n_dn: 1}
model: {J: 1.0, U: 10.0, h: 20.0}
grid: {t_max: 10.0, dt: 0.1}
configs: [B]
scan: {start: 0.4, stop: 0.6, step: 0.1}
propagator: {mode: krylov, krylov_dim: 20}
output: {dir: out, formats: [csv], plots: false}
workers: 2
"""
    cfg = parse_config(text)
    assert cfg.scan == (0.4, 0.5, 0.6)
    assert cfg.configs == ("B",)
    assert cfg.propagator.mode == "krylov" and cfg.propagator.krylov_dim == 20
    assert cfg.formats == ("csv",) and not cfg.plots
    assert cfg.workers == 2
    d = cfg.to_dict()
    assert d["scan"] == [0.4, 0.5, 0.6] and "alpha" not in d["model"]


def test_initial_state_kinds():
    cfg = parse_config("initial: {kind: product-fock, placements: [[4, doublon], [8, up]]}")
    assert cfg.initial.placements == ((4, "doublon"), (8, "up"))
    cfg = parse_config(
        "initial:\n  kind: custom-superposition\n  components:\n"
        "    - {amplitude: 1, placements: [[1, up], [4, doublon]]}\n"
        "    - {amplitude: [0, 1], placements: [[8, up], [5, doublon]]}\n"
    )
    assert cfg.initial.components[1][0] == 1j
    assert cfg.to_dict()["initial"]["components"][1]["amplitude"] == [0.0, 1.0]


def test_overrides():
    cfg = parse_config("grid: {t_max: 10, dt: 0.1}", {"t_max": 2.0, "dt": 0.5, "mode": "krylov", "plots": False,
                                                      "workers": 3})
    assert cfg.grid == TimeGrid(2.0, 0.5)
    assert cfg.propagator.mode == "krylov"
    assert cfg.plots is False and cfg.workers == 3


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.yaml")
