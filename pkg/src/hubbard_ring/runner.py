"""Run a resolved configuration end to end: simulate, persist, then plot."""

import json
import logging
from pathlib import Path

from . import io
from .scenarios import (
    Simulator,
    run_alpha_scan,
    run_barrier_comparison,
    run_direction_flip,
)

logger = logging.getLogger(__name__)

RESOLVED_CONFIG = "resolved_config.json"


def simulate(cfg):
    """Results of ``cfg`` keyed by run label (alpha-scan: by config, values are AlphaScan)."""
    sim = Simulator(cfg.sector, cfg.params.J)
    if cfg.scenario == "barrier-comparison":
        return run_barrier_comparison(cfg.params, cfg.alphas, cfg.grid, cfg.propagator, cfg.initial, simulator=sim)
    if cfg.scenario == "direction-flip":
        return {c: run_direction_flip(c, cfg.params, cfg.grid, cfg.propagator, simulator=sim) for c in cfg.configs}
    return {
        c: run_alpha_scan(cfg.scan, c, cfg.params, cfg.grid, cfg.propagator, cfg.workers, simulator=sim)
        for c in cfg.configs
    }


def write_results(cfg, results, out_dir):
    """Write every data file of ``results``; returns the paths in write order."""
    written = []
    if cfg.scenario == "barrier-comparison":
        for label, s in results.items():
            stem = out_dir / f"{cfg.scenario}_alpha{s.alpha:g}"
            written += io.write_timeseries(s, stem, cfg.formats)
    elif cfg.scenario == "direction-flip":
        for config, s in results.items():
            written += io.write_timeseries(s, out_dir / f"{cfg.scenario}_{config}", cfg.formats)
    else:
        for config, scan in results.items():
            for s in scan.series:
                stem = out_dir / f"{cfg.scenario}_{config}_alpha{s.alpha:.4f}"
                written += io.write_timeseries(s, stem, cfg.formats)
            written += io.write_summary(scan, out_dir / f"{cfg.scenario}_{config}_summary", cfg.formats)
    return written


def execute(cfg):
    """Simulate and write everything for ``cfg``; returns (results, written paths)."""
    out_dir = Path(cfg.out_dir) / cfg.scenario
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / RESOLVED_CONFIG, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    results = simulate(cfg)
    written = [out_dir / RESOLVED_CONFIG] + write_results(cfg, results, out_dir)
    if cfg.plots:
        # data files are complete and flushed before this point
        try:
            from .plotting import emit_plots
        except ImportError as exc:
            logger.warning("plotting unavailable: %s", exc)
        else:
            written += emit_plots(cfg.scenario, results, out_dir)
    return results, written
