"""Figure panels: Q(t) line plots, (t, site) density maps, (t, alpha) scan maps.

Each panel is its own file named ``<scenario>_<panel>.<ext>``.
"""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger(__name__)

UP_COLOR = "tab:blue"
DN_COLOR = "tab:orange"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def charge_panel(series, path, title=None):
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.plot(series.t, series.Q_up, color=UP_COLOR, label=r"$Q_\uparrow$")
    ax.plot(series.t, series.Q_dn, color=DN_COLOR, label=r"$Q_\downarrow$")
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xlabel(r"$t\;(1/J)$")
    ax.set_ylabel(r"$Q_\sigma(t)$")
    ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    return _save(fig, path)


def density_panel(series, path, title=None):
    L = series.n.shape[1]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    im = ax.imshow(
        series.n.T,
        origin="lower",
        aspect="auto",
        interpolation="nearest",
        extent=[series.t[0], series.t[-1], 0.5, L + 0.5],
        vmin=0,
        vmax=2,
        cmap="magma",
    )
    ax.set_xlabel(r"$t\;(1/J)$")
    ax.set_ylabel("site $i$")
    fig.colorbar(im, ax=ax, label=r"$\langle n_i\rangle$")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def scan_panel(scan, spin, path, title=None):
    Q = scan.Q_up if spin == "up" else scan.Q_dn
    lim = float(abs(Q).max()) or 1.0
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    im = ax.pcolormesh(scan.t, scan.alphas, Q, shading="nearest", cmap="RdBu_r", vmin=-lim, vmax=lim)
    ax.set_xlabel(r"$t\;(1/J)$")
    ax.set_ylabel(r"$\alpha$")
    label = r"$Q_\uparrow$" if spin == "up" else r"$Q_\downarrow$"
    fig.colorbar(im, ax=ax, label=label)
    if title:
        ax.set_title(title)
    return _save(fig, path)


def emit_plots(scenario, results, out_dir, ext="png"):
    """Write every panel for one scenario; failures are logged, never raised."""
    out_dir = Path(out_dir)
    jobs = []
    if scenario == "barrier-comparison":
        items = list(results.items())
        letters = "ab"
        for letter, (label, s) in zip(letters, items):
            jobs.append((charge_panel, (s, out_dir / f"{scenario}_{letter}.{ext}", label)))
        for letter, (label, s) in zip("cd", items):
            jobs.append((density_panel, (s, out_dir / f"{scenario}_{letter}.{ext}", label)))
    elif scenario == "direction-flip":
        for letter, (config, s) in zip("ab", results.items()):
            jobs.append((charge_panel, (s, out_dir / f"{scenario}_{letter}.{ext}", f"config {config}")))
    elif scenario == "alpha-scan":
        letters = iter("abcd")
        for config, scan in results.items():
            for spin in ("up", "dn"):
                path = out_dir / f"{scenario}_{next(letters)}.{ext}"
                jobs.append((scan_panel, (scan, spin, path, f"config {config}, spin {spin}")))
    else:
        logger.warning("no plot layout for scenario %r", scenario)
    written = []
    for func, args in jobs:
        try:
            written.append(func(*args))
        except Exception:  # plotting must not invalidate data outputs
            logger.exception("plot %s failed", args[-2] if len(args) > 2 else args)
    return written
