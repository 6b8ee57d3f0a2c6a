"""Matplotlib rendering for the CLI report paths (PNG next to each CSV)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_REGIME_COLORS = {
    "all_frt": "#9467bd",
    "no_frt": "#7f7f7f",
    "both_gap": "#1f77b4",
    "both_continuous": "#2ca02c",
    "inactive": "#7f7f7f",
    "full_frt": "#2ca02c",
    "partial_frt": "#1f77b4",
    "frt_only_during_pc": "#ff7f0e",
    "no_frt_during_pc": "#d62728",
    "": "#000000",
}


def profile_figure(table: dict, title: str, path) -> None:
    """Six-panel overview of one solved equilibrium.

    `table` maps the profile CSV column names to arrays (as written by the
    CLI): t_rel, n_c, v_c, v_F, O_F, G_c, G_Fp, q, C_c, C_F.
    """
    t = table["t_rel"]
    fig, axes = plt.subplots(2, 3, figsize=(12, 6.5), constrained_layout=True)
    panels = [
        ("accumulation [veh]", [("n_c", "cars")]),
        ("speed [mile/h]", [("v_c", "car"), ("v_F", "transit")]),
        ("arrival rate [pax/h]", [("G_c", "car"), ("G_Fp", "transit")]),
        ("occupancy [pax/veh]", [("O_F", "transit")]),
        ("boundary queue [veh]", [("q", "queue")]),
        ("trip cost [$]", [("C_c", "car"), ("C_F", "transit")]),
    ]
    for ax, (ylabel, series) in zip(axes.flat, panels):
        for key, label in series:
            ax.plot(t, table[key], label=label, lw=1.2)
        ax.set_ylabel(ylabel)
        ax.set_xlabel("time from desired arrival [h]")
        if len(series) > 1:
            ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    fig.suptitle(title)
    fig.savefig(path, dpi=130)
    plt.close(fig)


def sweep_figure(rows, value_label: str, path) -> None:
    """Costs and mode shares along a one-parameter sweep."""
    ok = [r for r in rows if not r.error]
    x = np.array([r.value for r in ok])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    ax1.plot(x, [r.c_star for r in ok], "o-", label="no control")
    ax1.plot(x, [r.c_p_star for r in ok], "s-", label="gated")
    ax1.set_xlabel(value_label)
    ax1.set_ylabel("equilibrium cost [$]")
    ax1.legend()
    ax1.grid(alpha=0.3)
    ax2.plot(x, [r.frt_share_ue for r in ok], "o-", label="no control")
    ax2.plot(x, [r.frt_share_pc for r in ok], "s-", label="gated")
    ax2.set_xlabel(value_label)
    ax2.set_ylabel("transit share [%]")
    ax2.legend()
    ax2.grid(alpha=0.3)
    fig.savefig(path, dpi=130)
    plt.close(fig)


def regime_map_figure(cells, x_label: str, y_label: str, path,
                      boundaries=None) -> None:
    """Scatter map of regimes with optional analytic boundary overlays.

    `boundaries` is a list of (x_array, y_array, label) curves.
    """
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5), constrained_layout=True)
    for ax, attr, title in ((ax1, "ue_regime", "no control"),
                            (ax2, "pc_regime", "gated")):
        for cell in cells:
            regime = getattr(cell, attr)
            ax.scatter(cell.x, cell.y, c=_REGIME_COLORS.get(regime, "#000"),
                       s=22, marker="s")
        seen = sorted({getattr(c, attr) for c in cells if not c.error})
        for regime in seen:
            ax.scatter([], [], c=_REGIME_COLORS.get(regime, "#000"), label=regime or "error")
        if boundaries:
            for bx, by, label in boundaries:
                ax.plot(bx, by, "k--", lw=1.0, label=label)
        ax.set_xlabel(x_label)
        ax.set_ylabel(y_label)
        ax.set_title(title)
        ax.legend(fontsize=7, loc="best")
    fig.savefig(path, dpi=130)
    plt.close(fig)
