"""PNG figures for experiment tables (matplotlib, non-interactive)."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _series(rows, key, x, y):
    groups = {}
    for r in rows:
        groups.setdefault(key(r), []).append((r[x], r[y]))
    for label, pts in groups.items():
        pts.sort()
        yield label, np.array([p[0] for p in pts], float), np.array([p[1] for p in pts], float)


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _line_plot(rows, key, x, y, xlabel, ylabel, path, ylim=None):
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, xs, ys in _series(rows, key, x, y):
        ax.plot(xs, ys, marker="o", label=str(label))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if ylim:
        ax.set_ylim(*ylim)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    return _save(fig, path)


def render(table, out_dir, stem="figure"):
    """Write the figures for ``table`` into ``out_dir``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    rows = table.rows
    base = os.path.join(out_dir, stem)
    paths = []
    if table.kind in ("detect", "pulses-sweep"):
        multi_p = len({r["pulses"] for r in rows}) > 1

        def key(r):
            return f"{r['model']} P={r['pulses']}" if multi_p else r["model"]

        paths.append(_line_plot(rows, key, "snr_db", "p_detect", "SNR [dB]", "probability of detection",
                                f"{base}_p_detect.png", (-0.02, 1.02)))
    if table.kind == "targets-sweep":
        paths.append(_line_plot(rows, lambda r: f"{r['model']} P={r['pulses']}", "num_targets", "p_detect",
                                "number of targets", "probability of detection", f"{base}_p_detect.png",
                                (-0.02, 1.02)))
    if table.kind in ("detect", "rmse"):
        for col, name in (("e_t", "delay"), ("e_f", "Doppler")):
            paths.append(_line_plot(rows, lambda r: r["model"], "snr_db", col, "SNR [dB]",
                                    f"normalized {name} RMSE [bins]", f"{base}_{col}.png"))
    if table.kind == "separate":
        paths.append(_line_plot(rows, lambda r: r["model"], "delay_spacing_bins", "p_separate",
                                "delay spacing [Nyquist bins]", "probability of separate detection",
                                f"{base}_p_separate.png", (-0.02, 1.02)))
    if table.kind == "coherence":
        paths.append(_line_plot(rows, lambda r: r["scheme"], "u", "mu_of_u", "u", "mu(u)",
                                f"{base}_mu_of_u.png"))
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(table.extras["random_coherence"], bins=table.extras["histogram_bins"])
        ax.axvline(table.extras["welch"], color="k", ls="--", label="Welch bound")
        ax.set_xlabel("coherence of random sampling")
        ax.set_ylabel("count")
        ax.legend()
        paths.append(_save(fig, f"{base}_histogram.png"))
    if table.kind == "spectrum":
        paths.append(_line_plot(rows, lambda r: r["waveform"], "freq_hz", "power_db", "frequency [Hz]",
                                "|H(f)|^2 / T_p [dB]", f"{base}_spectrum.png"))
    return paths
