"""Three-panel trace figure: fingertip pressure, base force, heights."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import InputError, OutputError, read_trace  # noqa: E402
from .kinematics import DIGITS  # noqa: E402

VECTOR_SUFFIXES = (".svg", ".pdf", ".eps", ".ps")


def load_trace_columns(path: str | Path) -> dict[str, list]:
    header, body = read_trace(path)
    cols: dict[str, list] = {h: [] for h in header}
    try:
        for row in body:
            for h, v in zip(header, row):
                cols[h].append(v if h == "phase" else float(v))
    except ValueError as exc:
        raise InputError(f"trace {path}: non-numeric value ({exc})") from exc
    return cols


def phase_spans(t: list[float], phases: list[str]) -> list[tuple[str, float, float]]:
    spans = []
    start = 0
    for k in range(1, len(phases) + 1):
        if k == len(phases) or phases[k] != phases[start]:
            end = t[k] if k < len(t) else t[-1]
            spans.append((phases[start], t[start], end))
            start = k
    return spans


def plot_summary(trace: str | Path, out: str | Path) -> Path:
    """Render the trace to a vector figure (format from ``out``'s suffix, default SVG)."""
    cols = load_trace_columns(trace)
    out = Path(out)
    if out.suffix.lower() not in VECTOR_SUFFIXES:
        out = out.with_suffix(".svg")
    t = cols["t_s"]
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(9, 8))
    for d in DIGITS:
        axes[0].plot(t, cols[f"{d.value}_s_biotac"], lw=0.8, label=d.value)
        axes[1].plot(t, cols[f"{d.value}_fsr_n"], lw=0.8, label=d.value)
    axes[2].plot(t, cols["palm_z_m"], label="palm")
    axes[2].plot(t, cols["object_z_m"], label="object")
    axes[0].set_ylabel("fingertip s (norm.)")
    axes[1].set_ylabel("base force (N)")
    axes[2].set_ylabel("height (m)")
    axes[2].set_xlabel("time (s)")

    slip_t = [ti for ti, f in zip(t, cols["slip_flag"]) if f > 0]
    if slip_t:
        axes[0].plot(slip_t, [1.02] * len(slip_t), "|", color="red", ms=4, label="slip flag")

    for k, (name, t0, _) in enumerate(phase_spans(t, cols["phase"])):
        for ax in axes:
            ax.axvline(t0, color="grey", ls="--", lw=0.6)
        axes[0].text(t0, 1.06 + 0.1 * (k % 2), name, fontsize=7, va="bottom")
    for ax in axes:
        ax.legend(fontsize=7, loc="upper right", ncol=3)
    axes[0].set_ylim(-0.05, 1.35)
    fig.tight_layout()
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
    except OSError as exc:
        raise OutputError(f"cannot write figure {out}: {exc}") from exc
    finally:
        plt.close(fig)
    return out
