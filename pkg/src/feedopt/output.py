"""CSV, JSON, report and plot writers.

CSVs are deterministic: 12-significant-digit floats, comma separators, LF
line endings, UTF-8.
"""

import json
from pathlib import Path

__all__ = ["write_csv", "write_trajectory_csv", "write_contour_csv",
           "write_summary_json", "write_compare_files", "write_run_plots"]


def _fmt(value: float) -> str:
    return f"{float(value):.12g}"


def write_csv(path: Path, header: list[str], columns: list[list[float]]) -> None:
    lengths = {len(col) for col in columns}
    if len(lengths) != 1:
        raise ValueError("CSV columns must have equal lengths")
    lines = [",".join(header)]
    for i in range(lengths.pop()):
        lines.append(",".join(_fmt(col[i]) for col in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_trajectory_csv(path: Path, trajectory: dict) -> None:
    header = ["t", "s", "x_d", "y_d", "x_dm", "y_dm", "feedrate", "ax", "ay", "jx", "jy"]
    write_csv(path, header, [trajectory[key] for key in header])


def write_contour_csv(path: Path, contour: dict) -> None:
    write_csv(path, ["t", "ce_estimated", "ce_exact"],
              [contour["t"], contour["ce_estimated_um"], contour["ce_exact_um"]])


def write_summary_json(path: Path, summary: dict) -> None:
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_compare_files(out_dir: Path, suite: str, rows: list[dict]) -> None:
    header = ["case", "algorithm", "cycle_time_s", "compute_time_s",
              "max_ce_estimated_um", "max_ce_simulated_um"]
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            str(row[key]) if isinstance(row[key], str) else _fmt(row[key]) for key in header
        ))
    (out_dir / "compare.csv").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    widths = [max(len(str(h)), 14) for h in header]
    md = ["| " + " | ".join(h.ljust(w) for h, w in zip(header, widths)) + " |",
          "| " + " | ".join("-" * w for w in widths) + " |"]
    for row in rows:
        cells = [str(row["case"]), str(row["algorithm"])] + [
            f"{row[key]:.4g}" for key in header[2:]
        ]
        md.append("| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |")
    (out_dir / "compare.md").write_text("\n".join(md) + "\n", encoding="utf-8", newline="\n")


def write_run_plots(out_dir: Path, algorithm: str, trajectory: dict, contour: dict) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    t = trajectory["t"]
    fig, axes = plt.subplots(3, 1, figsize=(8, 8), sharex=True)
    axes[0].plot(t, trajectory["feedrate"], lw=1.2)
    axes[0].set_ylabel("feedrate [mm/s]")
    axes[1].plot(t, [a / 1e3 for a in trajectory["ax"]], lw=1.0, label="x")
    axes[1].plot(t, [a / 1e3 for a in trajectory["ay"]], lw=1.0, label="y")
    axes[1].set_ylabel("accel [m/s$^2$]")
    axes[1].legend(loc="upper right", fontsize=8)
    axes[2].plot(t, [j / 1e3 for j in trajectory["jx"]], lw=0.8, label="x")
    axes[2].plot(t, [j / 1e3 for j in trajectory["jy"]], lw=0.8, label="y")
    axes[2].set_ylabel("jerk [m/s$^3$]")
    axes[2].set_xlabel("time [s]")
    axes[2].legend(loc="upper right", fontsize=8)
    fig.suptitle(f"{algorithm}: commanded kinematics")
    fig.tight_layout()
    fig.savefig(out_dir / f"{algorithm}_profiles.png", dpi=150)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.plot(contour["t"], contour["ce_estimated_um"], lw=1.0, label="estimated")
    ax.plot(contour["t"], contour["ce_exact_um"], lw=1.0, ls="--", label="exact")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("contour error [$\\mu$m]")
    ax.legend(loc="upper right", fontsize=8)
    fig.suptitle(f"{algorithm}: contour error")
    fig.tight_layout()
    fig.savefig(out_dir / f"{algorithm}_ce.png", dpi=150)
    plt.close(fig)
