"""Command-line client for the optimization service.

All computation happens behind the service API; the CLI loads and validates
the config, applies flag overrides, sends the request (in-process by default,
remote with --server) and writes the artifacts locally.

Exit codes: 0 success, 2 config error, 3 infeasible LP, 4 numerical failure.
"""

import sys
from pathlib import Path

import click

from feedopt.client import ServiceClient, ServiceError
from feedopt.config import ExperimentConfig, load_config
from feedopt.errors import ConfigError
from feedopt.output import (
    write_compare_files,
    write_contour_csv,
    write_run_plots,
    write_summary_json,
    write_trajectory_csv,
)

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def _fail(code: int, reason: str):
    click.echo(f"feedopt: error {code}: {reason}", err=True)
    sys.exit(code)


def _load(config_path: str, limits: str | None, ce_limit_um: float | None,
          no_dc_normalize: bool, passes: int | None, alg: str | None) -> ExperimentConfig:
    try:
        cfg = load_config(config_path)
        run_updates = {}
        if alg is not None:
            run_updates["algorithm"] = alg
        if limits is not None:
            run_updates["limits"] = limits
        if ce_limit_um is not None:
            run_updates["ce_limit_um"] = ce_limit_um
        if passes is not None:
            run_updates["passes"] = passes
        updates = {}
        if run_updates:
            updates["run"] = cfg.run.model_copy(update=run_updates)
        if no_dc_normalize:
            updates["models"] = cfg.models.model_copy(update={"dc_normalize": False})
        if updates:
            cfg = cfg.model_copy(update=updates)
        return ExperimentConfig.model_validate(cfg.model_dump())
    except (ConfigError, ValueError) as exc:
        _fail(EXIT_CONFIG, str(exc))


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


config_opt = click.option("--config", "config_path", required=True,
                          help="Config file path or bundled preset name.")
server_opt = click.option("--server", default=None,
                          help="Remote service URL (default: run in-process).")
limits_opt = click.option("--limits", default=None, help="Limit-set name override.")
ce_opt = click.option("--ce-limit-um", type=float, default=None,
                      help="Contour-error limit override [um].")
dc_opt = click.option("--no-dc-normalize", is_flag=True, default=False,
                      help="Disable DC normalization of the axis models.")
passes_opt = click.option("--passes", type=int, default=None,
                          help="Relinearization passes for the time-domain LP.")
seed_opt = click.option("--seed", type=int, default=None, hidden=False,
                        help="Reserved; accepted for forward compatibility.")


@click.group()
def main():
    """Feedrate optimization with servo error pre-compensation."""


@main.command()
@config_opt
@click.option("--out", required=True, help="Output directory.")
@click.option("--alg", default=None,
              type=click.Choice(["tap", "fo-time", "fo-sep", "fo-path"]),
              help="Algorithm override.")
@limits_opt
@ce_opt
@dc_opt
@passes_opt
@seed_opt
@server_opt
def run(config_path, out, alg, limits, ce_limit_um, no_dc_normalize, passes, seed, server):
    """Optimize (or benchmark) one trajectory and write CSVs, plots, summary."""
    cfg = _load(config_path, limits, ce_limit_um, no_dc_normalize, passes, alg)
    try:
        with ServiceClient(server) as client:
            payload = client.run(cfg, algorithm=None)
    except ServiceError as exc:
        _fail(exc.code, exc.reason)
    out_path = _out_dir(out)
    algorithm = payload["summary"]["algorithm"]
    write_trajectory_csv(out_path / "trajectory.csv", payload["trajectory"])
    write_contour_csv(out_path / "contour_error.csv", payload["contour"])
    write_summary_json(out_path / "summary.json", payload["summary"])
    write_run_plots(out_path, algorithm, payload["trajectory"], payload["contour"])
    s = payload["summary"]
    click.echo(f"{algorithm}: cycle {s['cycle_time_s']:.4f} s, "
               f"max CE est {s['max_ce_estimated_um']:.2f} um, "
               f"sim {s['max_ce_simulated_um']:.2f} um -> {out_path}")


@main.command()
@config_opt
@click.option("--suite", required=True, type=click.Choice(["table1", "table2"]))
@click.option("--out", required=True, help="Output directory.")
@dc_opt
@seed_opt
@server_opt
def compare(config_path, suite, out, no_dc_normalize, seed, server):
    """Run a comparison suite and write the side-by-side table."""
    cfg = _load(config_path, None, None, no_dc_normalize, None, None)
    try:
        with ServiceClient(server) as client:
            payload = client.compare(cfg, suite)
    except ServiceError as exc:
        _fail(exc.code, exc.reason)
    out_path = _out_dir(out)
    write_compare_files(out_path, suite, payload["rows"])
    for row in payload["rows"]:
        click.echo(f"{row['case']:>9} {row['algorithm']:>8}: "
                   f"cycle {row['cycle_time_s']:.4f} s, compute {row['compute_time_s']:.2f} s")
    click.echo(f"-> {out_path / 'compare.csv'}")


@main.command()
@config_opt
@click.option("--trajectory", "trajectory_path", required=True,
              help="Trajectory CSV (columns from `run`).")
@click.option("--out", required=True, help="Output directory.")
@dc_opt
@seed_opt
@server_opt
def simulate(config_path, trajectory_path, out, no_dc_normalize, seed, server):
    """Apply a stored trajectory through the configured models and score it."""
    cfg = _load(config_path, None, None, no_dc_normalize, None, None)
    try:
        columns = _read_trajectory_csv(Path(trajectory_path))
    except (OSError, ValueError) as exc:
        _fail(EXIT_CONFIG, f"cannot read trajectory: {exc}")
    try:
        with ServiceClient(server) as client:
            payload = client.simulate(cfg, columns)
    except ServiceError as exc:
        _fail(exc.code, exc.reason)
    out_path = _out_dir(out)
    write_contour_csv(out_path / "contour_error.csv", payload["contour"])
    write_summary_json(out_path / "summary.json", payload["summary"])
    s = payload["summary"]
    click.echo(f"simulate: max CE est {s['max_ce_estimated_um']:.2f} um, "
               f"sim {s['max_ce_simulated_um']:.2f} um -> {out_path}")


@main.command()
@config_opt
@dc_opt
@seed_opt
@server_opt
def info(config_path, no_dc_normalize, seed, server):
    """Print model DC gains, pole magnitudes and compensator conditioning."""
    cfg = _load(config_path, None, None, no_dc_normalize, None, None)
    try:
        with ServiceClient(server) as client:
            payload = client.info(cfg)
    except ServiceError as exc:
        _fail(exc.code, exc.reason)
    click.echo(f"horizon: {payload['horizon_samples']} samples")
    for axis, entry in payload["models"].items():
        click.echo(
            f"axis {axis}: dc raw {entry['dc_gain_raw']:.4f} -> {entry['dc_gain']:.6f}, "
            f"max |pole| raw {entry['max_pole_magnitude_raw']:.4f} -> "
            f"{entry['max_pole_magnitude']:.4f}, "
            f"FBS cond {entry['fbs_condition_number']:.3e}"
        )


def _read_trajectory_csv(path: Path) -> dict:
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    if len(lines) < 2:
        raise ValueError("trajectory CSV has no data rows")
    header = [h.strip() for h in lines[0].split(",")]
    need = {"x_d", "y_d"}
    if not need.issubset(header):
        raise ValueError(f"trajectory CSV must contain columns {sorted(need)}")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    table = {name: [row[i] for row in rows] for i, name in enumerate(header)}
    columns = {"x_d": table["x_d"], "y_d": table["y_d"]}
    for opt_col in ("x_dm", "y_dm", "s"):
        if opt_col in table:
            columns[opt_col] = table[opt_col]
    return columns


if __name__ == "__main__":
    main()
