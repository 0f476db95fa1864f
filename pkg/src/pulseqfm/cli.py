"""Experiment runner: reproduces the training, spectral and geometric
experiments from deterministic seeds and writes CSV / JSON / SVG artifacts.

Every numeric default matches the values used by the study this package
implements: threshold 5e-6, eight distortion variances from 0 to 0.008,
4000 parameter samples, ten seeds.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__, fourier, kernels, metrics, model as qfm
from . import seeding, svg, tangent, training

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

DEFAULTS = {
    "ansatz": "all",
    "mode": "all",
    "seeds": 10,
    "steps": 500,
    "lr": 0.05,
    "tau": 5e-6,
    "sigma2-max": 0.008,
    "sigma2-steps": 8,
    "samples": 4000,
    "pairs": 5000,
    "bins": 75,
    "n-qubits": 3,
    "master-seed": 0,
    "escape": False,
    "out": "results",
}

_INT_KEYS = {"seeds", "steps", "sigma2-steps", "samples", "pairs", "bins", "n-qubits", "master-seed"}
_FLOAT_KEYS = {"lr", "tau", "sigma2-max"}
_BOOL_KEYS = {"escape"}


class ConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


def thread_count() -> int:
    env = os.environ.get("PULSEQFM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"PULSEQFM_THREADS must be an integer, got {env!r}") from exc
    return min(4, os.cpu_count() or 1)


def parallel_map(fn, items):
    """Map over independent tasks; results keep task order (deterministic)."""
    items = list(items)
    workers = thread_count()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _parse_config_file(path: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    values = {}
    for section in parser.sections():
        if section != "run":
            raise ConfigError(f"unknown config section [{section}] (expected [run])")
        for key, raw in parser.items(section):
            key = key.replace("_", "-")
            if key not in DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = raw
    return values


def _coerce(key: str, value):
    if value is None:
        return None
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _BOOL_KEYS:
            if isinstance(value, bool):
                return value
            return str(value).strip().lower() in ("1", "true", "yes", "on")
    except ValueError as exc:
        raise ConfigError(f"config key {key!r} has invalid value {value!r}") from exc
    return value


class RunContext:
    """Effective configuration plus tracked output files of one experiment."""

    def __init__(self, experiment: str, cli_values: dict):
        config_values = {}
        config_path = cli_values.pop("config_path", None)
        if config_path:
            config_values = _parse_config_file(config_path)
        merged = {}
        for key, default in DEFAULTS.items():
            flag = cli_values.get(key.replace("-", "_"))
            if flag is not None:
                merged[key] = _coerce(key, flag)
            elif key in config_values:
                merged[key] = _coerce(key, config_values[key])
            else:
                merged[key] = default
        self.experiment = experiment
        self.config = merged
        self.out_dir = Path(merged["out"])
        self.created: list[Path] = []
        self.t0 = time.time()

    # -- configuration views ------------------------------------------------

    def ansatz_names(self) -> list:
        library = [a.name for a in qfm.ansatz_library(self.config["n-qubits"])]
        raw = self.config["ansatz"]
        if raw == "all":
            return library
        names = [n.strip() for n in str(raw).split(",") if n.strip()]
        for name in names:
            if name not in library:
                raise ConfigError(f"unknown ansatz {name!r} (available: {', '.join(library)})")
        # keep library order = ascending pulse-parameter count
        return [n for n in library if n in names]

    def modes(self) -> list:
        raw = self.config["mode"]
        if raw == "all":
            return list(qfm.MODES)
        if raw not in qfm.MODES:
            raise ConfigError(f"unknown mode {raw!r}")
        return [raw]

    def seeds(self) -> list:
        return list(range(self.config["seeds"]))

    def sigma2_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.config["sigma2-max"], self.config["sigma2-steps"])

    def master_seed(self) -> int:
        return self.config["master-seed"]

    def base_model(self, ansatz_name: str, mode: str = "gate") -> qfm.FourierModel:
        ansatz = qfm.ansatz_by_name(ansatz_name, self.config["n-qubits"])
        return qfm.FourierModel(ansatz=ansatz, n_blocks=2, mode=mode)

    # -- output handling ----------------------------------------------------

    def _track(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        self.created.append(path)
        return path

    def write_csv(self, name: str, header, rows) -> Path:
        path = self._track(name)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_serialise(v) for v in row])
        return path

    def write_svg(self, name: str, content: str) -> Path:
        path = self._track(name)
        path.write_text(content, encoding="utf-8")
        return path

    def write_manifest(self):
        manifest = {
            "experiment": self.experiment,
            "config": {k: self.config[k] for k in sorted(self.config)},
            "master_seed": self.master_seed(),
            "kernel_backend": kernels.BACKEND,
            "versions": {
                "pulseqfm": __version__,
                "numpy": np.__version__,
                "python": sys.version.split()[0],
            },
            "outputs": [p.name for p in self.created],
            "wall_time_s": round(time.time() - self.t0, 3),
        }
        path = self.out_dir / f"manifest_{self.experiment}.json"
        path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    def cleanup(self):
        for path in self.created:
            try:
                path.unlink(missing_ok=True)
            except OSError:
                pass


def _serialise(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _run_guarded(ctx: RunContext, body):
    try:
        body()
    except ConfigError:
        ctx.cleanup()
        raise
    except (training.TrainingDiverged, FloatingPointError, np.linalg.LinAlgError) as exc:
        ctx.cleanup()
        click.echo(f"numerical failure in {ctx.experiment}: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    except Exception:
        ctx.cleanup()
        raise
    ctx.write_manifest()


def common_options(fn):
    options = [
        click.option("--config", "config_path", type=str, default=None, help="INI config file ([run] section)."),
        click.option("--ansatz", default=None, help="Comma-separated ansatz names, or 'all'."),
        click.option("--mode", default=None, type=str, help="gate|decomposed|pulse|all."),
        click.option("--seeds", default=None, type=int, help="Number of seeds (0..N-1)."),
        click.option("--steps", default=None, type=int, help="Optimiser steps."),
        click.option("--lr", default=None, type=float, help="Adam learning rate."),
        click.option("--tau", default=None, type=float, help="Variance threshold for active frequencies."),
        click.option("--sigma2-max", default=None, type=float, help="Largest distortion variance."),
        click.option("--sigma2-steps", default=None, type=int, help="Number of variance grid points."),
        click.option("--samples", default=None, type=int, help="Parameter samples per estimate."),
        click.option("--pairs", default=None, type=int, help="State pairs for expressibility."),
        click.option("--bins", default=None, type=int, help="Fidelity histogram bins."),
        click.option("--n-qubits", default=None, type=int, help="Number of qubits."),
        click.option("--master-seed", default=None, type=int, help="Master seed for all derived streams."),
        click.option("--escape", is_flag=True, default=None, help="Also run the escape-direction experiment (rank)."),
        click.option("--out", default=None, type=str, help="Output directory."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main():
    """Pulse-level quantum Fourier model experiments."""


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------


def _train_experiment(ctx: RunContext):
    names = ctx.ansatz_names()
    modes = ctx.modes()
    seeds = ctx.seeds()
    steps = ctx.config["steps"]
    master = ctx.master_seed()

    def run_task(task):
        name, seed = task
        base = ctx.base_model(name)
        spec = qfm.spectrum(base)
        target = training.generate_target(
            spec, seeding.rng_for(master, f"target/{name}/seed={seed}")
        )
        out = {}
        for mode in modes:
            config = training.TrainConfig(
                ansatz_name=name,
                mode=mode,
                seeds=(seed,),
                steps=steps,
                learning_rate=ctx.config["lr"],
                n_qubits=ctx.config["n-qubits"],
                master_seed=master,
            )
            out[mode] = training.train(config, target).mse[0]
        probe = qfm.initialised(
            ctx.base_model(name, "pulse"),
            seeding.rng_for(master, f"train/{name}/seed={seed}/theta0"),
        )
        report = tangent.rank_report(probe)
        return name, seed, out, (report.rank_theta, report.rank_ext)

    tasks = [(name, seed) for name in names for seed in seeds]
    results = parallel_map(run_task, tasks)

    history_rows = []
    finals = {}
    ranks = {}
    for name, seed, curves, rank_pair in results:
        ranks.setdefault(name, []).append(rank_pair)
        for mode, curve in curves.items():
            finals.setdefault((name, mode), []).append(curve[-1])
            for step, mse in enumerate(curve):
                history_rows.append((name, mode, seed, step, float(mse)))
    ctx.write_csv("train_history.csv", ("ansatz", "mode", "seed", "step", "mse"), history_rows)

    summary_rows = []
    for name in names:
        count = qfm.pulse_param_count(ctx.base_model(name))
        rank_theta = int(np.median([r[0] for r in ranks[name]]))
        rank_ext = int(np.median([r[1] for r in ranks[name]]))
        for mode in modes:
            values = np.array(finals[(name, mode)])
            summary_rows.append(
                (name, mode, count, float(values.mean()), float(values.std()), rank_theta, rank_ext)
            )
    ctx.write_csv(
        "train_summary.csv",
        ("ansatz", "mode", "pulse_param_count", "final_mse_mean", "final_mse_std", "rank_theta", "rank_ext"),
        summary_rows,
    )
    _figure_final_mse(ctx, names, modes, finals)
    _figure_training_curves(ctx, names, modes, results, steps)


def _figure_final_mse(ctx: RunContext, names, modes, finals):
    axes = svg.Axes(
        60, 30, 560, 300,
        xlim=(-0.6, len(names) - 0.4),
        ylim=(0.0, 1.05 * max(max(np.max(finals[(n, m)]) for m in modes) for n in names)),
        xlabel="ansatz (ascending pulse-parameter count)",
        ylabel="final MSE",
        title="Final training error by parameter mode",
    )
    width = 0.8 / max(len(modes), 1)
    for j, mode in enumerate(modes):
        color = svg.PALETTE[j % len(svg.PALETTE)]
        for i, name in enumerate(names):
            values = np.array(finals[(name, mode)])
            x = i - 0.4 + (j + 0.5) * width
            axes.bar(x, float(values.mean()), width * 0.9, color, yerr=float(values.std()))
        axes.legend_entries.append((mode, color))
    body = axes.render(xticks=list(range(len(names))), xtick_labels=list(names))
    ctx.write_svg("fig2_final_mse.svg", svg.document(680, 380, body))


def _figure_training_curves(ctx: RunContext, names, modes, results, steps):
    curves = {}
    for name, _, out, _ in results:
        for mode, curve in out.items():
            curves.setdefault((name, mode), []).append(curve)
    panel_w, panel_h = 300, 220
    cols = 2
    rows = math.ceil(len(names) / cols)
    parts = []
    for idx, name in enumerate(names):
        col, row = idx % cols, idx // cols
        x0 = 60 + col * (panel_w + 70)
        y0 = 40 + row * (panel_h + 70)
        all_curves = [np.mean(np.stack(curves[(name, m)]), axis=0) for m in modes]
        hi = float(max(np.max(c) for c in all_curves))
        lo = float(min(np.min(c) for c in all_curves))
        axes = svg.Axes(
            x0, y0, panel_w, panel_h,
            xlim=(0, steps), ylim=(max(0.0, 0.9 * lo), 1.1 * hi),
            xlabel="step", ylabel="MSE", title=name,
        )
        xs = np.arange(steps + 1)
        for j, mode in enumerate(modes):
            mean_curve = np.mean(np.stack(curves[(name, mode)]), axis=0)
            axes.plot(xs, mean_curve, svg.PALETTE[j % len(svg.PALETTE)], label=mode)
        parts.append(axes.render())
        # inset with the first 100 steps
        cut = min(100, steps)
        inset = svg.Axes(
            x0 + panel_w * 0.45, y0 + panel_h * 0.08,
            panel_w * 0.5, panel_h * 0.42,
            xlim=(0, cut),
            ylim=(
                max(0.0, 0.9 * float(min(np.min(c[: cut + 1]) for c in all_curves))),
                1.1 * float(max(np.max(c[: cut + 1]) for c in all_curves)),
            ),
        )
        for j, mode in enumerate(modes):
            mean_curve = np.mean(np.stack(curves[(name, mode)]), axis=0)
            inset.plot(xs[: cut + 1], mean_curve[: cut + 1], svg.PALETTE[j % len(svg.PALETTE)])
        parts.append(
            f"<rect x='{x0 + panel_w * 0.45}' y='{y0 + panel_h * 0.08}' "
            f"width='{panel_w * 0.5}' height='{panel_h * 0.42}' fill='white' stroke='none'/>"
        )
        parts.append(inset.render(xticks=[0, cut], legend=False))
    total_w = 60 + cols * (panel_w + 70)
    total_h = 40 + rows * (panel_h + 70)
    ctx.write_svg("fig5_training_curves.svg", svg.document(total_w, total_h, "".join(parts)))


# ---------------------------------------------------------------------------
# coeffs
# ---------------------------------------------------------------------------


def _coeffs_experiment(ctx: RunContext):
    rows = []
    for name in ctx.ansatz_names():
        base = ctx.base_model(name)
        for seed in ctx.seeds():
            label = f"coeffs/{name}/seed={seed}"
            m = qfm.initialised(base, seeding.rng_for(ctx.master_seed(), label))
            coeffs = fourier.extract_coefficients(m)
            for w, c in zip(coeffs.spectrum.frequencies, coeffs.values):
                rows.append((name, seed, w, float(c.real), float(c.imag)))
    ctx.write_csv("coefficients.csv", ("ansatz", "seed", "omega", "re", "im"), rows)


# ---------------------------------------------------------------------------
# variance sweep
# ---------------------------------------------------------------------------


def _variance_experiment(ctx: RunContext):
    names = ctx.ansatz_names()
    grid = ctx.sigma2_grid()
    seeds = ctx.seeds()

    def run_task(name):
        return fourier.coefficient_variance_sweep(
            ctx.base_model(name),
            grid,
            ctx.config["samples"],
            seeds,
            ctx.config["tau"],
            master_seed=ctx.master_seed(),
        )

    sweeps = parallel_map(run_task, names)
    per_freq = []
    counts = []
    for sweep in sweeps:
        for i, sigma2 in enumerate(sweep.sigma2_grid):
            for j, seed in enumerate(seeds):
                for k, w in enumerate(sweep.frequencies):
                    per_freq.append(
                        (sweep.ansatz_name, seed, sigma2, w, float(sweep.variances[i, j, k]))
                    )
            counts.append(
                (
                    sweep.ansatz_name,
                    sigma2,
                    float(sweep.active_counts[i].mean()),
                    float(sweep.active_counts[i].std()),
                )
            )
    ctx.write_csv(
        "variance_per_frequency.csv", ("ansatz", "seed", "sigma2", "omega", "var"), per_freq
    )
    ctx.write_csv(
        "active_counts.csv", ("ansatz", "sigma2", "active_count_mean", "active_count_std"), counts
    )
    _figure_active_counts(ctx, names, sweeps)


def _figure_active_counts(ctx: RunContext, names, sweeps):
    n_freq = max(len(s.frequencies) for s in sweeps)
    axes = svg.Axes(
        60, 30, 560, 300,
        xlim=(-0.5, len(names) - 0.5),
        ylim=(0.0, n_freq * 1.08),
        xlabel="ansatz (ascending pulse-parameter count)",
        ylabel="active frequencies",
        title="High-variance coefficient count by distortion variance",
    )
    grid = sweeps[0].sigma2_grid
    for i, sigma2 in enumerate(grid):
        frac = i / max(len(grid) - 1, 1)
        color = _blend("#9ecae1", "#08306b", frac)
        ys = [s.mean_active()[i] for s in sweeps]
        axes.plot(range(len(names)), ys, color, label=f"s2={sigma2:.4g}", width=1.2)
        axes.scatter(range(len(names)), ys, color)
    body = axes.render(xticks=list(range(len(names))), xtick_labels=list(names))
    ctx.write_svg("fig3_active_frequencies.svg", svg.document(680, 380, body))


def _blend(low: str, high: str, frac: float) -> str:
    lo = [int(low[i : i + 2], 16) for i in (1, 3, 5)]
    hi = [int(high[i : i + 2], 16) for i in (1, 3, 5)]
    mix = [round(a + (b - a) * frac) for a, b in zip(lo, hi)]
    return "#" + "".join(f"{v:02x}" for v in mix)


# ---------------------------------------------------------------------------
# fcc / expressibility
# ---------------------------------------------------------------------------


def _fcc_experiment(ctx: RunContext):
    names = ctx.ansatz_names()
    grid = ctx.sigma2_grid()

    def run_task(task):
        name, sigma2 = task
        rng = seeding.rng_for(ctx.master_seed(), f"fcc/{name}/sigma2={sigma2!r}")
        result = metrics.fcc(ctx.base_model(name), ctx.config["samples"], rng, sigma2=sigma2)
        return name, sigma2, result.fcc

    rows = parallel_map(run_task, [(n, float(s)) for n in names for s in grid])
    ctx.write_csv("fcc.csv", ("ansatz", "sigma2", "fcc"), rows)
    _figure_vs_sigma2(ctx, "fig6_fcc.svg", rows, names, "FCC", "Coefficient correlation vs distortion")


def _expressibility_experiment(ctx: RunContext):
    names = ctx.ansatz_names()
    grid = ctx.sigma2_grid()

    def run_task(task):
        name, sigma2 = task
        rng = seeding.rng_for(ctx.master_seed(), f"expressibility/{name}/sigma2={sigma2!r}")
        result = metrics.expressibility(
            ctx.base_model(name), ctx.config["pairs"], ctx.config["bins"], rng, sigma2=sigma2
        )
        return name, sigma2, result.dkl

    rows = parallel_map(run_task, [(n, float(s)) for n in names for s in grid])
    ctx.write_csv("expressibility.csv", ("ansatz", "sigma2", "dkl"), rows)
    _figure_vs_sigma2(ctx, "fig6_dkl.svg", rows, names, "D_KL", "Expressibility vs distortion")


def _figure_vs_sigma2(ctx: RunContext, filename, rows, names, ylabel, title):
    values = {}
    for name, sigma2, value in rows:
        values.setdefault(name, []).append((sigma2, value))
    hi = max(v for _, _, v in rows)
    axes = svg.Axes(
        70, 30, 540, 300,
        xlim=(0.0, max(s for _, s, _ in rows) or 1.0),
        ylim=(0.0, 1.1 * hi if hi > 0 else 1.0),
        xlabel="pulse scaling variance",
        ylabel=ylabel,
        title=title,
    )
    for i, name in enumerate(names):
        pts = sorted(values[name])
        axes.plot([p[0] for p in pts], [p[1] for p in pts], svg.PALETTE[i % len(svg.PALETTE)], label=name)
    ctx.write_svg(filename, svg.document(680, 380, axes.render()))


# ---------------------------------------------------------------------------
# fidelity sweep
# ---------------------------------------------------------------------------


def _fidelity_experiment(ctx: RunContext):
    names = ctx.ansatz_names()
    grid = ctx.sigma2_grid()

    def run_task(name):
        rng = seeding.rng_for(ctx.master_seed(), f"fidelity-sweep/{name}")
        return name, metrics.fidelity_distortion_sweep(
            ctx.base_model(name), grid, ctx.config["samples"], rng
        )

    results = parallel_map(run_task, names)
    rows = []
    for name, sweep in results:
        for r in sweep:
            rows.append(
                (name, r.sigma2, r.fidelity_mean, r.fidelity_std, r.trace_mean, r.trace_std)
            )
    ctx.write_csv(
        "fidelity_sweep.csv",
        ("ansatz", "sigma2", "fidelity_mean", "fidelity_std", "trace_mean", "trace_std"),
        rows,
    )
    axes = svg.Axes(
        70, 30, 540, 300,
        xlim=(0.0, float(grid[-1]) or 1.0),
        ylim=(0.0, 1.05),
        xlabel="pulse scaling variance",
        ylabel="fidelity (solid) / trace distance (dashed)",
        title="Gate-level vs distorted pulse-level states",
    )
    for i, (name, sweep) in enumerate(results):
        color = svg.PALETTE[i % len(svg.PALETTE)]
        axes.plot([r.sigma2 for r in sweep], [r.fidelity_mean for r in sweep], color, label=name)
        axes.plot([r.sigma2 for r in sweep], [r.trace_mean for r in sweep], color, dash="4,3")
    ctx.write_svg("fig4_fidelity_trace.svg", svg.document(680, 380, axes.render()))


# ---------------------------------------------------------------------------
# rank / escape
# ---------------------------------------------------------------------------


def _rank_experiment(ctx: RunContext):
    names = ctx.ansatz_names()
    seeds = ctx.seeds()
    master = ctx.master_seed()

    def rank_task(task):
        name, seed = task
        probe = qfm.initialised(
            ctx.base_model(name, "pulse"), seeding.rng_for(master, f"rank/{name}/seed={seed}")
        )
        report = tangent.rank_report(probe)
        return (name, seed, report.rank_theta, report.rank_ext, report.rank_gain)

    rows = parallel_map(rank_task, [(n, s) for n in names for s in seeds])
    ctx.write_csv(
        "rank_report.csv", ("ansatz", "seed", "rank_theta", "rank_ext", "rank_gain"), rows
    )
    if not ctx.config["escape"]:
        return

    def escape_task(task):
        name, seed = task
        base = ctx.base_model(name)
        spec = qfm.spectrum(base)
        target = training.generate_target(
            spec, seeding.rng_for(master, f"escape/{name}/seed={seed}/target")
        )
        init = qfm.initialised(base, seeding.rng_for(master, f"escape/{name}/seed={seed}/init"))
        optimum = tangent.find_gate_optimum(init, target)
        if not optimum.converged:
            return (name, seed, float("nan"), float("nan"), float("nan"))
        result = tangent.escape_direction_test(init, target, optimum.theta)
        return (name, seed, result.grad_theta_norm, result.grad_lambda_norm, result.residual_norm)

    rows = parallel_map(escape_task, [(n, s) for n in names for s in seeds])
    ctx.write_csv(
        "escape_directions.csv",
        ("ansatz", "seed", "grad_theta_norm", "grad_lambda_norm", "residual_norm"),
        rows,
    )


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _report_experiment(ctx: RunContext):
    out = ctx.out_dir
    sections = []
    found = False
    for name, title in (
        ("train_summary.csv", "Training"),
        ("active_counts.csv", "Active frequencies"),
        ("fcc.csv", "Fourier coefficient correlation"),
        ("expressibility.csv", "Expressibility"),
        ("fidelity_sweep.csv", "State distortion"),
        ("rank_report.csv", "Jacobian ranks"),
        ("escape_directions.csv", "Escape directions"),
    ):
        path = out / name
        if not path.exists():
            continue
        found = True
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        lines = [f"## {title}", "", "| " + " | ".join(rows[0]) + " |"]
        lines.append("|" + "---|" * len(rows[0]))
        for row in rows[1:]:
            lines.append("| " + " | ".join(_round_cell(c) for c in row) + " |")
        sections.append("\n".join(lines))
    if not found:
        raise ConfigError(f"no experiment CSVs found in {out}; run an experiment first")
    text = "# Experiment report\n\n" + "\n\n".join(sections) + "\n"
    path = ctx._track("report.md")
    path.write_text(text, encoding="utf-8")


def _round_cell(cell: str) -> str:
    try:
        value = float(cell)
    except ValueError:
        return cell
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return f"{value:.6g}"


# ---------------------------------------------------------------------------
# command wiring
# ---------------------------------------------------------------------------


def _make_command(name: str, body, help_text: str):
    @main.command(name=name, help=help_text)
    @common_options
    def _cmd(**kwargs):
        ctx = RunContext(name, kwargs)
        _run_guarded(ctx, lambda: body(ctx))

    _cmd.__name__ = name.replace("-", "_")
    return _cmd


_make_command(
    "train",
    _train_experiment,
    "Train gate/decomposed/pulse modes against shared seeded targets.",
)
_make_command("coeffs", _coeffs_experiment, "Extract Fourier coefficients for seeded models.")
_make_command(
    "variance-sweep",
    _variance_experiment,
    "Per-frequency coefficient variances over the distortion grid.",
)
_make_command("fcc", _fcc_experiment, "Fourier coefficient correlation over the distortion grid.")
_make_command(
    "expressibility",
    _expressibility_experiment,
    "KL divergence against the Haar fidelity distribution.",
)
_make_command(
    "fidelity-sweep",
    _fidelity_experiment,
    "Fidelity and trace distance between gate-level and distorted states.",
)
_make_command("rank", _rank_experiment, "Jacobian rank reports (and escape directions with --escape).")
_make_command("report", _report_experiment, "Render report.md from CSVs already in --out.")


if __name__ == "__main__":
    main()
