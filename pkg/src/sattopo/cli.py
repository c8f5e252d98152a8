"""Experiment harness: generate | offline | baseline | online | compare.

Each report path writes machine-readable artifacts (JSON, CSV, edge lists,
plot data) and renders a matplotlib figure next to them.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import io
from .core import FeasibleSpec, ObjectiveParams
from .errors import ConvergenceError, SatTopoError, ValidationError
from .graphs import TopologyGraph, extract_graph, metrics, plus_grid
from .offline import solve_offline
from .online import Algorithm, StepKind, StepSchedule, dynamic_regret, run_experiment
from .presets import PRESET_NAMES, PRESET_RUN_DEFAULTS, build_preset
from .scenario import Scenario, propagate
from .visibility import FovModel, connectivity_matrix, utility_matrix

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4


@dataclass
class RunConfig:
    preset: str | None = None
    scenario_path: str | None = None
    fov: str = "h"
    lambda_sat: float = 100.0
    lambda_bs: float = 100.0
    bs_utility_scale: float = 100.0
    max_isl: int = 4
    max_bsl: int = 1
    algorithms: str = "ogd,ocg"
    schedule: str = "constant"
    eta: float = 0.05
    ocg_eta: float = 0.1
    ocg_sigma_exponent: float = 0.5
    T: int = 1000
    timestep_s: float = 10.0
    seed: int = 0
    weight_floor: float = 0.5
    offline_tol: float = 1e-6
    summary_window: int = 100
    output_dir: str = "runs"

    @classmethod
    def from_sources(cls, args: argparse.Namespace) -> "RunConfig":
        cfg = cls()
        explicit: set[str] = set()
        if getattr(args, "config", None):
            path = Path(args.config)
            if not path.exists():
                raise ValidationError(f"config file not found: {path}")
            doc = json.loads(path.read_text())
            known = {f.name for f in fields(cls)}
            for key, value in doc.items():
                if key not in known:
                    raise ValidationError(f"unknown config field {key!r} in {path}")
                setattr(cfg, key, value)
                explicit.add(key)
        for f in fields(cls):
            value = getattr(args, f.name, None)
            if value is not None:
                setattr(cfg, f.name, value)
                explicit.add(f.name)
        # Preset-recommended settings fill any field the user left untouched.
        for key, value in PRESET_RUN_DEFAULTS.get(cfg.preset or "", {}).items():
            if key not in explicit:
                setattr(cfg, key, value)
        return cfg

    def load_scenario(self) -> Scenario:
        if self.scenario_path:
            path = Path(self.scenario_path)
            if not path.exists():
                raise ValidationError(f"scenario file not found: {path}")
            return Scenario.from_json(path.read_text())
        if self.preset:
            return build_preset(self.preset, timestep_s=self.timestep_s)
        raise ValidationError("either --preset or --scenario is required")

    def fov_model(self) -> FovModel:
        try:
            return FovModel(self.fov)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc

    def algorithm_list(self) -> list[Algorithm]:
        try:
            return [
                Algorithm(a.strip()) for a in self.algorithms.split(",") if a.strip()
            ]
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc

    def step_schedule(self) -> StepSchedule:
        try:
            kind = StepKind(self.schedule)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        return StepSchedule(
            kind=kind,
            eta=self.eta,
            ocg_eta=self.ocg_eta,
            ocg_sigma_exponent=self.ocg_sigma_exponent,
        )

    def feasible_spec(self, scenario: Scenario) -> FeasibleSpec:
        return FeasibleSpec(
            n=scenario.n,
            kinds=tuple(scenario.kinds()),
            max_isl=self.max_isl,
            max_bsl=self.max_bsl,
        )

    def problem_at(self, scenario: Scenario, t: float) -> ObjectiveParams:
        pos = propagate(scenario, t)
        kinds = scenario.kinds()
        return ObjectiveParams(
            p=connectivity_matrix(pos, kinds, self.fov_model(), scenario.earth_radius_km),
            u=utility_matrix(pos, kinds, self.bs_utility_scale),
            kinds=tuple(kinds),
            lambda_sat=self.lambda_sat,
            lambda_bs=self.lambda_bs,
        )


def _add_common_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file with RunConfig fields")
    sub.add_argument("--preset", choices=PRESET_NAMES)
    sub.add_argument("--scenario", dest="scenario_path", help="scenario JSON file")
    sub.add_argument("--fov", choices=[m.value for m in FovModel])
    sub.add_argument("--lambda-sat", dest="lambda_sat", type=float)
    sub.add_argument("--lambda-bs", dest="lambda_bs", type=float)
    sub.add_argument("--bs-utility-scale", dest="bs_utility_scale", type=float)
    sub.add_argument("--max-isl", dest="max_isl", type=int)
    sub.add_argument("--max-bsl", dest="max_bsl", type=int)
    sub.add_argument("--timestep-s", dest="timestep_s", type=float)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--weight-floor", dest="weight_floor", type=float)
    sub.add_argument("--offline-tol", dest="offline_tol", type=float)
    sub.add_argument("--output-dir", dest="output_dir")


def _write_graph_outputs(
    outdir: Path, label: str, graph: TopologyGraph
) -> dict:
    io.atomic_write_text(outdir / f"{label}_edges.txt", graph.edge_list_text())
    stats = metrics(graph).to_dict()
    stats["n"] = graph.n
    stats["label"] = label
    io.write_json(outdir / f"{label}_metrics.json", stats)
    return stats


def cmd_generate(cfg: RunConfig, out: str | None) -> int:
    scenario = cfg.load_scenario()
    path = Path(out) if out else Path(cfg.output_dir) / "scenario.json"
    io.atomic_write_text(path, scenario.to_json())
    n_sats = int(scenario.satellite_mask().sum())
    print(
        f"wrote {path}: {scenario.n} bodies "
        f"({n_sats} satellites in {scenario.num_planes} planes, "
        f"{scenario.n - n_sats} base stations)"
    )
    return EXIT_OK


def cmd_offline(cfg: RunConfig) -> int:
    scenario = cfg.load_scenario()
    outdir = Path(cfg.output_dir)
    params = cfg.problem_at(scenario, 0.0)
    spec = cfg.feasible_spec(scenario)
    report = solve_offline(params, spec, tol=cfg.offline_tol)
    io.write_matrix_csv(outdir / "X_off.csv", report.x_star)
    io.write_matrix_csv(outdir / "P.csv", params.p)
    io.write_matrix_csv(outdir / "U.csv", params.u)
    io.write_json(outdir / "report.json", report.to_dict())
    graph = extract_graph(report.x_star, spec, cfg.weight_floor)
    stats = _write_graph_outputs(outdir, "offline", graph)
    print(
        f"offline solve: objective {report.objective:.6g}, "
        f"kkt {report.kkt_residual:.3g}, {report.iterations} iterations, "
        f"E={stats['E']} cc={stats['cc']}"
    )
    if not report.converged:
        print("warning: solver hit the iteration cap", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_baseline(cfg: RunConfig) -> int:
    scenario = cfg.load_scenario()
    outdir = Path(cfg.output_dir)
    graph = plus_grid(scenario, 0.0)
    stats = _write_graph_outputs(outdir, "plus_grid", graph)
    print(f"+Grid baseline: E={stats['E']} a_deg={stats['a_deg']:.3g} cc={stats['cc']}")
    return EXIT_OK


def _residual_figure(outdir: Path, logs) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for alg, log in logs.items():
        ax.plot([r.t for r in log.records], log.residuals(), label=alg.value.upper())
    ax.set_xlabel("iteration")
    ax.set_ylabel("average residual per entry")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(outdir / "residuals.png", dpi=150)
    plt.close(fig)


def cmd_online(cfg: RunConfig) -> int:
    scenario = cfg.load_scenario()
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    logs = run_experiment(
        scenario,
        cfg.T,
        cfg.algorithm_list(),
        cfg.fov_model(),
        cfg.step_schedule(),
        seed=cfg.seed,
        lambda_sat=cfg.lambda_sat,
        lambda_bs=cfg.lambda_bs,
        bs_utility_scale=cfg.bs_utility_scale,
        max_isl=cfg.max_isl,
        max_bsl=cfg.max_bsl,
        offline_tol=cfg.offline_tol,
    )
    window = min(cfg.summary_window, cfg.T)
    summary = {"T": cfg.T, "window": window, "algorithms": {}}
    plot_blocks = []
    for alg, log in logs.items():
        import io as _io

        buf = _io.StringIO()
        log.write_csv(buf)
        io.atomic_write_text(outdir / f"runlog_{alg.value}.csv", buf.getvalue())
        res = log.residuals()
        summary["algorithms"][alg.value] = {
            "median_residual_first_window": float(np.median(res[:window])),
            "median_residual_last_window": float(np.median(res[-window:])),
            "mean_wall_time_s": log.mean_wall_time_s(),
            "dynamic_regret": dynamic_regret(log.losses(), log.offline_losses()),
            "projections": log.projections,
            "oracle_calls": log.oracle_calls,
        }
        rows = "\n".join(f"{r.t} {r.residual:.17g}" for r in log.records)
        plot_blocks.append(f"# series: {alg.value}\n{rows}\n")
    io.write_json(outdir / "summary.json", summary)
    io.atomic_write_text(outdir / "residuals.dat", "\n\n".join(plot_blocks))
    _residual_figure(outdir, logs)
    for alg, stats in summary["algorithms"].items():
        print(
            f"{alg}: residual median first/last {window} = "
            f"{stats['median_residual_first_window']:.4g} / "
            f"{stats['median_residual_last_window']:.4g}, "
            f"mean step time {stats['mean_wall_time_s'] * 1e3:.3g} ms"
        )
    return EXIT_OK


METRIC_KEYS = ["E", "a_deg", "density", "cc", "a_sp", "a_c"]


def cmd_compare(paths: list[str], output_dir: str | None) -> int:
    rows = []
    sizes = set()
    for p in paths:
        path = Path(p)
        if not path.exists():
            raise ValidationError(f"metrics file not found: {path}")
        doc = io.read_json(path)
        missing = [k for k in METRIC_KEYS if k not in doc]
        if missing:
            raise ValidationError(f"{path} lacks metric keys: {', '.join(missing)}")
        label = doc.get("label") or path.stem
        rows.append({"label": label, **{k: doc[k] for k in METRIC_KEYS}})
        if "n" in doc:
            sizes.add(doc["n"])
    table = {"rows": rows}
    if len(sizes) > 1:
        table["warning"] = f"inputs disagree on node count: {sorted(sizes)}"
    header = ["label"] + METRIC_KEYS
    widths = [max(len(h), 10) for h in header]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for row in rows:
        cells = [str(row["label"])] + [
            f"{row[k]:.4g}" if isinstance(row[k], float) else str(row[k])
            for k in METRIC_KEYS
        ]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    text = "\n".join(lines)
    print(text)
    if "warning" in table:
        print(f"warning: {table['warning']}", file=sys.stderr)
    if output_dir:
        outdir = Path(output_dir)
        io.write_json(outdir / "comparison.json", table)
        io.atomic_write_text(outdir / "comparison.txt", text + "\n")
        fig, axes = plt.subplots(2, 3, figsize=(11, 6))
        labels = [r["label"] for r in rows]
        for ax, key in zip(axes.flat, METRIC_KEYS):
            ax.bar(labels, [r[key] for r in rows])
            ax.set_title(key)
            ax.tick_params(axis="x", rotation=30)
        fig.tight_layout()
        fig.savefig(outdir / "comparison.png", dpi=150)
        plt.close(fig)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sattopo",
        description="Satellite network topologies via Laplacian-constrained "
        "optimization and online learning",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_gen = subs.add_parser("generate", help="write a scenario JSON file")
    _add_common_options(p_gen)
    p_gen.add_argument("--out", help="output path (default <output-dir>/scenario.json)")

    p_off = subs.add_parser("offline", help="one offline solve at t = 0")
    _add_common_options(p_off)

    p_base = subs.add_parser("baseline", help="+Grid baseline at t = 0")
    _add_common_options(p_base)

    p_on = subs.add_parser("online", help="online tracking run (OGD / OCG)")
    _add_common_options(p_on)
    p_on.add_argument("-T", "--steps", dest="T", type=int)
    p_on.add_argument("--algorithms", help="comma list: ogd,ocg")
    p_on.add_argument("--schedule", choices=[k.value for k in StepKind])
    p_on.add_argument("--eta", type=float)
    p_on.add_argument("--ocg-eta", dest="ocg_eta", type=float)
    p_on.add_argument("--ocg-sigma-exponent", dest="ocg_sigma_exponent", type=float)
    p_on.add_argument("--summary-window", dest="summary_window", type=int)

    p_cmp = subs.add_parser("compare", help="join metrics JSONs into one table")
    p_cmp.add_argument("metrics_files", nargs="+")
    p_cmp.add_argument("--output-dir", dest="output_dir")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "compare":
            return cmd_compare(args.metrics_files, args.output_dir)
        cfg = RunConfig.from_sources(args)
        if args.command == "generate":
            return cmd_generate(cfg, args.out)
        if args.command == "offline":
            return cmd_offline(cfg)
        if args.command == "baseline":
            return cmd_baseline(cfg)
        if args.command == "online":
            return cmd_online(cfg)
        raise ValidationError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SatTopoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
