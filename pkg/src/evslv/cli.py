"""Command line entry point: ``evslv {simulate,classify,sweep,ndim} --config FILE``.

Exit codes: 0 success, 2 bad config, 3 numerical blowup. ``classify`` returns the
scenario code instead (0 Sustainable, 10 Bearable, 11 Equitable, 12 Viable,
13 Indeterminate, 14 Unsustainable).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, load_config
from .errors import ConfigError, ContractViolation, NumericalBlowup
from .integrate import simulate
from .model import ModelSpec3
from .ndim import NDimSpec, ensemble_persistence, extract_subsystem, random_ensemble, simulate_n
from .sustainability import classify_scenario, persistence_check
from .svg import phase_svg, sweep_svg, timeseries_svg
from .sweep import SweepPlan, run_sweep, shape_test

EXIT_CONFIG = 2
EXIT_BLOWUP = 3


class _Ctx:
    def __init__(self, args, cfg: ScenarioConfig):
        self.args = args
        self.cfg = cfg
        self.out = Path(args.out or cfg.output_dir)

    def say(self, msg: str) -> None:
        if not self.args.quiet:
            print(msg)

    def path(self, suffix: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        return self.out / f"{self.cfg.name}_{suffix}"


def _fmt(x) -> str:
    return "(" + ", ".join(f"{v:.6g}" for v in x) + ")"


def _events(traj) -> str:
    if not traj.events:
        return "none"
    return ", ".join(f"{traj.labels[i]}<eps@t={t:.4g}" for t, i, _ in traj.events)


def cmd_simulate(ctx: _Ctx) -> int:
    cfg = ctx.cfg
    outputs = set(cfg.outputs)
    try:
        traj = simulate(cfg.model, cfg.x0, cfg.integrator)
    except NumericalBlowup as exc:
        if exc.trajectory is not None:
            exc.trajectory.write_csv(ctx.path("trajectory.csv"))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    if "trajectory-csv" in outputs:
        traj.write_csv(ctx.path("trajectory.csv"))
    if "phase-svg" in outputs and traj.states.shape[1] == 3:
        ctx.path("phase.svg").write_text(phase_svg(traj, f"{cfg.name}: phase portraits"))
    if "timeseries-svg" in outputs:
        ctx.path("timeseries.svg").write_text(timeseries_svg(traj, f"{cfg.name}: time series"))
    if "report-json" in outputs:
        eps = cfg.integrator.extinction_threshold
        if isinstance(cfg.model, ModelSpec3):
            report = classify_scenario(cfg.model, traj, eps).to_dict()
        else:
            report = {"persistence_horizon": persistence_check(traj, eps)}
        report["final_state"] = traj.final.tolist()
        report["events"] = [list(e) for e in traj.events]
        ctx.path("report.json").write_text(json.dumps(report, indent=2) + "\n")
    ctx.say(f"{cfg.name}: t={traj.times[-1]:g} final={_fmt(traj.final)} events={_events(traj)}")
    return 0


def cmd_classify(ctx: _Ctx) -> int:
    model = ctx.cfg.model
    if not isinstance(model, ModelSpec3):
        raise ConfigError("model", "classify needs a 3D model (r of length 3)")
    report = classify_scenario(model)
    text = json.dumps(report.to_dict(), indent=2)
    if ctx.args.out:
        ctx.path("report.json").write_text(text + "\n")
    ctx.say(text)
    ctx.say(f"scenario: {report.scenario}")
    return report.exit_code


def cmd_sweep(ctx: _Ctx) -> int:
    cfg = ctx.cfg
    if cfg.sweep is None:
        raise ConfigError("sweep", "missing")
    if not isinstance(cfg.model, ModelSpec3):
        raise ConfigError("model", "sweeps run on the 3D model")
    try:
        plan = SweepPlan(
            cfg.sweep.target,
            cfg.sweep.values,
            cfg.model,
            tuple(cfg.x0),
            cfg.integrator,
            cfg.sweep.summary_window,
            cfg.sweep.workers,
        )
    except ContractViolation as exc:
        raise ConfigError("sweep", str(exc)) from None
    result = run_sweep(plan)
    result.write_csv(ctx.path("sweep.csv"))
    ctx.path("sweep.svg").write_text(sweep_svg(result, f"{cfg.name}: sensitivity to {plan.target}"))
    column = result.column("V", cfg.sweep.statistic)
    verdict = shape_test(column) if len(column) >= 3 else "n/a"
    blown = sum(row.blowup_time is not None for row in result.rows)
    ctx.say(f"{cfg.name}: {len(result.rows)} points, {blown} diverged; V {cfg.sweep.statistic} shape: {verdict}")
    return 0


def cmd_ndim(ctx: _Ctx) -> int:
    cfg = ctx.cfg
    model = cfg.model
    if isinstance(model, ModelSpec3):
        model = NDimSpec.from_model3(model)
    if cfg.ensemble is not None:
        e = cfg.ensemble
        seed = ctx.args.seed if ctx.args.seed is not None else e.seed
        blocks = e.blocks or model.blocks
        specs = random_ensemble(blocks, e.count, seed, e.coupling_scale)
        x0 = np.full(sum(blocks), float(np.mean(cfg.x0)))
        rows = ensemble_persistence(specs, x0, cfg.integrator, cfg.integrator.extinction_threshold)
        with open(ctx.path("ensemble.csv"), "w", newline="") as fh:
            fh.write("member,persistent,T1,blowup_time,E_final,V_final,S_final\n")
            for row in rows:
                final = row["final"] or [float("nan")] * 3
                cells = [str(row["member"]), "1" if row["persistent"] else "0"]
                cells += ["" if row[k] is None else f"{row[k]:.17g}" for k in ("T1", "blowup_time")]
                cells += [f"{v:.17g}" for v in final]
                fh.write(",".join(cells) + "\n")
        frac = sum(r["persistent"] for r in rows) / len(rows) if rows else float("nan")
        ctx.say(f"{cfg.name}: ensemble of {len(rows)} (seed {seed}), persisting fraction {frac:.3f}")
        return 0
    x0 = cfg.x0
    if cfg.extract is not None:
        try:
            model = extract_subsystem(model, cfg.extract)
        except ContractViolation as exc:
            raise ConfigError("extract", str(exc)) from None
        x0 = x0[sorted(set(cfg.extract))]
    try:
        full, agg = simulate_n(model, x0, cfg.integrator)
    except NumericalBlowup as exc:
        if exc.trajectory is not None:
            exc.trajectory.write_csv(ctx.path("aggregate.csv"))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    full.write_csv(ctx.path("trajectory.csv"))
    agg.write_csv(ctx.path("aggregate.csv"))
    if "timeseries-svg" in cfg.outputs:
        ctx.path("aggregate.svg").write_text(timeseries_svg(agg, f"{cfg.name}: aggregates"))
    t1 = persistence_check(agg, cfg.integrator.extinction_threshold)
    ctx.say(f"{cfg.name}: N={model.n} blocks={model.blocks} aggregate final={_fmt(agg.final)} T1={t1}")
    return 0


COMMANDS = {"simulate": cmd_simulate, "classify": cmd_classify, "sweep": cmd_sweep, "ndim": cmd_ndim}


def infer_command(cfg: ScenarioConfig) -> str:
    """Subcommand that produces a config's artifacts: sweep, ndim, else simulate."""
    if cfg.sweep is not None:
        return "sweep"
    if cfg.ensemble is not None or cfg.extract is not None or isinstance(cfg.model, NDimSpec):
        return "ndim"
    return "simulate"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON scenario config")
    common.add_argument("--out", help="output directory (overrides output_dir in the config)")
    common.add_argument("--seed", type=int, help="seed for ensemble runs")
    common.add_argument("--quiet", action="store_true", help="suppress stdout")
    parser = argparse.ArgumentParser(prog="evslv", description="EVS Lotka-Volterra sustainability engine")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="integrate one trajectory")
    sub.add_parser("classify", parents=[common], help="sustainability report; exit code encodes scenario")
    sub.add_parser("sweep", parents=[common], help="one-parameter sensitivity sweep")
    sub.add_parser("ndim", parents=[common], help="block-structured N-dimensional runs and ensembles")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](_Ctx(args, cfg))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
