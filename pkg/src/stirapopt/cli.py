"""Command-line front end.

Durations are normalized, in units of Gamma/Omega0**2. The full three-level
model is run in physical time tau = T * Gamma/Omega0**2 with Omega0 = 1, i.e.
tau * Omega0 = T * (Gamma/Omega0).

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import optimal, protocols
from .core import SystemParams
from .dynamics import IntegratorConfig, simulate, with_estimated_c2
from .errors import NumericalBlowupError, StirapError
from .reporting import (
    EfficiencyReport,
    ReportRow,
    fmt,
    plot_fig1,
    plot_fig2,
    plot_fig3,
    table_csv,
    trajectory_csv,
    write_text,
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

PROTOCOLS = ("optimal", "constant", "sigmoid")
MODELS = ("full", "reduced", "adiabatic")
DEFAULT_GRID = "5:50:5,100:1000:50"

UNIT_NOTE = ("Durations are normalized (units of Gamma/Omega0^2). The full model maps them to "
             "physical time tau = T*Gamma/Omega0^2 with Omega0 = 1.")


class UsageError(Exception):
    pass


# --- argument types ----------------------------------------------------------

def duration(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError("duration must be positive")
    return value


def gamma_ratio(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"gamma ratio must be a number or 'inf', got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError("gamma ratio must be positive")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError("must be positive")
    return value


def duration_grid(text: str) -> list[float]:
    """Comma-separated values or inclusive ``start:stop:step`` ranges."""
    values: list[float] = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        if ":" in item:
            parts = item.split(":")
            if len(parts) != 3:
                raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {item!r}")
            start, stop, step = (float(p) for p in parts)
            if step <= 0 or stop < start:
                raise argparse.ArgumentTypeError(f"bad range {item!r}")
            n = int(math.floor((stop - start) / step + 1e-9))
            values.extend(start + k * step for k in range(n + 1))
        else:
            values.append(float(item))
    if not values:
        raise argparse.ArgumentTypeError("duration grid is empty")
    if any(not (v > 0 and math.isfinite(v)) for v in values):
        raise argparse.ArgumentTypeError("duration must be positive")
    out: list[float] = []
    for v in values:
        if v not in out:
            out.append(v)
    return out


def ratio_list(text: str) -> list[float]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise argparse.ArgumentTypeError("gamma ratio list is empty")
    return [gamma_ratio(s) for s in items]


def choice_list(choices):
    def parse(text: str) -> list[str]:
        items = [s.strip() for s in text.split(",") if s.strip()]
        bad = [s for s in items if s not in choices]
        if bad or not items:
            raise argparse.ArgumentTypeError(f"expected a comma list from {choices}, got {text!r}")
        return items
    return parse


# --- computation -------------------------------------------------------------

def make_schedule(protocol: str, T: float, t0: float | None = None, tbar: float = 10.0):
    if protocol == "optimal":
        return optimal.synthesize_schedule(T)
    if protocol == "constant":
        return protocols.constant_schedule(T)
    if protocol == "sigmoid":
        return protocols.sigmoid_schedule(protocols.SigmoidParams(T / 2 if t0 is None else t0, tbar, T))
    raise UsageError(f"unknown protocol {protocol!r}")


def run_point(task) -> ReportRow:
    protocol, model, T, ratio, t0, tbar, config = task
    schedule = make_schedule(protocol, T, t0, tbar)
    params = SystemParams(ratio) if model == "full" else None
    traj = simulate(schedule, model, params, config)
    return ReportRow(protocol, model, T, ratio, traj.efficiency, protocols.closed_form_for(protocol, T))


def run_tasks(tasks, jobs: int) -> list[ReportRow]:
    if jobs <= 1 or len(tasks) <= 1:
        return [run_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_point, tasks))


def _validate_model(model: str, ratio: float) -> None:
    if model == "full" and math.isinf(ratio):
        raise UsageError("model=full needs a finite --gamma-ratio; use --model reduced for the infinite limit")


def _check_writable(path: Path, is_dir: bool = False) -> None:
    target = path if is_dir else path.parent
    target = target if str(target) else Path(".")
    if is_dir:
        try:
            target.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise UsageError(f"cannot create output directory {path}: {exc.strerror}")
    if not target.is_dir() or not os.access(target, os.W_OK):
        raise UsageError(f"output location {target} is not a writable directory")


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        write_text(Path(out), text)


def _config(args) -> IntegratorConfig:
    return IntegratorConfig(steps_per_unit_time=args.steps_per_unit, samples=args.samples)


# --- subcommands ------------------------------------------------------------

def cmd_solve(args) -> int:
    sol = optimal.solve(args.T)
    record = sol.as_dict()
    if args.format == "json":
        text = json.dumps(record, indent=2) + "\n"
    else:
        text = "\n".join(f"{k:<13} {fmt(v)}" for k, v in record.items()) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    _validate_model(args.model, args.gamma_ratio)
    if args.format == "svg":
        raise UsageError("simulate writes csv or json; use 'figures' for SVG output")
    if args.out not in (None, "-"):
        _check_writable(Path(args.out))
    schedule = make_schedule(args.protocol, args.T, args.t0, args.tbar)
    params = None if math.isinf(args.gamma_ratio) else SystemParams(args.gamma_ratio)
    traj = simulate(schedule, args.model, params, _config(args))
    if args.estimate_c2 and args.model != "full":
        traj = with_estimated_c2(traj, SystemParams(args.gamma_ratio))
    if args.format == "json":
        p = traj.populations
        record = {
            "protocol": args.protocol, "model": args.model, "T": args.T,
            "gamma_ratio": fmt(args.gamma_ratio) if math.isinf(args.gamma_ratio) else args.gamma_ratio,
            "efficiency": traj.efficiency,
            "t": traj.times.tolist(), "pop1": p[:, 0].tolist(),
            "pop2": [None if math.isnan(v) else v for v in p[:, 1]], "pop3": p[:, 2].tolist(),
        }
        text = json.dumps(record) + "\n"
    else:
        text = trajectory_csv(traj)
    _emit(text, args.out)
    print(f"efficiency {fmt(traj.efficiency)}", file=sys.stderr)
    return EXIT_OK


def sweep_tasks(protocols_, models, grid, ratios, t0, tbar, config):
    tasks = []
    for protocol in protocols_:
        for model in models:
            model_ratios = ratios if model == "full" else [math.inf]
            for ratio in model_ratios:
                _validate_model(model, ratio)
                for T in grid:
                    if protocol == "sigmoid" and t0 is not None and not t0 < T:
                        raise UsageError(f"--t0 {t0} must be below every duration in the grid")
                    tasks.append((protocol, model, T, ratio, t0, tbar, config))
    return tasks


def cmd_sweep(args) -> int:
    if args.out not in (None, "-"):
        _check_writable(Path(args.out))
    tasks = sweep_tasks(args.protocol, args.model, args.T, args.gamma_ratio, args.t0, args.tbar, _config(args))
    report = EfficiencyReport(run_tasks(tasks, args.jobs))
    if args.format == "json":
        text = json.dumps(report.to_records(), indent=1) + "\n"
    elif args.format == "svg":
        if args.out in (None, "-"):
            raise UsageError("svg output needs --out")
        csv_path = Path(args.out).with_suffix(".csv")
        write_text(csv_path, report.to_csv())
        plot_fig1(report.to_csv(), Path(args.out))
        return EXIT_OK
    else:
        text = report.to_csv()
    _emit(text, args.out)
    return EXIT_OK


def figure_data(T: float = 250.0, tbar: float = 10.0, ratios=(1.0, 0.1), grid=None, samples: int = 1001,
                jobs: int = 1, config: IntegratorConfig | None = None) -> dict[str, str]:
    """CSV payloads backing the three figures."""
    config = config or IntegratorConfig(samples=samples)
    grid = grid if grid is not None else duration_grid(DEFAULT_GRID)
    fig1 = EfficiencyReport(run_tasks(sweep_tasks(["optimal"], ["full"], grid, list(ratios), None, tbar, config), jobs))

    t = np.linspace(0.0, T, samples)
    opt_sched = make_schedule("optimal", T)
    sig_params = protocols.SigmoidParams.centered(T, tbar)
    sig_sched = protocols.sigmoid_schedule(sig_params)
    _, p_opt, s_opt = optimal.synthesize_fields(opt_sched, None, samples)
    _, p_sig, s_sig = protocols.sigmoid_fields(sig_params, None, samples)
    cols2 = {"t": t, "omega_p_optimal": p_opt, "omega_s_optimal": s_opt,
             "omega_p_sigmoid": p_sig, "omega_s_sigmoid": s_sig}
    cols3 = {"t": t}
    for name, sched in (("optimal", opt_sched), ("sigmoid", sig_sched)):
        red = simulate(sched, "reduced", None, config)
        cols2[f"pop1_{name}"] = np.interp(t, red.times, red.populations[:, 0])
        cols2[f"pop3_{name}"] = np.interp(t, red.times, red.populations[:, 2])
        cols3[f"pop3_{name}_inf"] = cols2[f"pop3_{name}"]
        for ratio in ratios:
            full = simulate(sched, "full", SystemParams(ratio), config)
            cols3[f"pop3_{name}_{fmt(ratio)}"] = np.interp(t, full.times, full.populations[:, 2])
    return {"fig1": fig1.to_csv(), "fig2": table_csv(cols2), "fig3": table_csv(cols3)}


def cmd_figures(args) -> int:
    outdir = Path(args.out or "figures")
    _check_writable(outdir, is_dir=True)
    data = figure_data(T=args.T, tbar=args.tbar, ratios=tuple(args.gamma_ratio), grid=args.grid,
                       samples=args.samples, jobs=args.jobs,
                       config=IntegratorConfig(steps_per_unit_time=args.steps_per_unit, samples=args.samples))
    plotters = {"fig1": plot_fig1, "fig2": plot_fig2, "fig3": plot_fig3}
    for name, text in data.items():
        write_text(outdir / f"{name}.csv", text)
        plotters[name](text, outdir / f"{name}.svg")
        print(outdir / f"{name}.svg", file=sys.stderr)
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def _common(p: argparse.ArgumentParser, samples_default: int = 1000) -> None:
    p.add_argument("--config", metavar="FILE", help="flat 'key = value' file mirroring the flags; flags win")
    p.add_argument("--steps-per-unit", type=positive_int, default=20,
                   help="RK4 steps per normalized time unit for reduced/adiabatic models (default 20)")
    p.add_argument("--samples", type=positive_int, default=samples_default, help="output samples per trajectory")
    p.add_argument("--out", help="output file (default stdout) or directory for 'figures'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stirapopt", description="Optimal STIRAP pulses for large intermediate-level dissipation. " + UNIT_NOTE)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal theta0, slope, decay rate and efficiency for a duration")
    p.add_argument("--T", type=duration, help="normalized duration (required)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--config", metavar="FILE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="propagate one protocol in one model; writes t,pop1,pop2,pop3",
                       description=UNIT_NOTE)
    p.add_argument("--protocol", choices=PROTOCOLS, default="optimal")
    p.add_argument("--model", choices=MODELS, default="reduced")
    p.add_argument("--T", type=duration, help="normalized duration (required)")
    p.add_argument("--gamma-ratio", type=gamma_ratio, default=math.inf, help="Gamma/Omega0, a number or 'inf'")
    p.add_argument("--t0", type=positive_float, help="sigmoid center (default T/2)")
    p.add_argument("--tbar", type=positive_float, default=10.0, help="sigmoid width (default 10)")
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.add_argument("--estimate-c2", action="store_true",
                   help="fill pop2 from the adiabatic-elimination estimate (reduced/adiabatic models)")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="efficiency report over a duration grid", description=UNIT_NOTE)
    p.add_argument("--protocol", type=choice_list(PROTOCOLS), default=["optimal"], help="comma list")
    p.add_argument("--model", type=choice_list(MODELS), default=["full"], help="comma list")
    p.add_argument("--T", type=duration_grid, default=duration_grid(DEFAULT_GRID),
                   help=f"values and start:stop:step ranges (default {DEFAULT_GRID})")
    p.add_argument("--gamma-ratio", type=ratio_list, default=[1.0, 0.1], help="comma list for the full model")
    p.add_argument("--t0", type=positive_float, help="sigmoid center (default T/2 per grid point)")
    p.add_argument("--tbar", type=positive_float, default=10.0)
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.add_argument("--jobs", type=positive_int, default=os.cpu_count() or 1)
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figures", help="write fig1/fig2/fig3 SVG files with sibling CSVs", description=UNIT_NOTE)
    p.add_argument("--T", type=duration, default=250.0, help="duration for figs 2 and 3")
    p.add_argument("--tbar", type=positive_float, default=10.0)
    p.add_argument("--gamma-ratio", type=ratio_list, default=[1.0, 0.1])
    p.add_argument("--grid", type=duration_grid, default=None, help=f"durations for fig 1 (default {DEFAULT_GRID})")
    p.add_argument("--jobs", type=positive_int, default=os.cpu_count() or 1)
    _common(p, samples_default=1001)
    p.set_defaults(func=cmd_figures, format="svg")
    return parser


def load_config_file(path: str) -> dict[str, str]:
    text = Path(path).read_text(encoding="utf-8")
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string("[run]\n" + text)
    return {k.replace("-", "_"): v for k, v in cp["run"].items()}


def _apply_config(parser, argv, args):
    """Re-parse with values from ``--config`` installed as defaults."""
    values = load_config_file(args.config)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub.choices[args.command]
    known = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, value in values.items():
        if key not in known or key in ("config", "help"):
            raise UsageError(f"unknown key {key!r} in config file {args.config}")
        if isinstance(known[key], argparse._StoreTrueAction):
            defaults[key] = value.strip().lower() in ("1", "true", "yes", "on")
        else:
            defaults[key] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            try:
                args = _apply_config(parser, argv, args)
            except (OSError, configparser.Error) as exc:
                raise UsageError(f"cannot read config file: {exc}")
        if args.command in ("solve", "simulate") and args.T is None:
            raise UsageError("--T is required")
        return args.func(args)
    except NumericalBlowupError as exc:
        print(f"stirapopt {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, StirapError, OSError) as exc:
        print(f"stirapopt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
