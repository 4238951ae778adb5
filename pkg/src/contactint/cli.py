"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 the model or
integrator signalled a failure (data up to the failure is still written).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import FORMATS, ConfigError, RunConfig
from .diagnostics import (
    benchmark,
    convergence_errors,
    format_benchmark_table,
    format_stability_table,
    stability_scan,
)
from .integrators import METHOD_NAMES, StepMethod, integrate
from .models import MODEL_PARAMS
from .output import write_table, write_trajectory
from .presets import PRESETS, run_preset

EXIT_OK, EXIT_CONFIG, EXIT_FAILURE = 0, 1, 2

_PARAM_FLAGS = {
    "mu": "--mu",
    "alpha": "--alpha",
    "omega": "--omega",
    "eps_radius": "--eps-radius",
    "gamma": "--gamma",
    "C": "--C",
    "omega0": "--omega0",
    "damping": "--damping",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("arguments", message)


def _common():
    parent = _Parser(add_help=False)
    parent.add_argument("-o", "--output", help="output file (simulate) or directory (preset)")
    parent.add_argument("--format", choices=FORMATS, default=None, help="output format (default csv)")
    parent.add_argument("--quiet", action="store_true", help="suppress the text summary")
    return parent


def _model_args(parser):
    g = parser.add_argument_group("model")
    g.add_argument("--config", help="JSON run configuration; flags override its values")
    g.add_argument("--model", choices=sorted(MODEL_PARAMS))
    for param, flag in _PARAM_FLAGS.items():
        g.add_argument(flag, dest=f"param_{param}", type=float, default=None)
    g = parser.add_argument_group("initial state")
    g.add_argument("--q0", type=float, nargs="+")
    g.add_argument("--p0", type=float, nargs="+")
    g.add_argument("--s0", type=float)
    g.add_argument("--t0", type=float)
    g.add_argument("--random-initial", action="store_true", default=None)
    g.add_argument("--seed", type=int)


def build_parser():
    common = _common()
    parser = _Parser(prog="contactint", description="Contact Hamiltonian and variational integrators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="integrate one trajectory")
    _model_args(p)
    p.add_argument("--method", help=f"one of {', '.join(METHOD_NAMES)}")
    p.add_argument("--b-map-compat", action="store_true", default=None)
    p.add_argument("--tau", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--sample-every", type=int)

    p = sub.add_parser("preset", parents=[common], help="run a bundled scenario")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--full", action="store_true", help="full-length horizon for fig1")

    p = sub.add_parser("scan", parents=[common], help="step-size stability scan")
    _model_args(p)
    p.add_argument("--methods", default="chi2,cvi2,rk4")
    p.add_argument("--taus", default=",".join(f"{0.05 * k:.2f}" for k in range(1, 13)))
    p.add_argument("--t-end", type=float, default=500.0)
    p.add_argument("--bound", type=float, default=100.0)

    p = sub.add_parser("convergence", parents=[common], help="empirical order of convergence")
    _model_args(p)
    p.add_argument("--method", default="chi2")
    p.add_argument("--b-map-compat", action="store_true", default=None)
    p.add_argument("--taus", default="0.2,0.1,0.05,0.025")
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument(
        "--reference-method",
        default="chi6",
        help="used at tau_min/20 when the model has no analytic solution",
    )

    p = sub.add_parser("benchmark", parents=[common], help="timing and evaluation counts")
    _model_args(p)
    p.add_argument("--methods", default="chi2,cvi2,rk4,midpoint")
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--t-end", type=float, default=500.0)
    p.add_argument("--repeats", type=int, default=10)
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "model", None):
        if args.model != cfg.model:
            cfg.model_params = {}
        cfg.model = args.model
    for param in _PARAM_FLAGS:
        value = getattr(args, f"param_{param}", None)
        if value is not None:
            cfg.model_params[param] = value
    for attr, field in (
        ("method", "method"),
        ("b_map_compat", "b_map_compat"),
        ("tau", "tau"),
        ("t_end", "t_end"),
        ("sample_every", "sample_every"),
        ("q0", "q0"),
        ("p0", "p0"),
        ("s0", "s0"),
        ("t0", "t0"),
        ("random_initial", "random_initial"),
        ("seed", "seed"),
        ("output", "output"),
        ("format", "format"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(cfg, field, value)
    return cfg


def _list(text, name, cast=str):
    try:
        items = [cast(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(name, f"cannot parse {text!r}") from None
    if not items:
        raise ConfigError(name, "empty list")
    return items


def _methods(text):
    names = _list(text, "methods")
    for name in names:
        try:
            StepMethod.parse(name)
        except ValueError as exc:
            raise ConfigError("methods", str(exc)) from None
    return names


def cmd_simulate(args, out):
    cfg = _config_from_args(args).validate()
    model = cfg.build_model()
    state0 = cfg.initial_state(model)
    traj = integrate(model, cfg.build_method(), state0, cfg.tau, cfg.t_end, cfg.sample_every)
    write_trajectory(cfg.output, traj, model, cfg.format)
    if not args.quiet:
        msg = f"{traj.method.name}: {traj.status.value} after {traj.steps} steps, {len(traj)} samples"
        if traj.t_fail is not None:
            msg += f" (failed at t={traj.t_fail:g}: {traj.message})"
        print(msg, file=sys.stderr)
    return EXIT_OK if traj.completed else EXIT_FAILURE


def cmd_preset(args, out):
    outdir = args.output or f"preset_{args.name}"
    summary = run_preset(args.name, outdir, args.format or "csv", args.full)
    if not args.quiet:
        print(summary, file=out)
    return EXIT_OK


def _scan_setup(args):
    cfg = _config_from_args(args).validate()
    model = cfg.build_model()
    return cfg, model, cfg.initial_state(model)


def cmd_scan(args, out):
    cfg, model, state0 = _scan_setup(args)
    methods = _methods(args.methods)
    taus = _list(args.taus, "taus", float)
    if any(not tau > 0 for tau in taus):
        raise ConfigError("taus", "step sizes must be positive")
    if not args.bound > 0:
        raise ConfigError("bound", "must be positive")
    reports = stability_scan(model, methods, state0, taus, args.t_end, bound=args.bound)
    rows = [
        [rep.method, tau, int(ok), status]
        for rep in reports.values()
        for tau, ok, status in zip(rep.tau_grid, rep.stable, rep.statuses)
    ]
    if cfg.output:
        write_table(cfg.output, ["method", "tau", "stable", "status"], rows, cfg.format)
    if not args.quiet:
        print(format_stability_table(reports), file=out)
    return EXIT_OK


def cmd_convergence(args, out):
    cfg, model, state0 = _scan_setup(args)
    method = cfg.build_method()
    taus = sorted(_list(args.taus, "taus", float), reverse=True)
    if len(taus) < 3 or any(not tau > 0 for tau in taus):
        raise ConfigError("taus", "need at least three positive step sizes")
    reference = None
    if not hasattr(model, "exact"):
        try:
            StepMethod.parse(args.reference_method)
        except ValueError as exc:
            raise ConfigError("reference_method", str(exc)) from None
        reference = integrate(model, args.reference_method, state0, min(taus) / 20, args.t_end)
    taus_arr, errors = convergence_errors(model, method, state0, args.t_end, taus, reference)
    slope = float(np.polyfit(np.log(taus_arr), np.log(errors), 1)[0])
    rows = [[method.name, tau, err] for tau, err in zip(taus_arr, errors)]
    if cfg.output:
        write_table(cfg.output, ["method", "tau", "error"], rows, cfg.format)
    if not args.quiet:
        for _, tau, err in rows:
            print(f"tau={tau:<8g} error={err:.6e}", file=out)
        print(f"{method.name}: observed order {slope:.3f}", file=out)
    return EXIT_OK


def cmd_benchmark(args, out):
    cfg, model, state0 = _scan_setup(args)
    if args.repeats < 1:
        raise ConfigError("repeats", "must be >= 1")
    if not args.tau > 0:
        raise ConfigError("tau", "must be positive")
    rows = benchmark(model, _methods(args.methods), args.tau, args.t_end, args.repeats, state0)
    if cfg.output:
        keys = list(rows[0].counters)
        data = [[r.method, r.mean_time, r.std_time, r.steps, *(r.per_step()[k] for k in keys)] for r in rows]
        write_table(cfg.output, ["method", "mean_time_s", "std_time_s", "steps", *(f"{k}_per_step" for k in keys)], data, cfg.format)
    if not args.quiet:
        print(format_benchmark_table(rows, f"{model.name}, tau={args.tau:g}, t_end={args.t_end:g}, {args.repeats} runs"), file=out)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "preset": cmd_preset,
    "scan": cmd_scan,
    "convergence": cmd_convergence,
    "benchmark": cmd_benchmark,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except ConfigError as exc:
        print(f"contactint: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"contactint: I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
