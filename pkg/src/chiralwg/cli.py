"""Command-line interface: config ingestion, subcommands, deterministic files.

Configs are TOML with exactly the SystemConfig field names::

    v_g = 1.0      # optional, default 1.0
    omega0 = 1.0   # optional, default 1.0

    [qubit1]
    omega = 1.0
    gamma_r = 1.9e-4
    gamma_l = 1.0e-5
    gamma_loss = 0.0   # optional, default 0.0
    position = 0.0

    [qubit2]
    ...

Values are interpreted in omega0 = 1, v_g = 1 units unless overridden.
Exit status: 0 success, 1 validation/usage error, 2 numerical error.  Errors
go to stderr prefixed "E_VALIDATION:" or "E_NUMERICAL:".
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, experiments, markovian, scattering
from .core import (NumericalError, QubitParams, SystemConfig, ValidationError,
                   validate)

_QUBIT_KEYS = ("omega", "gamma_r", "gamma_l", "gamma_loss", "position")
_TOP_KEYS = ("v_g", "omega0")
_REQUIRED_QUBIT_KEYS = ("omega", "gamma_r", "gamma_l", "position")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"E_VALIDATION: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_config_dict(path: str) -> dict:
    try:
        with open(path, "rb") as stream:
            data = tomllib.load(stream)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"malformed config {path}: {exc}") from exc
    return data


def _apply_overrides(data: dict, overrides: list[str]) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ValidationError(f"override must look like key=value: {item!r}")
        key, _, raw = item.partition("=")
        key = key.strip()
        try:
            value = float(raw)
        except ValueError as exc:
            raise ValidationError(f"override {key}: not a number: {raw!r}") from exc
        if "." in key:
            section, _, name = key.partition(".")
            if section not in ("qubit1", "qubit2") or name not in _QUBIT_KEYS:
                raise ValidationError(f"unknown config key: {key}")
            data.setdefault(section, {})[name] = value
        else:
            if key not in _TOP_KEYS:
                raise ValidationError(f"unknown config key: {key}")
            data[key] = value
    return data


def _build_config(data: dict) -> SystemConfig:
    unknown = set(data) - set(_TOP_KEYS) - {"qubit1", "qubit2"}
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    qubits = {}
    for label in ("qubit1", "qubit2"):
        section = data.get(label)
        if not isinstance(section, dict):
            raise ValidationError(f"config missing [{label}] section")
        unknown = set(section) - set(_QUBIT_KEYS)
        if unknown:
            raise ValidationError(f"unknown keys in [{label}]: {sorted(unknown)}")
        missing = [k for k in _REQUIRED_QUBIT_KEYS if k not in section]
        if missing:
            raise ValidationError(f"[{label}] missing keys: {missing}")
        for key, value in section.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValidationError(f"{label}.{key} must be a number")
        qubits[label] = QubitParams(
            omega=float(section["omega"]), gamma_r=float(section["gamma_r"]),
            gamma_l=float(section["gamma_l"]),
            gamma_loss=float(section.get("gamma_loss", 0.0)),
            position=float(section["position"]))
    for key in _TOP_KEYS:
        if key in data and (not isinstance(data[key], (int, float))
                            or isinstance(data[key], bool)):
            raise ValidationError(f"{key} must be a number")
    return SystemConfig(qubit1=qubits["qubit1"], qubit2=qubits["qubit2"],
                        v_g=float(data.get("v_g", 1.0)),
                        omega0=float(data.get("omega0", 1.0)))


def _config_from_args(args) -> SystemConfig:
    data = _load_config_dict(args.config)
    data = _apply_overrides(data, args.set or [])
    return validate(_build_config(data),
                    allow_uncoupled=getattr(args, "allow_uncoupled", False))


def _out_path(args, filename: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, filename)


def _quad_from_args(args) -> scattering.QuadratureSpec:
    kwargs = {}
    if getattr(args, "quad_window", None) is not None:
        kwargs["window"] = args.quad_window
    if getattr(args, "quad_nodes", None) is not None:
        kwargs["nodes"] = args.quad_nodes
    if getattr(args, "quad_tol", None) is not None:
        kwargs["tol"] = args.quad_tol
    return scattering.QuadratureSpec(**kwargs)


def _cmd_validate(args) -> int:
    config = _config_from_args(args)
    rates = config.derived_rates(allow_uncoupled=args.allow_uncoupled)
    print(f"lambda0 = {config.lambda0:.12g}")
    print(f"d = {config.d:.12g}")
    print(f"d_tilde = {config.d_tilde:.12g}")
    print(f"detuning = {config.detuning:.12g}")
    for j in (0, 1):
        print(f"gamma{j + 1} = {rates.gamma[j]:.12g}")
        print(f"delta{j + 1} = {rates.delta[j]:.12g}")
        print(f"beta{j + 1} = {rates.beta[j]:.12g}")
    print(f"q = {rates.q:.12g}")
    localized = scattering.localized_state_exists(config)
    print(f"localized_state = {'yes' if localized else 'no'} "
          f"({localized.diagnostic})")
    return 0


def _default_horizon(config: SystemConfig) -> float:
    rates = config.derived_rates()
    return 20.0 / min(rates.gamma)


def _cmd_simulate(args) -> int:
    config = _config_from_args(args)
    engine = args.engine
    if engine == "auto":
        engine = experiments.auto_engine(config)
    t_max = args.t_max if args.t_max is not None else _default_horizon(config)
    if t_max < 0:
        raise ValidationError(f"t-max must be non-negative, got {t_max}")
    n_times = args.n_times if t_max > 0 else 1
    t_grid = np.linspace(0.0, t_max, n_times)
    path = _out_path(args, "trace.csv")
    with open(path, "w") as stream:
        if engine == "markovian":
            traj = markovian.evolve(config, t_grid)
            markovian.trace_to_csv(traj, stream, config)
        else:
            trace = scattering.propagate(config, t_grid, quad=_quad_from_args(args))
            scattering.amplitudes_to_csv(trace, stream, config)
    print(path)
    return 0


def _cmd_spectrum(args) -> int:
    args.allow_uncoupled = True
    config = _config_from_args(args)
    center = 0.5 * (config.qubit1.omega + config.qubit2.omega)
    halfwidth = args.half_width
    if halfwidth is None:
        width = max(q.gamma_r + q.gamma_l + q.gamma_loss
                    for q in (config.qubit1, config.qubit2))
        halfwidth = max(10.0 * width, 5.0 * abs(config.detuning))
    energies = np.linspace(center - halfwidth, center + halfwidth,
                           args.n_energies)
    spectrum = scattering.transmission_spectrum(config, energies)
    path = _out_path(args, "spectrum.csv")
    with open(path, "w") as stream:
        scattering.spectrum_to_csv(spectrum, stream, config, branch=args.branch)
    print(path)
    return 0


def _parse_axis(text: str):
    # name=start:stop:count[:log]
    name, _, rest = text.partition("=")
    parts = rest.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise ValidationError(
            f"axis must look like name=start:stop:count[:log], got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"malformed axis {text!r}: {exc}") from exc
    if count < 1:
        raise ValidationError(f"axis {name!r} needs at least one point")
    if len(parts) == 4:
        if start <= 0 or stop <= 0:
            raise ValidationError(f"log axis {name!r} needs positive bounds")
        values = np.geomspace(start, stop, count)
    else:
        values = np.linspace(start, stop, count)
    return name.strip(), values


def _sweep_fixed(overrides: list[str]) -> dict:
    fixed = {}
    for item in overrides:
        if "=" not in item:
            raise ValidationError(f"override must look like key=value: {item!r}")
        key, _, raw = item.partition("=")
        try:
            fixed[key.strip()] = float(raw)
        except ValueError as exc:
            raise ValidationError(f"override {key}: not a number: {raw!r}") from exc
    return fixed


def _cmd_sweep(args) -> int:
    axes = {}
    for text in args.axis:
        name, values = _parse_axis(text)
        axes[name] = values
    spec = experiments.SweepSpec(preset="custom", axes=axes,
                                 engine=args.engine,
                                 fixed=_sweep_fixed(args.set or []))
    path = _out_path(args, "sweep.csv")
    experiments.run_sweep(spec, n_jobs=args.n_jobs, csv_path=path,
                          resume=args.resume, quad=_quad_from_args(args))
    print(path)
    return 0


def _cmd_figures(args) -> int:
    spec = experiments.preset_spec(args.name)
    if args.engine is not None:
        spec = dataclasses.replace(spec, engine=args.engine)
    path = _out_path(args, f"{args.name}.csv")
    experiments.run_sweep(spec, n_jobs=args.n_jobs, csv_path=path,
                          resume=args.resume, quad=_quad_from_args(args))
    print(path)
    return 0


def _add_common_output(parser, with_quad: bool = True) -> None:
    parser.add_argument("--out", default=".", help="output directory")
    if with_quad:
        parser.add_argument("--quad-window", type=float, default=None,
                            help="energy half-window for spectral quadrature")
        parser.add_argument("--quad-nodes", type=int, default=None,
                            help="Simpson intervals in the first round")
        parser.add_argument("--quad-tol", type=float, default=None,
                            help="convergence tolerance between rounds")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chiralwg",
                     description="Concurrence dynamics of two qubits on a "
                                 "chiral waveguide")
    parser.add_argument("--version", action="version",
                        version=f"chiralwg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config, print derived quantities")
    p.add_argument("config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--allow-uncoupled", action="store_true",
                   help="admit a qubit with zero waveguide coupling")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("simulate", help="time evolution of the concurrence")
    p.add_argument("config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--engine", choices=experiments.ENGINES, default="auto")
    p.add_argument("--t-max", type=float, default=None,
                   help="final time (default 20/gamma_min)")
    p.add_argument("--n-times", type=int, default=2001)
    _add_common_output(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("spectrum", help="single-photon transmission/reflection")
    p.add_argument("config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--branch", choices=scattering.BRANCHES, default="+")
    p.add_argument("--half-width", type=float, default=None,
                   help="energy half-window (default 10 linewidths)")
    p.add_argument("--n-energies", type=int, default=2001)
    _add_common_output(p, with_quad=False)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("sweep", help="custom c_max sweep over named parameters")
    p.add_argument("--axis", action="append", required=True,
                   metavar="NAME=START:STOP:COUNT[:log]",
                   help=f"sweep axis; names: {', '.join(experiments.PARAMETERS)}")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="fix a non-swept parameter")
    p.add_argument("--engine", choices=experiments.ENGINES, default="auto")
    p.add_argument("--n-jobs", type=int, default=1)
    p.add_argument("--resume", action="store_true")
    _add_common_output(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("figures", help="run a figure preset sweep")
    p.add_argument("name", choices=experiments.PRESETS)
    p.add_argument("--engine", choices=experiments.ENGINES, default=None,
                   help="override the preset's engine")
    p.add_argument("--n-jobs", type=int, default=1)
    p.add_argument("--resume", action="store_true")
    _add_common_output(p)
    p.set_defaults(func=_cmd_figures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"E_VALIDATION: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"E_NUMERICAL: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"E_VALIDATION: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
