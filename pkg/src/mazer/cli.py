"""Command-line front end.

Subcommands: report, figure1, sweep, scatter, coords.  Settings are resolved
as defaults < command-line flags < JSON config file (``--config``).  Exit
codes: 0 success, 2 invalid configuration, 3 solver failure, 4 I/O failure.
Nothing is written when a command fails.
"""
from __future__ import annotations

import argparse
import cmath
import json
import logging
import math
import sys
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import io as mio
from .dressed import (PureState, TrappingParam, basis_state, parse_state_shorthand,
                      state_from_json, to_dressed_coordinates, trapping_state)
from .errors import NumericalFailure, ValidationError
from .observables import (DEFAULT_EPSILON_TAIL, WavePacketSpec, full_report, trapping_RT,
                          ultracold_RT_plus)
from .profiles import ModeProfile, from_descriptor
from .scattering import SolverConfig, amplitude_table, table_rows

log = logging.getLogger("mazer")

EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 2, 3, 4
SWEEP_AXES = ("gamma_abs", "k_over_kappa", "kappa_L")

DEFAULTS = {
    "mode": "mesa",
    "kappa_L": 10.0,
    "k_over_kappa": 0.1,
    "branch": "+",
    "nmax": 5,
    "epsilon_tail": DEFAULT_EPSILON_TAIL,
    "format": None,
    "points": None,
}

_CONFIG_KEYS = {
    "profile", "mode", "kappa_L", "width", "lobes", "expr", "k_over_kappa", "k_list",
    "wave_packet", "state", "state_file", "gamma", "branch", "sweep", "solver", "out",
    "format", "nmax", "epsilon_tail", "points",
}


@dataclass
class RunConfig:
    profile: ModeProfile
    k: Union[float, WavePacketSpec]
    k_list: list
    state: Optional[Union[PureState, TrappingParam]]
    branch: str
    gamma: Optional[complex]
    sweep: Optional[dict]
    solver: SolverConfig
    nmax: int
    epsilon_tail: float
    out: Optional[str]
    fmt: Optional[str]
    points: Optional[int] = None


def _float(x, name):
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a number, got {x!r}") from None
    if not math.isfinite(v):
        raise ValidationError(f"{name} must be finite")
    return v


def _complex(x, name):
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(_float(x[0], name), _float(x[1], name))
    if isinstance(x, str):
        try:
            return complex(x.replace(" ", ""))
        except ValueError:
            raise ValidationError(f"{name} must be a complex number, got {x!r}") from None
    return complex(_float(x, name))


def _read_json(path, what):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} {path} is not valid JSON: {exc}") from None


def _flag_settings(args) -> dict:
    s = {}
    pairs = [("mode", "mode"), ("kappa_l", "kappa_L"), ("width", "width"), ("lobes", "lobes"),
             ("expr", "expr"), ("gamma", "gamma"), ("branch", "branch"),
             ("state_file", "state_file"), ("state", "state"), ("nmax", "nmax"),
             ("out", "out"), ("format", "format"), ("epsilon_tail", "epsilon_tail"),
             ("points", "points")]
    for attr, key in pairs:
        val = getattr(args, attr, None)
        if val is not None:
            s[key] = val
    if getattr(args, "k", None) is not None:
        ks = [_float(v, "--k") for v in str(args.k).split(",") if v.strip()]
        s["k_list"] = ks
        s["k_over_kappa"] = ks[0]
    if getattr(args, "sigma_k", None) is not None:
        s["wave_packet"] = {"kind": "gaussian", "sigma_k": args.sigma_k}
    solver = {}
    for attr in ("segments", "support_epsilon", "unitarity_tol"):
        if getattr(args, attr, None) is not None:
            solver[attr] = getattr(args, attr)
    if solver:
        s["solver"] = solver
    if getattr(args, "axis", None) is not None:
        s["sweep"] = {"axis": args.axis, "start": args.start, "stop": args.stop,
                      "points": args.points}
    return s


def resolve_config(args, command: str) -> RunConfig:
    settings = dict(DEFAULTS)
    settings.update(_flag_settings(args))
    if getattr(args, "config", None):
        cfg = _read_json(args.config, "config file")
        if not isinstance(cfg, dict):
            raise ValidationError("config file must hold a JSON object")
        unknown = set(cfg) - _CONFIG_KEYS
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        for key, val in cfg.items():
            if key in ("solver", "sweep", "wave_packet") and isinstance(settings.get(key), dict) \
                    and isinstance(val, dict):
                settings[key] = {**settings[key], **val}
            else:
                settings[key] = val
        if "k_over_kappa" in cfg and "k_list" not in cfg:
            settings["k_list"] = [cfg["k_over_kappa"]]
    try:
        return build_config(settings, command)
    except ValidationError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ValidationError(f"malformed setting: {exc!r}") from None


def build_config(s: dict, command: str) -> RunConfig:
    if isinstance(s.get("profile"), dict):
        profile = from_descriptor(s["profile"])
    else:
        desc = {"mode": s["mode"], "kappa_L": _float(s["kappa_L"], "kappa_L")}
        for key in ("width", "lobes", "expr"):
            if s.get(key) is not None:
                desc[key] = s[key]
        if desc["mode"] == "sin" and "width" in desc:
            del desc["width"]
        if desc["mode"] in ("sech2", "gaussian"):
            desc.pop("lobes", None)
        profile = from_descriptor(desc)

    k0 = _float(s["k_over_kappa"], "k_over_kappa")
    k_list = [_float(v, "k") for v in s.get("k_list", [k0])]
    if any(k <= 0 for k in k_list + [k0]):
        raise ValidationError("k/kappa must be positive")
    k: Union[float, WavePacketSpec] = k0
    wp = s.get("wave_packet")
    if wp is not None:
        if not isinstance(wp, dict):
            raise ValidationError("wave_packet must be an object")
        kind = wp.get("kind", "gaussian")
        if kind == "tabulated":
            table = tuple((_float(a, "k"), _float(b, "weight")) for a, b in wp.get("table", []))
            k = WavePacketSpec("tabulated", table=table)
        else:
            k = WavePacketSpec(kind, k0=_float(wp.get("k0", k0), "k0"),
                               sigma_k=None if kind == "delta" else _float(wp.get("sigma_k"), "sigma_k"))

    branch = s.get("branch", "+")
    if branch not in ("+", "-"):
        raise ValidationError(f"branch must be '+' or '-', got {branch!r}")
    gamma = _complex(s["gamma"], "gamma") if s.get("gamma") is not None else None
    if gamma is not None and not abs(gamma) < 1:
        raise ValidationError(f"|gamma| must be < 1, got {abs(gamma)}")

    state = None
    if isinstance(s.get("state"), dict):
        state = state_from_json(s["state"])
    elif isinstance(s.get("state"), str):
        state = parse_state_shorthand(s["state"])
    elif s.get("state") is not None:
        raise ValidationError("state must be an object or a shorthand like 'a,0'")
    if s.get("state_file") is not None:
        if state is not None:
            raise ValidationError("give either an inline state or a state file, not both")
        state = state_from_json(_read_json(s["state_file"], "state file"))
    if gamma is not None:
        if state is not None and command != "sweep":
            raise ValidationError("give either a state or a trapping gamma, not both")
        if state is None:
            state = TrappingParam(gamma, branch)

    solver_kw = s.get("solver") or {}
    if not isinstance(solver_kw, dict) or set(solver_kw) - {"segments", "support_epsilon",
                                                            "unitarity_tol", "max_doublings"}:
        raise ValidationError("solver must be an object with segments/support_epsilon/unitarity_tol")
    try:
        solver = SolverConfig(**solver_kw)
    except TypeError as exc:
        raise ValidationError(f"bad solver settings: {exc}") from None

    sweep = s.get("sweep")
    if sweep is not None:
        sweep = _check_sweep(sweep)

    nmax = s.get("nmax", 5)
    if int(nmax) != nmax or nmax < 0:
        raise ValidationError(f"nmax must be a non-negative integer, got {nmax}")
    eps = _float(s.get("epsilon_tail", DEFAULT_EPSILON_TAIL), "epsilon_tail")
    if not 0 < eps < 1:
        raise ValidationError("epsilon_tail must lie in (0, 1)")
    fmt = s.get("format")
    if fmt not in (None, "csv", "json"):
        raise ValidationError(f"format must be csv or json, got {fmt!r}")
    points = s.get("points")
    if points is not None and (int(points) != points or points < 1):
        raise ValidationError("points must be a positive integer")
    return RunConfig(profile, k, k_list, state, branch, gamma, sweep, solver, int(nmax), eps,
                     s.get("out"), fmt, points)


def _check_sweep(sweep):
    if not isinstance(sweep, dict):
        raise ValidationError("sweep must be an object")
    axis = sweep.get("axis")
    if axis not in SWEEP_AXES:
        raise ValidationError(f"sweep axis must be one of {SWEEP_AXES}, got {axis!r}")
    try:
        start, stop = _float(sweep["start"], "sweep start"), _float(sweep["stop"], "sweep stop")
        points = sweep["points"]
    except KeyError as exc:
        raise ValidationError(f"sweep is missing {exc.args[0]!r}") from None
    if points is None or int(points) != points or points < 1:
        raise ValidationError("sweep points must be a positive integer")
    if stop < start:
        raise ValidationError("sweep range must be ordered (start <= stop)")
    if axis == "gamma_abs" and not (0 <= start and stop < 1):
        raise ValidationError("gamma_abs sweep must stay within [0, 1)")
    if axis != "gamma_abs" and start <= 0:
        raise ValidationError(f"{axis} sweep must stay positive")
    return {"axis": axis, "start": start, "stop": stop, "points": int(points)}


# ---------------------------------------------------------------- commands

def cmd_report(cfg: RunConfig) -> str:
    state = cfg.state if cfg.state is not None else basis_state("a", 0)
    report = full_report(state, cfg.profile, cfg.k, cfg.solver, cfg.epsilon_tail)
    if cfg.fmt == "csv":
        return mio.per_n_csv(report)
    return mio.to_json(report.to_dict())


FIGURE1_HEADER = ("gamma_abs", "R_plus", "R_minus", "R_plus_closed_form")


def figure1_rows(profile, k, solver, epsilon_tail, points=100, gamma_max=0.99):
    rows = []
    for g in np.linspace(0.0, gamma_max, points):
        g = float(g)
        r_plus, _ = trapping_RT(TrappingParam(g, "+"), profile, k, solver, epsilon_tail)
        r_minus, _ = trapping_RT(TrappingParam(g, "-"), profile, k, solver, epsilon_tail)
        rows.append((g, r_plus, r_minus, ultracold_RT_plus(g)[0]))
    return rows


def cmd_figure1(cfg: RunConfig) -> str:
    if isinstance(cfg.k, WavePacketSpec):
        raise ValidationError("figure1 needs a single k/kappa")
    rows = figure1_rows(cfg.profile, cfg.k, cfg.solver, cfg.epsilon_tail, cfg.points or 100)
    if cfg.fmt == "json":
        return mio.to_json([dict(zip(FIGURE1_HEADER, r)) for r in rows])
    return mio.to_csv(FIGURE1_HEADER, rows)


SWEEP_COLUMNS = ("sigma_aa_initial", "delta_sigma_aa", "emission_probability", "R", "T")


def cmd_sweep(cfg: RunConfig) -> str:
    if cfg.sweep is None:
        raise ValidationError("sweep needs --axis/--start/--stop/--points or a 'sweep' config entry")
    sw = cfg.sweep
    axis = sw["axis"]
    rows = []
    for x in np.linspace(sw["start"], sw["stop"], sw["points"]):
        x = float(x)
        profile, k, state = cfg.profile, cfg.k, cfg.state
        if axis == "gamma_abs":
            phase = cmath.phase(cfg.gamma) if cfg.gamma else 0.0
            state = TrappingParam(x * cmath.exp(1j * phase) if phase else x, cfg.branch)
        elif axis == "k_over_kappa":
            k = x
        else:
            profile = from_descriptor({**profile.describe(), "kappa_L": x})
        if state is None:
            state = basis_state("a", 0)
        try:
            rep = full_report(state, profile, k, cfg.solver, cfg.epsilon_tail)
        except NumericalFailure as exc:
            raise NumericalFailure(f"sweep point {axis}={x!r}: {exc}", exc.defect) from exc
        rows.append((x, rep.sigma_aa_initial, rep.delta_sigma_aa, 0.0 - rep.delta_sigma_aa, rep.R, rep.T))
    header = (axis,) + SWEEP_COLUMNS
    if cfg.fmt == "json":
        return mio.to_json([dict(zip(header, r)) for r in rows])
    return mio.to_csv(header, rows)


def cmd_scatter(cfg: RunConfig) -> str:
    table = amplitude_table(cfg.profile, cfg.nmax, cfg.k_list, cfg.solver)
    rows = table_rows(table)
    if cfg.fmt == "json":
        return mio.to_json([dict(zip(mio.AMPLITUDE_HEADER, r)) for r in rows])
    return mio.amplitude_csv(rows)


def cmd_coords(cfg: RunConfig) -> str:
    if cfg.state is None:
        raise ValidationError("coords needs --state-file, --state or --gamma")
    if isinstance(cfg.state, TrappingParam):
        coords = trapping_state(cfg.state, cfg.epsilon_tail)
    else:
        coords = to_dressed_coordinates(cfg.state)
    if cfg.fmt == "csv":
        rows = [(-1, coords.w_minus1, 0.0, 0.0, 0.0)]
        rows += [(e["n"], e["w"], e["theta"], e["chi"], e["phi"]) for e in coords.to_dict()["entries"]]
        return mio.to_csv(("n", "w", "theta", "chi", "phi"), rows)
    return mio.to_json(coords.to_dict())


COMMANDS = {
    "report": cmd_report,
    "figure1": cmd_figure1,
    "sweep": cmd_sweep,
    "scatter": cmd_scatter,
    "coords": cmd_coords,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; its entries override flags")
    common.add_argument("--mode", choices=("mesa", "sech2", "gaussian", "sin", "expr"))
    common.add_argument("--kappa-l", dest="kappa_l", type=float, help="cavity length kappa*L")
    common.add_argument("--width", type=float, help="sech2 width / gaussian sigma (units of 1/kappa)")
    common.add_argument("--lobes", type=int, help="half-periods of the sinusoidal mode")
    common.add_argument("--expr", help="custom mode expression in z, L, pi")
    common.add_argument("--k", help="k/kappa (comma-separated list for 'scatter')")
    common.add_argument("--sigma-k", dest="sigma_k", type=float,
                        help="use a Gaussian wave packet of this momentum width")
    common.add_argument("--gamma", help="trapping parameter, e.g. 0.5 or 0.3+0.2j")
    common.add_argument("--branch", choices=("+", "-"))
    common.add_argument("--state-file", dest="state_file")
    common.add_argument("--state", help="basis-state shorthand such as 'a,0' or 'b,1'")
    common.add_argument("--nmax", type=int, help="highest photon index for 'scatter'")
    common.add_argument("--segments", type=int)
    common.add_argument("--support-epsilon", dest="support_epsilon", type=float)
    common.add_argument("--unitarity-tol", dest="unitarity_tol", type=float)
    common.add_argument("--epsilon-tail", dest="epsilon_tail", type=float)
    common.add_argument("--points", type=int, help="number of points (figure1, sweep)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="mazer", description="One-photon mazer scattering and trapping states.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("report", parents=[common], help="observables for one configuration")
    sub.add_parser("figure1", parents=[common], help="R+ and R- of trapping states versus |gamma|")
    sp = sub.add_parser("sweep", parents=[common], help="observables along one parameter axis")
    sp.add_argument("--axis", choices=SWEEP_AXES)
    sp.add_argument("--start", type=float)
    sp.add_argument("--stop", type=float)
    sub.add_parser("scatter", parents=[common], help="raw amplitude table")
    sub.add_parser("coords", parents=[common], help="dressed-state coordinates of a state")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sweep" and getattr(args, "axis", None) is not None:
        if args.start is None or args.stop is None or args.points is None:
            parser.error("--axis needs --start, --stop and --points")
    try:
        cfg = resolve_config(args, args.command)
        if args.command == "figure1" and cfg.fmt is None:
            cfg.fmt = "csv"
        if args.command in ("sweep", "scatter") and cfg.fmt is None:
            cfg.fmt = "csv"
        text = COMMANDS[args.command](cfg)
    except ValidationError as exc:
        print(f"mazer {args.command}: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"mazer {args.command}: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"mazer {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"mazer {args.command}: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("%s done", args.command)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
