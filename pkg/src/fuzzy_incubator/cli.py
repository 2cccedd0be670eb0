"""Command line front end.

Exit codes: 0 success, 1 validation failure, 2 no rule fired, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._format import fmt6
from .dsl import DslError, read_model
from .errors import FuzzyError, NoRuleFired
from .incubator import INCUBATION_DAYS, IncubatorProfile, Phase, RuleMode, build_incubator_fis, control, select_phase
from .plant import PlantParams, SensorModel, band_summary, run_closed_loop
from .validation import validate_profile

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NO_RULE = 2
EXIT_USAGE = 64

BUILTIN_MODELS = {
    "phase1": (Phase.DAYS_1_TO_17, RuleMode.ALL_15),
    "phase2": (Phase.DAYS_18_TO_21, RuleMode.ALL_15),
    "phase1-pairs9": (Phase.DAYS_1_TO_17, RuleMode.PAIRS_ONLY_9),
    "phase2-pairs9": (Phase.DAYS_18_TO_21, RuleMode.PAIRS_ONLY_9),
}
PHASE_CHOICES = {"1": Phase.DAYS_1_TO_17, "2": Phase.DAYS_18_TO_21}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_profile(name: str, phase: str | None = None) -> IncubatorProfile:
    """Built-in profile name, or a ``.fis`` path paired with a phase."""
    if name in BUILTIN_MODELS:
        builtin_phase, mode = BUILTIN_MODELS[name]
        if phase is not None and PHASE_CHOICES[phase] is not builtin_phase:
            raise UsageError(f"--phase {phase} contradicts built-in model {name!r}")
        return build_incubator_fis(builtin_phase, mode)
    path = Path(name)
    if not path.is_file():
        raise UsageError(f"no such model file or built-in profile: {name!r} (built-ins: {', '.join(BUILTIN_MODELS)})")
    try:
        model = read_model(path)
    except DslError as exc:
        raise UsageError(f"{name}: invalid model\n{exc}") from None
    profile_phase = PHASE_CHOICES[phase or "1"]
    return IncubatorProfile(profile_phase, model)


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_eval(args) -> int:
    profile = load_profile(args.model, args.phase)
    cmd = control(profile, args.temp, args.rh)
    if cmd is None:
        print(f"error: no rule fired for temp={args.temp} rh={args.rh}", file=sys.stderr)
        return EXIT_NO_RULE
    heat, fan = cmd
    print(f"heat={heat:.2f} fan={fan:.2f}")
    return EXIT_OK


def _grid_axis(lo: float, hi: float, steps: float, flag: str) -> np.ndarray:
    if steps != int(steps) or steps < 1:
        raise UsageError(f"{flag}: STEPS must be a positive integer")
    if int(steps) == 1:
        return np.array([lo])
    if not lo < hi:
        raise UsageError(f"{flag}: LO must be below HI")
    return np.linspace(lo, hi, int(steps))


def cmd_surface(args) -> int:
    profile = load_profile(args.model, args.phase)
    temps = _grid_axis(*args.temp, "--temp")
    hums = _grid_axis(*args.rh, "--rh")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["temp_c", "rh_pct", "heat", "fan"])
    for t in temps:
        for h in hums:
            cmd = control(profile, float(t), float(h))
            if cmd is None:
                raise NoRuleFired(profile.model.output_names)
            w.writerow([fmt6(t), fmt6(h), fmt6(cmd[0]), fmt6(cmd[1])])
    _write(args.output, buf.getvalue())
    return EXIT_OK


def _load_params(path: str | None) -> PlantParams:
    if path is None:
        return PlantParams()
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read plant parameters from {path}: {exc}") from None
    known = {f.name for f in dataclasses.fields(PlantParams)}
    if not isinstance(raw, dict) or set(raw) - known:
        raise UsageError(f"{path}: expected a JSON object with keys from {sorted(known)}")
    return PlantParams(**{k: float(v) for k, v in raw.items()})


def cmd_simulate(args) -> int:
    if not 1 <= args.days <= INCUBATION_DAYS:
        raise UsageError(f"--days must lie in 1..{INCUBATION_DAYS} (the incubation schedule), got {args.days}")
    params = _load_params(args.params)
    mode = RuleMode(args.rules)
    profiles = {phase: build_incubator_fis(phase, mode) for phase in Phase}
    if args.phase1_model:
        profiles[Phase.DAYS_1_TO_17] = load_profile(args.phase1_model, "1")
    if args.phase2_model:
        profiles[Phase.DAYS_18_TO_21] = load_profile(args.phase2_model, "2")
    sensor = SensorModel(seed=args.seed)
    trace = run_closed_loop(
        params,
        sensor,
        lambda day: profiles[select_phase(day)],
        duration_days=args.days,
        steps_per_day=args.steps_per_day,
    )
    _write(args.output, trace.to_csv())
    summary = band_summary(trace)
    out = sys.stderr if args.output == "-" else sys.stdout
    print(" ".join(f"{k}={v:.4f}" for k, v in summary.items()), file=out)
    return EXIT_OK


def cmd_validate(args) -> int:
    profile = load_profile(args.model, args.phase)
    report = validate_profile(profile)
    _write(args.output, report.to_text())
    return EXIT_OK if report.passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzy-incubator", description="Mamdani fuzzy controller for an egg incubator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_args(p):
        p.add_argument("--model", default="phase1", help="built-in profile (%s) or .fis file" % ", ".join(BUILTIN_MODELS))
        p.add_argument("--phase", choices=sorted(PHASE_CHOICES), help="incubation phase of a .fis model (default 1)")

    p = sub.add_parser("eval", help="controller outputs for one reading")
    model_args(p)
    p.add_argument("--temp", type=float, required=True, help="temperature, degC")
    p.add_argument("--rh", type=float, required=True, help="relative humidity, %%")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("surface", help="controller outputs over a temperature x humidity grid, as CSV")
    model_args(p)
    p.add_argument("--temp", type=float, nargs=3, metavar=("LO", "HI", "STEPS"), default=(0.0, 80.0, 17.0))
    p.add_argument("--rh", type=float, nargs=3, metavar=("LO", "HI", "STEPS"), default=(0.0, 100.0, 21.0))
    p.add_argument("--output", default="-", help="CSV path, '-' for stdout")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("simulate", help="closed-loop incubation run, trace as CSV")
    p.add_argument("--params", help="JSON file of plant parameters")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--days", type=int, default=INCUBATION_DAYS)
    p.add_argument("--steps-per-day", type=int, default=None, help="control steps per day (default: one per plant step)")
    p.add_argument("--rules", choices=[m.value for m in RuleMode], default=RuleMode.PAIRS_ONLY_9.value)
    p.add_argument("--phase1-model", help=".fis model for days 1-17")
    p.add_argument("--phase2-model", help=".fis model for days 18-21")
    p.add_argument("--output", default="-", help="CSV path, '-' for stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="compare against the reference operating points and trends")
    model_args(p)
    p.add_argument("--output", default="-", help="report path, '-' for stdout")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoRuleFired as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_RULE
    except FuzzyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
