"""First-order incubator plant, DHT22-like sensor and the closed control loop."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields
from typing import Callable, Iterator

import numpy as np

from ._format import fmt6
from .errors import InputError, ModelError
from .incubator import (
    INCUBATION_DAYS,
    IncubatorProfile,
    Phase,
    RuleMode,
    build_incubator_fis,
    control,
    select_phase,
)

SECONDS_PER_DAY = 86400
INITIAL_COMMANDS = (5.0, 5.0)

TRACE_HEADER = (
    "t_s",
    "true_temp_c",
    "true_rh_pct",
    "sensed_temp_c",
    "sensed_rh_pct",
    "heat_cmd",
    "fan_cmd",
    "day",
    "phase",
)


@dataclass(frozen=True)
class PlantParams:
    """Rates of the linear heat and moisture balances.

    The defaults put the heat equilibrium at exactly 38 degC for
    ``heat = 5`` (25 + 5 * 0.0026 / 0.001) and the humidity equilibrium for
    ``fan = 5`` at 57.5 %, between the two RH bands, so the controller pulls
    it down in days 1-17 and up in days 18-21. They are tuning values, not
    measured physics.
    """

    ambient_temp: float = 25.0
    ambient_rh: float = 40.0
    heater_gain: float = 0.0026
    temp_loss_rate: float = 0.001
    humidifier_gain: float = 0.0035
    rh_loss_rate: float = 0.001
    dt: float = 60.0

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise ModelError(f"plant parameter {f.name} must be finite")
        rates = (self.heater_gain, self.temp_loss_rate, self.humidifier_gain, self.rh_loss_rate)
        if min(rates) < 0:
            raise ModelError("plant gains and loss rates must be non-negative")
        if self.dt <= 0:
            raise ModelError(f"dt must be positive, got {self.dt}")
        if self.dt * max(self.temp_loss_rate, self.rh_loss_rate) >= 1.0:
            raise ModelError("dt * loss rate must stay below 1 for explicit Euler stability")

    def temp_equilibrium(self, heat_cmd: float) -> float:
        if self.temp_loss_rate == 0:
            return math.inf if heat_cmd * self.heater_gain > 0 else self.ambient_temp
        return self.ambient_temp + self.heater_gain * heat_cmd / self.temp_loss_rate


@dataclass(frozen=True)
class PlantState:
    temp: float
    rh: float
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rh", min(max(self.rh, 0.0), 100.0))


def step_plant(state: PlantState, heat_cmd: float, fan_cmd: float, params: PlantParams) -> PlantState:
    """Advance one explicit-Euler step of length ``params.dt``."""
    p = params
    temp = state.temp + p.dt * (p.heater_gain * heat_cmd - p.temp_loss_rate * (state.temp - p.ambient_temp))
    rh = state.rh + p.dt * (p.humidifier_gain * fan_cmd - p.rh_loss_rate * (state.rh - p.ambient_rh))
    return PlantState(temp, min(max(rh, 0.0), 100.0), state.t + p.dt)


def _quantize(value: float, resolution: float) -> float:
    if resolution <= 0:
        return value
    # round twice so 38.2 prints as 38.2, not 38.2000000001
    return round(round(value / resolution) * resolution, 9)


@dataclass
class SensorModel:
    """Bounded uniform noise followed by quantization.

    Each :meth:`read` draws one temperature and one humidity sample from
    the seeded stream, so a given seed always yields the same readings.
    """

    temp_resolution: float = 0.1
    temp_noise_bound: float = 0.5
    rh_resolution: float = 0.1
    rh_noise_bound: float = 2.0
    seed: int = 0
    _rng: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if min(self.temp_resolution, self.temp_noise_bound, self.rh_resolution, self.rh_noise_bound) < 0:
            raise ModelError("sensor resolutions and noise bounds must be non-negative")
        self.reset()

    def reset(self) -> None:
        self._rng = np.random.default_rng(self.seed)

    def read(self, state: PlantState) -> tuple[float, float]:
        dt_noise, drh_noise = self._rng.uniform(-1.0, 1.0, size=2)
        temp = _quantize(state.temp + self.temp_noise_bound * dt_noise, self.temp_resolution)
        rh = _quantize(state.rh + self.rh_noise_bound * drh_noise, self.rh_resolution)
        return temp, rh


def read_sensor(state: PlantState, sensor: SensorModel) -> tuple[float, float]:
    return sensor.read(state)


@dataclass(frozen=True)
class TraceRecord:
    t: float
    true_temp: float
    true_rh: float
    sensed_temp: float
    sensed_rh: float
    heat_cmd: float
    fan_cmd: float
    day: int
    phase: Phase


@dataclass
class LoopTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for r in self.records:
            writer.writerow(
                [
                    fmt6(r.t),
                    fmt6(r.true_temp),
                    fmt6(r.true_rh),
                    fmt6(r.sensed_temp),
                    fmt6(r.sensed_rh),
                    fmt6(r.heat_cmd),
                    fmt6(r.fan_cmd),
                    r.day,
                    r.phase.value,
                ]
            )
        return buf.getvalue()


ProfileSelector = Callable[[int], IncubatorProfile]


def schedule_selector(rule_mode: RuleMode = RuleMode.PAIRS_ONLY_9) -> ProfileSelector:
    """Day -> built-in profile for that day's phase."""
    profiles = {phase: build_incubator_fis(phase, rule_mode) for phase in Phase}
    return lambda day: profiles[select_phase(day)]


def run_closed_loop(
    params: PlantParams,
    sensor: SensorModel,
    profile_selector: ProfileSelector | None = None,
    duration_days: int = INCUBATION_DAYS,
    steps_per_day: int | None = None,
    initial: PlantState | None = None,
) -> LoopTrace:
    """Simulate sense -> control -> actuate for ``duration_days`` days.

    The controller runs ``steps_per_day`` times a day (default: once per
    plant step) and its command is held over the plant steps in between.
    When no rule fires the previous command is reused.
    """
    if isinstance(duration_days, bool) or int(duration_days) != duration_days:
        raise InputError(f"duration_days must be an integer, got {duration_days!r}")
    if not 1 <= duration_days <= INCUBATION_DAYS:
        raise InputError(f"duration_days must lie in 1..{INCUBATION_DAYS}, got {duration_days}")
    if steps_per_day is None:
        steps_per_day = round(SECONDS_PER_DAY / params.dt)
    if steps_per_day < 1:
        raise InputError(f"steps_per_day must be positive, got {steps_per_day}")
    substeps = SECONDS_PER_DAY / (steps_per_day * params.dt)
    if substeps < 1 or abs(substeps - round(substeps)) > 1e-9:
        raise ModelError("control period 86400/steps_per_day must be a whole multiple of dt")
    substeps = round(substeps)
    if profile_selector is None:
        profile_selector = schedule_selector()

    state = initial if initial is not None else PlantState(params.ambient_temp, params.ambient_rh, 0.0)
    heat, fan = INITIAL_COMMANDS
    trace = LoopTrace()
    for day in range(1, duration_days + 1):
        profile = profile_selector(day)
        for _ in range(steps_per_day):
            sensed_temp, sensed_rh = sensor.read(state)
            commands = control(profile, sensed_temp, sensed_rh)
            if commands is not None:
                heat, fan = commands
            trace.records.append(
                TraceRecord(state.t, state.temp, state.rh, sensed_temp, sensed_rh, heat, fan, day, profile.phase)
            )
            for _ in range(substeps):
                state = step_plant(state, heat, fan, params)
    return trace


def band_summary(trace: LoopTrace) -> dict[str, float]:
    """Fraction of control steps with the true state inside its target band.

    Day 1 is warm-up and day 18 is the humidity changeover, so neither is
    counted for the bands it would distort.
    """
    day = trace.column("day")
    temp = trace.column("true_temp")
    rh = trace.column("true_rh")

    def frac(mask, values, lo, hi):
        if not mask.any():
            return float("nan")
        v = values[mask]
        return float(np.mean((v >= lo) & (v <= hi)))

    return {
        "temp_in_band_after_day1": frac(day >= 2, temp, 37.0, 39.0),
        "rh_in_band_days2_17": frac((day >= 2) & (day <= 17), rh, 50.0, 55.0),
        "rh_in_band_days19_21": frac(day >= 19, rh, 60.0, 65.0),
    }
