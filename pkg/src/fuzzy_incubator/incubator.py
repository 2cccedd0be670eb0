"""Chicken-egg incubator controller: variables, rule table and phase schedule.

Membership breakpoints are defaults chosen around the stated operating
targets (38 degC inside 37-39 degC; 50-55 % RH for days 1-17 and 60-65 %
for days 18-21). Both outputs are centred on 5 so the setpoint maps to
``heat = fan = 5``. Any of it can be overridden by loading a ``.fis`` file.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InputError, ModelError, NoRuleFired
from .fis import FisModel, LinguisticVariable, Rule, infer
from .membership import Gaussian, Triangular

TEMPERATURE = "temperature"
HUMIDITY = "humidity"
HEAT = "heat"
FAN = "fan"

INCUBATION_DAYS = 21
LAST_EARLY_DAY = 17


class Phase(enum.Enum):
    DAYS_1_TO_17 = "days1-17"
    DAYS_18_TO_21 = "days18-21"


class RuleMode(enum.Enum):
    ALL_15 = "all15"
    PAIRS_ONLY_9 = "pairs9"


# Rule table rows 1-15: (temperature term, humidity term, heat, fan).
# ``None`` means the row does not test that input.
RULE_TABLE: tuple[tuple[str | None, str | None, str, str], ...] = (
    ("cold", None, "high", "medium"),
    ("optimal", None, "optimal", "medium"),
    ("hot", None, "low", "medium"),
    (None, "dry", "optimal", "high"),
    (None, "optimal", "optimal", "medium"),
    (None, "wet", "optimal", "low"),
    ("cold", "dry", "high", "high"),
    ("cold", "optimal", "high", "medium"),
    ("cold", "wet", "high", "low"),
    ("optimal", "dry", "optimal", "high"),
    ("optimal", "optimal", "optimal", "medium"),
    ("optimal", "wet", "optimal", "low"),
    ("hot", "dry", "low", "high"),
    ("hot", "optimal", "low", "medium"),
    ("hot", "wet", "low", "low"),
)

HUMIDITY_PEAK = {Phase.DAYS_1_TO_17: 52.5, Phase.DAYS_18_TO_21: 62.5}
TEMPERATURE_PEAK = 38.0


def temperature_variable() -> LinguisticVariable:
    return LinguisticVariable(
        TEMPERATURE,
        (0.0, 80.0),
        {
            "cold": Triangular(0.0, 0.0, 38.0),
            "optimal": Triangular(37.0, 38.0, 39.0),
            "hot": Triangular(38.0, 80.0, 80.0),
        },
    )


def humidity_variable(phase: Phase) -> LinguisticVariable:
    peak = HUMIDITY_PEAK[phase]
    return LinguisticVariable(
        HUMIDITY,
        (0.0, 100.0),
        {
            "dry": Triangular(0.0, 0.0, peak),
            "optimal": Triangular(peak - 2.5, peak, peak + 2.5),
            "wet": Triangular(peak, 100.0, 100.0),
        },
    )


def heat_variable() -> LinguisticVariable:
    return LinguisticVariable(
        HEAT,
        (0.0, 10.0),
        {"low": Gaussian(2.0, 1.2), "optimal": Gaussian(5.0, 1.2), "high": Gaussian(8.0, 1.2)},
    )


def fan_variable() -> LinguisticVariable:
    return LinguisticVariable(
        FAN,
        (0.0, 10.0),
        {
            "low": Triangular(0.0, 2.0, 4.0),
            "medium": Triangular(3.0, 5.0, 7.0),
            "high": Triangular(6.0, 8.0, 10.0),
        },
    )


def table_rules(mode: RuleMode = RuleMode.ALL_15) -> tuple[Rule, ...]:
    rows = RULE_TABLE if mode is RuleMode.ALL_15 else RULE_TABLE[6:]
    rules = []
    for temp, hum, heat, fan in rows:
        ante = []
        if temp is not None:
            ante.append((TEMPERATURE, temp))
        if hum is not None:
            ante.append((HUMIDITY, hum))
        rules.append(Rule(tuple(ante), ((HEAT, heat), (FAN, fan))))
    return tuple(rules)


@dataclass(frozen=True)
class IncubatorProfile:
    phase: Phase
    model: FisModel
    rule_mode: RuleMode = RuleMode.ALL_15


def build_incubator_fis(phase: Phase, rule_mode: RuleMode = RuleMode.ALL_15) -> IncubatorProfile:
    suffix = "phase1" if phase is Phase.DAYS_1_TO_17 else "phase2"
    if rule_mode is RuleMode.PAIRS_ONLY_9:
        suffix += "_pairs9"
    model = FisModel(
        name=f"incubator_{suffix}",
        inputs=(temperature_variable(), humidity_variable(phase)),
        outputs=(heat_variable(), fan_variable()),
        rules=table_rules(rule_mode),
    )
    return IncubatorProfile(phase, model, rule_mode)


def select_phase(day: int) -> Phase:
    if isinstance(day, bool) or int(day) != day:
        raise InputError(f"day must be an integer, got {day!r}")
    if not 1 <= day <= INCUBATION_DAYS:
        raise InputError(f"day must lie in 1..{INCUBATION_DAYS}, got {day}")
    return Phase.DAYS_1_TO_17 if day <= LAST_EARLY_DAY else Phase.DAYS_18_TO_21


def control(profile: IncubatorProfile, temperature: float, humidity: float) -> tuple[float, float] | None:
    """``(heat, fan)`` commands for one sensor reading.

    Inputs and outputs are taken by position (temperature, humidity) and
    (heat, fan), so models loaded from ``.fis`` files may rename them.
    Returns ``None`` when no rule fires so the caller can hold its last
    command.
    """
    model = profile.model
    if len(model.inputs) != 2 or len(model.outputs) != 2:
        raise ModelError(f"{model.name}: controller needs 2 inputs and 2 outputs")
    temp_name, hum_name = model.input_names
    try:
        out = infer(model, {temp_name: temperature, hum_name: humidity})
    except NoRuleFired:
        return None
    heat_name, fan_name = model.output_names
    return out[heat_name], out[fan_name]


SHIPPED_FILES = {Phase.DAYS_1_TO_17: "incubator_phase1.fis", Phase.DAYS_18_TO_21: "incubator_phase2.fis"}


def shipped_model_text(phase: Phase) -> str:
    """Contents of the packaged ``.fis`` file for ``phase``."""
    from importlib.resources import files

    return files("fuzzy_incubator").joinpath("data", SHIPPED_FILES[phase]).read_text(encoding="utf-8")


def write_shipped_models(directory) -> list:
    """Regenerate the packaged ``.fis`` files from the built-in profiles."""
    from pathlib import Path

    from .dsl import serialize_model

    written = []
    for phase, filename in SHIPPED_FILES.items():
        path = Path(directory) / filename
        path.write_text(serialize_model(build_incubator_fis(phase).model), encoding="utf-8", newline="\n")
        written.append(path)
    return written
