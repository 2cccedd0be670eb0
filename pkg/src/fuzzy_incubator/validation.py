"""Reference operating points and the trend checks run by ``validate``.

The reference rows are crisp (temperature, humidity) -> (heat, fan) pairs
published for the incubator controller. Their membership breakpoints were
never published, so only the direction of each output relative to the
setpoint value 5 is compared, plus closeness at the setpoint row itself.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ._format import fmt6
from .incubator import HUMIDITY_PEAK, TEMPERATURE_PEAK, IncubatorProfile, Phase, control

SETPOINT_OUTPUT = 5.0
ANCHOR_TOLERANCE = 0.5
# a published value this close to 5 was printed as "5.00"
NEUTRAL_BAND = 0.005

# (temperature degC, RH %, heat, fan)
REFERENCE_DAYS_1_17 = (
    (0.00, 34.30, 7.02, 6.06),
    (24.70, 45.20, 6.38, 5.79),
    (34.30, 48.80, 5.68, 5.37),
    (35.50, 51.20, 5.33, 5.00),
    (38.00, 53.60, 5.00, 5.00),
    (41.60, 58.40, 4.80, 4.40),
    (50.00, 17.50, 4.25, 7.20),
    (58.40, 62.00, 3.43, 3.92),
    (64.50, 69.30, 3.19, 3.65),
    (76.50, 75.30, 3.09, 3.64),
)
# The prose around this table quotes the setpoint as 38.2 degC / 64.10 %,
# but the row that reads 5.00 / 5.00 is at 62.60 %; the row is used.
REFERENCE_DAYS_18_21 = (
    (0.00, 34.10, 6.98, 6.28),
    (22.30, 40.40, 5.80, 6.00),
    (33.10, 52.20, 5.26, 5.47),
    (35.50, 59.20, 5.06, 5.20),
    (38.20, 62.60, 5.00, 5.00),
    (40.40, 64.10, 4.86, 4.17),
    (51.20, 19.90, 4.25, 7.60),
    (57.20, 80.10, 3.23, 3.52),
    (68.10, 85.70, 3.19, 3.25),
    (76.50, 87.30, 3.06, 3.04),
)
REFERENCE_ROWS = {Phase.DAYS_1_TO_17: REFERENCE_DAYS_1_17, Phase.DAYS_18_TO_21: REFERENCE_DAYS_18_21}
ANCHORS = {Phase.DAYS_1_TO_17: (38.0, 53.6), Phase.DAYS_18_TO_21: (38.2, 62.6)}


def direction_agrees(reference: float, computed: float) -> bool:
    """Same side of 5 as the reference; a reference of 5.00 needs ``|computed - 5| <= 0.5``."""
    ref_dev = reference - SETPOINT_OUTPUT
    dev = computed - SETPOINT_OUTPUT
    if abs(ref_dev) < NEUTRAL_BAND:
        return abs(dev) <= ANCHOR_TOLERANCE
    return bool(np.sign(dev) == np.sign(ref_dev))


@dataclass(frozen=True)
class RowCheck:
    temperature: float
    humidity: float
    ref_heat: float
    ref_fan: float
    heat: float | None
    fan: float | None

    @property
    def is_anchor(self) -> bool:
        return abs(self.ref_heat - SETPOINT_OUTPUT) < NEUTRAL_BAND and abs(self.ref_fan - SETPOINT_OUTPUT) < NEUTRAL_BAND

    @property
    def heat_agrees(self) -> bool:
        return self.heat is not None and direction_agrees(self.ref_heat, self.heat)

    @property
    def fan_agrees(self) -> bool:
        return self.fan is not None and direction_agrees(self.ref_fan, self.fan)


@dataclass(frozen=True)
class TrendCheck:
    name: str
    violations: int
    points: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class ValidationReport:
    phase: Phase
    rows: tuple[RowCheck, ...]
    trends: tuple[TrendCheck, ...]

    @property
    def anchor_ok(self) -> bool:
        anchors = [r for r in self.rows if r.is_anchor]
        return bool(anchors) and all(
            r.heat is not None
            and r.fan is not None
            and abs(r.heat - SETPOINT_OUTPUT) <= ANCHOR_TOLERANCE
            and abs(r.fan - SETPOINT_OUTPUT) <= ANCHOR_TOLERANCE
            for r in anchors
        )

    @property
    def directions_ok(self) -> bool:
        return all(r.heat_agrees and r.fan_agrees for r in self.rows)

    @property
    def passed(self) -> bool:
        return self.anchor_ok and self.directions_ok and all(t.passed for t in self.trends)

    def to_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["temp_c", "rh_pct", "ref_heat", "heat", "heat_agrees", "ref_fan", "fan", "fan_agrees"])
        for r in self.rows:
            w.writerow(
                [
                    fmt6(r.temperature),
                    fmt6(r.humidity),
                    f"{r.ref_heat:.2f}",
                    "" if r.heat is None else f"{r.heat:.2f}",
                    str(r.heat_agrees).lower(),
                    f"{r.ref_fan:.2f}",
                    "" if r.fan is None else f"{r.fan:.2f}",
                    str(r.fan_agrees).lower(),
                ]
            )
        lines = [buf.getvalue().rstrip("\n")]
        lines.append(f"# anchor within +/-{ANCHOR_TOLERANCE}: {'pass' if self.anchor_ok else 'FAIL'}")
        agree = sum(int(r.heat_agrees) + int(r.fan_agrees) for r in self.rows)
        lines.append(f"# direction agreement: {agree}/{2 * len(self.rows)} {'pass' if self.directions_ok else 'FAIL'}")
        for t in self.trends:
            lines.append(f"# {t.name}: {t.violations} violations over {t.points} points {'pass' if t.passed else 'FAIL'}")
        lines.append(f"# overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def sweep(profile: IncubatorProfile, *, temps=None, humidities=None) -> list[tuple[float, float, float | None, float | None]]:
    out = []
    for t in temps:
        for h in humidities:
            cmd = control(profile, float(t), float(h))
            out.append((float(t), float(h), None if cmd is None else cmd[0], None if cmd is None else cmd[1]))
    return out


def count_increases(values, tol: float = 1e-9) -> int:
    """Number of steps where a supposedly non-increasing sequence goes up."""
    if any(v is None for v in values):
        return len(values)
    v = np.asarray(values, dtype=float)
    return int(np.sum(np.diff(v) > tol))


def trend_checks(profile: IncubatorProfile, step: float = 0.5) -> tuple[TrendCheck, ...]:
    """Heat must not rise with temperature; fan must not rise with humidity."""
    temps = np.arange(0.0, 80.0 + step / 2, step)
    hums = np.arange(0.0, 100.0 + step / 2, step)
    peak = HUMIDITY_PEAK[profile.phase]
    heat = [row[2] for row in sweep(profile, temps=temps, humidities=[peak])]
    fan = [row[3] for row in sweep(profile, temps=[TEMPERATURE_PEAK], humidities=hums)]
    return (
        TrendCheck(f"heat non-increasing in temperature at rh={fmt6(peak)}", count_increases(heat), len(heat)),
        TrendCheck(f"fan non-increasing in humidity at temp={fmt6(TEMPERATURE_PEAK)}", count_increases(fan), len(fan)),
    )


def validate_profile(profile: IncubatorProfile) -> ValidationReport:
    rows = []
    for t, h, ref_heat, ref_fan in REFERENCE_ROWS[profile.phase]:
        cmd = control(profile, t, h)
        heat, fan = (None, None) if cmd is None else cmd
        rows.append(RowCheck(t, h, ref_heat, ref_fan, heat, fan))
    return ValidationReport(profile.phase, tuple(rows), trend_checks(profile))
