"""Mamdani inference: variables, rules, firing, clipping and defuzzification.

Conjunction is ``min``, implication clips each consequent at the rule's
firing strength, and the two defuzzifiers differ only in how rules are
combined:

* ``PAPER_COA`` weights each rule's clipped-consequent centroid by its
  clipped area, rule by rule, with no aggregation step.
* ``SAMPLED_CENTROID`` max-aggregates the clipped consequents onto one
  grid and takes the discrete centroid. It is kept as a cross-check.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import InputError, ModelError, NoRuleFired
from .membership import MembershipFunction

DEFAULT_SAMPLE_COUNT = 1001


class TNorm(enum.Enum):
    MIN = "min"


class Implication(enum.Enum):
    MIN_CLIP = "min-clip"


class Aggregation(enum.Enum):
    MAX = "max"


class Defuzz(enum.Enum):
    PAPER_COA = "coa"
    SAMPLED_CENTROID = "centroid"


@dataclass(frozen=True)
class LinguisticVariable:
    """A named universe ``[lo, hi]`` partitioned into ordered fuzzy terms.

    ``terms`` may be passed as a mapping; it is stored as a tuple of
    ``(name, mf)`` pairs so the variable stays hashable.
    """

    name: str
    universe: tuple[float, float]
    terms: tuple[tuple[str, MembershipFunction], ...]

    def __post_init__(self):
        terms = self.terms
        if isinstance(terms, Mapping):
            terms = tuple(terms.items())
        object.__setattr__(self, "terms", tuple((str(n), mf) for n, mf in terms))
        object.__setattr__(self, "universe", (float(self.universe[0]), float(self.universe[1])))
        lo, hi = self.universe
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
            raise ModelError(f"{self.name}: universe must satisfy lo < hi, got {self.universe}")
        if not self.terms:
            raise ModelError(f"{self.name}: needs at least one term")
        names = [n for n, _ in self.terms]
        if len(set(names)) != len(names):
            raise ModelError(f"{self.name}: duplicate term names {names}")
        for n, mf in self.terms:
            s_lo, s_hi = mf.support
            if s_hi < lo or s_lo > hi:
                raise ModelError(f"{self.name}.{n}: support {mf.support} misses universe {self.universe}")

    @property
    def term_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.terms)

    def term(self, name: str) -> MembershipFunction:
        for n, mf in self.terms:
            if n == name:
                return mf
        raise ModelError(f"variable {self.name!r} has no term {name!r}")

    def has_term(self, name: str) -> bool:
        return any(n == name for n, _ in self.terms)

    def clamp(self, x: float) -> float:
        lo, hi = self.universe
        return min(max(x, lo), hi)


@dataclass(frozen=True)
class Rule:
    """``if v1 is t1 and v2 is t2 ... then o1 is u1, o2 is u2``."""

    antecedents: tuple[tuple[str, str], ...]
    consequents: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "antecedents", tuple((str(v), str(t)) for v, t in self.antecedents))
        object.__setattr__(self, "consequents", tuple((str(v), str(t)) for v, t in self.consequents))
        if not self.antecedents or not self.consequents:
            raise ModelError("a rule needs at least one antecedent and one consequent")
        for side in (self.antecedents, self.consequents):
            names = [v for v, _ in side]
            if len(set(names)) != len(names):
                raise ModelError(f"variable repeated within one side of rule: {names}")


@dataclass(frozen=True)
class FisModel:
    name: str
    inputs: tuple[LinguisticVariable, ...]
    outputs: tuple[LinguisticVariable, ...]
    rules: tuple[Rule, ...]
    tnorm: TNorm = TNorm.MIN
    implication: Implication = Implication.MIN_CLIP
    aggregation: Aggregation = Aggregation.MAX
    defuzz: Defuzz = Defuzz.PAPER_COA
    sample_count: int = DEFAULT_SAMPLE_COUNT

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "rules", tuple(self.rules))
        for code, message in model_violations(self):
            raise ModelError(f"{code}: {message}")

    def input(self, name: str) -> LinguisticVariable:
        for v in self.inputs:
            if v.name == name:
                return v
        raise ModelError(f"unknown input variable {name!r}")

    def output(self, name: str) -> LinguisticVariable:
        for v in self.outputs:
            if v.name == name:
                return v
        raise ModelError(f"unknown output variable {name!r}")

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.inputs)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.outputs)


def model_violations(model: FisModel) -> Iterator[tuple[str, str]]:
    """Yield ``(code, message)`` for every broken model invariant."""
    in_names = [v.name for v in model.inputs]
    out_names = [v.name for v in model.outputs]
    all_names = in_names + out_names
    for n in sorted({n for n in all_names if all_names.count(n) > 1}):
        yield "duplicate-variable", f"variable {n!r} defined more than once"
    if not model.inputs:
        yield "no-inputs", "model has no input variables"
    if not model.outputs:
        yield "no-outputs", "model has no output variables"
    if not model.rules:
        yield "no-rules", "model has no rules"
    if model.sample_count < 2:
        yield "bad-sample-count", f"sample_count must be >= 2, got {model.sample_count}"
    inputs = {v.name: v for v in model.inputs}
    outputs = {v.name: v for v in model.outputs}
    for i, rule in enumerate(model.rules, start=1):
        for side, table, role in ((rule.antecedents, inputs, "input"), (rule.consequents, outputs, "output")):
            for var, term in side:
                if var not in table:
                    yield "unknown-variable", f"rule {i}: {var!r} is not an {role} variable"
                elif not table[var].has_term(term):
                    yield "unknown-term", f"rule {i}: variable {var!r} has no term {term!r}"


@dataclass(frozen=True)
class ClippedConsequent:
    output: str
    term: str
    area: float
    centroid: float | None


@dataclass(frozen=True)
class FiringRecord:
    rule_index: int
    strength: float
    consequents: tuple[ClippedConsequent, ...] = field(default=())

    def for_output(self, output: str) -> ClippedConsequent | None:
        for c in self.consequents:
            if c.output == output:
                return c
        return None


def eval_grid(universe: tuple[float, float], sample_count: int) -> np.ndarray:
    return _grid(float(universe[0]), float(universe[1]), int(sample_count))


@lru_cache(maxsize=64)
def _grid(lo: float, hi: float, n: int) -> np.ndarray:
    xs = np.linspace(lo, hi, n)
    xs.setflags(write=False)
    return xs


@lru_cache(maxsize=64)
def _trapezoid_weights(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights ``w`` and ``w * x`` so that ``w @ y`` is the trapezoid rule on the grid."""
    xs = _grid(lo, hi, n)
    w = np.full(n, (hi - lo) / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    wx = w * xs
    w.setflags(write=False)
    wx.setflags(write=False)
    return w, wx


@lru_cache(maxsize=1024)
def _sampled_mf(mf: MembershipFunction, lo: float, hi: float, n: int) -> np.ndarray:
    mu = mf.evaluate(_grid(lo, hi, n))
    mu.setflags(write=False)
    return mu


def fuzzify(var: LinguisticVariable, x: float) -> dict[str, float]:
    """Membership of ``x`` in every term of ``var``; ``x`` is clamped to the universe first."""
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"{var.name}: input must be finite, got {x}")
    x = var.clamp(x)
    return {name: mf(x) for name, mf in var.terms}


def firing_strength(rule: Rule, fuzzified: Mapping[str, Mapping[str, float]]) -> float:
    alpha = 1.0
    for var, term in rule.antecedents:
        try:
            mu = fuzzified[var][term]
        except KeyError:
            raise ModelError(f"antecedent {var} is {term} does not resolve") from None
        alpha = min(alpha, mu)
    return alpha


def clipped_area_and_centroid(
    mf: MembershipFunction,
    alpha: float,
    universe: tuple[float, float],
    sample_count: int = DEFAULT_SAMPLE_COUNT,
) -> tuple[float, float | None]:
    """Area and centroid of ``min(mf, alpha)`` by trapezoidal quadrature.

    Returns ``(0.0, None)`` when nothing survives the clip.
    """
    if alpha <= 0.0:
        return 0.0, None
    lo, hi = float(universe[0]), float(universe[1])
    w, wx = _trapezoid_weights(lo, hi, sample_count)
    clipped = np.minimum(_sampled_mf(mf, lo, hi, sample_count), alpha)
    area = float(w @ clipped)
    if area <= 0.0:
        return 0.0, None
    return area, float(wx @ clipped) / area


def fire_rules(model: FisModel, fuzzified: Mapping[str, Mapping[str, float]]) -> list[FiringRecord]:
    outputs = {v.name: v for v in model.outputs}
    records = []
    for i, rule in enumerate(model.rules):
        alpha = firing_strength(rule, fuzzified)
        clipped = []
        for out, term in rule.consequents:
            var = outputs[out]
            area, centroid = clipped_area_and_centroid(var.term(term), alpha, var.universe, model.sample_count)
            clipped.append(ClippedConsequent(out, term, area, centroid))
        records.append(FiringRecord(i, alpha, tuple(clipped)))
    return records


def defuzzify_paper_coa(firings: Iterable[FiringRecord], output: str) -> float:
    """``sum(A_i * xbar_i) / sum(A_i)`` over the rules that fired for ``output``."""
    num = den = 0.0
    for rec in firings:
        if rec.strength <= 0.0:
            continue
        c = rec.for_output(output)
        if c is None or c.area <= 0.0:
            continue
        num += c.area * c.centroid
        den += c.area
    if den <= 0.0:
        raise NoRuleFired([output])
    return num / den


def defuzzify_sampled_centroid(
    firings: Iterable[FiringRecord],
    output: LinguisticVariable,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
) -> float:
    """Discrete centroid of the max-aggregated clipped consequents.

    Samples sit at the centres of ``sample_count`` equal cells spanning the
    universe, so every sample carries the same weight.
    """
    lo, hi = output.universe
    step = (hi - lo) / sample_count
    xs = lo + step * (np.arange(sample_count) + 0.5)
    agg = np.zeros(sample_count)
    for rec in firings:
        if rec.strength <= 0.0:
            continue
        c = rec.for_output(output.name)
        if c is None:
            continue
        np.maximum(agg, np.minimum(output.term(c.term).evaluate(xs), rec.strength), out=agg)
    total = float(agg.sum())
    if total <= 0.0:
        raise NoRuleFired([output.name])
    return float((xs * agg).sum()) / total


def infer(model: FisModel, inputs: Mapping[str, float]) -> dict[str, float]:
    """Crisp outputs of ``model`` for one crisp value per input variable.

    Raises :class:`NoRuleFired` naming every output that no rule reached.
    """
    fuzzified = {}
    for var in model.inputs:
        if var.name not in inputs:
            raise InputError(f"missing input {var.name!r}")
        fuzzified[var.name] = fuzzify(var, inputs[var.name])
    firings = fire_rules(model, fuzzified)
    result = {}
    dead = []
    for var in model.outputs:
        try:
            if model.defuzz is Defuzz.PAPER_COA:
                result[var.name] = defuzzify_paper_coa(firings, var.name)
            else:
                result[var.name] = defuzzify_sampled_centroid(firings, var, model.sample_count)
        except NoRuleFired:
            dead.append(var.name)
    if dead:
        raise NoRuleFired(dead)
    return result
