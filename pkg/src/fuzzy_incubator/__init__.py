"""Mamdani fuzzy temperature/humidity controller for egg incubators."""

__version__ = "0.1.0"

from .dsl import Diagnostic, DslError, ParseResult, SourceSpan, load_model, parse_model, serialize_model, validate_model
from .errors import FuzzyError, InputError, ModelError, NoRuleFired
from .fis import (
    Defuzz,
    FiringRecord,
    FisModel,
    LinguisticVariable,
    Rule,
    clipped_area_and_centroid,
    defuzzify_paper_coa,
    defuzzify_sampled_centroid,
    firing_strength,
    fuzzify,
    infer,
)
from .incubator import IncubatorProfile, Phase, RuleMode, build_incubator_fis, control, select_phase
from .membership import Gaussian, Triangular, eval_membership
from .plant import LoopTrace, PlantParams, PlantState, SensorModel, read_sensor, run_closed_loop, step_plant
