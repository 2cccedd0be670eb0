import random

import pytest
from hypothesis import given, settings, strategies as st

from fuzzy_incubator.dsl import (
    DslError,
    Severity,
    SourceSpan,
    load_model,
    parse_model,
    serialize_model,
    tokenize,
    validate_model,
)
from fuzzy_incubator.fis import Defuzz, FisModel, LinguisticVariable, Rule
from fuzzy_incubator.incubator import Phase, RuleMode, build_incubator_fis, shipped_model_text
from fuzzy_incubator.membership import Gaussian, Triangular

DEMO = (
    "fis demo\n"
    "input t range 0 80 { cold: tri(0,0,38) optimal: tri(37,38,39) hot: tri(38,80,80) }\n"
    "output h range 0 10 { low: gauss(2,1.2) }\n"
    "if t is cold then h is low"
)

GOLDEN_SMALL = """\
fis tiny
input x range 0 1 {
  lo: tri(0, 0, 1)
  hi: tri(0, 1, 1)
}
output y range -2.5 2.5 {
  neg: gauss(-1, 0.5)
  pos: gauss(1, 0.5)
}
if x is lo then y is neg
"""


def codes(result, severity=Severity.ERROR):
    return [d.code for d in result.diagnostics if d.severity is severity]


def span_text(text, span: SourceSpan):
    line = text.split("\n")[span.line - 1]
    return line[span.column - 1 : span.column - 1 + span.length]


def assert_spans_inside(text, diagnostics):
    lines = text.split("\n")
    for d in diagnostics:
        assert 1 <= d.span.line <= len(lines)
        assert 1 <= d.span.column <= len(lines[d.span.line - 1]) + 1
        assert d.span.column - 1 + d.span.length <= len(lines[d.span.line - 1])


class TestParse:
    def test_demo_model(self):
        result = parse_model(DEMO)
        assert result.ok, result.diagnostics
        m = result.model
        assert len(m.rules) == 1
        assert m.input("t").term("optimal") == Triangular(37, 38, 39)
        assert m.output("h").term("low") == Gaussian(2, 1.2)
        assert m.rules[0] == Rule((("t", "cold"),), (("h", "low"),))

    def test_demo_warnings_do_not_block(self):
        result = parse_model(DEMO)
        assert set(codes(result, Severity.WARNING)) == {"unused-term", "single-term", "uncovered-region"}
        assert codes(result) == []

    def test_unknown_term_span(self):
        text = DEMO.replace("if t is cold", "if t is chilly")
        result = parse_model(text)
        assert result.model is None
        [diag] = result.errors
        assert diag.code == "unknown-term"
        assert span_text(text, diag.span) == "chilly"

    def test_empty_input(self):
        result = parse_model("")
        assert result.model is None
        assert codes(result) == ["missing-header"]
        assert result.errors[0].span == SourceSpan(1, 1, 0)

    def test_comments_and_whitespace(self):
        text = "# leading\nfis   c # name\n\n input x range 0 1{a:tri(0,0,1) b:tri(0,1,1)}\n" \
               "output y range 0 1 {a: tri(0, 0, 1)\n b: tri(0,1,1)} if x is a\n then y is b"
        result = parse_model(text)
        assert result.ok, result.diagnostics
        assert result.model.rules == (Rule((("x", "a"),), (("y", "b"),)),)

    def test_signed_and_fractional_numbers(self):
        text = "fis n\ninput x range -5 +5.5 { a: tri(-5, -.5, 0.) b: gauss(+2.25, .75) }\n" \
               "output y range 0 1 { a: tri(0,0,1) b: tri(0,1,1) }\nif x is a then y is b\nif x is b then y is a"
        m = load_model(text)
        assert m.input("x").universe == (-5.0, 5.5)
        assert m.input("x").term("a") == Triangular(-5, -0.5, 0)
        assert m.input("x").term("b") == Gaussian(2.25, 0.75)

    def test_exponents_are_rejected(self):
        result = parse_model(DEMO.replace("range 0 80", "range 0 8e1"))
        assert result.model is None

    def test_multiple_errors_reported_with_recovery(self):
        text = (
            "fis x\n"
            "input a range 5 1 { q: tri(3,1,2) }\n"
            "if a is then b is c\n"
            "if b is q then a is q\n"
            "output o range 0 1 {x: gauss(0, 0)}\n"
        )
        result = parse_model(text)
        assert result.model is None
        assert codes(result) == ["bad-range", "bad-triangle", "reserved-word", "unknown-variable", "wrong-role", "bad-gaussian"]
        assert_spans_inside(text, result.diagnostics)

    @pytest.mark.parametrize(
        "text, code",
        [
            ("fis a\nfis b", "duplicate-header"),
            (DEMO.replace("hot: tri", "cold: tri"), "duplicate-term"),
            (DEMO + "\ninput t range 0 1 { a: tri(0,0,1) }", "duplicate-variable"),
            (DEMO.replace("tri(38,80,80)", "tri(100,120,130)"), "term-outside-range"),
            (DEMO.replace("then h is low", "then h is low, h is low"), "duplicate-reference"),
            (DEMO.replace("if t is cold then h is low", ""), "no-rules"),
            ("fis q\noutput h range 0 1 { a: tri(0,0,1) }\nif h is a then h is a", "no-inputs"),
            (DEMO + "\n@", "unexpected-character"),
            (DEMO + "\nsamples 1", "bad-sample-count"),
            (DEMO + "\ndefuzz median", "syntax"),
            ("fis", "syntax"),
            ("input x range 0 1 { a: tri(0,0,1) }", "missing-header"),
        ],
    )
    def test_error_codes(self, text, code):
        result = parse_model(text)
        assert result.model is None
        assert code in codes(result)
        assert_spans_inside(text, result.diagnostics)

    def test_error_at_end_of_input_points_past_last_char(self):
        text = "fis a\ninput x range 0"
        result = parse_model(text)
        [diag] = [d for d in result.errors if d.code == "syntax"]
        assert diag.span == SourceSpan(2, 16, 0)

    def test_settings(self):
        m = load_model(DEMO + "\ndefuzz centroid\nsamples 2001")
        assert m.defuzz is Defuzz.SAMPLED_CENTROID
        assert m.sample_count == 2001

    def test_bytes_and_invalid_utf8(self):
        assert parse_model(DEMO.encode()).ok
        result = parse_model(b"fis a\n\xff\xfe")
        assert codes(result) == ["invalid-utf8"]
        assert result.errors[0].span == SourceSpan(2, 1, 1)

    def test_load_model_raises(self):
        with pytest.raises(DslError) as exc:
            load_model("")
        assert exc.value.diagnostics[0].code == "missing-header"


class TestTokenize:
    def test_spans(self):
        tokens, diags = tokenize("fis a\n  input")
        assert not diags
        assert [(t.kind, t.text, t.span) for t in tokens] == [
            ("keyword", "fis", SourceSpan(1, 1, 3)),
            ("ident", "a", SourceSpan(1, 5, 1)),
            ("keyword", "input", SourceSpan(2, 3, 5)),
            ("eof", "", SourceSpan(2, 8, 0)),
        ]


class TestSerialize:
    def test_golden_small_model(self):
        x = LinguisticVariable("x", (0, 1), {"lo": Triangular(0, 0, 1), "hi": Triangular(0, 1, 1)})
        y = LinguisticVariable("y", (-2.5, 2.5), {"neg": Gaussian(-1, 0.5), "pos": Gaussian(1, 0.5)})
        m = FisModel("tiny", (x,), (y,), (Rule((("x", "lo"),), (("y", "neg"),)),))
        assert serialize_model(m) == GOLDEN_SMALL
        assert load_model(GOLDEN_SMALL) == m

    def test_six_significant_digits(self):
        m = load_model(DEMO.replace("gauss(2,1.2)", "gauss(2.123456789,1.2)"))
        assert "gauss(2.12346, 1.2)" in serialize_model(m)

    def test_settings_written_only_when_not_default(self):
        base = load_model(DEMO)
        assert "defuzz" not in serialize_model(base)
        m = load_model(DEMO + "\ndefuzz centroid\nsamples 501")
        text = serialize_model(m)
        assert "defuzz centroid\nsamples 501\n" in text
        assert load_model(text) == m

    @pytest.mark.parametrize("phase", list(Phase))
    @pytest.mark.parametrize("mode", list(RuleMode))
    def test_incubator_round_trip(self, phase, mode):
        m = build_incubator_fis(phase, mode).model
        text = serialize_model(m)
        assert load_model(text) == m
        assert serialize_model(load_model(text)) == text

    def test_lf_and_single_spaces(self):
        text = serialize_model(build_incubator_fis(Phase.DAYS_1_TO_17).model)
        assert "\r" not in text and text.endswith("\n")
        assert "  " not in text.replace("\n  ", "\n")


@pytest.mark.parametrize("phase", list(Phase))
def test_shipped_files_match_builtin_profiles(phase):
    text = shipped_model_text(phase)
    model = build_incubator_fis(phase).model
    assert text == serialize_model(model)
    assert load_model(text) == model


class TestValidate:
    def test_incubator_has_no_errors_or_warnings(self, phase1, phase2):
        assert validate_model(phase1.model) == []
        assert validate_model(phase2.model) == []

    def test_unused_term(self, phase1):
        extra = LinguisticVariable(
            "fan", (0, 10), dict(phase1.model.output("fan").terms, turbo=Triangular(9, 10, 10))
        )
        m = FisModel("x", phase1.model.inputs, (phase1.model.output("heat"), extra), phase1.model.rules)
        diags = validate_model(m)
        assert [d.code for d in diags] == ["unused-term"]
        assert "fan.turbo" in diags[0].message

    def test_uncovered_region_after_deleting_rules(self, phase1_pairs):
        m = phase1_pairs.model
        kept = tuple(r for r in m.rules if ("temperature", "hot") not in r.antecedents)
        diags = validate_model(FisModel(m.name, m.inputs, m.outputs, kept))
        uncovered = [d for d in diags if d.code == "uncovered-region"]
        assert len(uncovered) == 1
        assert "'temperature' on [39.2, 80]" in uncovered[0].message
        assert all(d.severity is Severity.WARNING for d in diags)

    def test_warning_spans_point_at_source(self):
        result = parse_model(DEMO)
        unused = [d for d in result.diagnostics if d.code == "unused-term"]
        assert [span_text(DEMO, d.span) for d in unused] == ["optimal", "hot"]


# random valid models --------------------------------------------------------

names = st.from_regex(r"[a-z_][a-z0-9_]{0,7}", fullmatch=True).filter(
    lambda s: s not in {"fis", "input", "output", "range", "tri", "gauss", "if", "and", "then", "is", "defuzz", "samples"}
)
six_digit = st.integers(-99999, 99999).map(lambda i: i / 100)


@st.composite
def variables(draw, name):
    lo = draw(six_digit)
    hi = round(lo + draw(st.integers(1, 99999)) / 100, 2)
    span = hi - lo
    n_terms = draw(st.integers(2, 4))
    term_names = draw(st.lists(names, min_size=n_terms, max_size=n_terms, unique=True))
    terms = []
    for t in term_names:
        if draw(st.booleans()):
            pts = sorted(round(lo + draw(st.floats(0, 1)) * span, 2) for _ in range(3))
            if pts[0] == pts[2]:
                pts[2] = round(pts[0] + 0.01, 2)
            terms.append((t, Triangular(*pts)))
        else:
            terms.append((t, Gaussian(round(lo + draw(st.floats(0, 1)) * span, 2), draw(st.integers(1, 99999)) / 100)))
    return LinguisticVariable(name, (lo, hi), tuple(terms))


@st.composite
def models(draw):
    var_names = draw(st.lists(names, min_size=2, max_size=5, unique=True))
    n_in = draw(st.integers(1, len(var_names) - 1))
    inputs = [draw(variables(n)) for n in var_names[:n_in]]
    outputs = [draw(variables(n)) for n in var_names[n_in:]]
    rules = []
    for _ in range(draw(st.integers(1, 6))):
        ante_vars = draw(st.lists(st.sampled_from(inputs), min_size=1, max_size=len(inputs), unique_by=lambda v: v.name))
        cons_vars = draw(st.lists(st.sampled_from(outputs), min_size=1, max_size=len(outputs), unique_by=lambda v: v.name))
        rules.append(
            Rule(
                tuple((v.name, draw(st.sampled_from(v.term_names))) for v in ante_vars),
                tuple((v.name, draw(st.sampled_from(v.term_names))) for v in cons_vars),
            )
        )
    return FisModel(
        draw(names),
        tuple(inputs),
        tuple(outputs),
        tuple(rules),
        defuzz=draw(st.sampled_from(list(Defuzz))),
        sample_count=draw(st.sampled_from([1001, 1001, 501, 2001])),
    )


@given(models())
@settings(max_examples=200, deadline=None)
def test_random_models_round_trip(model):
    text = serialize_model(model)
    result = parse_model(text)
    assert result.ok, [str(d) for d in result.diagnostics]
    assert result.model == model
    assert serialize_model(result.model) == text


@given(st.binary(max_size=300))
@settings(max_examples=300, deadline=None)
def test_parser_survives_random_bytes(data):
    result = parse_model(data)
    assert result.model is None or isinstance(result.model, FisModel)
    if not result.ok:
        assert result.errors


TOKENS = ["fis", "input", "output", "range", "tri", "gauss", "if", "and", "then", "is", "{", "}", "(", ")", ",", ":",
          "x", "y", "a", "b", "0", "1", "-2.5", "10", "\n", "#c\n", "defuzz", "samples", "coa"]


@given(st.lists(st.sampled_from(TOKENS), max_size=60))
@settings(max_examples=300, deadline=None)
def test_parser_survives_token_soup(parts):
    text = " ".join(parts)
    result = parse_model(text)
    assert_spans_inside(text, result.diagnostics)


def test_every_error_span_is_inside_text_for_mutations(phase1):
    rng = random.Random(3)
    base = serialize_model(phase1.model)
    for _ in range(300):
        chars = list(base)
        for _ in range(rng.randint(1, 5)):
            i = rng.randrange(len(chars))
            op = rng.random()
            if op < 0.4:
                del chars[i]
            elif op < 0.8:
                chars.insert(i, rng.choice("{}(),:#x9 .-\n"))
            else:
                chars[i] = rng.choice("abz0")
        text = "".join(chars)
        result = parse_model(text)
        assert_spans_inside(text, result.errors)
