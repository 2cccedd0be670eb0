"""The ``.fis`` text format: lexer, recursive-descent parser, validator, serializer.

Grammar::

    model    := "fis" IDENT (setting | variable | rule)*
    setting  := "defuzz" ("coa" | "centroid") | "samples" INTEGER
    variable := ("input" | "output") IDENT "range" NUMBER NUMBER "{" term+ "}"
    term     := IDENT ":" ( "tri" "(" NUMBER "," NUMBER "," NUMBER ")"
                          | "gauss" "(" NUMBER "," NUMBER ")" )
    rule     := "if" cond ("and" cond)* "then" cond ("," cond)*
    cond     := IDENT "is" IDENT

``#`` starts a comment running to end of line. Numbers are plain decimals
with an optional sign; there is no exponent form. Settings are optional
and only written out when they differ from the defaults.

The parser resynchronises at the next statement keyword after an error,
so one pass reports every independent problem.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._format import fmt6
from .errors import FuzzyError
from .fis import DEFAULT_SAMPLE_COUNT, Defuzz, FisModel, LinguisticVariable, Rule, model_violations
from .membership import Gaussian, MembershipFunction, Triangular

COVERAGE_GRID = 101

KEYWORDS = frozenset(
    {"fis", "input", "output", "range", "tri", "gauss", "if", "and", "then", "is", "defuzz", "samples"}
)
STATEMENT_START = frozenset({"input", "output", "if", "defuzz", "samples", "fis"})
DEFUZZ_NAMES = {"coa": Defuzz.PAPER_COA, "centroid": Defuzz.SAMPLED_CENTROID}


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


NO_SPAN = SourceSpan(1, 1, 0)


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    span: SourceSpan
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.span}: {self.severity.value}[{self.code}]: {self.message}"


class DslError(FuzzyError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d.severity is Severity.ERROR]
        super().__init__("\n".join(str(d) for d in errors) or "invalid model")


@dataclass(frozen=True)
class ParseResult:
    model: FisModel | None
    diagnostics: list[Diagnostic]

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.WARNING]

    @property
    def ok(self) -> bool:
        return self.model is not None


# --------------------------------------------------------------------- lexing


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "keyword", "number", "punct", "eof"
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)"
    r"|(?P<newline>\n)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<number>[+-]?(?:\d+(?:\.\d*)?|\.\d+))"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[{}(),:])"
)


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            diags.append(_error(SourceSpan(line, col, 1), "unexpected-character", f"unexpected character {ch!r}"))
            pos += 1
            continue
        kind = m.lastgroup
        value = m.group()
        if kind == "newline":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("keyword" if value in KEYWORDS else "ident", value, SourceSpan(line, col, len(value))))
        elif kind in ("number", "punct"):
            tokens.append(Token(kind, value, SourceSpan(line, col, len(value))))
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(line, pos - line_start + 1, 0)))
    return tokens, diags


def _error(span: SourceSpan, code: str, message: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, span, code, message)


def _warning(span: SourceSpan, code: str, message: str) -> Diagnostic:
    return Diagnostic(Severity.WARNING, span, code, message)


# -------------------------------------------------------------------- parsing


class _SyntaxError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


@dataclass
class _TermDef:
    name: str
    span: SourceSpan
    mf: MembershipFunction | None


@dataclass
class _VariableDef:
    role: str
    name: str
    span: SourceSpan
    lo: float
    hi: float
    range_span: SourceSpan
    terms: list[_TermDef] = field(default_factory=list)


@dataclass
class _RuleDef:
    span: SourceSpan
    antecedents: list[tuple[Token, Token]]
    consequents: list[tuple[Token, Token]]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diags: list[Diagnostic] = []
        self.name: str | None = None
        self.header_span = NO_SPAN
        self.variables: list[_VariableDef] = []
        self.rules: list[_RuleDef] = []
        self.defuzz = Defuzz.PAPER_COA
        self.sample_count = DEFAULT_SAMPLE_COUNT

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_keyword(self, *words: str) -> bool:
        return self.tok.kind == "keyword" and self.tok.text in words

    def fail(self, expected: str) -> _SyntaxError:
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return _SyntaxError(_error(tok.span, "syntax", f"expected {expected}, found {found}"))

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            raise self.fail(repr(word))
        return self.advance()

    def expect_punct(self, ch: str) -> Token:
        if self.tok.kind != "punct" or self.tok.text != ch:
            raise self.fail(repr(ch))
        return self.advance()

    def expect_ident(self, what: str) -> Token:
        if self.tok.kind != "ident":
            if self.tok.kind == "keyword":
                raise _SyntaxError(
                    _error(self.tok.span, "reserved-word", f"{self.tok.text!r} is reserved and cannot name {what}")
                )
            raise self.fail(what)
        return self.advance()

    def expect_number(self) -> tuple[float, Token]:
        if self.tok.kind != "number":
            raise self.fail("a number")
        tok = self.advance()
        value = float(tok.text)
        if not math.isfinite(value):
            raise _SyntaxError(_error(tok.span, "bad-number", f"number {tok.text[:20]!r} is out of range"))
        return value, tok

    def synchronize(self) -> None:
        # always consume at least one token so recovery makes progress
        self.advance()
        while self.tok.kind != "eof" and not self.at_keyword(*STATEMENT_START):
            self.advance()

    # grammar

    def parse(self) -> None:
        if not self.at_keyword("fis"):
            self.diags.append(_error(self.tok.span, "missing-header", "model must start with 'fis <name>'"))
            if self.tok.kind == "eof":
                return
            self.synchronize_to_statement()
        else:
            try:
                self.header_span = self.advance().span
                self.name = self.expect_ident("the model").text
            except _SyntaxError as exc:
                self.diags.append(exc.diagnostic)
                self.synchronize()
        while self.tok.kind != "eof":
            try:
                self.statement()
            except _SyntaxError as exc:
                self.diags.append(exc.diagnostic)
                self.synchronize()

    def synchronize_to_statement(self) -> None:
        while self.tok.kind != "eof" and not self.at_keyword(*STATEMENT_START):
            self.advance()

    def statement(self) -> None:
        if self.at_keyword("input", "output"):
            self.variable()
        elif self.at_keyword("if"):
            self.rule()
        elif self.at_keyword("defuzz"):
            self.advance()
            tok = self.tok
            if tok.kind != "ident" or tok.text not in DEFUZZ_NAMES:
                raise self.fail("'coa' or 'centroid'")
            self.defuzz = DEFUZZ_NAMES[self.advance().text]
        elif self.at_keyword("samples"):
            self.advance()
            value, tok = self.expect_number()
            if not tok.text.lstrip("+").isdigit() or value < 2:
                raise _SyntaxError(_error(tok.span, "bad-sample-count", "samples must be an integer >= 2"))
            self.sample_count = int(value)
        elif self.at_keyword("fis"):
            raise _SyntaxError(_error(self.tok.span, "duplicate-header", "only one 'fis' header is allowed"))
        else:
            raise self.fail("'input', 'output', 'if', 'defuzz' or 'samples'")

    def variable(self) -> None:
        role = self.advance().text
        name = self.expect_ident("a variable")
        self.expect_keyword("range")
        lo, lo_tok = self.expect_number()
        hi, hi_tok = self.expect_number()
        range_span = SourceSpan(lo_tok.span.line, lo_tok.span.column, _span_len(lo_tok.span, hi_tok.span))
        var = _VariableDef(role, name.text, name.span, lo, hi, range_span)
        self.variables.append(var)
        self.expect_punct("{")
        while True:
            var.terms.append(self.term())
            if self.tok.kind == "punct" and self.tok.text == "}":
                self.advance()
                return
            if self.tok.kind != "ident":
                raise self.fail("a term or '}'")

    def term(self) -> _TermDef:
        name = self.expect_ident("a term")
        self.expect_punct(":")
        shape = self.tok
        if self.at_keyword("tri"):
            self.advance()
            self.expect_punct("(")
            a, _ = self.expect_number()
            self.expect_punct(",")
            m, _ = self.expect_number()
            self.expect_punct(",")
            b, _ = self.expect_number()
            close = self.expect_punct(")")
            span = SourceSpan(shape.span.line, shape.span.column, _span_len(shape.span, close.span))
            if not (a <= m <= b and a < b):
                self.diags.append(_error(span, "bad-triangle", f"term {name.text!r}: tri needs a <= m <= b and a < b"))
                return _TermDef(name.text, name.span, None)
            return _TermDef(name.text, name.span, Triangular(a, m, b))
        if self.at_keyword("gauss"):
            self.advance()
            self.expect_punct("(")
            m, _ = self.expect_number()
            self.expect_punct(",")
            k, _ = self.expect_number()
            close = self.expect_punct(")")
            span = SourceSpan(shape.span.line, shape.span.column, _span_len(shape.span, close.span))
            if k <= 0:
                self.diags.append(_error(span, "bad-gaussian", f"term {name.text!r}: gauss spread must be > 0"))
                return _TermDef(name.text, name.span, None)
            return _TermDef(name.text, name.span, Gaussian(m, k))
        raise self.fail("'tri' or 'gauss'")

    def rule(self) -> None:
        start = self.advance()
        antecedents = [self.condition()]
        while self.at_keyword("and"):
            self.advance()
            antecedents.append(self.condition())
        self.expect_keyword("then")
        consequents = [self.condition()]
        while self.tok.kind == "punct" and self.tok.text == ",":
            self.advance()
            consequents.append(self.condition())
        end = consequents[-1][1].span
        self.rules.append(_RuleDef(SourceSpan(start.span.line, start.span.column, _span_len(start.span, end)),
                                   antecedents, consequents))

    def condition(self) -> tuple[Token, Token]:
        var = self.expect_ident("a variable")
        self.expect_keyword("is")
        term = self.expect_ident("a term")
        return var, term


def _span_len(first: SourceSpan, last: SourceSpan) -> int:
    if first.line != last.line:
        return first.length
    return last.column + last.length - first.column


# ------------------------------------------------------------- model building


def _build(parser: _Parser) -> tuple[FisModel | None, list[Diagnostic], dict]:
    diags: list[Diagnostic] = []
    spans: dict = {}
    variables: dict[str, _VariableDef] = {}
    for var in parser.variables:
        if var.name in variables:
            diags.append(_error(var.span, "duplicate-variable", f"variable {var.name!r} is already defined"))
            continue
        variables[var.name] = var
        spans[("variable", var.name)] = var.span
        if not var.lo < var.hi:
            diags.append(_error(var.range_span, "bad-range", f"variable {var.name!r}: range needs lo < hi"))
        seen = set()
        for term in var.terms:
            if term.name in seen:
                diags.append(_error(term.span, "duplicate-term", f"variable {var.name!r} already has term {term.name!r}"))
                continue
            seen.add(term.name)
            spans[("term", var.name, term.name)] = term.span
            if term.mf is not None and var.lo < var.hi:
                s_lo, s_hi = term.mf.support
                if s_hi < var.lo or s_lo > var.hi:
                    diags.append(_error(term.span, "term-outside-range",
                                        f"term {term.name!r} lies entirely outside {var.name!r} range"))

    roles = {"input": "an input", "output": "an output"}
    for i, rule in enumerate(parser.rules):
        spans[("rule", i)] = rule.span
        for side, role in ((rule.antecedents, "input"), (rule.consequents, "output")):
            used = set()
            for var_tok, term_tok in side:
                var = variables.get(var_tok.text)
                if var is None:
                    diags.append(_error(var_tok.span, "unknown-variable", f"unknown variable {var_tok.text!r}"))
                    continue
                if var.role != role:
                    where = "condition" if role == "input" else "conclusion"
                    diags.append(_error(var_tok.span, "wrong-role",
                                        f"{var.name!r} is {roles[var.role]} and cannot appear in a {where}"))
                    continue
                if var.name in used:
                    diags.append(_error(var_tok.span, "duplicate-reference",
                                        f"{var.name!r} appears twice on one side of the rule"))
                    continue
                used.add(var.name)
                if not any(t.name == term_tok.text for t in var.terms):
                    diags.append(_error(term_tok.span, "unknown-term",
                                        f"variable {var.name!r} has no term {term_tok.text!r}"))

    if parser.name is not None:
        anchor = parser.header_span
        if not any(v.role == "input" for v in variables.values()):
            diags.append(_error(anchor, "no-inputs", "model declares no input variables"))
        if not any(v.role == "output" for v in variables.values()):
            diags.append(_error(anchor, "no-outputs", "model declares no output variables"))
        if not parser.rules:
            diags.append(_error(anchor, "no-rules", "model declares no rules"))

    if parser.diags or diags or parser.name is None:
        return None, diags, spans

    def lv(v: _VariableDef) -> LinguisticVariable:
        return LinguisticVariable(v.name, (v.lo, v.hi), tuple((t.name, t.mf) for t in v.terms))

    model = FisModel(
        name=parser.name,
        inputs=tuple(lv(v) for v in variables.values() if v.role == "input"),
        outputs=tuple(lv(v) for v in variables.values() if v.role == "output"),
        rules=tuple(
            Rule(tuple((v.text, t.text) for v, t in r.antecedents), tuple((v.text, t.text) for v, t in r.consequents))
            for r in parser.rules
        ),
        defuzz=parser.defuzz,
        sample_count=parser.sample_count,
    )
    return model, diags, spans


def _decode(data: bytes) -> tuple[str | None, Diagnostic | None]:
    try:
        return data.decode("utf-8"), None
    except UnicodeDecodeError as exc:
        prefix = data[: exc.start]
        line = prefix.count(b"\n") + 1
        column = len(prefix) - (prefix.rfind(b"\n") + 1) + 1
        return None, _error(SourceSpan(line, column, 1), "invalid-utf8", "input is not valid UTF-8")


def parse_model(text: str | bytes) -> ParseResult:
    """Parse a ``.fis`` document.

    Never raises on malformed input; problems come back as diagnostics and
    ``model`` is ``None`` whenever any of them is an error.
    """
    if isinstance(text, (bytes, bytearray)):
        decoded, problem = _decode(bytes(text))
        if problem is not None:
            return ParseResult(None, [problem])
        text = decoded
    tokens, lex_diags = tokenize(text)
    parser = _Parser(tokens)
    parser.parse()
    model, sem_diags, spans = _build(parser)
    diags = lex_diags + parser.diags + sem_diags
    if model is not None:
        diags.extend(validate_model(model, spans))
    diags.sort(key=lambda d: (d.span.line, d.span.column))
    if any(d.severity is Severity.ERROR for d in diags):
        model = None
    return ParseResult(model, diags)


def load_model(text: str | bytes) -> FisModel:
    """Like :func:`parse_model` but raise :class:`DslError` on errors."""
    result = parse_model(text)
    if result.model is None:
        raise DslError(result.diagnostics)
    return result.model


def read_model(path) -> FisModel:
    with open(path, "rb") as fh:
        return load_model(fh.read())


# ----------------------------------------------------------------- validation


def validate_model(model: FisModel, spans: Mapping | None = None) -> list[Diagnostic]:
    """Invariant errors plus warnings for unused terms and uncovered inputs.

    ``spans`` maps ``("term", var, term)``, ``("variable", var)`` and
    ``("rule", index)`` keys to source locations; without it every
    diagnostic points at the start of the document.
    """
    spans = spans or {}
    diags = [_error(NO_SPAN, code, message) for code, message in model_violations(model)]

    used: set[tuple[str, str]] = set()
    for rule in model.rules:
        used.update(rule.antecedents)
        used.update(rule.consequents)
    for var in model.inputs + model.outputs:
        var_span = spans.get(("variable", var.name), NO_SPAN)
        if len(var.terms) < 2:
            diags.append(_warning(var_span, "single-term", f"variable {var.name!r} has only one term"))
        for term in var.term_names:
            if (var.name, term) not in used:
                diags.append(_warning(spans.get(("term", var.name, term), var_span), "unused-term",
                                      f"term {var.name}.{term} is not used by any rule"))

    for var in model.inputs:
        lo, hi = var.universe
        xs = np.linspace(lo, hi, COVERAGE_GRID)
        covered = np.zeros(COVERAGE_GRID, dtype=bool)
        for rule in model.rules:
            terms = [t for v, t in rule.antecedents if v == var.name]
            if not terms:
                covered[:] = True
                break
            covered |= var.term(terms[0]).evaluate(xs) > 0.0
        if not covered.all():
            gaps = _runs(xs, ~covered)
            where = ", ".join(f"[{fmt6(a)}, {fmt6(b)}]" for a, b in gaps)
            diags.append(_warning(spans.get(("variable", var.name), NO_SPAN), "uncovered-region",
                                  f"no rule responds to {var.name!r} on {where}"))
    return diags


def _runs(xs: np.ndarray, mask: np.ndarray) -> list[tuple[float, float]]:
    runs = []
    start = None
    for x, flag in zip(xs, mask):
        if flag and start is None:
            start = x
        if flag:
            end = x
        elif start is not None:
            runs.append((float(start), float(end)))
            start = None
    if start is not None:
        runs.append((float(start), float(end)))
    return runs


# -------------------------------------------------------------- serialization


def _mf_text(mf: MembershipFunction) -> str:
    if isinstance(mf, Triangular):
        return f"tri({fmt6(mf.a)}, {fmt6(mf.m)}, {fmt6(mf.b)})"
    return f"gauss({fmt6(mf.m)}, {fmt6(mf.k)})"


def serialize_model(model: FisModel) -> str:
    """Canonical text: LF endings, six significant digits, rules in order."""
    lines = [f"fis {model.name}"]
    if model.defuzz is not Defuzz.PAPER_COA:
        lines.append(f"defuzz {model.defuzz.value}")
    if model.sample_count != DEFAULT_SAMPLE_COUNT:
        lines.append(f"samples {model.sample_count}")
    for role, variables in (("input", model.inputs), ("output", model.outputs)):
        for var in variables:
            lo, hi = var.universe
            lines.append(f"{role} {var.name} range {fmt6(lo)} {fmt6(hi)} {{")
            lines.extend(f"  {name}: {_mf_text(mf)}" for name, mf in var.terms)
            lines.append("}")
    for rule in model.rules:
        cond = " and ".join(f"{v} is {t}" for v, t in rule.antecedents)
        concl = ", ".join(f"{v} is {t}" for v, t in rule.consequents)
        lines.append(f"if {cond} then {concl}")
    return "\n".join(lines) + "\n"
