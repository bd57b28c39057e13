"""Theory file format: parsing, rendering, and extension serialization.

Surface syntax (.dft files, UTF-8, '%' comments):

    fact O ~b2.
    rule r: a1 =U> b1 (+) b2 (+) b3.
    rule s: O c, !I d => e.
    r > s.

'~' negates a literal, '!' negates a whole modal literal, '(+)' separates
chain alternatives, and the arrow carries the rule kind: '=>' belief,
'=O>' obligation, '=U>' outcome.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .core import (
    MODAL_MODES,
    BodyElement,
    Literal,
    Mode,
    Rule,
    RuleKind,
    Theory,
    normalize_chain,
)
from .refengine import Extension


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str
    snippet: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}\n    {self.snippet}"


class TheoryParseError(ValueError):
    """Carries every error found in the source, not just the first."""

    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("; ".join(f"{e.line}:{e.column}: {e.message}" for e in errors))


_ARROWS = {"=>": RuleKind.B, "=O>": RuleKind.O, "=U>": RuleKind.U}
_MODE_NAMES = {m.value for m in MODAL_MODES}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<arrow>=O>|=U>|=>)
      | (?P<oplus>\(\+\))
      | (?P<ident>[A-Za-z0-9_]+)
      | (?P<punct>[~!,.:>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(source: str) -> tuple[list[_Token], list[ParseError]]:
    tokens: list[_Token] = []
    errors: list[ParseError] = []
    line, col = 1, 1
    pos = 0
    lines = source.splitlines()
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            snippet = lines[line - 1] if line - 1 < len(lines) else ""
            errors.append(ParseError(line, col, f"unexpected character {source[pos]!r}", snippet))
            pos += 1
            col += 1
            continue
        kind = m.lastgroup or ""
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    return tokens, errors


class _Parser:
    def __init__(self, source: str):
        self.lines = source.splitlines()
        self.tokens, self.errors = _tokenize(source)
        self.pos = 0
        self.warnings: list[str] = []

    def _snippet(self, tok: _Token | None) -> str:
        if tok is None:
            return self.lines[-1] if self.lines else ""
        return self.lines[tok.line - 1] if tok.line - 1 < len(self.lines) else ""

    def error(self, message: str, tok: _Token | None = None) -> None:
        if tok is None and self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
        if tok is None:
            line = self.lines and len(self.lines) or 1
            self.errors.append(ParseError(line, 1, message, self._snippet(None)))
        else:
            self.errors.append(ParseError(tok.line, tok.column, message, self._snippet(tok)))

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token | None:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
        return tok

    def expect(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.text == text:
            self.pos += 1
            return True
        self.error(f"expected {text!r}", tok)
        return False

    def skip_to_period(self) -> None:
        while True:
            tok = self.next()
            if tok is None or tok.text == ".":
                return

    def parse_literal(self) -> Literal | None:
        neg = False
        tok = self.peek()
        if tok is not None and tok.text == "~":
            neg = True
            self.next()
            tok = self.peek()
        if tok is None or tok.kind != "ident":
            self.error("expected a literal", tok)
            return None
        self.next()
        return Literal(tok.text, not neg)

    def parse_mlit(self) -> BodyElement | None:
        tok = self.peek()
        if tok is None:
            self.error("expected a (modal) literal")
            return None
        negated = False
        if tok.text == "!":
            negated = True
            self.next()
            tok = self.peek()
            if tok is None or tok.text not in _MODE_NAMES:
                self.error("'!' must be followed by a mode (O, D, G, I, SI)", tok)
                return None
        if tok is not None and tok.text in _MODE_NAMES:
            after = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
            if after is not None and (after.kind == "ident" or after.text == "~"):
                self.next()
                lit = self.parse_literal()
                if lit is None:
                    return None
                return BodyElement(Mode(tok.text), lit, negated)
        if negated:
            self.error("'!' must be followed by a mode (O, D, G, I, SI)", tok)
            return None
        lit = self.parse_literal()
        return BodyElement.plain(lit) if lit is not None else None

    def parse_fact(self) -> BodyElement | None:
        self.next()  # 'fact'
        el = self.parse_mlit()
        if el is None:
            self.skip_to_period()
            return None
        if not self.expect("."):
            self.skip_to_period()
            return None
        return el

    def parse_rule(self) -> Rule | None:
        self.next()  # 'rule'
        tok = self.peek()
        if tok is None or tok.kind != "ident":
            self.error("expected a rule label", tok)
            self.skip_to_period()
            return None
        if tok.text in ("fact", "rule"):
            self.error(f"rule label may not be the keyword {tok.text!r}", tok)
            self.skip_to_period()
            return None
        label = tok.text
        self.next()
        if not self.expect(":"):
            self.skip_to_period()
            return None
        body: list[BodyElement] = []
        arrow_tok = self.peek()
        if arrow_tok is None or arrow_tok.kind != "arrow":
            while True:
                el = self.parse_mlit()
                if el is None:
                    self.skip_to_period()
                    return None
                body.append(el)
                tok = self.peek()
                if tok is not None and tok.text == ",":
                    self.next()
                    continue
                break
            arrow_tok = self.peek()
        if arrow_tok is None or arrow_tok.kind != "arrow":
            self.error("expected an arrow (=>, =O>, =U>)", arrow_tok)
            self.skip_to_period()
            return None
        kind = _ARROWS[arrow_tok.text]
        self.next()
        chain: list[Literal] = []
        while True:
            lit = self.parse_literal()
            if lit is None:
                self.skip_to_period()
                return None
            chain.append(lit)
            tok = self.peek()
            if tok is not None and tok.kind == "oplus":
                self.next()
                continue
            break
        if not self.expect("."):
            self.skip_to_period()
            return None
        if len(set(chain)) != len(chain):
            self.warnings.append(
                f"rule {label}: duplicate chain literal dropped (contraction keeps the leftmost)"
            )
        head = normalize_chain(chain)
        if any(l.complement() in head for l in head):
            self.warnings.append(f"rule {label}: head chain contains a literal and its complement")
        if kind is RuleKind.B and len(head) != 1:
            self.error(f"belief rule {label} must have a single-literal head", arrow_tok)
            return None
        return Rule(label, kind, frozenset(body), head)

    def parse_sup(self) -> tuple[str, str] | None:
        a = self.next()
        if a is None or a.kind != "ident":
            self.error("expected a statement (fact, rule, or superiority)", a)
            self.skip_to_period()
            return None
        if not self.expect(">"):
            self.skip_to_period()
            return None
        b = self.peek()
        if b is None or b.kind != "ident":
            self.error("expected a rule label after '>'", b)
            self.skip_to_period()
            return None
        self.next()
        if not self.expect("."):
            self.skip_to_period()
            return None
        return (a.text, b.text)

    def parse(self) -> Theory | None:
        facts: list[BodyElement] = []
        rules: list[Rule] = []
        sups: list[tuple[str, str, _Token]] = []
        labels: set[str] = set()
        while (tok := self.peek()) is not None:
            if tok.text == "fact":
                el = self.parse_fact()
                if el is not None:
                    facts.append(el)
            elif tok.text == "rule":
                rule = self.parse_rule()
                if rule is not None:
                    if rule.label in labels:
                        self.error(f"duplicate rule label {rule.label!r}", tok)
                    else:
                        labels.add(rule.label)
                        rules.append(rule)
            elif tok.kind == "ident":
                start = tok
                pair = self.parse_sup()
                if pair is not None:
                    sups.append((pair[0], pair[1], start))
            else:
                self.error(f"expected a statement, found {tok.text!r}", tok)
                self.skip_to_period()
        for a, b, tok in sups:
            for lbl in (a, b):
                if lbl not in labels:
                    self.error(f"superiority refers to unknown rule {lbl!r}", tok)
        if self.errors:
            return None
        return Theory(
            facts=frozenset(facts),
            rules=tuple(rules),
            superiority=frozenset((a, b) for a, b, _ in sups),
        )


def parse_theory_collect(source: str) -> tuple[Theory | None, list[ParseError], list[str]]:
    """Parse, collecting every error; returns (theory-or-None, errors, warnings)."""
    p = _Parser(source)
    theory = p.parse()
    return theory, p.errors, p.warnings


def parse_theory(source: str) -> Theory:
    """Parse or raise TheoryParseError carrying the full error list."""
    theory, errors, _ = parse_theory_collect(source)
    if theory is None:
        raise TheoryParseError(errors)
    return theory


def render_theory(theory: Theory) -> str:
    """Deterministic text for a theory; parse(render(t)) == t up to set order."""
    out: list[str] = []
    for f in sorted(theory.facts):
        out.append(f"fact {f}.")
    arrows = {RuleKind.B: "=>", RuleKind.O: "=O>", RuleKind.U: "=U>"}
    for r in theory.rules:
        body = ", ".join(str(e) for e in sorted(r.body))
        stmt = f"rule {r.label}:"
        if body:
            stmt += f" {body}"
        stmt += f" {arrows[r.kind]} {r.head}."
        out.append(stmt)
    for a, b in sorted(theory.superiority):
        out.append(f"{a} > {b}.")
    return "\n".join(out) + ("\n" if out else "")


def extension_to_dict(ext: Extension) -> dict:
    """JSON-shaped mapping with sorted literal lists per mode."""
    modes: dict[str, dict[str, list[str]]] = {}
    for mode in Mode:
        modes[mode.value] = {
            "plus": sorted(str(l) for l in ext.plus[mode]),
            "minus": sorted(str(l) for l in ext.minus[mode]),
            "undecided": sorted(str(l) for l in ext.undecided(mode)),
        }
    return {"modes": modes}


def serialize_extension(ext: Extension, format: str = "json") -> str:
    """Render an extension as JSON or a plain-text table; both deterministic."""
    data = extension_to_dict(ext)
    if format == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    if format != "text":
        raise ValueError(f"unknown format: {format!r}")
    lines = []
    for mode in Mode:
        part = data["modes"][mode.value]
        lines.append(f"[{mode.value}]")
        for key in ("plus", "minus", "undecided"):
            vals = ", ".join(part[key]) or "-"
            lines.append(f"  {key:<10} {vals}")
    return "\n".join(lines) + "\n"
