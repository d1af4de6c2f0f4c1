"""Hierarchy/object text format and entry rendering.

Grammar (``#`` comments run to end of line)::

    class  NAME [: PARENT ...] { (ATTR = VALUE)* }
    object NAME { (ATTR = VALUE)* }

Tokens are whitespace-delimited and may not contain ``{ } : = #``; the
single characters ``{ } : =`` are tokens on their own even without
surrounding spaces.  ``?`` is only accepted as a value inside object blocks.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .features import UNKNOWN, FeatureSet, ObjectSpec
from .hierarchy import ClassDecl, CompiledSet, Hierarchy
from .insertion import InsertionResult, IterationRecord, Payoff

_TOKEN = re.compile(r"[{}:=]|[^\s{}:=#]+")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class ObjectDecl:
    name: str
    features: FeatureSet


@dataclass(frozen=True)
class HierarchyDocument:
    hierarchy: Hierarchy
    objects: tuple[ObjectDecl, ...] = ()
    source: str = field(default="", compare=False)

    def object_decl(self, name: str) -> ObjectDecl | None:
        for o in self.objects:
            if o.name == name:
                return o
        return None

    def object_spec(self, name: str) -> ObjectSpec:
        """F for object ``name`` over the universe of hierarchy and object attributes."""
        decl = self.object_decl(name)
        if decl is None:
            raise KeyError(name)
        universe = self.hierarchy.attributes() | set(decl.features.attributes)
        return ObjectSpec(decl.name, decl.features, universe)


def tokenize(text: str) -> list[Token]:
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for m in _TOKEN.finditer(line):
            tokens.append(Token(m.group(), lineno, m.start() + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        lines = text.splitlines()
        self.end = (len(lines) or 1, len(lines[-1]) + 1 if lines else 1)

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expecting: str) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(*self.end, f"unexpected end of input, expected {expecting}")
        self.pos += 1
        return tok

    def name(self, what: str) -> Token:
        tok = self.next(what)
        if tok.text in "{}:=":
            raise ParseError(tok.line, tok.column, f"expected {what}, found {tok.text!r}")
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next(repr(text))
        if tok.text != text:
            raise ParseError(tok.line, tok.column, f"expected {text!r}, found {tok.text!r}")
        return tok

    def block(self, allow_unknown: bool) -> FeatureSet:
        self.expect("{")
        entries: dict[str, str] = {}
        while True:
            tok = self.peek()
            if tok is None:
                raise ParseError(*self.end, "unterminated block, expected '}'")
            if tok.text == "}":
                self.pos += 1
                return FeatureSet(entries.items())
            attr = self.name("attribute")
            self.expect("=")
            value = self.name("value")
            if attr.text in entries:
                raise ParseError(attr.line, attr.column, f"duplicate attribute {attr.text!r} in block")
            if value.text == UNKNOWN and not allow_unknown:
                raise ParseError(value.line, value.column, f"'?' is not allowed in a class block ({attr.text})")
            entries[attr.text] = value.text

    def document(self, source: str) -> HierarchyDocument:
        classes: list[ClassDecl] = []
        objects: list[ObjectDecl] = []
        seen: set[str] = set()
        seen_objects: set[str] = set()
        while (tok := self.peek()) is not None:
            self.pos += 1
            if tok.text == "class":
                name = self.name("class name")
                if name.text in seen:
                    raise ParseError(name.line, name.column, f"duplicate class name {name.text!r}")
                seen.add(name.text)
                parents: list[str] = []
                if self.peek() is not None and self.peek().text == ":":
                    self.pos += 1
                    while self.peek() is not None and self.peek().text != "{":
                        parents.append(self.name("parent name").text)
                classes.append(ClassDecl(name.text, tuple(parents), self.block(allow_unknown=False)))
            elif tok.text == "object":
                name = self.name("object name")
                if name.text in seen_objects:
                    raise ParseError(name.line, name.column, f"duplicate object name {name.text!r}")
                seen_objects.add(name.text)
                objects.append(ObjectDecl(name.text, self.block(allow_unknown=True)))
            else:
                raise ParseError(tok.line, tok.column, f"unknown keyword {tok.text!r}, expected 'class' or 'object'")
        return HierarchyDocument(Hierarchy(tuple(classes)), tuple(objects), source)


def parse(text: str) -> HierarchyDocument:
    return _Parser(text).document(text)


def _block(features: FeatureSet) -> list[str]:
    return ["{"] if not features else ["{", *(f"  {a} = {v}" for a, v in features)]


def render(doc: HierarchyDocument) -> str:
    """Canonical text: classes in declaration order, then objects; one feature per line."""
    chunks = []
    for c in doc.hierarchy:
        head = f"class {c.name}" + (f" : {' '.join(c.parents)}" if c.parents else "")
        lines = _block(c.local)
        chunks.append("\n".join([f"{head} {lines[0]}", *lines[1:], "}"]))
    for o in doc.objects:
        lines = _block(o.features)
        chunks.append("\n".join([f"object {o.name} {lines[0]}", *lines[1:], "}"]))
    return "\n\n".join(chunks) + "\n" if chunks else ""


def format_payoff(p: Payoff) -> str:
    p = Fraction(p)
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def _inline(features: FeatureSet) -> str:
    inner = " ".join(f"{a} = {v}" for a, v in features)
    return "{ " + inner + " }" if inner else "{ }"


def render_compiled(n: CompiledSet) -> str:
    lines = []
    for c in n:
        if c.weights is None:
            body = _inline(c.features)
        else:
            inner = " ".join(f"{a} = {v} @{format_payoff(c.weight(a))}" for a, v in c.features)
            body = "{ " + inner + " }" if inner else "{ }"
        lines.append(f"{c.name} {body}")
    return "\n".join(lines) + ("\n" if lines else "")


def render_entry(r: InsertionResult, trace: bool = False) -> str:
    """One-line entry ``name : P1 P2 { a = v } # cost k``, plus trace comments."""
    head = r.object + (" : " + " ".join(r.parents) if r.parents else "")
    lines = [f"{head} {_inline(r.local)} # cost {r.cost}"]
    if trace:
        for i, it in enumerate(r.trace, start=1):
            runners = ", ".join(f"{name} {format_payoff(p)}" for name, p in it.runners_up)
            lines.append(
                f"# {i}: {it.chosen} payoff {format_payoff(it.payoff)}"
                f" covers {_inline(it.covered_now)} clashes {_inline(it.new_clashes)}"
                f" runners-up [{runners}]"
            )
    return "\n".join(lines) + "\n"


_ENTRY = re.compile(r"^(?P<head>[^{#]*)\{(?P<body>[^}]*)\}\s*#\s*cost\s+(?P<cost>\d+)\s*$")


def parse_entry(line: str) -> InsertionResult:
    """Inverse of :func:`render_entry` for the entry line (trace comments are ignored)."""
    first = next(l for l in line.splitlines() if l.strip() and not l.lstrip().startswith("#"))
    m = _ENTRY.match(first.strip())
    if m is None:
        raise ValueError(f"not an entry line: {first!r}")
    head = m.group("head").split(":", 1)
    name = head[0].strip()
    parents = tuple(head[1].split()) if len(head) > 1 else ()
    words = m.group("body").split()
    if len(words) % 3 or any(words[i + 1] != "=" for i in range(0, len(words), 3)):
        raise ValueError(f"malformed local block in {first!r}")
    local = FeatureSet((words[i], words[i + 2]) for i in range(0, len(words), 3))
    r = InsertionResult(name, parents, local)
    if r.cost != int(m.group("cost")):
        raise ValueError(f"stated cost {m.group('cost')} differs from recomputed {r.cost}")
    return r


def _payoff_json(p: Payoff) -> int | str:
    p = Fraction(p)
    return p.numerator if p.denominator == 1 else format_payoff(p)


def _payoff_from_json(v: int | str) -> Payoff:
    p = Fraction(v)
    return p.numerator if p.denominator == 1 else p


def _pairs(fs: FeatureSet) -> list[list[str]]:
    return [[a, v] for a, v in fs]


def entry_to_json(r: InsertionResult, trace: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {
        "object": r.object,
        "parents": list(r.parents),
        "local": _pairs(r.local),
        "cost": r.cost,
        "trace": [],
    }
    if trace:
        out["trace"] = [
            {
                "chosen": it.chosen,
                "payoff": _payoff_json(it.payoff),
                "covered_now": _pairs(it.covered_now),
                "new_clashes": _pairs(it.new_clashes),
                "runners_up": [[name, _payoff_json(p)] for name, p in it.runners_up],
            }
            for it in r.trace
        ]
    return out


def entry_from_json(data: dict[str, Any]) -> InsertionResult:
    trace = tuple(
        IterationRecord(
            chosen=it["chosen"],
            payoff=_payoff_from_json(it["payoff"]),
            covered_now=FeatureSet(map(tuple, it["covered_now"])),
            new_clashes=FeatureSet(map(tuple, it["new_clashes"])),
            runners_up=tuple((name, _payoff_from_json(p)) for name, p in it["runners_up"]),
        )
        for it in data.get("trace", [])
    )
    r = InsertionResult(data["object"], tuple(data["parents"]), FeatureSet(map(tuple, data["local"])), trace)
    if "cost" in data and data["cost"] != r.cost:
        raise ValueError(f"stated cost {data['cost']} differs from recomputed {r.cost}")
    return r


def dumps_entry(r: InsertionResult, trace: bool = False) -> str:
    return json.dumps(entry_to_json(r, trace)) + "\n"
