"""Lexer and recursive-descent parser for ``.fnv`` model files."""

from __future__ import annotations

from dataclasses import dataclass, field

from .features import ALTERNATIVE, MANDATORY, OPTIONAL, OR, FeatureDiagram, FeatureNode, Group, ModChild
from .model import (
    ERROR, STEREOTYPES, BlockTemplate, ConnectorDecl, Diagnostic, FnvError, FunctionNetDef,
    InstanceRef, SourceLocation, diag, dotted, sort_diagnostics,
)
from .variants import Binding, BindingEntry
from .views import EnvBlock, ViewBlock, ViewDef

KEYWORDS = frozenset("""
    funcnet in out def block inst connect view of env ext features feature
    mandatory optional alternative or binding
""".split())

_SYMBOLS = ("]->", "->", "-[", "{", "}", ";", ",", ".", ":")


class ParseError(FnvError):
    def __init__(self, diagnostics):
        self.diagnostics = sort_diagnostics(diagnostics)
        first = self.diagnostics[0]
        super().__init__(f"{first.line}:{first.column}: {first.message}")


def _p0(message, line, column) -> Diagnostic:
    return diag("P0", ERROR, message, f"{line}:{column}", SourceLocation(line, column))


@dataclass(frozen=True)
class Token:
    kind: str  # ID, KW, SYM, EOF
    value: str
    line: int
    column: int

    @property
    def loc(self):
        return SourceLocation(self.line, self.column)

    def describe(self):
        if self.kind == "EOF":
            return "end of input"
        return repr(self.value)


class _SyntaxError(Exception):
    def __init__(self, message, line, column):
        super().__init__(message)
        self.line = line
        self.column = column


def tokenize(text: str) -> list[Token]:
    tokens = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(k):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n﻿":
            advance(1)
        elif text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance(1)
        elif text.startswith("/*", i):
            start_line, start_col = line, col
            end = text.find("*/", i + 2)
            if end < 0:
                raise _SyntaxError("unterminated comment", start_line, start_col)
            advance(end + 2 - i)
        elif ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append(Token("KW" if word in KEYWORDS else "ID", word, line, col))
            advance(j - i)
        else:
            for sym in _SYMBOLS:
                if text.startswith(sym, i):
                    tokens.append(Token("SYM", sym, line, col))
                    advance(len(sym))
                    break
            else:
                raise _SyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


@dataclass(frozen=True)
class Model:
    """Everything declared in one ``.fnv`` file, keyed by name per kind."""

    funcnets: dict[str, FunctionNetDef] = field(default_factory=dict)
    views: dict[str, ViewDef] = field(default_factory=dict)
    feature_diagrams: dict[str, FeatureDiagram] = field(default_factory=dict)
    bindings: dict[str, Binding] = field(default_factory=dict)

    def net(self, name) -> FunctionNetDef:
        from .model import UnknownNameError
        try:
            return self.funcnets[name]
        except KeyError:
            raise UnknownNameError(f"no funcnet named {name!r}") from None


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.errors: list[Diagnostic] = []

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def _fail(self, expected):
        t = self.tok
        raise _SyntaxError(f"expected {expected}, found {t.describe()}", t.line, t.column)

    def at(self, value, kind=None):
        t = self.tok
        return t.value == value and t.kind in ((kind,) if kind else ("KW", "SYM"))

    def accept(self, value):
        if self.at(value):
            self.pos += 1
            return True
        return False

    def expect(self, value):
        if not self.at(value):
            self._fail(repr(value))
        t = self.tok
        self.pos += 1
        return t

    def ident(self, what="identifier"):
        t = self.tok
        if t.kind != "ID":
            if t.kind == "KW":
                raise _SyntaxError(f"expected {what}, found keyword {t.value!r}", t.line, t.column)
            self._fail(what)
        self.pos += 1
        return t

    def path(self):
        parts = [self.ident("name").value]
        while self.accept("."):
            parts.append(self.ident("name").value)
        return tuple(parts)

    def semantic(self, message, loc: SourceLocation):
        self.errors.append(_p0(message, loc.line, loc.column))

    # -- grammar

    def parse_model(self) -> Model:
        model = Model()
        kinds = {
            "funcnet": (self.funcnet, model.funcnets),
            "view": (self.viewdef, model.views),
            "features": (self.featurediag, model.feature_diagrams),
            "binding": (self.binding, model.bindings),
        }
        while self.tok.kind != "EOF":
            entry = kinds.get(self.tok.value) if self.tok.kind == "KW" else None
            if entry is None:
                self._fail("'funcnet', 'view', 'features' or 'binding'")
            rule, table = entry
            item = rule()
            if item.name in table:
                self.semantic(f"duplicate {_kind_word(rule)} name {item.name}", item.loc)
            else:
                table[item.name] = item
        return model

    def funcnet(self) -> FunctionNetDef:
        start = self.expect("funcnet")
        name = self.ident("net name").value
        templates = []
        ins, outs, children, connectors = self.net_body(templates)
        seen = set()
        for t in templates:
            if t.name in seen:
                self.semantic(f"duplicate template name {t.name}", t.loc)
            seen.add(t.name)
        return FunctionNetDef(name, ins, outs, tuple(templates), children, connectors, start.loc)

    def net_body(self, templates):
        self.expect("{")
        ins, outs, children, connectors = [], [], [], []
        names = set()
        while not self.accept("}"):
            t = self.tok
            if self.at("in") or self.at("out"):
                self.pos += 1
                target = ins if t.value == "in" else outs
                for sig in self._ident_list("signal name"):
                    if sig.value in ins or sig.value in outs:
                        self.semantic(f"duplicate port {sig.value}", sig.loc)
                    else:
                        target.append(sig.value)
                self.expect(";")
            elif self.accept("def"):
                name = self.ident("template name")
                body = self.net_body(templates)
                templates.append(BlockTemplate(name.value, *body, loc=name.loc))
            elif self.accept("block"):
                name = self.ident("block name")
                if self.at("{"):
                    body = self.net_body(templates)
                else:
                    self.expect(";")
                    body = ((), (), (), ())
                self._sibling(names, name)
                children.append(BlockTemplate(name.value, *body, loc=name.loc))
            elif self.accept("inst"):
                template = self.ident("template name")
                name = self.ident("instance name")
                self.expect(";")
                self._sibling(names, name)
                children.append(InstanceRef(template.value, name.value, name.loc))
            elif self.at("connect"):
                connectors.append(self.connect())
            elif self.tok.kind == "EOF":
                self._fail("'}'")
            else:
                self._fail("'in', 'out', 'def', 'block', 'inst', 'connect' or '}'")
        return tuple(ins), tuple(outs), tuple(children), tuple(connectors)

    def _sibling(self, names, tok):
        if tok.value in names:
            self.semantic(f"duplicate sibling name {tok.value}", tok.loc)
        names.add(tok.value)

    def _ident_list(self, what):
        items = [self.ident(what)]
        while self.accept(","):
            items.append(self.ident(what))
        return items

    def connect(self) -> ConnectorDecl:
        start = self.expect("connect")
        source = self.path()
        stereotype = None
        if self.accept("-["):
            st = self.ident("stereotype M, E or H")
            if st.value not in STEREOTYPES:
                raise _SyntaxError(f"unknown connector stereotype {st.value!r} (expected M, E or H)",
                                   st.line, st.column)
            stereotype = st.value
            self.expect("]->")
        else:
            self.expect("->")
        first = self.tok
        targets = [self.path()]
        while self.accept(","):
            targets.append(self.path())
        if len(set(targets)) != len(targets):
            self.semantic("duplicate connector target", first.loc)
        signal = None
        if self.accept(":"):
            signal = self.ident("signal name").value
        self.expect(";")
        return ConnectorDecl(source, tuple(targets), signal, stereotype, start.loc)

    def viewdef(self) -> ViewDef:
        self.expect("view")
        name = self.ident("view name")
        self.expect("of")
        base_is_view = self.accept("view")
        base = self.ident("base name").value
        blocks, envs, connectors = self.view_body()
        return ViewDef(name.value, base, base_is_view, blocks, envs, connectors, name.loc)

    def view_body(self):
        self.expect("{")
        blocks, envs, connectors = [], [], []
        while not self.accept("}"):
            if self.accept("block"):
                t = self.tok
                path = self.path()
                if self.at("{"):
                    body = self.view_body()
                else:
                    self.expect(";")
                    body = ((), (), ())
                blocks.append(ViewBlock(path, False, *body, loc=t.loc))
            elif self.accept("ext"):
                t = self.tok
                path = self.path()
                self.expect(";")
                blocks.append(ViewBlock(path, True, loc=t.loc))
            elif self.accept("env"):
                name = self.ident("environment block name")
                self.expect(";")
                envs.append(EnvBlock(name.value, name.loc))
            elif self.at("connect"):
                connectors.append(self.connect())
            elif self.tok.kind == "EOF":
                self._fail("'}'")
            else:
                self._fail("'block', 'ext', 'env', 'connect' or '}'")
        return tuple(blocks), tuple(envs), tuple(connectors)

    def featurediag(self) -> FeatureDiagram:
        self.expect("features")
        name = self.ident("feature diagram name")
        self.expect("{")
        self.expect("feature")
        root = self.feature(root=True)
        self.expect("}")
        return FeatureDiagram(name.value, root, name.loc)

    def feature(self, root=False) -> FeatureNode:
        name = self.ident("feature name")
        if not self.at("{"):
            if not root:
                self.expect(";")
            return FeatureNode(name.value, (), name.loc)
        self.expect("{")
        items = []
        while not self.accept("}"):
            t = self.tok
            if self.at("mandatory") or self.at("optional"):
                self.pos += 1
                self.expect("feature")
                child = self.feature()
                items.append(ModChild(MANDATORY if t.value == "mandatory" else OPTIONAL, child))
            elif self.at("alternative") or self.at("or"):
                self.pos += 1
                self.expect("{")
                members = []
                while not self.accept("}"):
                    self.expect("feature")
                    members.append(self.feature())
                if not members:
                    raise _SyntaxError(f"empty {t.value} group", t.line, t.column)
                items.append(Group(ALTERNATIVE if t.value == "alternative" else OR, tuple(members), t.loc))
            elif self.tok.kind == "EOF":
                self._fail("'}'")
            else:
                self._fail("'mandatory', 'optional', 'alternative', 'or' or '}'")
        return FeatureNode(name.value, tuple(items), name.loc)

    def binding(self) -> Binding:
        self.expect("binding")
        diagram = self.ident("feature diagram name")
        self.expect("->")
        net = self.ident("funcnet name")
        self.expect("{")
        entries = []
        seen = set()
        while not self.accept("}"):
            feature = self.ident("feature name")
            self.expect(":")
            self.expect("view")
            view = self.ident("view name")
            self.expect(";")
            if feature.value in seen:
                self.semantic(f"feature {feature.value} bound twice", feature.loc)
            seen.add(feature.value)
            entries.append(BindingEntry(feature.value, view.value, feature.loc))
        return Binding(diagram.value, diagram.value, net.value, tuple(entries), diagram.loc)


def _kind_word(rule) -> str:
    return {"funcnet": "funcnet", "viewdef": "view", "featurediag": "feature diagram",
            "binding": "binding"}[rule.__name__]


def _check_references(model: Model, errors: list):
    def err(message, loc):
        loc = loc or SourceLocation(1, 1)
        errors.append(_p0(message, loc.line, loc.column))

    for v in model.views.values():
        if v.base_is_view:
            if v.base not in model.views:
                err(f"view {v.name}: base view {v.base} is not defined", v.loc)
        elif v.base not in model.funcnets:
            hint = "; write 'of view " + v.base + "'" if v.base in model.views else ""
            err(f"view {v.name}: base funcnet {v.base} is not defined{hint}", v.loc)
    for b in model.bindings.values():
        if b.diagram not in model.feature_diagrams:
            err(f"binding {b.name}: feature diagram {b.diagram} is not defined", b.loc)
        if b.net not in model.funcnets:
            err(f"binding {b.name}: funcnet {b.net} is not defined", b.loc)


def parse(text: str) -> Model:
    """Parse model text.  Raises :class:`ParseError` carrying P0 diagnostics."""
    try:
        parser = Parser(text)
        model = parser.parse_model()
    except _SyntaxError as e:
        raise ParseError([_p0(str(e), e.line, e.column)]) from None
    errors = list(parser.errors)
    _check_references(model, errors)
    if errors:
        raise ParseError(errors)
    return model


def parse_file(path) -> Model:
    with open(path, encoding="utf-8") as f:
        return parse(f.read())


__all__ = ["KEYWORDS", "Model", "ParseError", "Parser", "Token", "dotted", "parse", "parse_file", "tokenize"]
