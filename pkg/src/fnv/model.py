"""Semantic model of function nets and their elaboration into instance trees.

A function net is written as a tree of block declarations plus reusable
block templates.  Elaboration expands every template instance in place,
assigns dotted qualified names by position in the hierarchy and resolves
connector endpoints to absolute names.  The result, an :class:`InstanceTree`,
is the complete ("150 percent") net that every other analysis works on.

Qualified names are tuples of identifiers.  The empty tuple stands for the
net boundary, i.e. the environment that feeds the net's ``in`` signals and
consumes its ``out`` signals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, Union

QName = tuple[str, ...]
BOUNDARY: QName = ()

ERROR = "error"
WARNING = "warning"

STEREOTYPES = ("M", "E", "H")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def is_identifier(text: str) -> bool:
    return bool(_IDENT.match(text))


def as_qname(name: Union[str, QName]) -> QName:
    """Accept ``"CLS.door_fl"`` or ``("CLS", "door_fl")``."""
    if isinstance(name, str):
        return tuple(name.split(".")) if name else BOUNDARY
    return tuple(name)


def dotted(q: QName) -> str:
    return ".".join(q)


class FnvError(Exception):
    """Base class for errors raised by the toolchain."""


class UnknownNameError(FnvError):
    pass


class ElaborationError(FnvError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))


@dataclass(frozen=True)
class SourceLocation:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    """One finding of a checker.

    ``code`` is one of P0, N1-N6, R1-R6, F1-F3, B1-B3.
    """

    code: str
    severity: str
    message: str
    subject: str
    line: int | None = None
    column: int | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def sort_key(self):
        return (self.code, self.subject, self.message, self.line or 0, self.column or 0)


def diag(code, severity, message, subject, loc: SourceLocation | None = None) -> Diagnostic:
    if loc is None:
        return Diagnostic(code, severity, message, subject)
    return Diagnostic(code, severity, message, subject, loc.line, loc.column)


def sort_diagnostics(diagnostics) -> list[Diagnostic]:
    return sorted(set(diagnostics), key=Diagnostic.sort_key)


def has_errors(diagnostics) -> bool:
    return any(d.is_error for d in diagnostics)


# -- declarations ----------------------------------------------------------


@dataclass(frozen=True)
class ConnectorDecl:
    """``connect source -> t1, t2 : SIGNAL;`` with paths relative to its scope."""

    source: QName
    targets: tuple[QName, ...]
    signal: str | None = None
    stereotype: str | None = None
    loc: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class InstanceRef:
    template: str
    name: str
    loc: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class BlockTemplate:
    """A block body: owned sub-blocks, template instances and connectors.

    Used both for ``def`` templates and for blocks declared in place.
    """

    name: str
    in_ports: tuple[str, ...] = ()
    out_ports: tuple[str, ...] = ()
    children: tuple[Union["BlockTemplate", InstanceRef], ...] = ()
    connectors: tuple[ConnectorDecl, ...] = ()
    loc: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FunctionNetDef:
    name: str
    in_ports: tuple[str, ...] = ()
    out_ports: tuple[str, ...] = ()
    templates: tuple[BlockTemplate, ...] = ()
    children: tuple[Union[BlockTemplate, InstanceRef], ...] = ()
    connectors: tuple[ConnectorDecl, ...] = ()
    loc: SourceLocation | None = field(default=None, compare=False)

    @property
    def body(self) -> BlockTemplate:
        return BlockTemplate(self.name, self.in_ports, self.out_ports,
                             self.children, self.connectors, self.loc)

    def template(self, name: str) -> BlockTemplate | None:
        for t in self.templates:
            if t.name == name:
                return t
        return None


# -- elaborated form ---------------------------------------------------------


@dataclass(frozen=True)
class InstanceNode:
    qname: QName
    children: tuple["InstanceNode", ...] = ()
    in_ports: tuple[str, ...] = ()
    out_ports: tuple[str, ...] = ()
    template: str | None = None

    @property
    def name(self) -> str:
        return self.qname[-1]

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class Connector:
    """A connector with absolute endpoints.

    ``signal`` is the net-wide signal name; connectors declared inside a
    template carry the instance path as prefix.  ``local_signal`` keeps the
    name as written.
    """

    source: QName
    targets: tuple[QName, ...]
    signal: str | None
    stereotype: str | None = None
    local_signal: str | None = None
    loc: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class InstanceTree:
    net_name: str
    roots: tuple[InstanceNode, ...]
    connectors: tuple[Connector, ...]
    in_ports: tuple[str, ...] = ()
    out_ports: tuple[str, ...] = ()

    def walk(self) -> Iterator[InstanceNode]:
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    @cached_property
    def nodes(self) -> dict[QName, InstanceNode]:
        return {n.qname: n for n in self.walk()}

    def leaves(self) -> list[InstanceNode]:
        return [n for n in self.walk() if n.is_leaf]

    def node(self, name) -> InstanceNode:
        q = as_qname(name)
        try:
            return self.nodes[q]
        except KeyError:
            raise UnknownNameError(f"no block {dotted(q)!r} in net {self.net_name}") from None

    def render(self, q: QName) -> str:
        return dotted(q) if q else self.net_name


def in_subtree(root: QName, q: QName) -> bool:
    """True if ``q`` equals ``root`` or lies below it.  The boundary is in no subtree."""
    return bool(root) and q[:len(root)] == root


def is_descendant(tree: InstanceTree, a, b) -> bool:
    """True iff block ``b`` is a (transitive) part of block ``a``."""
    qa = tree.node(a).qname
    qb = tree.node(b).qname
    return len(qa) < len(qb) and qb[:len(qa)] == qa


def signals_between(tree: InstanceTree, a, b) -> set[str]:
    """Signals sent from inside ``a`` and received somewhere inside ``b``."""
    return _signals_between(tree, tree.node(a).qname, tree.node(b).qname)


def _covers(root: QName, q: QName) -> bool:
    return q == root if not root else in_subtree(root, q)


def _signals_between(tree: InstanceTree, a: QName, b: QName) -> set[str]:
    found = set()
    for c in tree.connectors:
        if c.signal is None or not _covers(a, c.source):
            continue
        if any(_covers(b, t) for t in c.targets):
            found.add(c.signal)
    return found


def connectors_between(tree: InstanceTree, a: QName, b: QName) -> list[Connector]:
    """Like :func:`signals_between` but also accepts the boundary and keeps
    signal-less connectors."""
    return [c for c in tree.connectors
            if _covers(a, c.source) and any(_covers(b, t) for t in c.targets)]


# -- elaboration ---------------------------------------------------------------


def _instance_refs(block: BlockTemplate) -> Iterator[InstanceRef]:
    for child in block.children:
        if isinstance(child, InstanceRef):
            yield child
        else:
            yield from _instance_refs(child)


def recursive_templates(net: FunctionNetDef) -> dict[str, list[str]]:
    """Map each template that (transitively) instantiates itself to one cycle."""
    graph = {t.name: [r.template for r in _instance_refs(t)] for t in net.templates}
    cycles = {}
    for start in graph:
        # DFS for a path back to start
        stack = [(start, [start])]
        seen = set()
        while stack:
            cur, path = stack.pop()
            for nxt in graph.get(cur, ()):
                if nxt == start:
                    cycles[start] = path + [start]
                    stack.clear()
                    break
                if nxt not in seen and nxt in graph:
                    seen.add(nxt)
                    stack.append((nxt, path + [nxt]))
    return cycles


class _Elaborator:
    def __init__(self, net: FunctionNetDef):
        self.net = net
        self.diagnostics: list[Diagnostic] = []
        self.pending = []
        self.templates: dict[str, BlockTemplate] = {}
        for t in net.templates:
            if t.name in self.templates:
                self._error("N5", f"duplicate template name {t.name}", t.name, t.loc)
            else:
                self.templates[t.name] = t
        self.cycles = recursive_templates(net)
        for name, cycle in sorted(self.cycles.items()):
            self._error("N5", "recursive template instantiation: " + " -> ".join(cycle),
                        name, self.templates[name].loc)

    def _error(self, code, message, subject, loc=None):
        self.diagnostics.append(diag(code, ERROR, message, subject, loc))

    def run(self) -> InstanceTree:
        net = self.net
        chain = ((BOUNDARY, net.name),)
        roots = self._children(net.children, BOUNDARY, chain, None)
        self.pending.extend((c, chain, None) for c in net.connectors)
        nodes = {}
        stack = list(roots)
        while stack:
            n = stack.pop()
            nodes[n.qname] = n
            stack.extend(n.children)
        connectors = []
        for decl, chain, inst_q in self.pending:
            conn = self._resolve_connector(decl, chain, inst_q, nodes)
            if conn is not None:
                connectors.append(conn)
        return InstanceTree(net.name, tuple(roots), tuple(connectors),
                            net.in_ports, net.out_ports)

    def _children(self, children, parent_q, chain, inst_q):
        built = []
        seen = set()
        for child in children:
            q = parent_q + (child.name,)
            if child.name in seen:
                self._error("N5", f"duplicate sibling name {child.name}", dotted(q), child.loc)
                continue
            seen.add(child.name)
            if isinstance(child, InstanceRef):
                template = self.templates.get(child.template)
                if template is None:
                    self._error("N5", f"unknown template {child.template}", dotted(q), child.loc)
                    continue
                if template.name in self.cycles:
                    continue
                built.append(self._block(template, q, ((q, template.name),), q, template.name))
            else:
                built.append(self._block(child, q, chain + ((q, child.name),), inst_q, None))
        return built

    def _block(self, block, q, chain, inst_q, template_name):
        children = self._children(block.children, q, chain, inst_q)
        self.pending.extend((c, chain, inst_q) for c in block.connectors)
        return InstanceNode(q, tuple(children), block.in_ports, block.out_ports, template_name)

    def _resolve_connector(self, decl, chain, inst_q, nodes):
        source = _resolve_path(decl.source, chain, nodes)
        targets = [_resolve_path(t, chain, nodes) for t in decl.targets]
        bad = [p for p, r in zip((decl.source,) + decl.targets, (source, *targets)) if r is None]
        for p in bad:
            self._error("N2", f"connector endpoint {dotted(p)} does not resolve", dotted(p), decl.loc)
        if bad:
            return None
        signal = decl.signal
        if signal is not None and inst_q is not None:
            signal = dotted(inst_q) + "." + signal
        return Connector(source, tuple(targets), signal, decl.stereotype, decl.signal, decl.loc)


def _resolve_path(path: QName, chain, nodes) -> QName | None:
    """Look ``path`` up lexically: children of the innermost scope first,
    then the scope's own name, then outward.  Template scopes are closed."""
    head, rest = path[0], path[1:]
    for scope_q, declared in reversed(chain):
        if scope_q + (head,) in nodes:
            q = scope_q + (head,)
        elif head == declared:
            q = scope_q
        else:
            continue
        for seg in rest:
            q = q + (seg,)
            if q not in nodes:
                return None
        return q
    return None


def elaboration_diagnostics(net: FunctionNetDef) -> list[Diagnostic]:
    return list(_elaborate(net)[1])


@lru_cache(maxsize=128)
def _elaborate(net: FunctionNetDef):
    e = _Elaborator(net)
    tree = e.run()
    return tree, tuple(sort_diagnostics(e.diagnostics))


def elaborate(net: FunctionNetDef) -> InstanceTree:
    """Expand templates and resolve connectors.

    Raises :class:`ElaborationError` (carrying N2/N5 diagnostics) for unknown
    or recursive templates, duplicate sibling names and dangling endpoints.
    """
    tree, diagnostics = _elaborate(net)
    if diagnostics:
        raise ElaborationError(diagnostics)
    return tree
