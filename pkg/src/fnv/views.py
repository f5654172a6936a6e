"""Views over function nets and the consistency rules R1-R6.

A view names blocks of the complete net, possibly skipping intermediate
layers, and may add environment blocks and non-digital connectors.  Every
view block is resolved to a qualified name of the elaborated base-most net;
the rules are then evaluated on those resolutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import (
    BOUNDARY, ERROR, ConnectorDecl, Diagnostic, FnvError, InstanceTree, QName, SourceLocation,
    UnknownNameError, as_qname, connectors_between, diag, dotted, elaborate, has_errors,
    sort_diagnostics,
)

# normalized connector endpoints
BLOCK = "block"
ENV = "env"
EDGE = "boundary"

Endpoint = tuple[str, str]
NormConnector = tuple[Endpoint, Endpoint, Optional[str], Optional[str]]


@dataclass(frozen=True)
class EnvBlock:
    name: str
    loc: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ViewBlock:
    path: QName
    ext: bool = False
    children: tuple["ViewBlock", ...] = ()
    envs: tuple[EnvBlock, ...] = ()
    connectors: tuple[ConnectorDecl, ...] = ()
    loc: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ViewDef:
    name: str
    base: str
    base_is_view: bool = False
    blocks: tuple[ViewBlock, ...] = ()
    envs: tuple[EnvBlock, ...] = ()
    connectors: tuple[ConnectorDecl, ...] = ()
    loc: SourceLocation | None = field(default=None, compare=False)

    def walk_blocks(self):
        stack = list(reversed(self.blocks))
        while stack:
            b = stack.pop()
            yield b
            stack.extend(reversed(b.children))

    def all_envs(self) -> list[EnvBlock]:
        return list(self.envs) + [e for b in self.walk_blocks() for e in b.envs]


class ViewError(FnvError):
    pass


class AmbiguousPathError(ViewError):
    def __init__(self, path, matches):
        self.path = path
        self.matches = matches
        names = ", ".join(dotted(m) for m in matches)
        super().__init__(f"{dotted(path)} is ambiguous ({names}); use a longer dotted path")


class UnresolvedPathError(ViewError, UnknownNameError):
    pass


class NetHasErrors(ViewError):
    pass


def sort_key(c: NormConnector):
    return (c[0], c[1], c[2] or "", c[3] or "")


@dataclass(frozen=True)
class NormalizedView:
    """A view reduced to complete-net names: what it shows, nothing about how."""

    net_name: str
    blocks: frozenset[QName] = frozenset()
    ext_blocks: frozenset[QName] = frozenset()
    env_blocks: frozenset[str] = frozenset()
    connectors: frozenset[NormConnector] = frozenset()

    def shown(self) -> frozenset[QName]:
        return self.blocks | self.ext_blocks


# -- base chains ----------------------------------------------------------------


def base_chain(model, view_name: str) -> list[str]:
    """Views from ``view_name`` down to the last view; the net is ``base`` of the last."""
    chain = []
    name = view_name
    while True:
        view = model.views.get(name)
        if view is None:
            raise UnknownNameError(f"no view named {name!r}")
        if name in chain:
            raise ViewError("view base chain is cyclic: " + " -> ".join(chain + [name]))
        chain.append(name)
        if not view.base_is_view:
            if view.base not in model.funcnets:
                raise UnknownNameError(f"view {name}: no funcnet named {view.base!r}")
            return chain
        name = view.base


def base_net(model, view_name: str) -> str:
    return model.views[base_chain(model, view_name)[-1]].base


# -- resolution -----------------------------------------------------------------


def resolve_view_block(tree: InstanceTree, path, within=None) -> QName:
    """Resolve a view block path against the complete net.

    ``within`` is the resolution of the enclosing view block (None at the top
    of the view).  Candidates are the blocks strictly below ``within`` whose
    trailing name segments equal ``path``; the exact relative path wins,
    otherwise exactly one candidate must remain.
    """
    path = as_qname(path)
    base = as_qname(within) if within is not None else BOUNDARY
    exact = base + path
    if exact in tree.nodes:
        return exact
    k = len(path)
    matches = sorted(q for q in tree.nodes
                     if len(q) > len(base) and q[:len(base)] == base and len(q) >= k and q[-k:] == path)
    if not matches:
        where = f" below {dotted(base)}" if base else ""
        raise UnresolvedPathError(f"{dotted(path)} is not a block of net {tree.net_name}{where}")
    if len(matches) > 1:
        raise AmbiguousPathError(path, matches)
    return matches[0]


class _Entry:
    __slots__ = ("block", "q", "parent")

    def __init__(self, block, q, parent):
        self.block = block
        self.q = q
        self.parent = parent

    def ancestors(self):
        e = self.parent
        while e is not None:
            yield e
            e = e.parent


class _Analysis:
    """Resolution of one view against one elaborated net, plus R1-R4 findings."""

    def __init__(self, view: ViewDef, tree: InstanceTree):
        self.view = view
        self.tree = tree
        self.diagnostics: list[Diagnostic] = []
        self.entries: list[_Entry] = []
        self.envs: dict[str, EnvBlock] = {}
        self.connectors: set[NormConnector] = set()
        self._pending = []
        self._walk(view.blocks, view.envs, view.connectors, None)
        self._check_envs()
        self._check_injective()
        self._check_hierarchy()
        for decl, scope in self._pending:
            self._connector(decl, scope)

    def _error(self, code, message, subject, loc):
        self.diagnostics.append(diag(code, ERROR, message, f"{self.view.name}:{subject}", loc))

    def _walk(self, blocks, envs, connectors, parent):
        for env in envs:
            if env.name in self.envs:
                self._error("R1", f"duplicate environment block {env.name}", env.name, env.loc)
            else:
                self.envs[env.name] = env
        for vb in blocks:
            entry = _Entry(vb, self._resolve_block(vb, parent), parent)
            self.entries.append(entry)
            self._walk(vb.children, vb.envs, vb.connectors, entry)
        self._pending.extend((c, parent) for c in connectors)

    def _resolve_block(self, vb, parent):
        subject = dotted(vb.path)
        within = parent.q if parent is not None else None
        try:
            return resolve_view_block(self.tree, vb.path, within)
        except AmbiguousPathError as e:
            self._error("R1", str(e), subject, vb.loc)
            return None
        except UnresolvedPathError as e:
            if within is None:
                self._error("R1", f"{e}; not part of the complete function net", subject, vb.loc)
                return None
        # not below the enclosing block: exists elsewhere means a wrong whole-part edge
        try:
            q = resolve_view_block(self.tree, vb.path, None)
        except ViewError as e:
            self._error("R1", f"{e}; not part of the complete function net", subject, vb.loc)
            return None
        self._error("R2", f"{dotted(q)} is not part of {dotted(within)} in the complete function net",
                    subject, vb.loc)
        return q

    def _check_envs(self):
        written = {dotted(e.block.path) for e in self.entries}
        for name, env in self.envs.items():
            if name in written:
                self._error("R1", f"environment block {name} clashes with a shown block", name, env.loc)

    def _check_injective(self):
        seen = {}
        for e in self.entries:
            if e.q is None:
                continue
            if e.q in seen:
                self._error("R1", f"{dotted(e.block.path)} and {dotted(seen[e.q].block.path)} "
                            f"both denote {dotted(e.q)}", dotted(e.block.path), e.block.loc)
            else:
                seen[e.q] = e

    def _check_hierarchy(self):
        resolved = [e for e in self.entries if e.q is not None]
        for child in resolved:
            for anc in resolved:
                if anc is child:
                    continue
                if len(anc.q) < len(child.q) and child.q[:len(anc.q)] == anc.q:
                    if not any(a is anc for a in child.ancestors()):
                        self._error("R3", f"{dotted(child.q)} is part of {dotted(anc.q)} in the complete "
                                    f"function net but not nested inside it in the view",
                                    dotted(child.block.path), child.block.loc)

    def shown(self) -> set[QName]:
        return {e.q for e in self.entries if e.q is not None}

    def _endpoint(self, path, scope, loc) -> Endpoint | None:
        if len(path) == 1 and path[0] in self.envs:
            return (ENV, path[0])
        if path == (self.tree.net_name,):
            return (EDGE, self.tree.net_name)
        within = scope.q if scope is not None else None
        try:
            try:
                q = resolve_view_block(self.tree, path, within)
            except UnresolvedPathError:
                if within is None:
                    raise
                q = resolve_view_block(self.tree, path, None)
        except ViewError as e:
            self._error("R1", f"connector endpoint {e}", dotted(path), loc)
            return None
        if q not in self.shown():
            self._error("R1", f"connector endpoint {dotted(q)} is not shown in the view", dotted(path), loc)
            return None
        return (BLOCK, dotted(q))

    def _connector(self, decl: ConnectorDecl, scope):
        source = self._endpoint(decl.source, scope, decl.loc)
        targets = [self._endpoint(t, scope, decl.loc) for t in decl.targets]
        if source is None:
            return
        for target in targets:
            if target is None:
                continue
            self.connectors.add((source, target, decl.signal, decl.stereotype))
            if decl.stereotype is not None or ENV in (source[0], target[0]):
                continue
            self._check_communication(source, target, decl)

    def _check_communication(self, source, target, decl):
        a = _to_qname(source)
        b = _to_qname(target)
        found = [c for c in connectors_between(self.tree, a, b) if c.signal is not None]
        subject = f"{_render(source)}->{_render(target)}"
        if decl.signal is None:
            if not found:
                self._error("R4", f"no communication from {_render(source)} to {_render(target)} "
                            f"in the complete function net", subject, decl.loc)
        elif not any(decl.signal in (c.signal, c.local_signal) for c in found):
            self._error("R4", f"signal {decl.signal} is not sent from {_render(source)} to "
                        f"{_render(target)} in the complete function net", subject, decl.loc)

    def normalized(self) -> NormalizedView:
        blocks = frozenset(e.q for e in self.entries if e.q is not None and not e.block.ext)
        ext = frozenset(e.q for e in self.entries if e.q is not None and e.block.ext) - blocks
        return NormalizedView(self.tree.net_name, blocks, ext, frozenset(self.envs),
                              frozenset(self.connectors))


def _to_qname(ep: Endpoint) -> QName:
    return BOUNDARY if ep[0] == EDGE else as_qname(ep[1])


def _render(ep: Endpoint) -> str:
    return ep[1]


# -- public checks ----------------------------------------------------------------


def _net_tree(model, view_name) -> InstanceTree:
    from .netcheck import check_net

    net_name = base_net(model, view_name)
    if has_errors(check_net(model, net_name)):
        raise NetHasErrors(f"funcnet {net_name} has errors; fix them before checking views")
    return elaborate(model.funcnets[net_name])


def analyze(view: ViewDef, tree: InstanceTree) -> tuple[NormalizedView, list[Diagnostic]]:
    """Check ``view`` against the complete net only (rules R1-R4)."""
    a = _Analysis(view, tree)
    return a.normalized(), sort_diagnostics(a.diagnostics)


def normalize_view(model, view_name: str) -> NormalizedView:
    tree = _net_tree(model, view_name)
    return analyze(model.views[view_name], tree)[0]


def connector_in(c: NormConnector, pool) -> bool:
    """A connector is present in ``pool`` if endpoints and stereotype match and
    the signals agree wherever both sides name one."""
    for d in pool:
        if c[0] == d[0] and c[1] == d[1] and c[3] == d[3]:
            if c[2] is None or d[2] is None or c[2] == d[2]:
                return True
    return False


def subset_violations(sub: NormalizedView, sup: NormalizedView) -> list[tuple[str, str]]:
    """(subject, description) for every element of ``sub`` absent from ``sup``."""
    missing = []
    for q in sorted(sub.shown() - sup.shown()):
        missing.append((dotted(q), f"block {dotted(q)}"))
    for name in sorted(sub.env_blocks - sup.env_blocks):
        missing.append((name, f"environment block {name}"))
    for c in sorted(sub.connectors, key=sort_key):
        if not connector_in(c, sup.connectors):
            label = f" : {c[2]}" if c[2] else ""
            subject = f"{_render(c[0])}->{_render(c[1])}"
            missing.append((subject, f"connector {_render(c[0])} -> {_render(c[1])}{label}"))
    return missing


def check_view(model, view_name: str) -> list[Diagnostic]:
    """All consistency findings for one view.

    Raises :class:`UnknownNameError` for an unknown view, :class:`ViewError`
    for a cyclic base chain and :class:`NetHasErrors` when the complete net
    itself is not valid.
    """
    base_chain(model, view_name)
    tree = _net_tree(model, view_name)
    view = model.views[view_name]
    own, diagnostics = analyze(view, tree)
    if view.base_is_view:
        if has_errors(check_view(model, view.base)):
            diagnostics.append(diag("R6", ERROR, f"base view {view.base} is not consistent with the "
                                    f"complete function net", f"{view_name}:{view.base}", view.loc))
        base, _ = analyze(model.views[view.base], tree)
        for subject, what in subset_violations(own, base):
            diagnostics.append(diag("R6", ERROR, f"{what} is not shown in base view {view.base}",
                                    f"{view_name}:{subject}", view.loc))
    return sort_diagnostics(diagnostics)


# -- rendering normalized views back to declarations ------------------------------


def render_view(name: str, base: str, tree: InstanceTree, nv: NormalizedView) -> ViewDef:
    """Build a view declaration showing exactly ``nv``.

    Nesting follows complete-net ancestry among the shown blocks; unshown
    intermediate layers are skipped.  Ext blocks with shown parts become
    ordinary blocks, since ext blocks cannot contain anything.
    """
    shown = nv.shown()
    parent = {}
    for q in shown:
        p = None
        for k in range(len(q) - 1, 0, -1):
            if q[:k] in shown:
                p = q[:k]
                break
        parent[q] = p
    has_children = {p for p in parent.values() if p is not None}

    def build(q):
        kids = sorted(c for c, p in parent.items() if p == q)
        ext = q in nv.ext_blocks and q not in has_children
        p = parent[q]
        path = q[len(p):] if p is not None else q
        return ViewBlock(path, ext, tuple(build(c) for c in kids))

    roots = tuple(build(q) for q in sorted(q for q, p in parent.items() if p is None))
    envs = tuple(EnvBlock(e) for e in sorted(nv.env_blocks))

    def path_of(ep):
        if ep[0] == EDGE:
            return (tree.net_name,)
        return as_qname(ep[1])

    grouped = {}
    for c in nv.connectors:
        grouped.setdefault((c[0], c[2] or "", c[3] or "", c[2], c[3]), []).append(c[1])
    connectors = []
    for key in sorted(grouped):
        src, _, _, signal, st = key
        targets = tuple(path_of(t) for t in sorted(grouped[key]))
        connectors.append(ConnectorDecl(path_of(src), targets, signal, st))
    return ViewDef(name, base, False, roots, envs, tuple(connectors))


def net_as_view(tree: InstanceTree, name: str | None = None) -> ViewDef:
    """The complete net written as a view of itself."""
    connectors = set()
    for c in tree.connectors:
        src = (EDGE, tree.net_name) if c.source == BOUNDARY else (BLOCK, dotted(c.source))
        for t in c.targets:
            tgt = (EDGE, tree.net_name) if t == BOUNDARY else (BLOCK, dotted(t))
            connectors.add((src, tgt, c.local_signal, c.stereotype))
    nv = NormalizedView(tree.net_name, frozenset(tree.nodes), frozenset(), frozenset(), frozenset(connectors))
    return render_view(name or tree.net_name + "Self", tree.net_name, tree, nv)
