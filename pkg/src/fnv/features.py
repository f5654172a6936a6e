"""Feature diagrams and their valid configurations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Union

from .model import ERROR, WARNING, Diagnostic, SourceLocation, UnknownNameError, diag, sort_diagnostics

MANDATORY = "mandatory"
OPTIONAL = "optional"
ALTERNATIVE = "alternative"
OR = "or"


@dataclass(frozen=True)
class FeatureNode:
    name: str
    children: tuple[Union["ModChild", "Group"], ...] = ()
    loc: SourceLocation | None = field(default=None, compare=False)

    @property
    def mod_children(self) -> list["ModChild"]:
        return [c for c in self.children if isinstance(c, ModChild)]

    @property
    def groups(self) -> list["Group"]:
        return [c for c in self.children if isinstance(c, Group)]

    def subfeatures(self) -> list["FeatureNode"]:
        out = []
        for item in self.children:
            if isinstance(item, ModChild):
                out.append(item.child)
            else:
                out.extend(item.members)
        return out

    @property
    def is_leaf(self) -> bool:
        return not self.subfeatures()


@dataclass(frozen=True)
class ModChild:
    modality: str  # MANDATORY or OPTIONAL
    child: FeatureNode


@dataclass(frozen=True)
class Group:
    kind: str  # ALTERNATIVE or OR
    members: tuple[FeatureNode, ...]
    loc: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FeatureDiagram:
    name: str
    root: FeatureNode
    loc: SourceLocation | None = field(default=None, compare=False)

    def walk(self) -> Iterator[FeatureNode]:
        """Depth-first, declaration order."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.subfeatures()))

    def names(self) -> list[str]:
        return [n.name for n in self.walk()]

    def find(self, name: str) -> FeatureNode:
        for n in self.walk():
            if n.name == name:
                return n
        raise UnknownNameError(f"no feature {name!r} in diagram {self.name}")

    def parents(self) -> dict[str, str | None]:
        out = {self.root.name: None}
        for n in self.walk():
            for c in n.subfeatures():
                out[c.name] = n.name
        return out

    def descendants(self, name: str) -> list[str]:
        return [n.name for n in _walk_from(self.find(name))][1:]


def _walk_from(node):
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.subfeatures()))


@dataclass(frozen=True)
class Configuration:
    selected: frozenset[str]
    variant_id: str

    def __contains__(self, name):
        return name in self.selected

    def sorted_names(self) -> list[str]:
        return sorted(self.selected)


def variant_id(fd: FeatureDiagram, selected: Iterable[str]) -> str:
    """``"v"`` followed by the selected features that have no selected
    subfeature, in depth-first diagram order (``vS1S2``)."""
    selected = set(selected)
    leaves = [n.name for n in fd.walk()
              if n.name in selected and not any(c.name in selected for c in n.subfeatures())]
    return "v" + "".join(leaves)


def make_configuration(fd: FeatureDiagram, selected: Iterable[str]) -> Configuration:
    selected = frozenset(selected)
    return Configuration(selected, variant_id(fd, selected))


def validate_diagram(fd: FeatureDiagram, bindings=()) -> list[Diagnostic]:
    """F1 duplicate names, F2 degenerate groups.

    With ``bindings`` (those referring to this diagram) also F3 for leaf
    features no binding maps to a view.
    """
    found = []
    seen = {}
    for node in fd.walk():
        if node.name in seen:
            found.append(diag("F1", ERROR, f"duplicate feature name {node.name}",
                              f"{fd.name}:{node.name}", node.loc))
        seen[node.name] = node
        for g in node.groups:
            if len(g.members) < 2:
                found.append(diag("F2", ERROR,
                                  f"{g.kind} group of {node.name} has {len(g.members)} member(s); at least 2 required",
                                  f"{fd.name}:{node.name}", g.loc or node.loc))
    bindings = list(bindings)
    if bindings:
        bound = set()
        for b in bindings:
            bound.update(b.features())
        for node in fd.walk():
            if node.is_leaf and node.name not in bound:
                found.append(diag("F3", WARNING, f"leaf feature {node.name} is bound in no binding",
                                  f"{fd.name}:{node.name}", node.loc))
    return sort_diagnostics(found)


class _Compiled:
    """Bitmask form of a diagram for fast membership tests."""

    def __init__(self, fd: FeatureDiagram):
        nodes = list(fd.walk())
        self.index = {n.name: i for i, n in enumerate(nodes)}
        self.root_bit = 1 << self.index[fd.root.name]
        self.rules = []
        for n in nodes:
            bit = 1 << self.index[n.name]
            mandatory = 0
            children = 0
            alternatives = []
            ors = []
            for item in n.children:
                if isinstance(item, ModChild):
                    cbit = 1 << self.index[item.child.name]
                    children |= cbit
                    if item.modality == MANDATORY:
                        mandatory |= cbit
                else:
                    gmask = 0
                    for m in item.members:
                        gmask |= 1 << self.index[m.name]
                    children |= gmask
                    (alternatives if item.kind == ALTERNATIVE else ors).append(gmask)
            self.rules.append((bit, mandatory, children, tuple(alternatives), tuple(ors)))

    def mask(self, names) -> int:
        m = 0
        for name in names:
            try:
                m |= 1 << self.index[name]
            except KeyError:
                raise UnknownNameError(f"unknown feature {name!r}") from None
        return m

    def valid(self, s: int) -> bool:
        if not s & self.root_bit:
            return False
        for bit, mandatory, children, alternatives, ors in self.rules:
            if s & bit:
                if mandatory & ~s:
                    return False
                for g in alternatives:
                    hit = s & g
                    if not hit or hit & (hit - 1):
                        return False
                for g in ors:
                    if not s & g:
                        return False
            elif s & children:
                return False
        return True


@lru_cache(maxsize=256)
def _compiled(fd: FeatureDiagram) -> _Compiled:
    return _Compiled(fd)


def is_valid_configuration(fd: FeatureDiagram, selected: Iterable[str]) -> bool:
    """Check a feature selection against the diagram's semantics.

    Raises :class:`UnknownNameError` for names the diagram does not define.
    """
    c = _compiled(fd)
    return c.valid(c.mask(selected))


def _configs(node: FeatureNode) -> list[frozenset]:
    partial = [frozenset((node.name,))]
    for item in node.children:
        if isinstance(item, ModChild):
            options = _configs(item.child)
            if item.modality == OPTIONAL:
                options = [frozenset()] + options
        elif item.kind == ALTERNATIVE:
            options = [c for m in item.members for c in _configs(m)]
        else:
            per_member = [[frozenset()] + _configs(m) for m in item.members]
            options = [frozenset().union(*combo) for combo in itertools.product(*per_member)]
            options = [o for o in options if o]
        partial = [p | o for p in partial for o in options]
    return partial


def enumerate_configurations(fd: FeatureDiagram) -> list[Configuration]:
    """All valid configurations, ordered by their sorted name lists."""
    selections = sorted(_configs(fd.root), key=sorted)
    return [make_configuration(fd, s) for s in selections]


def _count(node: FeatureNode) -> int:
    total = 1
    for item in node.children:
        if isinstance(item, ModChild):
            n = _count(item.child)
            total *= n if item.modality == MANDATORY else 1 + n
        elif item.kind == ALTERNATIVE:
            total *= sum(_count(m) for m in item.members)
        else:
            prod = 1
            for m in item.members:
                prod *= 1 + _count(m)
            total *= prod - 1
    return total


def count_configurations(fd: FeatureDiagram) -> int:
    return _count(fd.root)
