"""Feature-to-view bindings and derivation of variant views.

A binding maps features of one diagram to views of one net.  The variant
view of a configuration collects what the selected features' views show.
When a feature and some of its subfeatures are all bound, the feature's
view is the union of its subfeatures' parts (the feature-level "150
percent" view); elements that only deselected subfeatures account for are
left out of the variant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .features import (
    Configuration, FeatureDiagram, enumerate_configurations, is_valid_configuration,
    make_configuration, validate_diagram,
)
from .model import (
    ERROR, WARNING, Diagnostic, FnvError, InstanceTree, SourceLocation, UnknownNameError, diag,
    elaborate, has_errors, sort_diagnostics,
)
from .views import (
    BLOCK, ENV, NormalizedView, ViewDef, ViewError, analyze, base_net, check_view,
    render_view, subset_violations,
)


@dataclass(frozen=True)
class BindingEntry:
    feature: str
    view: str
    loc: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Binding:
    """``binding Diagram -> Net { Feature : view V; ... }``; named after its diagram."""

    name: str
    diagram: str
    net: str
    entries: tuple[BindingEntry, ...] = ()
    loc: SourceLocation | None = field(default=None, compare=False)

    def features(self) -> list[str]:
        return [e.feature for e in self.entries]

    def view_for(self, feature: str) -> str | None:
        for e in self.entries:
            if e.feature == feature:
                return e.view
        return None


class BindingError(FnvError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        super().__init__(f"binding has {len(errors)} error(s)" + (f": {errors[0].message}" if errors else ""))


class InvalidConfiguration(FnvError):
    pass


@dataclass(frozen=True)
class VariantView:
    config: Configuration
    net_name: str
    blocks: frozenset = frozenset()
    ext_blocks: frozenset = frozenset()
    env_blocks: frozenset = frozenset()
    connectors: frozenset = frozenset()

    @property
    def variant_id(self) -> str:
        return self.config.variant_id

    def as_normalized(self) -> NormalizedView:
        return NormalizedView(self.net_name, self.blocks, self.ext_blocks, self.env_blocks, self.connectors)


def _binding(model, name) -> Binding:
    try:
        return model.bindings[name]
    except KeyError:
        raise UnknownNameError(f"no binding named {name!r}") from None


def _bound_views(model, b: Binding, tree: InstanceTree, fd: FeatureDiagram):
    """Normalized views of the usable entries plus B1 findings for the rest."""
    found = []
    views = {}
    names = set(fd.names())
    for e in b.entries:
        subject = f"{b.name}:{e.feature}"
        if e.feature not in names:
            found.append(diag("B1", ERROR, f"feature {e.feature} is not in diagram {fd.name}", subject, e.loc))
            continue
        if e.view not in model.views:
            found.append(diag("B1", ERROR, f"bound view {e.view} does not exist", subject, e.loc))
            continue
        try:
            net = base_net(model, e.view)
            if net != b.net:
                found.append(diag("B1", ERROR, f"view {e.view} is a view of {net}, not of {b.net}",
                                  subject, e.loc))
                continue
            problems = [d for d in check_view(model, e.view) if d.is_error]
        except ViewError as err:
            found.append(diag("B1", ERROR, f"view {e.view} cannot be checked: {err}", subject, e.loc))
            continue
        if problems:
            found.append(diag("B1", ERROR, f"view {e.view} is inconsistent ({len(problems)} error(s), "
                              f"first: {problems[0].code} {problems[0].message})", subject, e.loc))
            continue
        views[e.feature] = analyze(model.views[e.view], tree)[0]
    return views, found


def validate_binding(model, binding_name: str) -> list[Diagnostic]:
    """B1 unusable views, B2 subfeature views that are not subsets of the
    nearest bound ancestor's view, B3 unbound leaf features."""
    b = _binding(model, binding_name)
    fd = model.feature_diagrams[b.diagram]
    net = model.net(b.net)
    from .netcheck import check_net

    if has_errors(check_net(model, net.name)):
        return sort_diagnostics(
            diag("B1", ERROR, f"funcnet {net.name} has errors; bound views cannot be checked",
                 f"{b.name}:{e.feature}", e.loc)
            for e in b.entries)
    tree = elaborate(net)
    views, found = _bound_views(model, b, tree, fd)
    parents = fd.parents()
    for e in b.entries:
        if e.feature not in views:
            continue
        anc = parents.get(e.feature)
        while anc is not None and anc not in views:
            anc = parents[anc]
        if anc is None:
            continue
        missing = subset_violations(views[e.feature], views[anc])
        if missing:
            what = ", ".join(m[1] for m in missing)
            found.append(diag("B2", ERROR, f"view {e.view} of {e.feature} shows {what}, absent from "
                              f"view {b.view_for(anc)} of {anc}", f"{b.name}:{e.feature}", e.loc))
    bound = set(b.features())
    for node in fd.walk():
        if node.is_leaf and node.name not in bound:
            found.append(diag("B3", WARNING, f"leaf feature {node.name} has no view; it adds nothing to variants",
                              f"{b.name}:{node.name}", node.loc))
    return sort_diagnostics(found)


class _Deriver:
    def __init__(self, model, binding_name):
        b = _binding(model, binding_name)
        diagnostics = validate_binding(model, binding_name)
        fd = model.feature_diagrams[b.diagram]
        diagnostics += validate_diagram(fd)
        if has_errors(diagnostics):
            raise BindingError(diagnostics)
        self.binding = b
        self.fd = fd
        self.tree = elaborate(model.net(b.net))
        self.views, _ = _bound_views(model, b, self.tree, fd)
        self.descendants = {f: fd.descendants(f) for f in self.views}

    def configuration(self, config) -> Configuration:
        names = config.selected if isinstance(config, Configuration) else frozenset(config)
        try:
            ok = is_valid_configuration(self.fd, names)
        except UnknownNameError as e:
            raise InvalidConfiguration(str(e)) from None
        if not ok:
            raise InvalidConfiguration(f"{sorted(names)} is not a valid configuration of {self.fd.name}")
        return make_configuration(self.fd, names)

    def derive(self, config) -> VariantView:
        config = self.configuration(config)
        selected = config.selected
        parts = {"blocks": set(), "ext_blocks": set(), "env_blocks": set(), "connectors": set()}
        for f, nv in self.views.items():
            if f not in selected:
                continue
            on = [self.views[d] for d in self.descendants[f] if d in self.views and d in selected]
            off = [self.views[d] for d in self.descendants[f] if d in self.views and d not in selected]
            for attr, acc in parts.items():
                dropped = set().union(*(getattr(v, attr) for v in off))
                kept = set().union(*(getattr(v, attr) for v in on))
                acc.update(getattr(nv, attr) - (dropped - kept))
        blocks = frozenset(parts["blocks"])
        ext = frozenset(parts["ext_blocks"]) - blocks
        envs = frozenset(parts["env_blocks"])
        shown = {".".join(q) for q in blocks | ext}

        def present(ep):
            if ep[0] == BLOCK:
                return ep[1] in shown
            if ep[0] == ENV:
                return ep[1] in envs
            return True

        conns = {c for c in parts["connectors"] if present(c[0]) and present(c[1])}
        # drop "some communication" when a concrete signal is drawn on the same edge
        concrete = {(c[0], c[1], c[3]) for c in conns if c[2] is not None}
        conns = {c for c in conns if c[2] is not None or (c[0], c[1], c[3]) not in concrete}
        return VariantView(config, self.tree.net_name, blocks, ext, envs, frozenset(conns))


def derive_variant(model, binding_name: str, config) -> VariantView:
    """The variant view for one configuration (a :class:`Configuration` or
    an iterable of feature names)."""
    return _Deriver(model, binding_name).derive(config)


def derive_all(model, binding_name: str) -> list[VariantView]:
    d = _Deriver(model, binding_name)
    return [d.derive(c) for c in enumerate_configurations(d.fd)]


def variant_view_def(model, variant: VariantView) -> ViewDef:
    """The variant as an ordinary view declaration named by its variant id."""
    tree = elaborate(model.net(variant.net_name))
    return render_view(variant.variant_id, variant.net_name, tree, variant.as_normalized())


__all__ = [
    "Binding", "BindingEntry", "BindingError", "InvalidConfiguration", "VariantView",
    "derive_all", "derive_variant", "validate_binding", "variant_view_def",
]
