"""Canonical text form of a :class:`~fnv.parser.Model`."""

from __future__ import annotations

from .features import FeatureNode, ModChild
from .model import BlockTemplate, ConnectorDecl, InstanceRef, dotted

INDENT = "  "


def _connector(c: ConnectorDecl) -> str:
    arrow = f"-[{c.stereotype}]->" if c.stereotype else "->"
    targets = ", ".join(dotted(t) for t in c.targets)
    signal = f" : {c.signal}" if c.signal is not None else ""
    return f"connect {dotted(c.source)} {arrow} {targets}{signal};"


def _ports(ins, outs, pad, out):
    if ins:
        out.append(f"{pad}in {', '.join(ins)};")
    if outs:
        out.append(f"{pad}out {', '.join(outs)};")


def _block_body(block, depth, out):
    pad = INDENT * depth
    _ports(block.in_ports, block.out_ports, pad, out)
    for child in block.children:
        if isinstance(child, InstanceRef):
            out.append(f"{pad}inst {child.template} {child.name};")
        else:
            _block(child, "block", depth, out)
    for c in block.connectors:
        out.append(pad + _connector(c))


def _block(block: BlockTemplate, keyword, depth, out):
    pad = INDENT * depth
    if keyword == "block" and not (block.in_ports or block.out_ports or block.children or block.connectors):
        out.append(f"{pad}block {block.name};")
        return
    out.append(f"{pad}{keyword} {block.name} {{")
    _block_body(block, depth + 1, out)
    out.append(pad + "}")


def print_funcnet(net) -> list[str]:
    out = [f"funcnet {net.name} {{"]
    pad = INDENT
    _ports(net.in_ports, net.out_ports, pad, out)
    for t in net.templates:
        _block(t, "def", 1, out)
    for child in net.children:
        if isinstance(child, InstanceRef):
            out.append(f"{pad}inst {child.template} {child.name};")
        else:
            _block(child, "block", 1, out)
    for c in net.connectors:
        out.append(pad + _connector(c))
    out.append("}")
    return out


def _view_items(blocks, envs, connectors, depth, out):
    pad = INDENT * depth
    for e in envs:
        out.append(f"{pad}env {e.name};")
    for b in blocks:
        if b.ext:
            out.append(f"{pad}ext {dotted(b.path)};")
        elif b.children or b.envs or b.connectors:
            out.append(f"{pad}block {dotted(b.path)} {{")
            _view_items(b.children, b.envs, b.connectors, depth + 1, out)
            out.append(pad + "}")
        else:
            out.append(f"{pad}block {dotted(b.path)};")
    for c in connectors:
        out.append(pad + _connector(c))


def print_view(view) -> list[str]:
    of = f"view {view.base}" if view.base_is_view else view.base
    out = [f"view {view.name} of {of} {{"]
    _view_items(view.blocks, view.envs, view.connectors, 1, out)
    out.append("}")
    return out


def _feature(node: FeatureNode, prefix, depth, out):
    pad = INDENT * depth
    if not node.children:
        out.append(f"{pad}{prefix}feature {node.name}" + ("" if depth == 1 and not prefix else ";"))
        return
    out.append(f"{pad}{prefix}feature {node.name} {{")
    inner = INDENT * (depth + 1)
    for item in node.children:
        if isinstance(item, ModChild):
            _feature(item.child, item.modality + " ", depth + 1, out)
        else:
            out.append(f"{inner}{item.kind} {{")
            for m in item.members:
                _feature(m, "", depth + 2, out)
            out.append(inner + "}")
    out.append(pad + "}")


def print_features(fd) -> list[str]:
    out = [f"features {fd.name} {{"]
    _feature(fd.root, "", 1, out)
    out.append("}")
    return out


def print_binding(b) -> list[str]:
    out = [f"binding {b.diagram} -> {b.net} {{"]
    for e in b.entries:
        out.append(f"{INDENT}{e.feature} : view {e.view};")
    out.append("}")
    return out


def print_model(model) -> str:
    """Nets, views, feature diagrams, then bindings; declaration order within
    each kind; one blank line between top-level declarations."""
    chunks = []
    chunks += [print_funcnet(n) for n in model.funcnets.values()]
    chunks += [print_view(v) for v in model.views.values()]
    chunks += [print_features(f) for f in model.feature_diagrams.values()]
    chunks += [print_binding(b) for b in model.bindings.values()]
    return "\n\n".join("\n".join(c) for c in chunks) + ("\n" if chunks else "")
