"""Graphviz DOT export of nets and views, variant views included.

Composite blocks become clusters, leaves become boxes.  After two fixed
default statements, every scope's statements are sorted so that the output
is byte-stable.
"""

from __future__ import annotations

from .model import BOUNDARY, InstanceTree, UnknownNameError, dotted, elaborate
from .views import BLOCK, EDGE, ENV, NormalizedView, analyze, sort_key

INDENT = "  "


def _q(text: str) -> str:
    # names are identifiers; labels may carry the \\n line-break escape
    return '"' + text.replace('"', '\\"') + '"'


def _cluster(q) -> str:
    return "cluster_" + dotted(q)


class _Scene:
    def __init__(self, title: str, net_name: str):
        self.title = title
        self.net_name = net_name
        self.parent: dict[tuple, tuple | None] = {}
        self.ext: set = set()
        self.envs: set[str] = set()
        self.edges: list[tuple] = []  # (src endpoint, tgt endpoint, label)

    def node_id(self, ep) -> str:
        kind, name = ep
        if kind == ENV:
            return "env." + name
        if kind == EDGE:
            return "funcnet." + name
        return name

    def render(self) -> str:
        children: dict = {}
        for q, p in self.parent.items():
            children.setdefault(p, []).append(q)
        composite = {q for q in self.parent if children.get(q)}
        anchored = set()
        top = []
        edge_lines = []
        for src, tgt, label in self.edges:
            attrs = []
            if label:
                attrs.append(f"label={_q(label)}")
            for ep, key in ((src, "ltail"), (tgt, "lhead")):
                if ep[0] == BLOCK and tuple(ep[1].split(".")) in composite:
                    anchored.add(tuple(ep[1].split(".")))
                    attrs.append(f"{key}={_q(_cluster(tuple(ep[1].split('.'))))}")
            text = f"{_q(self.node_id(src))} -> {_q(self.node_id(tgt))}"
            edge_lines.append(text + (f" [{', '.join(sorted(attrs))}]" if attrs else "") + ";")
        top.extend(edge_lines)
        for name in self.envs:
            label = _q("«env»\\n" + name)
            top.append(f"{_q('env.' + name)} [label={label}, style=dashed];")
        if any(EDGE in (s[0], t[0]) for s, t, _ in self.edges):
            top.append(f"{_q('funcnet.' + self.net_name)} [label={_q(self.net_name)}, shape=plaintext];")

        def scope(q, depth) -> list[str]:
            lines = []
            for c in children.get(q, ()):
                if c in composite:
                    lines.append(cluster(c, depth))
                else:
                    lines.append(pad(depth) + leaf(c))
            return lines

        def leaf(q) -> str:
            label = q[-1] if q not in self.ext else "«ext»\\n" + q[-1]
            return f"{_q(dotted(q))} [label={_q(label)}];"

        def cluster(q, depth) -> str:
            inner = [pad(depth + 1) + f"label={_q(q[-1])};"]
            if q in anchored:
                inner.append(pad(depth + 1) + f"{_q(dotted(q))} [label=\"\", shape=point, style=invis];")
            inner.extend(scope(q, depth + 1))
            inner.sort()
            return "\n".join([pad(depth) + f"subgraph {_q(_cluster(q))} {{"] + inner + [pad(depth) + "}"])

        def pad(depth):
            return INDENT * depth

        body = [pad(1) + s for s in top] + scope(None, 1)
        body.sort()
        # defaults only affect nodes created after them, so they lead
        head = [pad(1) + "compound=true;", pad(1) + "node [shape=box];"]
        return "\n".join([f"digraph {_q(self.title)} {{"] + head + body + ["}"]) + "\n"


def _edge_label(signal, stereotype) -> str:
    parts = []
    if stereotype:
        parts.append(f"«{stereotype}»")
    if signal:
        parts.append(signal)
    return " ".join(parts)


def net_dot(tree: InstanceTree) -> str:
    scene = _Scene(tree.net_name, tree.net_name)
    for q in tree.nodes:
        scene.parent[q] = q[:-1] or None
    for c in tree.connectors:
        src = (EDGE, tree.net_name) if c.source == BOUNDARY else (BLOCK, dotted(c.source))
        for t in c.targets:
            tgt = (EDGE, tree.net_name) if t == BOUNDARY else (BLOCK, dotted(t))
            scene.edges.append((src, tgt, _edge_label(c.signal, c.stereotype)))
    return scene.render()


def normalized_dot(title: str, nv: NormalizedView) -> str:
    """DOT for a view or variant already reduced to complete-net names."""
    scene = _Scene(title, nv.net_name)
    shown = nv.shown()
    for q in shown:
        p = None
        for k in range(len(q) - 1, 0, -1):
            if q[:k] in shown:
                p = q[:k]
                break
        scene.parent[q] = p
    scene.ext = set(nv.ext_blocks)
    scene.envs = set(nv.env_blocks)
    for c in sorted(nv.connectors, key=sort_key):
        scene.edges.append((c[0], c[1], _edge_label(c[2], c[3])))
    return scene.render()


def export_dot(model, target_name: str) -> str:
    """DOT text for the funcnet, view or derived variant named ``target_name``.

    Variants are looked up by variant id across all bindings.
    """
    if target_name in model.funcnets:
        return net_dot(elaborate(model.funcnets[target_name]))
    if target_name in model.views:
        from .views import base_net

        tree = elaborate(model.funcnets[base_net(model, target_name)])
        nv, _ = analyze(model.views[target_name], tree)
        return normalized_dot(target_name, nv)
    from .variants import derive_all

    for name in model.bindings:
        for v in derive_all(model, name):
            if v.variant_id == target_name:
                return normalized_dot(v.variant_id, v.as_normalized())
    raise UnknownNameError(f"no funcnet, view or variant named {target_name!r}")
