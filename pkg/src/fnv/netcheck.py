"""Well-formedness rules N1-N6 for a complete function net."""

from __future__ import annotations

from collections import defaultdict
from functools import lru_cache

from .model import (
    BOUNDARY, ERROR, WARNING, Diagnostic, FunctionNetDef, InstanceTree, UnknownNameError,
    _elaborate, diag, dotted, in_subtree, sort_diagnostics,
)


def senders_by_signal(tree: InstanceTree) -> dict[str, set]:
    """Sending endpoints per signal.  The boundary sends the net's ``in`` signals."""
    senders = defaultdict(set)
    for s in tree.in_ports:
        senders[s].add(BOUNDARY)
    for c in tree.connectors:
        if c.signal is not None and c.stereotype is None:
            senders[c.signal].add(c.source)
    return senders


def check_net(model, net_name: str) -> list[Diagnostic]:
    """Diagnostics for the net ``net_name``, ordered by (code, subject)."""
    try:
        net = model.funcnets[net_name]
    except KeyError:
        raise UnknownNameError(f"no funcnet named {net_name!r}") from None
    return list(check_net_def(net))


@lru_cache(maxsize=128)
def check_net_def(net: FunctionNetDef) -> tuple[Diagnostic, ...]:
    tree, elab = _elaborate(net)
    if elab:
        return tuple(elab)
    found = []
    name = tree.net_name

    def subject(x):
        return f"{name}:{x}"

    for c in tree.connectors:
        where = f"{tree.render(c.source)}->{','.join(tree.render(t) for t in c.targets)}"
        if c.source in c.targets:
            found.append(diag("N3", ERROR, f"connector from {tree.render(c.source)} to itself",
                              subject(where), c.loc))
        if c.signal is None:
            found.append(diag("N4", ERROR, "connector in a complete function net must name a signal",
                              subject(where), c.loc))
        if c.stereotype is not None:
            found.append(diag("N4", ERROR, f"«{c.stereotype}» connectors are only allowed in views",
                              subject(where), c.loc))

    for signal, senders in senders_by_signal(tree).items():
        if len(senders) > 1:
            names = ", ".join(sorted(tree.render(s) for s in senders))
            locs = [c.loc for c in tree.connectors if c.signal == signal and c.loc is not None]
            found.append(diag("N1", ERROR, f"signal {signal} has {len(senders)} senders: {names}",
                              subject(signal), max(locs, key=lambda l: (l.line, l.column)) if locs else None))

    found.extend(_unused_ports(tree))
    return tuple(sort_diagnostics(found))


def _signal_matches(declared: str, carried: str | None) -> bool:
    # template-internal signals carry the instance path as prefix
    return carried is not None and (carried == declared or carried.endswith("." + declared))


def _unused_ports(tree: InstanceTree) -> list[Diagnostic]:
    found = []
    name = tree.net_name
    carried = {c.signal for c in tree.connectors}
    for port in tree.in_ports + tree.out_ports:
        if port not in carried:
            found.append(diag("N6", WARNING, f"net port {port} is not carried by any connector",
                              f"{name}:{port}"))
    for c in tree.connectors:
        if c.signal is None:
            continue
        if c.source == BOUNDARY and c.signal not in tree.in_ports:
            found.append(diag("N6", WARNING, f"signal {c.signal} enters the net but is not a declared in port",
                              f"{name}:{c.signal}", c.loc))
        if BOUNDARY in c.targets and c.signal not in tree.out_ports:
            found.append(diag("N6", WARNING, f"signal {c.signal} leaves the net but is not a declared out port",
                              f"{name}:{c.signal}", c.loc))
    for node in tree.walk():
        for port in node.in_ports + node.out_ports:
            used = any(
                _signal_matches(port, c.signal)
                and any(in_subtree(node.qname, e) for e in (c.source,) + c.targets)
                for c in tree.connectors
            )
            if not used:
                found.append(diag("N6", WARNING,
                                  f"port {port} of {dotted(node.qname)} is not carried by any connector",
                                  f"{name}:{dotted(node.qname)}.{port}"))
    return found
