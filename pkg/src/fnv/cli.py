"""``fnv`` command line: check, configs, derive, export-dot.

Exit codes: 0 no error diagnostics, 1 error diagnostics, 2 usage, I/O or
parse failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .dot import export_dot, normalized_dot
from .features import count_configurations, enumerate_configurations, validate_diagram
from .model import FnvError, has_errors
from .netcheck import check_net
from .parser import ParseError, parse
from .printer import print_view
from .report import Report, render_report
from .variants import BindingError, InvalidConfiguration, derive_all, derive_variant, validate_binding, variant_view_def
from .views import NetHasErrors, base_net, check_view


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fnv", description="Function nets, views, feature diagrams and variants.")
    p.add_argument("--version", action="version", version=f"fnv {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    c = sub.add_parser("check", help="check nets and views (default: all of them)")
    c.add_argument("file")
    c.add_argument("--net", action="append", default=[], metavar="NAME")
    c.add_argument("--view", action="append", default=[], metavar="NAME")
    c.add_argument("--features", action="append", default=[], metavar="NAME",
                   help="also validate a feature diagram")
    c.add_argument("--binding", action="append", default=[], metavar="NAME",
                   help="also validate a binding")
    c.add_argument("--format", choices=("text", "json"), default="text")

    g = sub.add_parser("configs", help="list or count valid configurations")
    g.add_argument("file")
    g.add_argument("--features", required=True, metavar="NAME")
    g.add_argument("--count", action="store_true")

    d = sub.add_parser("derive", help="derive variant views")
    d.add_argument("file")
    d.add_argument("--binding", required=True, metavar="NAME")
    d.add_argument("--config", metavar="NAMES", help="comma-separated feature names")
    d.add_argument("--out", metavar="DIR")
    d.add_argument("--emit", choices=("dot", "fnv", "both"))

    e = sub.add_parser("export-dot", help="write a net, view or variant as DOT")
    e.add_argument("file")
    e.add_argument("--target", required=True, metavar="NAME")
    e.add_argument("-o", dest="output", metavar="PATH")
    return p


def _load(path):
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise UsageError(f"fnv: cannot read {path}: {e.strerror}") from None
    return parse(text)


def _cmd_check(args, out):
    model = _load(args.file)
    nets, views = list(args.net), list(args.view)
    if not (nets or views or args.features or args.binding):
        nets, views = list(model.funcnets), list(model.views)
    found = []
    for name in nets:
        found += check_net(model, name)
    for name in views:
        try:
            found += check_view(model, name)
        except NetHasErrors:
            found += check_net(model, base_net(model, name))
    for name in args.features:
        if name not in model.feature_diagrams:
            raise UsageError(f"fnv: no feature diagram named {name!r}")
        related = [b for b in model.bindings.values() if b.diagram == name]
        found += validate_diagram(model.feature_diagrams[name], related)
    for name in args.binding:
        found += validate_binding(model, name)
    report = Report.build(__version__, args.file, found)
    out.write(render_report(report, args.format))
    return 1 if report.errors else 0


def _cmd_configs(args, out):
    model = _load(args.file)
    fd = model.feature_diagrams.get(args.features)
    if fd is None:
        raise UsageError(f"fnv: no feature diagram named {args.features!r}")
    problems = validate_diagram(fd)
    if has_errors(problems):
        out.write(render_report(Report.build(__version__, args.features, problems)))
        return 1
    if args.count:
        out.write(f"{count_configurations(fd)}\n")
    else:
        for c in enumerate_configurations(fd):
            out.write(f"{c.variant_id}: {', '.join(c.sorted_names())}\n")
    return 0


def _cmd_derive(args, out):
    model = _load(args.file)
    if args.binding not in model.bindings:
        raise UsageError(f"fnv: no binding named {args.binding!r}")
    try:
        if args.config:
            names = {n.strip() for n in args.config.split(",") if n.strip()}
            fd = model.feature_diagrams[model.bindings[args.binding].diagram]
            names.add(fd.root.name)
            variants = [derive_variant(model, args.binding, names)]
        else:
            variants = derive_all(model, args.binding)
    except BindingError as e:
        out.write(render_report(Report.build(__version__, args.binding, e.diagnostics)))
        return 1
    except InvalidConfiguration as e:
        raise UsageError(f"fnv: {e}") from None
    warnings = [d for d in validate_binding(model, args.binding) if not d.is_error]

    emit = args.emit or ("dot" if args.out else "fnv")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        written = []
        for v in variants:
            if emit in ("dot", "both"):
                written.append(_write(os.path.join(args.out, v.variant_id + ".dot"),
                                      normalized_dot(v.variant_id, v.as_normalized())))
            if emit in ("fnv", "both"):
                text = "\n".join(print_view(variant_view_def(model, v))) + "\n"
                written.append(_write(os.path.join(args.out, v.variant_id + ".fnv"), text))
        out.write(render_report(Report.build(__version__, args.binding, warnings)))
        for path in written:
            out.write(f"wrote {path}\n")
        return 0
    for d in warnings:
        out.write(f"// {d.code} {d.severity} {d.subject}: {d.message}\n")
    chunks = []
    for v in variants:
        if emit in ("fnv", "both"):
            chunks.append("\n".join(print_view(variant_view_def(model, v))) + "\n")
        if emit in ("dot", "both"):
            chunks.append(normalized_dot(v.variant_id, v.as_normalized()))
    out.write("\n".join(chunks))
    return 0


def _write(path, text):
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return path


def _cmd_export_dot(args, out):
    model = _load(args.file)
    try:
        text = export_dot(model, args.target)
    except BindingError as e:
        out.write(render_report(Report.build(__version__, args.target, e.diagnostics)))
        return 1
    if args.output:
        _write(args.output, text)
    else:
        out.write(text)
    return 0


COMMANDS = {
    "check": _cmd_check,
    "configs": _cmd_configs,
    "derive": _cmd_derive,
    "export-dot": _cmd_export_dot,
}


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(stderr)
            return 2
        return COMMANDS[args.command](args, stdout)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    except UsageError as e:
        stderr.write(f"{e}\n")
        return 2
    except ParseError as e:
        for d in e.diagnostics:
            stderr.write(f"{getattr(args, 'file', '<input>')}:{d.line}:{d.column}: {d.code} {d.message}\n")
        return 2
    except FnvError as e:
        stderr.write(f"fnv: {e}\n")
        return 2


def main():
    sys.exit(run_cli())
