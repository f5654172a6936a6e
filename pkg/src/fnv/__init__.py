"""Function nets, views, feature diagrams and variant views.

Typical use::

    from fnv import parse, check_net, check_view, derive_all

    model = parse(open("car.fnv").read())
    check_net(model, "CarComfort")
"""

__version__ = "0.1.0"

from .features import (  # noqa: E402
    Configuration, FeatureDiagram, FeatureNode, count_configurations, enumerate_configurations,
    is_valid_configuration, validate_diagram,
)
from .model import (  # noqa: E402
    Diagnostic, ElaborationError, FnvError, FunctionNetDef, InstanceTree, UnknownNameError,
    elaborate, is_descendant, signals_between,
)
from .netcheck import check_net  # noqa: E402
from .parser import Model, ParseError, parse, parse_file  # noqa: E402
from .printer import print_model  # noqa: E402
from .variants import (  # noqa: E402
    Binding, VariantView, derive_all, derive_variant, validate_binding, variant_view_def,
)
from .views import ViewDef, check_view, resolve_view_block  # noqa: E402
from .dot import export_dot  # noqa: E402
from .report import Report, render_report  # noqa: E402

__all__ = [
    "Binding", "Configuration", "Diagnostic", "ElaborationError", "FeatureDiagram", "FeatureNode",
    "FnvError", "FunctionNetDef", "InstanceTree", "Model", "ParseError", "Report", "UnknownNameError",
    "VariantView", "ViewDef", "check_net", "check_view", "count_configurations", "derive_all",
    "derive_variant", "elaborate", "enumerate_configurations", "export_dot", "is_descendant",
    "is_valid_configuration", "parse", "parse_file", "print_model", "render_report",
    "resolve_view_block", "signals_between", "validate_binding", "validate_diagram",
    "variant_view_def",
]
