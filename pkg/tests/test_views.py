import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from fnv import check_view, elaborate, parse, resolve_view_block
from fnv.model import ConnectorDecl, dotted
from fnv.views import (
    AmbiguousPathError, EnvBlock, NetHasErrors, UnresolvedPathError, ViewBlock, ViewDef, analyze, net_as_view,
    normalize_view, render_view,
)

from conftest import FIXTURES

CLEAN_VIEWS = ["Coupe", "DoorEnv", "FrontDoors", "CentralLockingView", "GasolineView",
               "ElectricView", "HybridView", "NavigationView", "AirConditionView"]


@pytest.fixture(scope="module")
def tree(cls_model):
    return elaborate(cls_model.net("CarComfort"))


def with_view(model, text):
    """``model`` plus the views declared in ``text``."""
    net_text = (FIXTURES / "cls.fnv").read_text(encoding="utf-8")
    extra = parse(net_text + "\n" + text)
    return dataclasses.replace(model, views=extra.views)


def codes(diags):
    return sorted(d.code for d in diags)


def test_resolution_examples(tree):
    assert resolve_view_block(tree, "door_fl", "CLS") == ("CLS", "door_fl")
    assert resolve_view_block(tree, "CLS.Trunk") == ("CLS", "Trunk")
    assert resolve_view_block(tree, "StatusInterpreter") == ("CLS", "CLSControlUnit", "StatusInterpreter")
    with pytest.raises(AmbiguousPathError) as info:
        resolve_view_block(tree, "DoorContact")
    assert len(info.value.matches) == 4
    with pytest.raises(UnresolvedPathError):
        resolve_view_block(tree, "Spoiler")
    with pytest.raises(UnresolvedPathError):
        resolve_view_block(tree, "Trunk", "Engine")


@pytest.mark.parametrize("name", CLEAN_VIEWS)
def test_fixture_views_are_clean(cls_model, name):
    assert check_view(cls_model, name) == []


def test_door_env_normalization(cls_model):
    nv = normalize_view(cls_model, "DoorEnv")
    assert nv.env_blocks == {"Hand"}
    assert nv.ext_blocks == {("CLS", "CLSControlUnit", "StatusInterpreter")}
    assert (("env", "Hand"), ("block", "CLS.door_fl.DoorContact"), None, "M") in nv.connectors


@pytest.mark.parametrize("text, expected", [
    ("view V of CarComfort { block CLS { block Trunk; block Spoiler; } }", ["R1"]),
    ("view V of CarComfort { block DoorContact; }", ["R1"]),
    ("view V of CarComfort { block Trunk; block CLS.Trunk; }", ["R1"]),
    ("view V of CarComfort { env Trunk; block Trunk; }", ["R1"]),
    ("view V of CarComfort { block Trunk; block Engine; connect Trunk -> NavigationSystem : X; }", ["R1"]),
    ("view V of CarComfort { block Engine { block Trunk; } }", ["R2"]),
    ("view V of CarComfort { block CLS; block door_fl.DoorContact; }", ["R3"]),
    ("view V of CarComfort { block CLS { block Trunk; block door_fl; connect Trunk -> door_fl : LockCmd; } }", ["R4"]),
    ("view V of CarComfort { block Engine; block Trunk; connect Engine -> Trunk; }", ["R4"]),
    ("view V of view Coupe { block CLS { block door_rl; } }", ["R6"]),
    ("view V of view Coupe { block CLS { block door_fl; block door_fr; "
     "connect door_fl -> door_fr : LockCmd; } }", ["R4", "R6"]),
])
def test_forced_violations(cls_model, text, expected):
    model = with_view(cls_model, text)
    assert codes(check_view(model, "V")) == expected


def test_base_view_errors_reported_once(cls_model):
    model = with_view(cls_model, "view B of CarComfort { block Spoiler; }\n"
                                 "view V of view B { block Spoiler; }")
    assert codes(check_view(model, "V")) == ["R1", "R6"]


def test_superblock_suffices_for_communication(cls_model):
    model = with_view(cls_model, "view V of CarComfort { block CLS; block NavigationSystem; "
                                 "block Engine; connect Engine -> NavigationSystem : EngineStatus; "
                                 "connect CarComfort -> CLS : Speed; }")
    assert check_view(model, "V") == []


def test_view_of_broken_net_raises():
    model = parse("funcnet N { block A; block B; connect A -> B : S; connect B -> A : S; }\n"
                  "view V of N { block A; }")
    with pytest.raises(NetHasErrors):
        check_view(model, "V")


def test_specialization_composes(cls_model, tree):
    direct = analyze(dataclasses.replace(cls_model.views["FrontDoors"], base="CarComfort", base_is_view=False),
                     tree)[1]
    assert direct == []


def test_net_as_view_is_consistent(cls_model, tree):
    view = net_as_view(tree, "Self")
    model = dataclasses.replace(cls_model, views={**cls_model.views, "Self": view})
    assert check_view(model, "Self") == []
    for name in ("alternative.fnv", "orgroup.fnv", "optional.fnv"):
        m = parse((FIXTURES / name).read_text(encoding="utf-8"))
        for net in m.funcnets.values():
            v = net_as_view(elaborate(net), "Self")
            m2 = dataclasses.replace(m, views={**m.views, "Self": v})
            assert check_view(m2, "Self") == []


# -- deletion property ------------------------------------------------------------


def _flatten(blocks, prefix=()):
    """(full path, view block, has shown parent) for every written block."""
    out = []
    for vb in blocks:
        full = prefix + vb.path
        out.append((full, vb, bool(prefix)))
        out.extend(_flatten(vb.children, full))
    return out


def _delete_block(blocks, target, prefix=()):
    """Remove ``target``; its children move to the top level under their full paths."""
    kept, hoisted = [], []
    for vb in blocks:
        full = prefix + vb.path
        if full == target:
            hoisted.extend(dataclasses.replace(c, path=full + c.path) for c in vb.children)
            continue
        kids, up = _delete_block(vb.children, target, full)
        kept.append(dataclasses.replace(vb, children=tuple(kids)))
        hoisted.extend(up)
    return kept, hoisted


def _rendered(model, name, tree):
    view = model.views[name]
    r = render_view(name, view.base, tree, normalize_view(model, name))
    return dataclasses.replace(r, base=view.base, base_is_view=view.base_is_view)


@pytest.mark.parametrize("name", CLEAN_VIEWS)
def test_rendered_views_stay_clean(cls_model, tree, name):
    view = _rendered(cls_model, name, tree)
    model = dataclasses.replace(cls_model, views={**cls_model.views, name: view})
    assert check_view(model, name) == []


@settings(max_examples=120, deadline=None)
@given(name=st.sampled_from(CLEAN_VIEWS), data=st.data())
def test_deletion_keeps_view_consistent(cls_model, tree, name, data):
    view = _rendered(cls_model, name, tree)
    written = _flatten(view.blocks)
    options = [("block", i) for i in range(len(written))] + [("conn", i) for i in range(len(view.connectors))]
    if not options:
        return
    kind, i = data.draw(st.sampled_from(options))
    expect_r3 = False
    if kind == "conn":
        mutated = dataclasses.replace(view, connectors=view.connectors[:i] + view.connectors[i + 1:])
    else:
        full, vb, nested = written[i]
        kept, hoisted = _delete_block(view.blocks, full)
        gone = dotted(full)
        conns = tuple(c for c in view.connectors
                      if gone not in {dotted(p) for p in (c.source,) + c.targets})
        mutated = dataclasses.replace(view, blocks=tuple(kept) + tuple(hoisted), connectors=conns)
        expect_r3 = nested and bool(vb.children)
    model = dataclasses.replace(cls_model, views={**cls_model.views, name: mutated})
    found = check_view(model, name)
    assert {d.code for d in found} == ({"R3"} if expect_r3 else set())


@settings(max_examples=120, deadline=None)
@given(data=st.data(), stereotype=st.sampled_from(["M", "E", "H", None]))
def test_non_digital_and_env_connectors_skip_r4(cls_model, tree, data, stereotype):
    names = sorted(n.qname for n in tree.walk())
    a = data.draw(st.sampled_from(names))
    b = data.draw(st.sampled_from([q for q in names if q[:len(a)] != a and a[:len(q)] != q] or [None]))
    if b is None:
        return
    blocks = (ViewBlock(a), ViewBlock(b))
    if stereotype is None:
        conns = (ConnectorDecl(("Env",), (a,), "Poke", None), ConnectorDecl(b, (("Env",),), None, None))
    else:
        conns = (ConnectorDecl(a, (b,), None, stereotype),)
    view = ViewDef("X", "CarComfort", False, blocks, (EnvBlock("Env"),), conns)
    model = dataclasses.replace(cls_model, views={**cls_model.views, "X": view})
    assert [d for d in check_view(model, "X") if d.code == "R4"] == []
