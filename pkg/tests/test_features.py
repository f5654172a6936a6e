import random

import pytest
from hypothesis import given, settings, strategies as st

from fnv import parse
from fnv.features import (
    count_configurations, enumerate_configurations, is_valid_configuration, validate_diagram, variant_id,
)
from fnv.model import UnknownNameError

from generators import random_diagram
from oracles import brute_force_configurations, feature_semantics_ok


@pytest.fixture(scope="module")
def car(cls_model):
    return cls_model.feature_diagrams["CarFD"]


@pytest.mark.parametrize("selected, expected", [
    ({"Car", "Engine", "Gasoline"}, True),
    ({"Car", "Engine", "Gasoline", "Electric"}, False),
    ({"Car", "Engine", "Gasoline", "ComfortFunctions"}, False),
    (set(), False),
    ({"Car", "Engine", "Hybrid", "ComfortFunctions", "Navigation", "CentralLocking"}, True),
    ({"Car", "Engine"}, False),
    ({"Car", "Gasoline"}, False),
    ({"Car", "Engine", "Gasoline", "Navigation"}, False),
])
def test_membership_examples(car, selected, expected):
    assert is_valid_configuration(car, selected) is expected
    assert feature_semantics_ok(car, selected) is expected


def test_unknown_name_raises(car):
    with pytest.raises(UnknownNameError):
        is_valid_configuration(car, {"Car", "Turbo"})


def test_car_has_24_configurations_matching_brute_force(car):
    assert count_configurations(car) == 24
    got = [c.selected for c in enumerate_configurations(car)]
    assert got == brute_force_configurations(car, is_valid_configuration)
    assert got == brute_force_configurations(car, feature_semantics_ok)
    assert len(set(got)) == 24


def test_car_diagram_clean(car):
    assert validate_diagram(car) == []


@pytest.mark.parametrize("fixture, expected", [
    ("alt_model", [{"Feature1", "S1"}, {"Feature1", "S2"}]),
    ("or_model", [{"Feature2", "S1"}, {"Feature2", "S1", "S2"}, {"Feature2", "S2"}]),
    ("opt_model", [{"Feature3", "S1", "S2"}, {"Feature3", "S2"}]),
])
def test_small_diagrams(request, fixture, expected):
    model = request.getfixturevalue(fixture)
    (fd,) = model.feature_diagrams.values()
    got = [set(c.selected) for c in enumerate_configurations(fd)]
    assert got == expected
    assert count_configurations(fd) == len(expected)


def test_variant_ids(or_model):
    fd = or_model.feature_diagrams["FD8"]
    assert [c.variant_id for c in enumerate_configurations(fd)] == ["vS1", "vS1S2", "vS2"]
    assert variant_id(fd, {"Feature2"}) == "vFeature2"


def test_single_root_counts_one():
    fd = parse("features D { feature R }").feature_diagrams["D"]
    assert count_configurations(fd) == 1
    assert [c.variant_id for c in enumerate_configurations(fd)] == ["vR"]


def test_or_group_of_two_counts_three():
    fd = parse("features D { feature R { or { feature A; feature B; } } }").feature_diagrams["D"]
    assert count_configurations(fd) == 3


def test_f1_duplicate_name():
    m = parse("features D { feature R { mandatory feature Engine; optional feature X { mandatory feature Engine; } } }")
    codes = [d.code for d in validate_diagram(m.feature_diagrams["D"])]
    assert codes == ["F1"]


def test_f2_degenerate_group():
    m = parse("features D { feature R { alternative { feature OnlyOne; } } }")
    codes = [d.code for d in validate_diagram(m.feature_diagrams["D"])]
    assert codes == ["F2"]


def test_f3_only_with_bindings(cls_model):
    fd = cls_model.feature_diagrams["CarFD"]
    assert validate_diagram(fd, [cls_model.bindings["CarFD"]]) == []
    text = (
        "funcnet N { block A; }\nview V of N { block A; }\n"
        "features D { feature R { optional feature X; optional feature Y; } }\n"
        "binding D -> N { X : view V; }\n"
    )
    m = parse(text)
    found = validate_diagram(m.feature_diagrams["D"], [m.bindings["D"]])
    assert [(d.code, d.severity, d.subject) for d in found] == [("F3", "warning", "D:Y")]


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 12))
def test_count_matches_enumeration(seed, n):
    fd = random_diagram(random.Random(seed), n)
    configs = enumerate_configurations(fd)
    assert count_configurations(fd) == len(configs)
    selections = [c.selected for c in configs]
    assert len(set(selections)) == len(selections)
    assert selections == sorted(selections, key=sorted)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 10))
def test_enumeration_equals_oracle(seed, n):
    fd = random_diagram(random.Random(seed), n)
    got = [c.selected for c in enumerate_configurations(fd)]
    assert got == brute_force_configurations(fd, feature_semantics_ok)
    assert all(is_valid_configuration(fd, s) for s in got)
