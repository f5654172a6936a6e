import pathlib

import pytest

from fnv import parse

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
GOLDEN = pathlib.Path(__file__).parent / "golden"


def load(name):
    return parse((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def cls_text():
    return (FIXTURES / "cls.fnv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def cls_model():
    return load("cls.fnv")


@pytest.fixture(scope="session")
def alt_model():
    return load("alternative.fnv")


@pytest.fixture(scope="session")
def or_model():
    return load("orgroup.fnv")


@pytest.fixture(scope="session")
def opt_model():
    return load("optional.fnv")
