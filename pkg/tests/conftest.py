import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from relbnlib import parse_spec  # noqa: E402

SAMPLES = os.path.join(ROOT, "samples")


def sample_path(name):
    return os.path.join(SAMPLES, name)


def read_sample(name):
    with open(sample_path(name)) as f:
        return f.read()


@pytest.fixture
def friends():
    return parse_spec(read_sample("friends.rbn"))


@pytest.fixture
def fig2():
    return parse_spec(read_sample("fig2.rbn"))


@pytest.fixture
def example5():
    return parse_spec(read_sample("example5.rbn"))


@pytest.fixture
def family():
    return parse_spec(read_sample("family.rbn"))


@pytest.fixture
def exists_role():
    """A(x) := exists y: r(x,y) with P(r) = 1/2."""
    return parse_spec("prob r(x,y) = 1/2.\ndef A(x) := exists y: r(x,y).\n")
