import json
import pathlib

import pytest

from projsqueeze.bodyspec import builtin_body

GOLDEN_PATH = pathlib.Path(__file__).parent / "goldens" / "oracle.json"


@pytest.fixture(scope="session")
def goldens():
    with open(GOLDEN_PATH) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def square():
    return builtin_body("square")


@pytest.fixture(scope="session")
def triangle():
    return builtin_body("triangle")


@pytest.fixture(scope="session")
def ball2():
    return builtin_body("ball2")


@pytest.fixture(scope="session")
def ellipse():
    return builtin_body("ellipse(2,1)")


@pytest.fixture(scope="session")
def quartic():
    return builtin_body("quartic")


@pytest.fixture(scope="session")
def lshape():
    return builtin_body("lshape")
