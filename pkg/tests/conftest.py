from pathlib import Path

import pytest

from usdsilo.synthetic import make_world

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def world():
    return make_world()


@pytest.fixture
def data_dir():
    return DATA
