"""Pytest fixtures for testing."""

import json
import shutil
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from core.config import Settings
from core.measure.interference import SetFunction
from core.measure.polymeasure import PolyMeasure
from core.measure.space import FiniteSpace


@pytest.fixture
def abc():
    """The three-atom space {a, b, c}."""
    return FiniteSpace(("a", "b", "c"))


@pytest.fixture
def square_measure(abc):
    """mu(S) = |S|^2 on {a, b, c}."""
    return SetFunction.from_callable(abc, lambda s: len(s) ** 2)


@pytest.fixture
def cube_measure(abc):
    """mu(S) = |S|^3 on {a, b, c}; not grade-2 additive."""
    return SetFunction.from_callable(abc, lambda s: len(s) ** 3)


@pytest.fixture
def all_ones(abc):
    """The all-ones 3 x 3 bimeasure."""
    return PolyMeasure((abc, abc), np.full((3, 3), Fraction(1), dtype=object))


@pytest.fixture
def checkerboard():
    """The bimeasure [[1, -1], [-1, 1]] on two atoms."""
    space = FiniteSpace(("0", "1"))
    return PolyMeasure((space, space), [[1, -1], [-1, 1]])


@pytest.fixture
def rng():
    """Seeded numpy generator."""
    return np.random.default_rng(20240601)


@pytest.fixture
def settings():
    """Default settings without reading the environment."""
    return Settings()


@pytest.fixture
def temp_storage():
    """Create temporary storage directory."""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir)


@pytest.fixture
def write_artifact(temp_storage):
    """Write a dictionary as a JSON file and return its path."""
    counter = {"n": 0}

    def write(data, name=None):
        counter["n"] += 1
        path = Path(temp_storage) / (name or f"artifact_{counter['n']}.json")
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
        return str(path)

    return write
