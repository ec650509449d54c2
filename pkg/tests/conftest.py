import random
from pathlib import Path

import pytest

from hrsproof.hrs import Hrs, load_hrs

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
ORTHOGONAL = ["mu", "dup", "erase", "cd"]


def load_fixture(name: str) -> Hrs:
    return load_hrs((FIXTURES / f"{name}.hrs").read_text())


def seeded(n: int, names=ORTHOGONAL):
    """Deterministic (rng, hrs) pairs cycling over the orthogonal fixtures."""
    systems = [load_fixture(name) for name in names]
    for seed in range(n):
        yield seed, random.Random(seed), systems[seed % len(systems)]


@pytest.fixture(scope="session")
def mu():
    return load_fixture("mu")


@pytest.fixture(scope="session")
def cd():
    return load_fixture("cd")


@pytest.fixture(scope="session")
def std():
    return load_fixture("std")


@pytest.fixture(scope="session")
def erase():
    return load_fixture("erase")


@pytest.fixture(scope="session")
def omega():
    return load_fixture("omega")


@pytest.fixture(scope="session")
def dup():
    return load_fixture("dup")
