from pathlib import Path

import pytest

from holex import build_constraints, compile_system, load_system, reachable_set

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def brain_path() -> Path:
    return DATA_DIR / "brain.json"


@pytest.fixture(scope="session")
def brain(brain_path):
    return load_system(str(brain_path))


@pytest.fixture(scope="session")
def brain_rules(brain):
    return compile_system(brain)


@pytest.fixture(scope="session")
def brain_ad_cs(brain_rules):
    return build_constraints(reachable_set("AD", brain_rules))
