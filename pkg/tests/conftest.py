"""Shared fixtures: repository paths and access to the oracle scripts."""

import sys
from pathlib import Path

import pytest
from hypothesis import settings

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
SCRIPTS = REPO_ROOT / "scripts"

if str(SCRIPTS) not in sys.path:
    sys.path.insert(0, str(SCRIPTS))

# Single-core container: generous deadline so slow examples don't flake.
settings.register_profile("local", deadline=None)
settings.load_profile("local")


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fevori_source() -> str:
    return fixture_text("fevori.vp")


@pytest.fixture(scope="session")
def conquer_source() -> str:
    return fixture_text("conquer.vp")
