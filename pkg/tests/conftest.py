from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import tm_prefix  # noqa: E402
from tm_antipowers.antipower import AntiPowerEngine  # noqa: E402


@pytest.fixture(scope="session")
def engine():
    return AntiPowerEngine()


@pytest.fixture(scope="session")
def word():
    """2^17 letters from the string-doubling oracle."""
    return tm_prefix(1 << 17)
