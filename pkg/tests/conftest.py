import json
import pathlib

import pytest

HERE = pathlib.Path(__file__).parent


@pytest.fixture(scope="session")
def fixtures():
    """Frozen oracle values; regenerate with oracles/gen_fixtures.py."""
    with open(HERE / "fixtures.json") as f:
        return json.load(f)


def fixture_value(fx, name):
    entry = fx[name]
    return entry["value"] if isinstance(entry, dict) else entry


def fixture_se(fx, name):
    entry = fx[name]
    return entry.get("se", 0.0) if isinstance(entry, dict) else 0.0
