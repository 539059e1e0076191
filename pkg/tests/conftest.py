import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def pinned():
    return json.loads((FIXTURES / "pinned.json").read_text())
