import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes `oracles` importable


@pytest.fixture(scope="session")
def client():
    from fastapi.testclient import TestClient

    from mdev.service.app import create_app

    with TestClient(create_app()) as c:
        yield c
