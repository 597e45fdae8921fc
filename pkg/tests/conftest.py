import os

import httpx
from fastapi.testclient import TestClient
from hypothesis import settings
from pytest import fixture


os.environ.setdefault("GRD_DB_PATH", "test_db.json")

from app.app import app  # noqa: E402


HEADERS = {"accept": "application/json", "Content-Type": "application/json"}

settings.register_profile("grd", deadline=None)
settings.load_profile("grd")


class Client:
    def __init__(self, base_url: str, requests):
        self.base_url = base_url
        self.requests = requests

    def get(self, path: str) -> httpx.Response:
        return self.requests.get(f"{self.base_url}{path}", headers=HEADERS)

    def post(self, path: str, request_body: str) -> httpx.Response:
        return self.requests.post(
            f"{self.base_url}{path}", content=request_body, headers=HEADERS
        )


@fixture
def test_client() -> TestClient:
    return TestClient(app)


@fixture
def client(test_client: TestClient) -> Client:
    return Client(base_url="", requests=test_client)


def pytest_sessionstart(session):
    db_file = os.environ["GRD_DB_PATH"]
    if os.path.exists(db_file):
        os.remove(db_file)
