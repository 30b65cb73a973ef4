"""Thin HTTP client for the service.

The CLI always talks HTTP; without --server it mounts the app in-process via
an ASGI transport, so behaviour is identical with and without a network hop.
"""

import httpx

from feedopt.config import ExperimentConfig

__all__ = ["ServiceClient", "ServiceError"]

_TIMEOUT = 600.0


class ServiceError(Exception):
    def __init__(self, code: int, reason: str):
        super().__init__(reason)
        self.code = code
        self.reason = reason


class ServiceClient:
    def __init__(self, server: str | None = None):
        if server is None:
            from httpx import ASGITransport

            from feedopt.service import app

            self._client = httpx.Client(transport=ASGITransport(app=app),
                                        base_url="http://feedopt.local", timeout=_TIMEOUT)
        else:
            self._client = httpx.Client(base_url=server, timeout=_TIMEOUT)

    def close(self):
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc):
        self.close()

    def _post(self, endpoint: str, payload: dict) -> dict:
        response = self._client.post(endpoint, json=payload)
        if response.status_code != 200:
            detail = {}
            try:
                detail = response.json().get("detail", {})
            except ValueError:
                pass
            if isinstance(detail, dict) and "code" in detail:
                raise ServiceError(int(detail["code"]), str(detail.get("reason", "")))
            raise ServiceError(4, f"service error {response.status_code}: {response.text[:500]}")
        return response.json()

    def run(self, config: ExperimentConfig, algorithm: str | None = None) -> dict:
        return self._post("/run", {"config": config.model_dump(mode="json"),
                                   "algorithm": algorithm})

    def compare(self, config: ExperimentConfig, suite: str) -> dict:
        return self._post("/compare", {"config": config.model_dump(mode="json"),
                                       "suite": suite})

    def simulate(self, config: ExperimentConfig, columns: dict) -> dict:
        payload = {"config": config.model_dump(mode="json")}
        payload.update(columns)
        return self._post("/simulate", payload)

    def info(self, config: ExperimentConfig) -> dict:
        return self._post("/info", {"config": config.model_dump(mode="json")})
