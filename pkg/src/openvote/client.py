"""Thin HTTP client for the ledger service; mirrors the LocalClient surface.

With a base URL it talks to a running server; without one it mounts the
FastAPI app in-process over ASGI, so batch runs exercise the full HTTP path
without any networking.
"""

from __future__ import annotations

import httpx


class ServiceError(RuntimeError):
    """The service answered with an HTTP error."""


class HttpClient:
    def __init__(self, base_url: str | None = None, cost_config: str | None = None,
                 timeout: float = 60.0):
        if base_url:
            self._http = httpx.Client(base_url=base_url, timeout=timeout)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._http = TestClient(create_app())
        self.cost_config = cost_config
        self.election_id: str | None = None

    def close(self) -> None:
        self._http.close()

    def _check(self, response: httpx.Response) -> dict:
        if response.status_code >= 400:
            raise ServiceError(f"{response.request.method} {response.request.url.path} "
                               f"-> {response.status_code}: {response.text}")
        return response.json()

    def _path(self, suffix: str) -> str:
        if self.election_id is None:
            raise ServiceError("no election deployed yet")
        return f"/elections/{self.election_id}/{suffix}"

    # -- surface shared with LocalClient ------------------------------------

    def deploy(self, caller: str, params: dict, value: int) -> dict:
        body = self._check(self._http.post("/elections", json={
            "admin": caller, "params": params, "value": value,
            "cost_config": self.cost_config}))
        if body["tx"]["accepted"]:
            self.election_id = body["election_id"]
        return body["tx"]

    def advance(self, height: int) -> int:
        return self._check(self._http.post(self._path("advance"),
                                           json={"height": height}))["height"]

    def register(self, caller: str, pk: dict, proof: dict, merkle_proof: dict,
                 value: int) -> dict:
        return self._check(self._http.post(self._path("register"), json={
            "sender": caller, "pk": pk, "proof": proof,
            "merkle_proof": merkle_proof, "value": value}))

    def cast_vote(self, caller: str, enc_vote: dict, index: int, proof: dict) -> dict:
        return self._check(self._http.post(self._path("cast"), json={
            "sender": caller, "enc_vote": enc_vote, "index": index, "proof": proof}))

    def set_tally(self, caller: str, result: int, proof: dict) -> dict:
        return self._check(self._http.post(self._path("tally"), json={
            "sender": caller, "result": result, "proof": proof}))

    def refund(self, caller: str) -> dict:
        return self._check(self._http.post(self._path("refund"), json={"sender": caller}))

    def state(self) -> dict:
        return self._check(self._http.get(self._path("state")))

    def transcript(self) -> list[str]:
        return self._check(self._http.get(self._path("transcript")))["lines"]

    def costs(self) -> list[dict]:
        return self._check(self._http.get(self._path("costs")))["rows"]
