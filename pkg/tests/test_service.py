import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from openvote.election import ElectionDriver, RunConfig
from openvote.service import create_app


@pytest.fixture()
def http():
    return TestClient(create_app())


class ServiceBackedClient:
    """Adapter giving ElectionDriver the client surface over raw HTTP calls."""

    def __init__(self, http):
        self.http = http
        self.election_id = None

    def deploy(self, caller, params, value):
        body = self.http.post("/elections", json={
            "admin": caller, "params": params, "value": value}).json()
        self.election_id = body["election_id"]
        return body["tx"]

    def _post(self, suffix, payload):
        response = self.http.post(f"/elections/{self.election_id}/{suffix}", json=payload)
        assert response.status_code == 200, response.text
        return response.json()

    def advance(self, height):
        return self._post("advance", {"height": height})["height"]

    def register(self, caller, pk, proof, merkle_proof, value):
        return self._post("register", {"sender": caller, "pk": pk, "proof": proof,
                                       "merkle_proof": merkle_proof, "value": value})

    def cast_vote(self, caller, enc_vote, index, proof):
        return self._post("cast", {"sender": caller, "enc_vote": enc_vote,
                                   "index": index, "proof": proof})

    def set_tally(self, caller, result, proof):
        return self._post("tally", {"sender": caller, "result": result, "proof": proof})

    def refund(self, caller):
        return self._post("refund", {"sender": caller})

    def state(self):
        return self.http.get(f"/elections/{self.election_id}/state").json()

    def transcript(self):
        return self.http.get(f"/elections/{self.election_id}/transcript").json()["lines"]

    def costs(self):
        return self.http.get(f"/elections/{self.election_id}/costs").json()["rows"]


def run_via_http(http, config):
    driver = ElectionDriver(config, ServiceBackedClient(http))
    driver.deploy()
    driver.run_registration()
    driver.run_casting()
    driver.run_tallying()
    driver.run_refunds()
    return driver.finalize()


def test_full_election_over_http(http):
    report = run_via_http(http, RunConfig(n=3, votes=[1, 1, 0], seed=21))
    assert report.honest_success
    assert report.tally == 2


def test_rejection_is_a_normal_response(http):
    client = ServiceBackedClient(http)
    driver = ElectionDriver(RunConfig(n=2, votes=[1, 0], seed=3), client)
    driver.deploy()
    client.advance(2)
    driver.register_voter(0)
    tx = driver.register_voter(0)  # duplicate
    assert tx["accepted"] is False
    assert tx["code"] == "duplicate-voter"
    assert tx["cost"]["model_cost"] > 0


def test_service_info_lists_elections(http):
    assert http.get("/").json()["elections"] == []
    client = ServiceBackedClient(http)
    driver = ElectionDriver(RunConfig(n=1, votes=[1], seed=5), client)
    driver.deploy()
    info = http.get("/").json()
    assert info["elections"] == [client.election_id]
    assert info["api_version"] == "1"


def test_unknown_election_is_404(http):
    assert http.get("/elections/e9999/state").status_code == 404
    assert http.post("/elections/e9999/advance", json={"height": 3}).status_code == 404


def test_clock_rewind_is_409(http):
    client = ServiceBackedClient(http)
    ElectionDriver(RunConfig(n=1, votes=[0], seed=5), client).deploy()
    client.advance(7)
    response = http.post(f"/elections/{client.election_id}/advance", json={"height": 3})
    assert response.status_code == 409


def test_malformed_payload_is_422(http):
    client = ServiceBackedClient(http)
    ElectionDriver(RunConfig(n=1, votes=[0], seed=5), client).deploy()
    response = http.post(f"/elections/{client.election_id}/register", json={"sender": "oops"})
    assert response.status_code == 422
    response = http.post(f"/elections/{client.election_id}/register", json={
        "sender": "0x" + "11" * 20,
        "pk": {"x": "0xnothex", "y": "0x1"},
        "proof": {"backend": "dev-transparent", "circuit_digest": "",
                  "statement_digest": "", "payload_hex": ""},
        "merkle_proof": {"index": 0, "siblings": []},
        "value": 1000})
    assert response.status_code == 422


def test_rejected_deploy_creates_no_election(http):
    client = ServiceBackedClient(http)
    driver = ElectionDriver(RunConfig(n=1, votes=[1], seed=6), client)
    params = driver.election_params_json()
    body = http.post("/elections", json={"admin": driver.admin, "params": params,
                                         "value": params["deposit"] - 1}).json()
    assert body["tx"]["accepted"] is False
    assert http.get("/").json()["elections"] == []


def test_state_and_transcript_endpoints(http):
    report = run_via_http(http, RunConfig(n=2, votes=[1, 0], seed=8))
    assert report.honest_success
    election_id = http.get("/").json()["elections"][0]
    state = http.get(f"/elections/{election_id}/state").json()
    assert state["tally_result"] == 1
    assert state["index"] == 2
    lines = http.get(f"/elections/{election_id}/transcript").json()["lines"]
    assert len(lines) == 1 + 2 + 2 + 1 + 3  # deploy, registers, casts, tally, refunds
    rows = http.get(f"/elections/{election_id}/costs").json()["rows"]
    assert {row["function"] for row in rows} == {"deploy", "register", "cast_vote",
                                                 "set_tally", "refund"}
