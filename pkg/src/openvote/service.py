"""HTTP facade over the simulated ledger: one election per chain, many clients.

The service plays the role of the chain; everything heavy (key generation,
witnesses, proofs) happens client-side and arrives here as wire-format JSON.
Rejected transactions are normal outcomes and come back as accepted=False with
a rejection code, not as HTTP errors.
"""

from __future__ import annotations

from itertools import count
from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .election import LocalClient

API_VERSION = "1"


class PointModel(BaseModel):
    x: str
    y: str


class ProofModel(BaseModel):
    backend: str
    circuit_digest: str
    statement_digest: str
    payload_hex: str


class MerkleProofModel(BaseModel):
    index: int
    siblings: list[str]
    depth: Optional[int] = None

    def as_json(self) -> dict:
        obj: dict = {"index": self.index, "siblings": self.siblings}
        if self.depth is not None:
            obj["depth"] = self.depth
        return obj


class CreateElectionRequest(BaseModel):
    admin: str = Field(description="0x-prefixed 20-byte account address")
    params: dict = Field(description="election parameters in ledger wire format")
    value: int = Field(description="attached collateral deposit")
    cost_config: Optional[str] = None


class TxResultModel(BaseModel):
    accepted: bool
    code: Optional[str]
    height: int
    function: str
    result: Any = None
    cost: Optional[dict] = None


class CreateElectionResponse(BaseModel):
    election_id: str
    tx: TxResultModel


class AdvanceRequest(BaseModel):
    height: int


class AdvanceResponse(BaseModel):
    height: int


class RegisterRequest(BaseModel):
    sender: str
    pk: PointModel
    proof: ProofModel
    merkle_proof: MerkleProofModel
    value: int


class CastVoteRequest(BaseModel):
    sender: str
    enc_vote: PointModel
    index: int
    proof: ProofModel


class SetTallyRequest(BaseModel):
    sender: str
    result: int
    proof: ProofModel


class RefundRequest(BaseModel):
    sender: str


class TranscriptResponse(BaseModel):
    lines: list[str]


class CostReportResponse(BaseModel):
    rows: list[dict]


def create_app() -> FastAPI:
    app = FastAPI(
        title="openvote ledger service",
        description="Simulated ledger hosting self-tallying elections; "
                    "all heavy computation stays with the callers.",
        version=API_VERSION,
    )
    elections: dict[str, LocalClient] = {}
    ids = count(1)

    def get_client(election_id: str) -> LocalClient:
        client = elections.get(election_id)
        if client is None:
            raise HTTPException(status_code=404, detail=f"no election {election_id!r}")
        return client

    @app.get("/")
    def service_info() -> dict:
        return {"service": "openvote", "api_version": API_VERSION,
                "elections": sorted(elections)}

    @app.post("/elections", response_model=CreateElectionResponse)
    def create_election(request: CreateElectionRequest) -> CreateElectionResponse:
        client = LocalClient(cost_config=request.cost_config)
        try:
            tx = client.deploy(request.admin, request.params, request.value)
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=f"malformed deployment: {exc}")
        election_id = f"e{next(ids):04d}"
        if tx["accepted"]:
            elections[election_id] = client
        return CreateElectionResponse(election_id=election_id, tx=TxResultModel(**tx))

    @app.post("/elections/{election_id}/advance", response_model=AdvanceResponse)
    def advance(election_id: str, request: AdvanceRequest) -> AdvanceResponse:
        client = get_client(election_id)
        try:
            return AdvanceResponse(height=client.advance(request.height))
        except ValueError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    def _submit(fn, *args) -> TxResultModel:
        try:
            return TxResultModel(**fn(*args))
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=f"malformed transaction: {exc}")

    @app.post("/elections/{election_id}/register", response_model=TxResultModel)
    def register(election_id: str, request: RegisterRequest) -> TxResultModel:
        client = get_client(election_id)
        return _submit(client.register, request.sender, request.pk.model_dump(),
                       request.proof.model_dump(), request.merkle_proof.as_json(),
                       request.value)

    @app.post("/elections/{election_id}/cast", response_model=TxResultModel)
    def cast_vote(election_id: str, request: CastVoteRequest) -> TxResultModel:
        client = get_client(election_id)
        return _submit(client.cast_vote, request.sender, request.enc_vote.model_dump(),
                       request.index, request.proof.model_dump())

    @app.post("/elections/{election_id}/tally", response_model=TxResultModel)
    def set_tally(election_id: str, request: SetTallyRequest) -> TxResultModel:
        client = get_client(election_id)
        return _submit(client.set_tally, request.sender, request.result,
                       request.proof.model_dump())

    @app.post("/elections/{election_id}/refund", response_model=TxResultModel)
    def refund(election_id: str, request: RefundRequest) -> TxResultModel:
        client = get_client(election_id)
        return _submit(client.refund, request.sender)

    @app.get("/elections/{election_id}/state")
    def state(election_id: str) -> dict:
        return get_client(election_id).state()

    @app.get("/elections/{election_id}/transcript", response_model=TranscriptResponse)
    def transcript(election_id: str) -> TranscriptResponse:
        return TranscriptResponse(lines=get_client(election_id).transcript())

    @app.get("/elections/{election_id}/costs", response_model=CostReportResponse)
    def costs(election_id: str) -> CostReportResponse:
        return CostReportResponse(rows=get_client(election_id).costs())

    return app


app = create_app()
