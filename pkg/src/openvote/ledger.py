"""Simulated block-height ledger hosting the voting contract state machine.

One ledger carries one contract. Transactions are applied strictly in
submission order; each produces a transcript record {height, caller, function,
args, outcome, cost} and a cost-model record. Rejected transactions have no
state effect (attached value is returned), which is the only enforcement
mechanism: there is no dispute transaction of any kind.

Phase windows follow the deployment parameters strictly: registration at
T < T1, casting at T1 < T < T2, tallying at T2 < T < T3, refunds at
T3 < T <= T4. If registration or casting is incomplete when its window closes
the election is void and every compliant depositor may reclaim the deposit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Sequence

from . import commit, proofsys
from .circuits import (
    CommittedTallyStatement,
    CommittedVoteStatement,
    PkStatement,
    TallyStatement,
    VARIANTS,
    VoteStatement,
)
from .costmodel import CostModel, load_cost_model
from .field_curve import HALF_P, KAPPA, FieldElement, Point
from .merkle import MerkleProof, verification_digest_count, verify_proof
from .proofsys import ProofObject, VerifyingKey


def format_address(address: bytes) -> str:
    return "0x" + address.hex()


def parse_address(text: str) -> bytes:
    value = bytes.fromhex(text[2:] if text.startswith("0x") else text)
    if len(value) != 20:
        raise ValueError("addresses are 20 bytes")
    return value


class Rejected(Exception):
    """A transaction the contract refuses; the code names the reason."""

    def __init__(self, code: str):
        super().__init__(code)
        self.code = code


REJECTION_CODES = (
    "bad-params", "wrong-deposit", "outside-window", "registration-full",
    "duplicate-voter", "bad-merkle-proof", "bad-proof", "bad-index",
    "wrong-sender", "already-cast", "election-void", "not-admin",
    "already-set", "not-eligible", "already-refunded",
)


@dataclass(frozen=True)
class ElectionParams:
    eligibility_root: bytes
    vk_pk: VerifyingKey
    vk_vote: VerifyingKey
    vk_tally: VerifyingKey
    registration_end: int
    casting_end: int
    tallying_end: int
    refund_end: int
    n: int
    deposit: int
    variant: str = "original"

    def validate(self) -> None:
        if self.n < 1 or self.variant not in VARIANTS or self.deposit <= 0:
            raise Rejected("bad-params")
        heights = (self.registration_end, self.casting_end, self.tallying_end, self.refund_end)
        if not all(a < b for a, b in zip(heights, heights[1:])) or heights[0] <= 0:
            raise Rejected("bad-params")
        for vk, kind in ((self.vk_pk, "public-key-gen"),
                         (self.vk_vote, "encrypted-vote-gen"),
                         (self.vk_tally, "tallying")):
            if vk.circuit.kind != kind or vk.circuit.params.n != self.n \
                    or vk.circuit.params.variant != self.variant:
                raise Rejected("bad-params")

    @property
    def limbs(self) -> int:
        return (self.n + KAPPA - 1) // KAPPA

    @property
    def hash_backend(self) -> str | None:
        return None if self.variant == "original" else self.variant.split("-", 1)[1]

    def to_json(self) -> dict:
        return {
            "eligibility_root": self.eligibility_root.hex(),
            "vk_pk": self.vk_pk.to_json(),
            "vk_vote": self.vk_vote.to_json(),
            "vk_tally": self.vk_tally.to_json(),
            "registration_end": self.registration_end,
            "casting_end": self.casting_end,
            "tallying_end": self.tallying_end,
            "refund_end": self.refund_end,
            "n": self.n,
            "deposit": self.deposit,
            "variant": self.variant,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ElectionParams":
        return cls(
            eligibility_root=bytes.fromhex(obj["eligibility_root"]),
            vk_pk=VerifyingKey.from_json(obj["vk_pk"]),
            vk_vote=VerifyingKey.from_json(obj["vk_vote"]),
            vk_tally=VerifyingKey.from_json(obj["vk_tally"]),
            registration_end=int(obj["registration_end"]),
            casting_end=int(obj["casting_end"]),
            tallying_end=int(obj["tallying_end"]),
            refund_end=int(obj["refund_end"]),
            n=int(obj["n"]),
            deposit=int(obj["deposit"]),
            variant=obj["variant"],
        )


@dataclass
class CostRecord:
    height: int
    caller: str
    function: str
    statement_elems: int = 0
    hash_calls: int = 0
    merkle_hashes: int = 0
    storage_writes: int = 0
    model_cost: int = 0

    def to_json(self) -> dict:
        return {"height": self.height, "caller": self.caller, "function": self.function,
                "statement_elems": self.statement_elems, "hash_calls": self.hash_calls,
                "merkle_hashes": self.merkle_hashes, "storage_writes": self.storage_writes,
                "model_cost": self.model_cost}


CSV_COLUMNS = ("n", "variant", "function", "statement_elems", "hash_calls",
               "merkle_hashes", "storage_writes", "model_cost")


@dataclass
class CostReport:
    n: int
    variant: str
    records: list[CostRecord]

    def rows(self) -> list[dict]:
        return [{"n": self.n, "variant": self.variant, **r.to_json()} for r in self.records]

    def by_function(self, function: str) -> list[CostRecord]:
        return [r for r in self.records if r.function == function]

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows():
            lines.append(",".join(str(row[c]) for c in CSV_COLUMNS))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TxResult:
    accepted: bool
    code: str | None
    height: int
    function: str
    result: Any = None
    cost: CostRecord | None = None

    def to_json(self) -> dict:
        return {"accepted": self.accepted, "code": self.code, "height": self.height,
                "function": self.function, "result": self.result,
                "cost": self.cost.to_json() if self.cost else None}


class _Contract:
    """Voting contract state; methods validate, mutate, and count costs."""

    def __init__(self, admin: bytes, params: ElectionParams):
        self.admin = admin
        self.params = params
        self.voters: list[bytes | None] = [None] * params.n
        self.public_keys: list[Point | None] = [None] * params.n
        self.encrypted_votes: list[Point | None] = [None] * params.n
        self.sign_limbs: list[int] = [0] * params.limbs
        self.tally_result: int | None = None
        self.index = 0
        self.deposits: dict[bytes, int] = {}
        self.refunded: set[bytes] = set()
        self.commit_pk = FieldElement(0)
        self.commit_v = FieldElement(0)

    # -- phase predicates --------------------------------------------------

    def registration_open(self, height: int) -> bool:
        return height < self.params.registration_end

    def casting_open(self, height: int) -> bool:
        return self.params.registration_end < height < self.params.casting_end

    def tallying_open(self, height: int) -> bool:
        return self.params.casting_end < height < self.params.tallying_end

    def refund_open(self, height: int) -> bool:
        return self.params.tallying_end < height <= self.params.refund_end

    def is_void(self, height: int) -> bool:
        """Registration or casting closed without completing."""
        if height >= self.params.registration_end and self.index < self.params.n:
            return True
        return (height >= self.params.casting_end
                and any(v is None for v in self.encrypted_votes))

    # -- transactions --------------------------------------------------------

    def register(self, height: int, sender: bytes, pk: Point, proof: ProofObject,
                 merkle_proof: MerkleProof, value: int, cost: CostRecord) -> None:
        if value != self.params.deposit:
            raise Rejected("wrong-deposit")
        if not self.registration_open(height):
            raise Rejected("outside-window")
        if self.index >= self.params.n:
            raise Rejected("registration-full")
        if sender == self.admin or any(sender == v for v in self.voters if v is not None):
            raise Rejected("duplicate-voter")
        cost.merkle_hashes += verification_digest_count(merkle_proof)
        if not verify_proof(self.params.eligibility_root, sender, merkle_proof):
            raise Rejected("bad-merkle-proof")
        statement = PkStatement(pk=pk)
        cost.statement_elems = statement.size()
        if not proofsys.verify(self.params.vk_pk, statement, proof):
            raise Rejected("bad-proof")
        self.public_keys[self.index] = pk
        self.voters[self.index] = sender
        self.index += 1
        self.deposits[sender] = self.deposits.get(sender, 0) + value
        cost.storage_writes += 4
        if self.params.variant.startswith("progressive-"):
            backend = self.params.hash_backend
            self.commit_pk = commit.commit_pk_progressive_step(self.commit_pk, pk.y, backend)
            cost.hash_calls += commit.absorb_cost(backend, 2)
            cost.storage_writes += 1

    def _vote_statement(self, enc_vote: Point, index: int, cost: CostRecord):
        variant = self.params.variant
        keys = [pk for pk in self.public_keys if pk is not None]
        if variant == "original":
            return VoteStatement(enc_vote=enc_vote, index=index,
                                 pk_y=tuple(pk.y for pk in keys))
        if variant == "committed-sha256":
            # Recomputed from storage on every cast; grows with n.
            backend = self.params.hash_backend
            bound = commit.commit_pk_concat([pk.y for pk in keys], backend)
            cost.hash_calls += commit.absorb_cost(backend, len(keys))
            return CommittedVoteStatement(enc_vote=enc_vote, commit_pk=bound, index=index)
        return CommittedVoteStatement(enc_vote=enc_vote, commit_pk=self.commit_pk, index=index)

    def cast_vote(self, height: int, sender: bytes, enc_vote: Point, index: int,
                  proof: ProofObject, cost: CostRecord) -> None:
        if not self.casting_open(height):
            raise Rejected("outside-window")
        if self.index < self.params.n:
            raise Rejected("election-void")
        if not 0 <= index < self.params.n:
            raise Rejected("bad-index")
        if self.voters[index] != sender:
            raise Rejected("wrong-sender")
        if self.encrypted_votes[index] is not None:
            raise Rejected("already-cast")
        statement = self._vote_statement(enc_vote, index, cost)
        cost.statement_elems = statement.size()
        if not proofsys.verify(self.params.vk_vote, statement, proof):
            raise Rejected("bad-proof")
        self.encrypted_votes[index] = enc_vote
        if enc_vote.x.value > HALF_P:
            self.sign_limbs[index // KAPPA] ^= 1 << (index % KAPPA)
        # The sign-limb slot is charged on every cast so per-call cost is
        # deterministic; the XOR itself only fires for sign-1 votes.
        cost.storage_writes += 2
        if self.params.variant.startswith("progressive-"):
            backend = self.params.hash_backend
            self.commit_v = commit.commit_v_progressive_step(
                self.commit_v, enc_vote.x, enc_vote.y, backend)
            cost.hash_calls += commit.absorb_cost(backend, 3)
            cost.storage_writes += 1

    def _tally_statement(self, result: int, cost: CostRecord):
        variant = self.params.variant
        votes = [v for v in self.encrypted_votes if v is not None]
        if variant == "original":
            return TallyStatement(result=result,
                                  sign_limbs=tuple(FieldElement(limb) for limb in self.sign_limbs),
                                  v_y=tuple(v.y for v in votes))
        if variant == "committed-sha256":
            backend = self.params.hash_backend
            bound = commit.commit_v_concat([v.y for v in votes],
                                           [FieldElement(limb) for limb in self.sign_limbs],
                                           backend)
            cost.hash_calls += commit.absorb_cost(backend, len(votes) + len(self.sign_limbs))
            return CommittedTallyStatement(result=result, commit_v=bound)
        return CommittedTallyStatement(result=result, commit_v=self.commit_v)

    def set_tally(self, height: int, sender: bytes, result: int, proof: ProofObject,
                  cost: CostRecord) -> None:
        if sender != self.admin:
            raise Rejected("not-admin")
        if not self.tallying_open(height):
            raise Rejected("outside-window")
        if any(v is None for v in self.encrypted_votes):
            raise Rejected("election-void")
        if self.tally_result is not None:
            raise Rejected("already-set")
        statement = self._tally_statement(result, cost)
        cost.statement_elems = statement.size()
        if not proofsys.verify(self.params.vk_tally, statement, proof):
            raise Rejected("bad-proof")
        self.tally_result = result
        cost.storage_writes += 1

    def refund(self, height: int, sender: bytes, cost: CostRecord) -> int:
        if not self.refund_open(height):
            raise Rejected("outside-window")
        if sender in self.refunded:
            raise Rejected("already-refunded")
        if self.deposits.get(sender, 0) <= 0:
            raise Rejected("not-eligible")
        void = self.is_void(height)
        if sender == self.admin:
            if self.tally_result is None and not void:
                raise Rejected("not-eligible")
        else:
            try:
                position = self.voters.index(sender)
            except ValueError:
                raise Rejected("not-eligible") from None
            if self.encrypted_votes[position] is None and not void:
                raise Rejected("not-eligible")
        amount = self.deposits[sender]
        self.deposits[sender] = 0
        self.refunded.add(sender)
        cost.storage_writes += 2
        return amount

    def state_view(self, height: int) -> dict:
        return {
            "admin": format_address(self.admin),
            "n": self.params.n,
            "variant": self.params.variant,
            "index": self.index,
            "voters": [format_address(v) if v else None for v in self.voters],
            "public_keys": [pk.to_json() if pk else None for pk in self.public_keys],
            "encrypted_votes": [v.to_json() if v else None for v in self.encrypted_votes],
            "sign_limbs": [hex(limb) for limb in self.sign_limbs],
            "tally_result": self.tally_result,
            "commit_pk": self.commit_pk.to_hex(),
            "commit_v": self.commit_v.to_hex(),
            "deposits_held": sum(self.deposits.values()),
            "void": self.is_void(height),
            "refunded": sorted(format_address(a) for a in self.refunded),
        }


class Ledger:
    """Serialization point for one election: block clock, contract, transcript."""

    def __init__(self, cost_model: CostModel | None = None):
        self.height = 0
        self.cost_model = cost_model or load_cost_model()
        self.contract: _Contract | None = None
        self.transcript: list[dict] = []
        self.cost_records: list[CostRecord] = []
        self.value_received = 0
        self.value_refunded = 0

    # -- clock ------------------------------------------------------------

    def advance_to(self, height: int) -> int:
        if height < self.height:
            raise ValueError(f"cannot rewind the clock from {self.height} to {height}")
        self.height = height
        return self.height

    # -- internals -----------------------------------------------------------

    def _finish(self, caller: bytes, function: str, args: dict, value: int,
                cost: CostRecord, outcome: str, result: Any = None,
                code: str | None = None) -> TxResult:
        cost.model_cost = self.cost_model.cost(
            function, cost.statement_elems, cost.hash_calls,
            cost.merkle_hashes, cost.storage_writes)
        accepted = outcome == "accepted"
        if accepted:
            self.value_received += value
        self.transcript.append({
            "height": self.height,
            "caller": format_address(caller),
            "function": function,
            "args": args,
            "outcome": outcome,
            "cost": cost.model_cost,
        })
        self.cost_records.append(cost)
        return TxResult(accepted=accepted, code=code, height=self.height,
                        function=function, result=result, cost=cost)

    # -- transactions ----------------------------------------------------------

    def deploy(self, caller: bytes, params: ElectionParams, value: int) -> TxResult:
        args = {"params": params.to_json(), "value": value}
        cost = CostRecord(self.height, format_address(caller), "deploy")
        try:
            if self.contract is not None:
                raise Rejected("bad-params")
            params.validate()
            if value != params.deposit:
                raise Rejected("wrong-deposit")
            contract = _Contract(caller, params)
            contract.deposits[caller] = value
            cost.storage_writes += 11
            self.contract = contract
        except Rejected as rej:
            return self._finish(caller, "deploy", args, value, cost,
                                f"rejected:{rej.code}", code=rej.code)
        return self._finish(caller, "deploy", args, value, cost, "accepted")

    def _require_contract(self) -> _Contract:
        if self.contract is None:
            raise Rejected("bad-params")
        return self.contract

    def register(self, caller: bytes, pk: Point, proof: ProofObject,
                 merkle_proof: MerkleProof, value: int) -> TxResult:
        args = {"pk": pk.to_json(), "proof": proof.to_json(),
                "merkle_proof": merkle_proof.to_json(), "value": value}
        cost = CostRecord(self.height, format_address(caller), "register")
        try:
            self._require_contract().register(self.height, caller, pk, proof,
                                              merkle_proof, value, cost)
        except Rejected as rej:
            return self._finish(caller, "register", args, value, cost,
                                f"rejected:{rej.code}", code=rej.code)
        return self._finish(caller, "register", args, value, cost, "accepted")

    def cast_vote(self, caller: bytes, enc_vote: Point, index: int,
                  proof: ProofObject) -> TxResult:
        args = {"enc_vote": enc_vote.to_json(), "index": index, "proof": proof.to_json()}
        cost = CostRecord(self.height, format_address(caller), "cast_vote")
        try:
            self._require_contract().cast_vote(self.height, caller, enc_vote,
                                               index, proof, cost)
        except Rejected as rej:
            return self._finish(caller, "cast_vote", args, 0, cost,
                                f"rejected:{rej.code}", code=rej.code)
        return self._finish(caller, "cast_vote", args, 0, cost, "accepted")

    def set_tally(self, caller: bytes, result: int, proof: ProofObject) -> TxResult:
        args = {"result": result, "proof": proof.to_json()}
        cost = CostRecord(self.height, format_address(caller), "set_tally")
        try:
            self._require_contract().set_tally(self.height, caller, result, proof, cost)
        except Rejected as rej:
            return self._finish(caller, "set_tally", args, 0, cost,
                                f"rejected:{rej.code}", code=rej.code)
        return self._finish(caller, "set_tally", args, 0, cost, "accepted")

    def refund(self, caller: bytes) -> TxResult:
        args: dict = {}
        cost = CostRecord(self.height, format_address(caller), "refund")
        try:
            amount = self._require_contract().refund(self.height, caller, cost)
        except Rejected as rej:
            return self._finish(caller, "refund", args, 0, cost,
                                f"rejected:{rej.code}", code=rej.code)
        self.value_refunded += amount
        return self._finish(caller, "refund", args, 0, cost, "accepted", result=amount)

    # -- views --------------------------------------------------------------

    def state_view(self) -> dict:
        view = {"height": self.height, "deployed": self.contract is not None,
                "value_received": self.value_received,
                "value_refunded": self.value_refunded}
        if self.contract is not None:
            view.update(self.contract.state_view(self.height))
        return view

    def value_held(self) -> int:
        if self.contract is None:
            return 0
        return sum(self.contract.deposits.values())

    def transcript_lines(self) -> list[str]:
        return [json.dumps(entry, separators=(",", ":"), sort_keys=True)
                for entry in self.transcript]

    def cost_report(self) -> CostReport:
        if self.contract is None:
            return CostReport(0, "original", list(self.cost_records))
        return CostReport(self.contract.params.n, self.contract.params.variant,
                          list(self.cost_records))


def replay_transcript(lines: Sequence[str], cost_model: CostModel | None = None) -> Ledger:
    """Re-execute a transcript; raises ValueError if any outcome diverges."""
    ledger = Ledger(cost_model=cost_model)
    for line in lines:
        entry = json.loads(line)
        ledger.advance_to(entry["height"])
        caller = parse_address(entry["caller"])
        function = entry["function"]
        args = entry["args"]
        if function == "deploy":
            tx = ledger.deploy(caller, ElectionParams.from_json(args["params"]), args["value"])
        elif function == "register":
            tx = ledger.register(caller, Point.from_json(args["pk"], check=False),
                                 ProofObject.from_json(args["proof"]),
                                 MerkleProof.from_json(args["merkle_proof"]), args["value"])
        elif function == "cast_vote":
            tx = ledger.cast_vote(caller, Point.from_json(args["enc_vote"], check=False),
                                  args["index"], ProofObject.from_json(args["proof"]))
        elif function == "set_tally":
            tx = ledger.set_tally(caller, args["result"], ProofObject.from_json(args["proof"]))
        elif function == "refund":
            tx = ledger.refund(caller)
        else:
            raise ValueError(f"unknown transcript function {function!r}")
        outcome = "accepted" if tx.accepted else f"rejected:{tx.code}"
        if outcome != entry["outcome"]:
            raise ValueError(f"replay diverged on {function}: {outcome} != {entry['outcome']}")
    return ledger
