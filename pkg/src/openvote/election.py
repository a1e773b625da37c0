"""End-to-end election drivers: honest runs, adversarial scenarios, scaling sweeps.

The drivers play the off-chain parties (administrator and voters): they derive
keys, build witnesses and proofs, and submit transactions through a client
that speaks the service wire format. `LocalClient` binds that surface directly
to an in-process ledger; the HTTP client in `client` exposes the same methods
against a running service, so the drivers never know which one they got.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Callable, Sequence

from . import proofsys
from .circuits import Circuit, CircuitParams, VARIANTS, constraint_count, \
    make_pk_instance, make_tally_instance, make_vote_instance
from .costmodel import load_cost_model
from .field_curve import Point
from .ledger import CSV_COLUMNS, ElectionParams, Ledger, parse_address
from .merkle import MerkleProof, MerkleTree
from .ovn_core import expand_seed, keygen
from .proofsys import ProofObject

SCENARIOS = ("bad-tally", "non-member-register", "wrong-index-cast",
             "forged-proof", "duplicate-register", "abort-missing-vote")

# Submission heights sit strictly inside the phase windows.
PHASE_ENDS = (10, 20, 30, 40)
REGISTER_HEIGHT, CAST_HEIGHT, TALLY_HEIGHT, REFUND_HEIGHT = 2, 12, 22, 32


class ConfigError(ValueError):
    """Invalid run configuration (maps to CLI exit code 3)."""


@dataclass
class RunConfig:
    n: int
    variant: str = "original"
    votes: Sequence[int] | None = None
    yes_fraction: float = 0.5
    seed: int = 0
    out_dir: str | None = None
    cost_config: str | None = None
    hash_backend: str | None = None
    deposit: int = 1000
    measure_verify: bool = False

    def resolved_votes(self) -> list[int]:
        if self.votes is not None:
            votes = [int(v) for v in self.votes]
            if len(votes) != self.n or any(v not in (0, 1) for v in votes):
                raise ConfigError("explicit votes must be n bits")
            return votes
        if not 0.0 <= self.yes_fraction <= 1.0:
            raise ConfigError("yes-fraction must be within [0, 1]")
        master = self.master_seed()
        votes = []
        for i in range(self.n):
            draw = int.from_bytes(expand_seed(master, "vote", i)[:8], "big") / 2**64
            votes.append(1 if draw < self.yes_fraction else 0)
        return votes

    def master_seed(self) -> bytes:
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        return self.seed.to_bytes(16, "big")

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        backend = None if self.variant == "original" else self.variant.split("-", 1)[1]
        if self.hash_backend is not None and self.hash_backend != backend:
            raise ConfigError(
                f"hash backend {self.hash_backend!r} does not match variant {self.variant!r}")
        self.resolved_votes()


@dataclass
class RunReport:
    n: int
    variant: str
    seed: int
    tally: int | None
    expected: int
    void: bool
    rejections: list[dict] = dataclass_field(default_factory=list)
    refunds_paid: int = 0
    deposits_received: int = 0
    phase_seconds: dict = dataclass_field(default_factory=dict)
    prove_seconds: dict = dataclass_field(default_factory=dict)
    verify_seconds: dict = dataclass_field(default_factory=dict)
    transcript_path: str | None = None
    costs_path: str | None = None

    @property
    def honest_success(self) -> bool:
        return not self.rejections and self.tally == self.expected

    def to_json(self) -> dict:
        return {
            "n": self.n, "variant": self.variant, "seed": self.seed,
            "tally": self.tally, "expected": self.expected, "void": self.void,
            "rejections": self.rejections, "refunds_paid": self.refunds_paid,
            "deposits_received": self.deposits_received,
            "phase_seconds": self.phase_seconds,
            "prove_seconds": self.prove_seconds,
            "verify_seconds": self.verify_seconds,
            "transcript_path": self.transcript_path,
            "costs_path": self.costs_path,
        }


class LocalClient:
    """The service surface bound directly to an in-process ledger."""

    def __init__(self, cost_config: str | None = None):
        self.ledger = Ledger(cost_model=load_cost_model(cost_config))

    def advance(self, height: int) -> int:
        return self.ledger.advance_to(height)

    def deploy(self, caller: str, params: dict, value: int) -> dict:
        return self.ledger.deploy(parse_address(caller),
                                  ElectionParams.from_json(params), value).to_json()

    def register(self, caller: str, pk: dict, proof: dict, merkle_proof: dict,
                 value: int) -> dict:
        return self.ledger.register(parse_address(caller),
                                    Point.from_json(pk, check=False),
                                    ProofObject.from_json(proof),
                                    MerkleProof.from_json(merkle_proof), value).to_json()

    def cast_vote(self, caller: str, enc_vote: dict, index: int, proof: dict) -> dict:
        return self.ledger.cast_vote(parse_address(caller),
                                     Point.from_json(enc_vote, check=False),
                                     index, ProofObject.from_json(proof)).to_json()

    def set_tally(self, caller: str, result: int, proof: dict) -> dict:
        return self.ledger.set_tally(parse_address(caller), result,
                                     ProofObject.from_json(proof)).to_json()

    def refund(self, caller: str) -> dict:
        return self.ledger.refund(parse_address(caller)).to_json()

    def state(self) -> dict:
        return self.ledger.state_view()

    def transcript(self) -> list[str]:
        return self.ledger.transcript_lines()

    def costs(self) -> list[dict]:
        return self.ledger.cost_report().rows()


ClientFactory = Callable[[RunConfig], LocalClient]


def _default_client_factory(config: RunConfig) -> LocalClient:
    return LocalClient(cost_config=config.cost_config)


class _Timer:
    def __init__(self, bucket: dict, key: str):
        self.bucket, self.key = bucket, key

    def __enter__(self):
        self._t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.bucket[self.key] = self.bucket.get(self.key, 0.0) + time.perf_counter() - self._t0


class ElectionDriver:
    """Plays every party of one election against a client."""

    def __init__(self, config: RunConfig, client):
        config.validate()
        self.config = config
        self.client = client
        master = config.master_seed()
        self.admin = "0x" + expand_seed(master, "admin-address")[:20].hex()
        self.voter_addresses = ["0x" + expand_seed(master, "voter-address", i)[:20].hex()
                                for i in range(config.n)]
        self.keypairs = [keygen(expand_seed(master, "voter-key", i))
                         for i in range(config.n)]
        self.votes = config.resolved_votes()
        self.params = CircuitParams(config.n, config.variant)
        self.circuit_pk = Circuit("public-key-gen", self.params)
        self.circuit_vote = Circuit("encrypted-vote-gen", self.params)
        self.circuit_tally = Circuit("tallying", self.params)
        self.prover_pk, self.vk_pk = proofsys.setup(self.circuit_pk)
        self.prover_vote, self.vk_vote = proofsys.setup(self.circuit_vote)
        self.prover_tally, self.vk_tally = proofsys.setup(self.circuit_tally)
        self.tree = MerkleTree([bytes.fromhex(a[2:]) for a in self.voter_addresses])
        self.report = RunReport(n=config.n, variant=config.variant, seed=config.seed,
                                tally=None, expected=sum(self.votes), void=False)

    # -- helpers -------------------------------------------------------------

    def _track(self, tx: dict) -> dict:
        if not tx["accepted"]:
            self.report.rejections.append({"function": tx["function"], "code": tx["code"]})
        return tx

    def _prove(self, kind: str, prover, statement, witness) -> ProofObject:
        t0 = time.perf_counter()
        proof = proofsys.prove(prover, statement, witness)
        times = self.report.prove_seconds.setdefault(kind, [])
        times.append(time.perf_counter() - t0)
        if self.config.measure_verify:
            vk = {"public-key-gen": self.vk_pk, "encrypted-vote-gen": self.vk_vote,
                  "tallying": self.vk_tally}[kind]
            t0 = time.perf_counter()
            ok = proofsys.verify(vk, statement, proof)
            self.report.verify_seconds.setdefault(kind, []).append(time.perf_counter() - t0)
            if not ok:
                raise RuntimeError("freshly produced proof failed local verification")
        return proof

    def _board_keys(self) -> list[Point]:
        state = self.client.state()
        return [Point.from_json(obj) for obj in state["public_keys"]]

    def election_params_json(self) -> dict:
        return ElectionParams(
            eligibility_root=self.tree.root,
            vk_pk=self.vk_pk, vk_vote=self.vk_vote, vk_tally=self.vk_tally,
            registration_end=PHASE_ENDS[0], casting_end=PHASE_ENDS[1],
            tallying_end=PHASE_ENDS[2], refund_end=PHASE_ENDS[3],
            n=self.config.n, deposit=self.config.deposit,
            variant=self.config.variant,
        ).to_json()

    # -- phases ----------------------------------------------------------------

    def deploy(self) -> dict:
        with _Timer(self.report.phase_seconds, "deploy"):
            return self._track(self.client.deploy(self.admin, self.election_params_json(),
                                                  self.config.deposit))

    def register_voter(self, i: int, *, sender: str | None = None,
                       proof_index: int | None = None) -> dict:
        statement, witness = make_pk_instance(self.keypairs[i])
        proof = self._prove("public-key-gen", self.prover_pk, statement, witness)
        merkle_proof = self.tree.proof(proof_index if proof_index is not None else i)
        return self._track(self.client.register(
            sender or self.voter_addresses[i], statement.pk.to_json(),
            proof.to_json(), merkle_proof.to_json(), self.config.deposit))

    def run_registration(self) -> None:
        self.client.advance(REGISTER_HEIGHT)
        with _Timer(self.report.phase_seconds, "registration"):
            for i in range(self.config.n):
                self.register_voter(i)

    def cast_for(self, i: int, *, index: int | None = None, vote: int | None = None,
                 mutate_point: bool = False) -> dict:
        index = i if index is None else index
        board = self._board_keys()
        statement, witness = make_vote_instance(
            self.params, index, self.votes[i] if vote is None else vote,
            self.keypairs[i].x, board)
        proof = self._prove("encrypted-vote-gen", self.prover_vote, statement, witness)
        point = statement.enc_vote
        if mutate_point:
            point = point.add(Point.generator())
        return self._track(self.client.cast_vote(
            self.voter_addresses[i], point.to_json(), index, proof.to_json()))

    def run_casting(self, skip: set[int] | None = None) -> None:
        self.client.advance(CAST_HEIGHT)
        with _Timer(self.report.phase_seconds, "casting"):
            for i in range(self.config.n):
                if skip and i in skip:
                    continue
                self.cast_for(i)

    def submit_tally(self, *, result_offset: int = 0) -> dict:
        state = self.client.state()
        if any(obj is None for obj in state["encrypted_votes"]):
            # No witness exists for an incomplete board; the contract turns the
            # attempt away on its own before looking at the proof.
            placeholder = ProofObject(backend=proofsys.DEV_BACKEND, circuit_digest="",
                                      statement_digest="", payload_hex="")
            return self._track(self.client.set_tally(self.admin, 0, placeholder.to_json()))
        board = [Point.from_json(obj) for obj in state["encrypted_votes"]]
        statement, witness = make_tally_instance(self.params, board)
        proof = self._prove("tallying", self.prover_tally, statement, witness)
        return self._track(self.client.set_tally(
            self.admin, statement.result + result_offset, proof.to_json()))

    def run_tallying(self) -> dict:
        self.client.advance(TALLY_HEIGHT)
        with _Timer(self.report.phase_seconds, "tallying"):
            return self.submit_tally()

    def run_refunds(self) -> None:
        self.client.advance(REFUND_HEIGHT)
        with _Timer(self.report.phase_seconds, "refunding"):
            for sender in [self.admin] + self.voter_addresses:
                tx = self.client.refund(sender)
                if tx["accepted"]:
                    self.report.refunds_paid += tx["result"]
                else:
                    self._track(tx)

    # -- wrap-up -------------------------------------------------------------

    def finalize(self) -> RunReport:
        state = self.client.state()
        self.report.tally = state["tally_result"]
        self.report.void = state["void"]
        self.report.deposits_received = state["value_received"]
        self.report.prove_seconds = {k: sum(v) / len(v)
                                     for k, v in self.report.prove_seconds.items()}
        self.report.verify_seconds = {k: sum(v) / len(v)
                                      for k, v in self.report.verify_seconds.items()}
        if self.config.out_dir:
            out = Path(self.config.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            transcript = out / "transcript.jsonl"
            transcript.write_text("\n".join(self.client.transcript()) + "\n")
            self.report.transcript_path = str(transcript)
            costs = out / "costs.csv"
            with costs.open("w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
                writer.writeheader()
                for row in self.client.costs():
                    writer.writerow({c: row[c] for c in CSV_COLUMNS})
            self.report.costs_path = str(costs)
            eligibility = out / "eligibility.json"
            eligibility.write_text(json.dumps(
                {"root": self.tree.root.hex(), "addresses": self.voter_addresses},
                indent=1) + "\n")
        return self.report


def run_election(config: RunConfig, client=None) -> RunReport:
    """Honest end-to-end run; the report carries any rejection (none expected)."""
    driver = ElectionDriver(config, client or _default_client_factory(config))
    driver.deploy()
    driver.run_registration()
    driver.run_casting()
    driver.run_tallying()
    driver.run_refunds()
    return driver.finalize()


def run_attack(scenario: str, config: RunConfig, client=None) -> RunReport:
    """One adversarial scenario; the honest remainder of the election proceeds.

    The report's rejection list shows the contract turning the attack away;
    there is no dispute mechanism to invoke.
    """
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
    driver = ElectionDriver(config, client or _default_client_factory(config))
    driver.deploy()

    if scenario == "non-member-register":
        driver.client.advance(REGISTER_HEIGHT)
        outsider = "0x" + expand_seed(config.master_seed(), "outsider")[:20].hex()
        statement, witness = make_pk_instance(keygen(expand_seed(config.master_seed(), "outsider-key")))
        proof = proofsys.prove(driver.prover_pk, statement, witness)
        driver._track(driver.client.register(outsider, statement.pk.to_json(),
                                             proof.to_json(),
                                             driver.tree.proof(0).to_json(),
                                             config.deposit))
        driver.run_registration()
        driver.run_casting()
        driver.run_tallying()
        driver.run_refunds()
    elif scenario == "duplicate-register":
        driver.client.advance(REGISTER_HEIGHT)
        driver.register_voter(0)
        driver.register_voter(0)  # same sender again, while slots remain
        for i in range(1, config.n):
            driver.register_voter(i)
        driver.run_casting()
        driver.run_tallying()
        driver.run_refunds()
    elif scenario == "wrong-index-cast":
        if config.n < 2:
            raise ConfigError("wrong-index-cast needs at least two voters")
        driver.run_registration()
        driver.client.advance(CAST_HEIGHT)
        driver.cast_for(1, index=0)  # voter 1 claims voter 0's slot
        driver.run_casting()
        driver.run_tallying()
        driver.run_refunds()
    elif scenario == "forged-proof":
        driver.run_registration()
        driver.client.advance(CAST_HEIGHT)
        driver.cast_for(0, mutate_point=True)  # proof no longer binds the sent vote
        driver.run_casting()
        driver.run_tallying()
        driver.run_refunds()
    elif scenario == "bad-tally":
        driver.run_registration()
        driver.run_casting()
        driver.client.advance(TALLY_HEIGHT)
        driver.submit_tally(result_offset=1)  # announce one yes vote too many
        driver.run_refunds()
    elif scenario == "abort-missing-vote":
        driver.run_registration()
        driver.run_casting(skip={config.n - 1})
        driver.run_tallying()  # rejected: a vote is missing, the election is void
        driver.run_refunds()

    return driver.finalize()


def scaling_sweep(n_list: Sequence[int], variants: Sequence[str], out_dir: str,
                  seed: int = 0, client_factory: ClientFactory | None = None,
                  deposit: int = 1000) -> dict[str, str]:
    """Run the (n, variant) matrix and emit the scaling CSVs.

    sweep_costs.csv has one row per (n, variant, function) with the per-call
    counters and model cost; sweep_circuits.csv has one row per (n, variant,
    circuit) with statement size, gadget totals, and measured prove/verify
    wall times.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    factory = client_factory or _default_client_factory
    cost_rows = []
    circuit_rows = []
    for variant in variants:
        for n in n_list:
            config = RunConfig(n=n, variant=variant, seed=seed, deposit=deposit,
                               measure_verify=True)
            client = factory(config)
            report = run_election(config, client)
            if not report.honest_success:
                raise RuntimeError(f"honest sweep run failed for n={n} variant={variant}: "
                                   f"{report.rejections}")
            # Aggregate per function: per-call counters are uniform by design.
            per_function: dict[str, list[dict]] = {}
            for row in client.costs():
                per_function.setdefault(row["function"], []).append(row)
            for function, rows in per_function.items():
                first = rows[0]
                for row in rows[1:]:
                    if any(row[k] != first[k] for k in
                           ("statement_elems", "hash_calls", "merkle_hashes",
                            "storage_writes", "model_cost")):
                        raise RuntimeError(
                            f"non-uniform {function} cost records at n={n} {variant}")
                cost_rows.append({
                    "n": n, "variant": variant, "function": function,
                    "calls": len(rows),
                    "statement_elems": first["statement_elems"],
                    "hash_calls": first["hash_calls"],
                    "merkle_hashes": first["merkle_hashes"],
                    "storage_writes": first["storage_writes"],
                    "model_cost": first["model_cost"],
                })
            params = CircuitParams(n, variant)
            sizes = {"public-key-gen": 2,
                     "encrypted-vote-gen": 4 if params.committed else n + 3,
                     "tallying": 2 if params.committed else n + params.limbs + 1}
            for kind in sizes:
                counts = constraint_count(kind, params)
                circuit_rows.append({
                    "n": n, "variant": variant, "circuit": kind,
                    "statement_elems": sizes[kind],
                    "gadget_total": counts.total,
                    "prove_s": round(report.prove_seconds.get(kind, 0.0), 6),
                    "verify_s": round(report.verify_seconds.get(kind, 0.0), 6),
                })
    costs_path = out / "sweep_costs.csv"
    with costs_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(cost_rows[0].keys()))
        writer.writeheader()
        writer.writerows(cost_rows)
    circuits_path = out / "sweep_circuits.csv"
    with circuits_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(circuit_rows[0].keys()))
        writer.writeheader()
        writer.writerows(circuit_rows)
    return {"costs": str(costs_path), "circuits": str(circuits_path)}
