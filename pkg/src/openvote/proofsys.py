"""Setup/Prove/Verify over the circuit relations, with a transparent dev backend.

The development backend makes completeness and soundness testable by embedding
the full witness in the proof payload and re-evaluating the relation during
verification. It is therefore NOT zero-knowledge and NOT succinct; those are
declared as backend capabilities so a real succinct backend can plug in behind
the same interface and flip them to True.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .circuits import Circuit, canonical_json

DEV_BACKEND = "dev-transparent"

BACKEND_CAPABILITIES = {
    DEV_BACKEND: {"zero_knowledge": False, "succinct": False},
}


class CannotProveError(Exception):
    """Raised when asked to prove a statement whose relation does not hold."""


@dataclass(frozen=True)
class ProvingKey:
    circuit: Circuit
    digest: str
    backend: str = DEV_BACKEND


@dataclass(frozen=True)
class VerifyingKey:
    circuit: Circuit
    digest: str
    backend: str = DEV_BACKEND

    def to_json(self) -> dict:
        return {"circuit": self.circuit.describe(), "digest": self.digest,
                "backend": self.backend}

    @classmethod
    def from_json(cls, obj: dict) -> "VerifyingKey":
        from .circuits import CircuitParams

        desc = obj["circuit"]
        circuit = Circuit(desc["kind"], CircuitParams(desc["params"]["n"],
                                                      desc["params"]["variant"]))
        key = cls(circuit=circuit, digest=obj["digest"], backend=obj["backend"])
        if key.digest != circuit_digest(circuit):
            raise ValueError("verifying key digest does not match its circuit")
        return key


@dataclass(frozen=True)
class ProofObject:
    backend: str
    circuit_digest: str
    statement_digest: str
    payload_hex: str

    def to_json(self) -> dict:
        return {"backend": self.backend, "circuit_digest": self.circuit_digest,
                "statement_digest": self.statement_digest, "payload_hex": self.payload_hex}

    @classmethod
    def from_json(cls, obj: dict) -> "ProofObject":
        return cls(backend=obj["backend"], circuit_digest=obj["circuit_digest"],
                   statement_digest=obj["statement_digest"], payload_hex=obj["payload_hex"])


def circuit_digest(circuit: Circuit) -> str:
    return hashlib.sha256(canonical_json(circuit.describe())).hexdigest()


def statement_digest(statement) -> str:
    return hashlib.sha256(canonical_json(statement.to_json())).hexdigest()


def setup(circuit: Circuit) -> tuple[ProvingKey, VerifyingKey]:
    """Deterministic key pair; both keys name the circuit by its digest."""
    digest = circuit_digest(circuit)
    return ProvingKey(circuit, digest), VerifyingKey(circuit, digest)


def prove(pk: ProvingKey, statement, witness) -> ProofObject:
    """Produce a proof for a satisfying (statement, witness) pair.

    Dev backend: the payload is the serialized witness, bound to this exact
    statement through its digest.
    """
    if not pk.circuit.check(statement, witness):
        raise CannotProveError("cannot prove a false statement")
    payload = canonical_json(witness.to_json())
    return ProofObject(
        backend=pk.backend,
        circuit_digest=pk.digest,
        statement_digest=statement_digest(statement),
        payload_hex=payload.hex(),
    )


def verify(vk: VerifyingKey, statement, proof: ProofObject) -> bool:
    """True iff the proof binds to this statement and its witness satisfies the
    relation. Malformed proofs verify as False, never raise."""
    try:
        if proof.backend != vk.backend or proof.circuit_digest != vk.digest:
            return False
        if proof.statement_digest != statement_digest(statement):
            return False
        witness = vk.circuit.witness_from_json(json.loads(bytes.fromhex(proof.payload_hex)))
        return vk.circuit.check(statement, witness)
    except Exception:
        return False
