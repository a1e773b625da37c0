import json
import random

import pytest

from openvote.circuits import Circuit, CircuitParams, make_pk_instance, make_vote_instance
from openvote.ovn_core import keygen
from openvote.proofsys import (
    BACKEND_CAPABILITIES,
    CannotProveError,
    DEV_BACKEND,
    ProofObject,
    VerifyingKey,
    prove,
    setup,
    statement_digest,
    verify,
)

rng = random.Random(0xABBA)


@pytest.fixture(scope="module")
def vote_setup():
    n = 3
    params = CircuitParams(n)
    pairs = [keygen(rng.randbytes(16)) for _ in range(n)]
    pks = [p.pk for p in pairs]
    circuit = Circuit("encrypted-vote-gen", params)
    pk, vk = setup(circuit)
    stmt, wit = make_vote_instance(params, 1, 1, pairs[1].x, pks)
    return params, pairs, pks, circuit, pk, vk, stmt, wit


def test_setup_is_deterministic():
    circuit = Circuit("public-key-gen", CircuitParams(4))
    first = setup(circuit)
    second = setup(circuit)
    assert first[0].digest == second[0].digest == first[1].digest


def test_setup_digest_depends_on_parameters():
    a = setup(Circuit("public-key-gen", CircuitParams(4)))[1]
    b = setup(Circuit("public-key-gen", CircuitParams(5)))[1]
    c = setup(Circuit("encrypted-vote-gen", CircuitParams(4)))[1]
    assert len({a.digest, b.digest, c.digest}) == 3


def test_prove_and_verify_round_trip(vote_setup):
    *_, pk, vk, stmt, wit = vote_setup
    proof = prove(pk, stmt, wit)
    assert proof.backend == DEV_BACKEND
    assert verify(vk, stmt, proof)


def test_prove_refuses_false_statement(vote_setup):
    params, pairs, pks, circuit, pk, vk, stmt, wit = vote_setup
    bad = type(wit)(vote=2, x=wit.x, pk_x=wit.pk_x)
    with pytest.raises(CannotProveError):
        prove(pk, stmt, bad)


def test_proof_does_not_transfer_between_circuits(vote_setup):
    params, pairs, *_ = vote_setup
    pk_circuit = Circuit("public-key-gen", params)
    pk_prover, pk_vk = setup(pk_circuit)
    stmt, wit = make_pk_instance(pairs[0])
    proof = prove(pk_prover, stmt, wit)
    assert verify(pk_vk, stmt, proof)
    other_vk = setup(Circuit("encrypted-vote-gen", params))[1]
    assert not verify(other_vk, stmt, proof)


def test_proof_binds_to_statement(vote_setup):
    params, pairs, pks, circuit, pk, vk, stmt, wit = vote_setup
    proof = prove(pk, stmt, wit)
    other_stmt, other_wit = make_vote_instance(params, 0, 0, pairs[0].x, pks)
    assert not verify(vk, other_stmt, proof)  # replay against another statement
    assert verify(vk, other_stmt, prove(pk, other_stmt, other_wit))


def test_truncated_and_garbled_payloads_fail_closed(vote_setup):
    *_, pk, vk, stmt, wit = vote_setup
    proof = prove(pk, stmt, wit)
    truncated = ProofObject(proof.backend, proof.circuit_digest,
                            proof.statement_digest, proof.payload_hex[:10])
    assert not verify(vk, stmt, truncated)
    garbled = ProofObject(proof.backend, proof.circuit_digest,
                          proof.statement_digest, "zz" + proof.payload_hex[2:])
    assert not verify(vk, stmt, garbled)
    empty = ProofObject(proof.backend, "", "", "")
    assert not verify(vk, stmt, empty)


def test_forged_witness_payload_fails_relation(vote_setup):
    """A proof whose embedded witness does not satisfy the relation is refused
    even when its digests are consistent."""
    params, pairs, pks, circuit, pk, vk, stmt, wit = vote_setup
    bad_wit = type(wit)(vote=wit.vote, x=type(wit.x)(wit.x.value + 1), pk_x=wit.pk_x)
    from openvote.circuits import canonical_json

    forged = ProofObject(
        backend=DEV_BACKEND,
        circuit_digest=pk.digest,
        statement_digest=statement_digest(stmt),
        payload_hex=canonical_json(bad_wit.to_json()).hex(),
    )
    assert not verify(vk, stmt, forged)


def test_verifying_key_json_round_trip(vote_setup):
    vk = vote_setup[5]
    restored = VerifyingKey.from_json(json.loads(json.dumps(vk.to_json())))
    assert restored == vk
    tampered = vk.to_json()
    tampered["digest"] = "00" * 32
    with pytest.raises(ValueError):
        VerifyingKey.from_json(tampered)


def test_proof_json_round_trip(vote_setup):
    pk, vk, stmt, wit = vote_setup[4], vote_setup[5], vote_setup[6], vote_setup[7]
    proof = prove(pk, stmt, wit)
    assert ProofObject.from_json(proof.to_json()) == proof


def test_dev_backend_declares_its_limits():
    capabilities = BACKEND_CAPABILITIES[DEV_BACKEND]
    assert capabilities["zero_knowledge"] is False
    assert capabilities["succinct"] is False
