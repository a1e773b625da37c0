import hashlib
import random

import pytest

from openvote.merkle import (
    EMPTY_DIGEST,
    MerkleProof,
    MerkleTree,
    leaf_digest,
    node_digest,
    verification_digest_count,
    verify_proof,
)

rng = random.Random(0x7E57)


def addresses(n, tag=b""):
    return [hashlib.shake_256(tag + i.to_bytes(4, "big")).digest(20) for i in range(n)]


def test_single_leaf_root_pads_with_zero_digest():
    addrs = addresses(1)
    tree = MerkleTree(addrs)
    assert tree.depth == 1
    assert tree.root == node_digest(leaf_digest(addrs[0]), EMPTY_DIGEST)


def test_rebuild_is_deterministic_and_order_sensitive():
    addrs = addresses(5)
    assert MerkleTree(addrs).root == MerkleTree(addrs).root
    permuted = [addrs[1], addrs[0]] + addrs[2:]
    assert MerkleTree(permuted).root != MerkleTree(addrs).root


def test_duplicate_addresses_rejected():
    addrs = addresses(3)
    with pytest.raises(ValueError):
        MerkleTree(addrs + [addrs[0]])
    with pytest.raises(ValueError):
        MerkleTree([])


def test_every_member_verifies():
    addrs = addresses(8)
    tree = MerkleTree(addrs)
    for i, addr in enumerate(addrs):
        proof = tree.proof(i)
        assert verify_proof(tree.root, addr, proof)
        assert proof.depth == tree.depth == 3


def test_depth_matches_padded_size():
    for n, depth in ((1, 1), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (40, 6)):
        tree = MerkleTree(addresses(n))
        assert tree.depth == depth
        assert tree.proof(n - 1).depth == depth
        assert verification_digest_count(tree.proof(0)) == depth + 1


def test_proof_index_out_of_range():
    tree = MerkleTree(addresses(4))
    with pytest.raises(IndexError):
        tree.proof(4)


def test_non_members_fail_fuzzed():
    addrs = addresses(16)
    tree = MerkleTree(addrs)
    proofs = [tree.proof(i) for i in range(16)]
    members = set(addrs)
    rejected = 0
    for trial in range(500):
        outsider = rng.randbytes(20)
        if outsider in members:
            continue
        assert not verify_proof(tree.root, outsider, proofs[trial % 16])
        rejected += 1
    assert rejected >= 490


def test_flipped_sibling_fails():
    addrs = addresses(8)
    tree = MerkleTree(addrs)
    proof = tree.proof(3)
    for level in range(proof.depth):
        flipped = bytearray(proof.siblings[level])
        flipped[0] ^= 1
        bad = MerkleProof(index=proof.index,
                          siblings=proof.siblings[:level] + (bytes(flipped),)
                          + proof.siblings[level + 1:])
        assert not verify_proof(tree.root, addrs[3], bad)


def test_wrong_index_lane_fails():
    addrs = addresses(8)
    tree = MerkleTree(addrs)
    proof = tree.proof(2)
    assert not verify_proof(tree.root, addrs[2],
                            MerkleProof(index=3, siblings=proof.siblings))


def test_proof_json_round_trip():
    tree = MerkleTree(addresses(6))
    proof = tree.proof(5)
    restored = MerkleProof.from_json(proof.to_json())
    assert restored == proof
    bad = proof.to_json()
    bad["depth"] = 99
    with pytest.raises(ValueError):
        MerkleProof.from_json(bad)


def test_bad_address_length_rejected():
    with pytest.raises(ValueError):
        leaf_digest(b"short")
    tree = MerkleTree(addresses(2))
    assert not verify_proof(tree.root, b"short", tree.proof(0))
