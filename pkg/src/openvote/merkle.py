"""Eligibility accumulator: a Merkle tree over account addresses.

Leaves are SHA-256(0x00 || address); internal nodes SHA-256(0x01 || left ||
right). The leaf layer is padded to a power of two with all-zero digests, so
the depth is ceil(log2(max(n, 2))) and every proof has exactly that many
siblings.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

LEAF_PREFIX = b"\x00"
NODE_PREFIX = b"\x01"
EMPTY_DIGEST = b"\x00" * 32

ADDRESS_BYTES = 20


def leaf_digest(address: bytes) -> bytes:
    if len(address) != ADDRESS_BYTES:
        raise ValueError(f"addresses are {ADDRESS_BYTES} bytes")
    return hashlib.sha256(LEAF_PREFIX + address).digest()


def node_digest(left: bytes, right: bytes) -> bytes:
    return hashlib.sha256(NODE_PREFIX + left + right).digest()


@dataclass(frozen=True)
class MerkleProof:
    index: int
    siblings: tuple[bytes, ...]

    @property
    def depth(self) -> int:
        return len(self.siblings)

    def to_json(self) -> dict:
        return {"index": self.index, "siblings": [s.hex() for s in self.siblings],
                "depth": self.depth}

    @classmethod
    def from_json(cls, obj: dict) -> "MerkleProof":
        proof = cls(index=int(obj["index"]),
                    siblings=tuple(bytes.fromhex(s) for s in obj["siblings"]))
        if "depth" in obj and int(obj["depth"]) != proof.depth:
            raise ValueError("proof depth disagrees with its sibling list")
        return proof


class MerkleTree:
    """Immutable tree over a fixed address list."""

    def __init__(self, addresses: Sequence[bytes]):
        if not addresses:
            raise ValueError("need at least one address")
        if len(set(addresses)) != len(addresses):
            raise ValueError("addresses must be distinct")
        self.addresses = tuple(bytes(a) for a in addresses)
        # ceil(log2(max(n, 2)))
        depth = max(1, (len(addresses) - 1).bit_length())
        self.depth = depth
        width = 1 << depth
        level = [leaf_digest(a) for a in self.addresses]
        level += [EMPTY_DIGEST] * (width - len(level))
        self._levels = [level]
        while len(level) > 1:
            level = [node_digest(level[i], level[i + 1]) for i in range(0, len(level), 2)]
            self._levels.append(level)
        self.root = level[0]

    def __len__(self) -> int:
        return len(self.addresses)

    def proof(self, index: int) -> MerkleProof:
        if not 0 <= index < len(self.addresses):
            raise IndexError(f"leaf index {index} out of range")
        siblings = []
        pos = index
        for level in self._levels[:-1]:
            siblings.append(level[pos ^ 1])
            pos >>= 1
        return MerkleProof(index=index, siblings=tuple(siblings))


def verify_proof(root: bytes, address: bytes, proof: MerkleProof) -> bool:
    """Recompute the root from the leaf up; digest count is depth + 1."""
    try:
        digest = leaf_digest(address)
    except ValueError:
        return False
    pos = proof.index
    for sibling in proof.siblings:
        if pos & 1:
            digest = node_digest(sibling, digest)
        else:
            digest = node_digest(digest, sibling)
        pos >>= 1
    return digest == root


def verification_digest_count(proof: MerkleProof) -> int:
    """Digest invocations verify_proof performs (leaf plus one per level)."""
    return proof.depth + 1
