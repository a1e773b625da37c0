"""Two-round self-tallying vote math: keys, blinding keys, encryption, tallying.

Every voter publishes x_i*G, derives a blinding key from everyone else's public
keys, and publishes v_i*G + x_i*Y_i. The blinding terms cancel in the product,
so the sum of all encrypted votes is (sum v_i)*G and anyone can recover the
count by exhaustive search bounded by the number of voters.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass
from typing import Sequence

from .field_curve import GENERATOR, Point, PointAccumulator, Q, Scalar

# An encrypted vote is an ordinary curve point; aliased for readability.
EncryptedVote = Point


class TallyInfeasibleError(Exception):
    """No count in [0, n] matches the vote sum: a vote is missing or invalid."""


def expand_seed(seed: bytes, *labels: bytes | str | int) -> bytes:
    """Derive 64 bytes from a seed and context labels (SHAKE-256 stream)."""
    shake = hashlib.shake_256()
    shake.update(seed)
    for label in labels:
        if isinstance(label, int):
            label = label.to_bytes(8, "big")
        elif isinstance(label, str):
            label = label.encode()
        shake.update(b"\x00" + label)
    return shake.digest(64)


def random_scalar(seed: bytes | None = None) -> Scalar:
    """Uniform scalar in [1, q-1]; deterministic when a seed is given."""
    data = expand_seed(seed, "scalar") if seed is not None else secrets.token_bytes(64)
    return Scalar(1 + int.from_bytes(data, "big") % (Q - 1))


@dataclass(frozen=True)
class VoterKeypair:
    x: Scalar
    pk: Point


def keygen(seed: bytes | None = None) -> VoterKeypair:
    """Generate a voting keypair whose public key has x-coordinate sign 0.

    If x*G lands on the sign-1 side, the secret is replaced by q - x, which
    negates the point and flips only the sign of its x-coordinate.
    """
    x = random_scalar(seed)
    pk = GENERATOR.scalar_mul(x)
    if pk.compress().sign == 1:
        x = Scalar(Q - x.value)
        pk = pk.neg()
    return VoterKeypair(x, pk)


def blinding_key(index: int, public_keys: Sequence[Point]) -> Point:
    """Y_i = sum of keys before index minus sum of keys after; empty sums are O."""
    n = len(public_keys)
    if not 0 <= index < n:
        raise IndexError(f"voter index {index} out of range for {n} keys")
    before = PointAccumulator()
    after = PointAccumulator()
    for j, pk in enumerate(public_keys):
        if j < index:
            before.add(pk)
        elif j > index:
            after.add(pk)
    return before.value().sub(after.value())


def encrypt_vote(vote: int, x: Scalar, y_key: Point) -> EncryptedVote:
    """V = vote*G + x*Y for vote in {0, 1}."""
    if vote not in (0, 1):
        raise ValueError("vote must be 0 or 1")
    masked = y_key.scalar_mul(x)
    return masked.add(GENERATOR) if vote else masked


def tally(votes: Sequence[EncryptedVote]) -> int:
    """Recover the number of yes votes from the homomorphic sum.

    Walks res = 0..n and returns the res with res*G equal to the vote sum;
    raises TallyInfeasibleError when none matches.
    """
    total = PointAccumulator()
    for v in votes:
        total.add(v)
    sum_v = total.value()
    step = PointAccumulator()
    for res in range(len(votes) + 1):
        if step.equals(sum_v):
            return res
        step.add(GENERATOR)
    raise TallyInfeasibleError("tally infeasible: no count in range matches the vote sum")
