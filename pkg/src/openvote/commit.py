"""Hash backends and the commitment shapes used by the scalable contract variants.

Two backends map field-element sequences to one field element: SHA-256 over
32-byte big-endian encodings with the digest masked to 253 bits, and the
arithmetic sponge from `poseidon`. Commitments come in two shapes: one hash
over a concatenation, or a progressive chain H(acc || item...) seeded with 0
so the accumulator can be updated one transaction at a time. Chain folds are
memoized because every relation evaluation recomputes the same honest chain.
"""

from __future__ import annotations

import hashlib
from functools import lru_cache
from typing import Sequence

from . import poseidon
from .field_curve import KAPPA, FieldElement

FIELD_MASK = (1 << KAPPA) - 1

BACKENDS = ("sha256", "poseidon")


def _values(inputs: Sequence[FieldElement | int]) -> tuple[int, ...]:
    return tuple(v.value if isinstance(v, FieldElement) else int(v) for v in inputs)


def _tag_iv(domain_tag: str) -> int:
    if not domain_tag:
        return 0
    digest = hashlib.sha256(b"iv:" + domain_tag.encode()).digest()
    return int.from_bytes(digest, "big") & FIELD_MASK


def hash_to_field(backend: str, domain_tag: str, inputs: Sequence[FieldElement | int]) -> FieldElement:
    """Map field elements to one field element under the named backend.

    SHA-256 hashes the tag followed by 32-byte big-endian encodings and keeps
    the 253 low-order bits of the big-endian digest integer; the sponge backend
    absorbs natively (width 4 for exactly three inputs, rate-2 width 3 otherwise).
    """
    values = _values(inputs)
    if not values:
        raise ValueError("hash_to_field needs at least one input")
    if backend == "sha256":
        h = hashlib.sha256(domain_tag.encode())
        for v in values:
            h.update(v.to_bytes(32, "big"))
        return FieldElement(int.from_bytes(h.digest(), "big") & FIELD_MASK)
    if backend == "poseidon":
        iv = _tag_iv(domain_tag)
        if len(values) == 3:
            return FieldElement(poseidon.hash3(*values, iv=iv))
        return FieldElement(poseidon.sponge(list(values), iv=iv))
    raise ValueError(f"unknown hash backend {backend!r}")


def absorb_cost(backend: str, count: int) -> int:
    """Cost units of one hash over `count` elements.

    SHA-256 is measured in 64-byte compression blocks (including padding),
    the sponge backend in permutation invocations.
    """
    if backend == "sha256":
        return (32 * count + 9 + 63) // 64
    if backend == "poseidon":
        return 1 if count == 3 else max(1, (count + 1) // 2)
    raise ValueError(f"unknown hash backend {backend!r}")


# --- commitment shapes ----------------------------------------------------

def commit_pk_concat(pk_y: Sequence[FieldElement | int], backend: str) -> FieldElement:
    """One hash over all public-key y-coordinates in registration order."""
    return hash_to_field(backend, "", pk_y)


def commit_v_concat(v_y: Sequence[FieldElement | int], sign_limbs: Sequence[FieldElement | int],
                    backend: str) -> FieldElement:
    """One hash over all encrypted-vote y-coordinates followed by the sign limbs."""
    return hash_to_field(backend, "", list(v_y) + list(sign_limbs))


def commit_pk_progressive_step(acc: FieldElement | int, pk_y: FieldElement | int,
                               backend: str) -> FieldElement:
    """One chain update H(acc || pk_y); the chain starts from accumulator 0."""
    return hash_to_field(backend, "", [acc, pk_y])


def commit_v_progressive_step(acc: FieldElement | int, v_x: FieldElement | int,
                              v_y: FieldElement | int, backend: str) -> FieldElement:
    """One chain update H(acc || v_x || v_y) absorbing both vote coordinates."""
    return hash_to_field(backend, "", [acc, v_x, v_y])


@lru_cache(maxsize=4096)
def _fold(backend: str, arity: int, values: tuple[int, ...]) -> int:
    acc = 0
    for off in range(0, len(values), arity):
        acc = hash_to_field(backend, "", (acc,) + values[off:off + arity]).value
    return acc


def commit_pk_progressive(pk_y: Sequence[FieldElement | int], backend: str) -> FieldElement:
    """Full chain over the key list; equals repeated commit_pk_progressive_step."""
    return FieldElement(_fold(backend, 1, _values(pk_y)))


def commit_v_progressive(coords: Sequence[tuple[FieldElement | int, FieldElement | int]],
                         backend: str) -> FieldElement:
    """Full chain over (x, y) vote coordinates; equals repeated step updates."""
    flat: list[FieldElement | int] = []
    for x, y in coords:
        flat.extend((x, y))
    return FieldElement(_fold(backend, 2, _values(flat)))
