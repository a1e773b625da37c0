"""Arithmetic-friendly sponge permutation over the base field.

Two fixed instances are used: width 3 (two absorbed elements) and width 4
(three absorbed elements), alpha = 5, with round constants derived from the
standard 80-bit LFSR procedure and a Cauchy MDS matrix. Parameters live in a
checked-in JSON file guarded by a content digest and permutation self-test
vectors; see scripts/generate_poseidon_params.py for regeneration.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources

from .field_curve import P

PARAMS_RESOURCE = "poseidon_params.json"


class PoseidonPermutation:
    """One fixed-width permutation: add-constants, S-box, MDS mix per round."""

    def __init__(self, width: int, rounds_full: int, rounds_partial: int,
                 round_constants: list[int], mds: list[list[int]]):
        if len(round_constants) != (rounds_full + rounds_partial) * width:
            raise ValueError("round constant count does not match round schedule")
        self.width = width
        self.rounds_full = rounds_full
        self.rounds_partial = rounds_partial
        self.round_constants = round_constants
        self.mds = mds

    def __call__(self, state: list[int]) -> list[int]:
        if len(state) != self.width:
            raise ValueError(f"state width must be {self.width}")
        t = self.width
        half_full = self.rounds_full // 2
        partial_end = half_full + self.rounds_partial
        rc = self.round_constants
        mds = self.mds
        p = P
        state = [s % p for s in state]
        for r in range(self.rounds_full + self.rounds_partial):
            off = r * t
            state = [(state[i] + rc[off + i]) % p for i in range(t)]
            if half_full <= r < partial_end:
                s = state[0]
                s2 = s * s % p
                state[0] = s2 * s2 % p * s % p
            else:
                for i in range(t):
                    s = state[i]
                    s2 = s * s % p
                    state[i] = s2 * s2 % p * s % p
            state = [sum(mds[i][j] * state[j] for j in range(t)) % p for i in range(t)]
        return state


def params_digest(payload: dict) -> str:
    """Content digest binding the field, exponent, and all instance constants."""
    body = {k: payload[k] for k in ("field", "alpha", "instances")}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _build(payload: dict) -> dict[int, PoseidonPermutation]:
    if int(payload["field"], 16) != P:
        raise ValueError("parameter file targets a different field")
    if payload.get("digest") != params_digest(payload):
        raise ValueError("parameter file digest self-check failed")
    instances: dict[int, PoseidonPermutation] = {}
    for key, inst in payload["instances"].items():
        width = int(key)
        instances[width] = PoseidonPermutation(
            width,
            inst["rounds_full"],
            inst["rounds_partial"],
            [int(c, 16) for c in inst["round_constants"]],
            [[int(c, 16) for c in row] for row in inst["mds"]],
        )
    for vector in payload["self_test"]:
        perm = instances[vector["width"]]
        got = perm([int(v, 16) for v in vector["input"]])
        if got != [int(v, 16) for v in vector["output"]]:
            raise ValueError("parameter file failed a permutation self-test vector")
    return instances


_instances: dict[int, PoseidonPermutation] | None = None


def permutation(width: int) -> PoseidonPermutation:
    global _instances
    if _instances is None:
        text = resources.files("openvote").joinpath("data").joinpath(PARAMS_RESOURCE).read_text()
        _instances = _build(json.loads(text))
    return _instances[width]


def hash2(a: int, b: int, iv: int = 0) -> int:
    """Absorb two elements at width 3; returns the first rate cell."""
    return permutation(3)([iv, a, b])[1]


def hash3(a: int, b: int, c: int, iv: int = 0) -> int:
    """Absorb three elements at width 4; returns the first rate cell."""
    return permutation(4)([iv, a, b, c])[1]


def sponge(values: list[int], iv: int = 0) -> int:
    """Rate-2 sponge at width 3 over any number of elements (zero-padded).

    A single two-element chunk reduces to hash2.
    """
    if not values:
        raise ValueError("sponge needs at least one input")
    perm = permutation(3)
    state = [iv, 0, 0]
    for off in range(0, len(values), 2):
        chunk = values[off:off + 2]
        state[1] = (state[1] + chunk[0]) % P
        if len(chunk) > 1:
            state[2] = (state[2] + chunk[1]) % P
        state = perm(state)
    return state[1]
