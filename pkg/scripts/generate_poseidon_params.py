#!/usr/bin/env python3
"""Regenerate src/openvote/data/poseidon_params.json.

Round constants come from the standard 80-bit Grain LFSR procedure seeded with
the instance description (prime field, x^5 S-box, field size, width, round
counts); the MDS matrix is the Cauchy matrix 1/(x_i + y_j) over x_i = i,
y_j = width + i. Round counts target 128-bit security at alpha = 5 over a
254-bit prime. Self-test vectors are frozen from the generated instances so
the runtime loader can detect file drift.
"""

from __future__ import annotations

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from openvote.field_curve import P
from openvote.poseidon import PoseidonPermutation, params_digest

FIELD_SIZE = P.bit_length()  # 254
ALPHA = 5
# (width, full rounds, partial rounds) for 128-bit security at alpha = 5.
INSTANCES = [(3, 8, 57), (4, 8, 56)]


def grain_stream(width: int, rounds_full: int, rounds_partial: int):
    """Bit generator: 80-bit LFSR keyed by the instance description."""
    bits: list[int] = []

    def push(value: int, size: int) -> None:
        bits.extend((value >> (size - 1 - i)) & 1 for i in range(size))

    push(1, 2)            # prime-field marker
    push(0, 4)            # x^alpha S-box marker
    push(FIELD_SIZE, 12)
    push(width, 12)
    push(rounds_full, 10)
    push(rounds_partial, 10)
    push((1 << 30) - 1, 30)
    assert len(bits) == 80

    def update() -> int:
        new = bits[62] ^ bits[51] ^ bits[38] ^ bits[23] ^ bits[13] ^ bits[0]
        bits.pop(0)
        bits.append(new)
        return new

    for _ in range(160):
        update()
    while True:
        # Output filtering: emit the second bit of a pair iff the first is 1.
        if update() == 1:
            yield update()
        else:
            update()


def field_elements(stream, count: int) -> list[int]:
    out = []
    while len(out) < count:
        value = 0
        for _ in range(FIELD_SIZE):
            value = (value << 1) | next(stream)
        if value < P:
            out.append(value)
    return out


def cauchy_mds(width: int) -> list[list[int]]:
    # M[i][j] = 1 / (x_i + y_j) with x_i = i and y_j = width + j.
    return [
        [pow(i + width + j, P - 2, P) for j in range(width)]
        for i in range(width)
    ]


def main() -> None:
    instances = {}
    perms = {}
    for width, rounds_full, rounds_partial in INSTANCES:
        stream = grain_stream(width, rounds_full, rounds_partial)
        constants = field_elements(stream, (rounds_full + rounds_partial) * width)
        mds = cauchy_mds(width)
        instances[str(width)] = {
            "rounds_full": rounds_full,
            "rounds_partial": rounds_partial,
            "round_constants": [hex(c) for c in constants],
            "mds": [[hex(c) for c in row] for row in mds],
        }
        perms[width] = PoseidonPermutation(width, rounds_full, rounds_partial, constants, mds)

    self_test = []
    for width in sorted(perms):
        state = list(range(1, width + 1))
        out = perms[width](state)
        self_test.append({
            "width": width,
            "input": [hex(v) for v in state],
            "output": [hex(v) for v in out],
        })

    payload = {
        "field": hex(P),
        "alpha": ALPHA,
        "instances": instances,
        "self_test": self_test,
    }
    payload["digest"] = params_digest(payload)

    target = pathlib.Path(__file__).resolve().parent.parent / "src" / "openvote" / "data" / "poseidon_params.json"
    target.write_text(json.dumps(payload, indent=1) + "\n")
    print(f"wrote {target} ({target.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
