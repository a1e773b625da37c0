"""Per-transaction cost model for the simulated contract.

model_cost = base(function) + elem * statement_elems
           + hash * (hash_calls + merkle_hashes) + store * storage_writes

The marginal rates are fixed from public execution-price facts (one statement
element costs roughly a group scalar multiplication plus an addition in proof
verification; a fresh storage write and a hash compression have well-known
prices). The per-function bases are then solved, least-squares style, so the
model hits reference gas measurements of a prototype 40-voter election; the
result is frozen in data/cost_model.json. Outputs are model units for shape
and ratio analysis, never real gas ground truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping

FUNCTIONS = ("deploy", "register", "cast_vote", "set_tally", "refund")

CONFIG_RESOURCE = "cost_model.json"


@dataclass(frozen=True)
class CostModel:
    base: Mapping[str, int]
    per_statement_elem: int
    per_hash: int
    per_storage_write: int

    def cost(self, function: str, statement_elems: int = 0, hash_calls: int = 0,
             merkle_hashes: int = 0, storage_writes: int = 0) -> int:
        return (self.base[function]
                + self.per_statement_elem * statement_elems
                + self.per_hash * (hash_calls + merkle_hashes)
                + self.per_storage_write * storage_writes)

    def to_json(self) -> dict:
        return {"base": dict(self.base),
                "marginals": {"statement_elem": self.per_statement_elem,
                              "hash": self.per_hash,
                              "storage_write": self.per_storage_write}}


def _reference_counts(n: int, merkle_depth: int, limbs: int) -> dict[str, tuple[int, int, int]]:
    """(statement_elems, total hash calls, storage writes) per function for the
    original variant, as the contract itself counts them."""
    return {
        "deploy": (0, 0, 11),
        "register": (2, merkle_depth + 1, 4),
        "cast_vote": (n + 3, 0, 2),
        "set_tally": (n + limbs + 1, 0, 1),
        "refund": (0, 0, 2),
    }


def calibrate(anchors: Mapping[str, int], n: int, merkle_depth: int,
              per_statement_elem: int, per_hash: int, per_storage_write: int) -> CostModel:
    """Solve per-function bases so the model reproduces the anchor costs exactly.

    With the marginal rates fixed, each anchor row determines its base alone,
    so the least-squares solution has zero residual.
    """
    limbs = (n + 252) // 253
    counts = _reference_counts(n, merkle_depth, limbs)
    base = {}
    for function in FUNCTIONS:
        elems, hashes, writes = counts[function]
        residual = (anchors[function] - per_statement_elem * elems
                    - per_hash * hashes - per_storage_write * writes)
        if residual <= 0:
            raise ValueError(f"marginal rates exceed the anchor cost of {function}")
        base[function] = residual
    return CostModel(base=base, per_statement_elem=per_statement_elem,
                     per_hash=per_hash, per_storage_write=per_storage_write)


def load_cost_model(path: str | None = None) -> CostModel:
    """Load the frozen model, or a user-supplied config with the same schema."""
    if path is None:
        text = resources.files("openvote").joinpath("data").joinpath(CONFIG_RESOURCE).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    obj = json.loads(text)
    marginals = obj["marginals"]
    return CostModel(base={fn: int(obj["base"][fn]) for fn in FUNCTIONS},
                     per_statement_elem=int(marginals["statement_elem"]),
                     per_hash=int(marginals["hash"]),
                     per_storage_write=int(marginals["storage_write"]))


def load_config(path: str | None = None) -> dict:
    """Raw config including the anchor block (used to re-check calibration)."""
    if path is None:
        text = resources.files("openvote").joinpath("data").joinpath(CONFIG_RESOURCE).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return json.loads(text)
