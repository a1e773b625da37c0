"""Statement/witness relations for the three verifiable computations.

Each relation is a deterministic checker built from the gadget set (point
checks, comparisons, muxes, bit packing, curve arithmetic): key generation
proves knowledge of the secret behind a sign-0 public key, vote generation
proves an encrypted vote is well-formed against the published keys, and
tallying proves the announced count matches the homomorphic vote sum. The
committed variants replace public lists in the statement with one commitment
(concatenated hash, or a progressive chain) and move the lists into the
witness. Loop bounds are fixed by the voter count at construction time.

Relations return False on any violated assertion and raise only on structural
errors (wrong list lengths, unknown variant). `constraint_count` models the
gadget invocations a compiled circuit would spend.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from . import commit, ovn_core
from .field_curve import (
    GENERATOR,
    HALF_P,
    IDENTITY,
    KAPPA,
    FieldElement,
    Point,
    PointAccumulator,
    Scalar,
    is_on_curve,
)

VARIANTS = ("original", "committed-sha256", "progressive-sha256", "progressive-poseidon")

CIRCUIT_KINDS = ("public-key-gen", "encrypted-vote-gen", "tallying")


@dataclass(frozen=True)
class CircuitParams:
    """Compile-time circuit parameters: voter count and statement variant."""

    n: int
    variant: str = "original"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("voter count must be at least 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def limbs(self) -> int:
        """Number of field elements needed to pack one sign bit per voter."""
        return (self.n + KAPPA - 1) // KAPPA

    @property
    def committed(self) -> bool:
        return self.variant != "original"

    @property
    def progressive(self) -> bool:
        return self.variant.startswith("progressive-")

    @property
    def hash_backend(self) -> str | None:
        if self.variant == "original":
            return None
        return self.variant.split("-", 1)[1]


# --- gadgets ---------------------------------------------------------------

def mux(selector: int, p: Point, q: Point) -> Point:
    """p when the selector is 0, q when it is 1."""
    if selector == 0:
        return p
    if selector == 1:
        return q
    raise ValueError("mux selector must be 0 or 1")


def compare(mode: str, a: FieldElement | int, b: FieldElement | int) -> int:
    """Integer comparison of canonical representatives; returns a bit."""
    av = a.value if isinstance(a, FieldElement) else a
    bv = b.value if isinstance(b, FieldElement) else b
    if mode == "lt":
        return 1 if av < bv else 0
    if mode in ("gt", "gt-const"):
        return 1 if av > bv else 0
    raise ValueError(f"unknown comparison mode {mode!r}")


def sign_bit(x: FieldElement | int) -> int:
    """The compact-representation sign: 1 iff x > (p-1)/2."""
    return compare("gt-const", x, HALF_P)


def bits2num(bits: Sequence[int]) -> FieldElement:
    """Little-endian packing: bit t carries weight 2^t. At most kappa bits."""
    if len(bits) > KAPPA:
        raise ValueError(f"bits2num takes at most {KAPPA} bits")
    value = 0
    for t, bit in enumerate(bits):
        if bit not in (0, 1):
            raise ValueError("bits2num inputs must be bits")
        value |= bit << t
    return FieldElement(value)


def is_point(x: FieldElement | int, y: FieldElement | int) -> bool:
    return is_on_curve(x, y)


def is_equal(p: Point, q: Point) -> bool:
    return p.x.value == q.x.value and p.y.value == q.y.value


def e_add(p: Point, q: Point) -> Point:
    return p.add(q)


def e_sub(p: Point, q: Point) -> Point:
    return p.sub(q)


def e_scalar_mul(a: Scalar | int, p: Point) -> Point:
    return p.scalar_mul(a)


# --- statements and witnesses ----------------------------------------------
#
# JSON field order is fixed by the dataclass declarations below; statement
# digests depend on it.

def _hex_list(values: Sequence[FieldElement]) -> list[str]:
    return [v.to_hex() for v in values]


def _field_tuple(values: Sequence[str]) -> tuple[FieldElement, ...]:
    return tuple(FieldElement.from_hex(v) for v in values)


@dataclass(frozen=True)
class PkStatement:
    pk: Point

    def size(self) -> int:
        return 2

    def to_json(self) -> dict:
        return {"pk": self.pk.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "PkStatement":
        return cls(pk=Point.from_json(obj["pk"], check=False))


@dataclass(frozen=True)
class PkWitness:
    x: Scalar

    def to_json(self) -> dict:
        return {"x": self.x.to_hex()}

    @classmethod
    def from_json(cls, obj: dict) -> "PkWitness":
        return cls(x=Scalar.from_hex(obj["x"]))


@dataclass(frozen=True)
class VoteStatement:
    enc_vote: Point
    index: int
    pk_y: tuple[FieldElement, ...]

    def size(self) -> int:
        return 3 + len(self.pk_y)

    def to_json(self) -> dict:
        return {"enc_vote": self.enc_vote.to_json(), "index": self.index,
                "pk_y": _hex_list(self.pk_y)}

    @classmethod
    def from_json(cls, obj: dict) -> "VoteStatement":
        return cls(enc_vote=Point.from_json(obj["enc_vote"], check=False),
                   index=int(obj["index"]), pk_y=_field_tuple(obj["pk_y"]))


@dataclass(frozen=True)
class VoteWitness:
    vote: int
    x: Scalar
    pk_x: tuple[FieldElement, ...]

    def to_json(self) -> dict:
        return {"vote": self.vote, "x": self.x.to_hex(), "pk_x": _hex_list(self.pk_x)}

    @classmethod
    def from_json(cls, obj: dict) -> "VoteWitness":
        return cls(vote=int(obj["vote"]), x=Scalar.from_hex(obj["x"]),
                   pk_x=_field_tuple(obj["pk_x"]))


@dataclass(frozen=True)
class CommittedVoteStatement:
    enc_vote: Point
    commit_pk: FieldElement
    index: int

    def size(self) -> int:
        return 4

    def to_json(self) -> dict:
        return {"enc_vote": self.enc_vote.to_json(), "commit_pk": self.commit_pk.to_hex(),
                "index": self.index}

    @classmethod
    def from_json(cls, obj: dict) -> "CommittedVoteStatement":
        return cls(enc_vote=Point.from_json(obj["enc_vote"], check=False),
                   commit_pk=FieldElement.from_hex(obj["commit_pk"]),
                   index=int(obj["index"]))


@dataclass(frozen=True)
class CommittedVoteWitness:
    vote: int
    x: Scalar
    pk_x: tuple[FieldElement, ...]
    pk_y: tuple[FieldElement, ...]

    def to_json(self) -> dict:
        return {"vote": self.vote, "x": self.x.to_hex(),
                "pk_x": _hex_list(self.pk_x), "pk_y": _hex_list(self.pk_y)}

    @classmethod
    def from_json(cls, obj: dict) -> "CommittedVoteWitness":
        return cls(vote=int(obj["vote"]), x=Scalar.from_hex(obj["x"]),
                   pk_x=_field_tuple(obj["pk_x"]), pk_y=_field_tuple(obj["pk_y"]))


@dataclass(frozen=True)
class TallyStatement:
    result: int
    sign_limbs: tuple[FieldElement, ...]
    v_y: tuple[FieldElement, ...]

    def size(self) -> int:
        return 1 + len(self.sign_limbs) + len(self.v_y)

    def to_json(self) -> dict:
        return {"result": self.result, "sign_limbs": _hex_list(self.sign_limbs),
                "v_y": _hex_list(self.v_y)}

    @classmethod
    def from_json(cls, obj: dict) -> "TallyStatement":
        return cls(result=int(obj["result"]), sign_limbs=_field_tuple(obj["sign_limbs"]),
                   v_y=_field_tuple(obj["v_y"]))


@dataclass(frozen=True)
class TallyWitness:
    v_x: tuple[FieldElement, ...]

    def to_json(self) -> dict:
        return {"v_x": _hex_list(self.v_x)}

    @classmethod
    def from_json(cls, obj: dict) -> "TallyWitness":
        return cls(v_x=_field_tuple(obj["v_x"]))


@dataclass(frozen=True)
class CommittedTallyStatement:
    result: int
    commit_v: FieldElement

    def size(self) -> int:
        return 2

    def to_json(self) -> dict:
        return {"result": self.result, "commit_v": self.commit_v.to_hex()}

    @classmethod
    def from_json(cls, obj: dict) -> "CommittedTallyStatement":
        return cls(result=int(obj["result"]), commit_v=FieldElement.from_hex(obj["commit_v"]))


@dataclass(frozen=True)
class CommittedTallyWitness:
    v_x: tuple[FieldElement, ...]
    v_y: tuple[FieldElement, ...]

    def to_json(self) -> dict:
        return {"v_x": _hex_list(self.v_x), "v_y": _hex_list(self.v_y)}

    @classmethod
    def from_json(cls, obj: dict) -> "CommittedTallyWitness":
        return cls(v_x=_field_tuple(obj["v_x"]), v_y=_field_tuple(obj["v_y"]))


# --- relations ---------------------------------------------------------------

def relation_public_key_gen(stmt: PkStatement, wit: PkWitness) -> bool:
    """The public key is x*G and its x-coordinate has sign 0."""
    pk = e_scalar_mul(wit.x, GENERATOR)
    if sign_bit(pk.x) != 0:
        return False
    return is_equal(pk, stmt.pk)


def _vote_checks(enc_vote: Point, index: int, vote: int, x: Scalar,
                 pk_x: Sequence[FieldElement], pk_y: Sequence[FieldElement],
                 n: int) -> bool:
    if len(pk_x) != n or len(pk_y) != n:
        raise ValueError("public key lists must have length n")
    v = vote % FieldElement.modulus
    if (1 - v) * v % FieldElement.modulus != 0:
        return False
    y_before = PointAccumulator()
    y_after = PointAccumulator()
    for i in range(n):
        px, py = pk_x[i], pk_y[i]
        if not is_point(px, py):
            return False
        if sign_bit(px) != 0:
            return False
        pk_i = Point.unchecked(px, py)
        y_before.add(mux(compare("lt", i, index), IDENTITY, pk_i))
        y_after.add(mux(compare("gt", i, index), IDENTITY, pk_i))
    y_b = e_sub(y_before.value(), y_after.value())
    masked = e_scalar_mul(x, y_b)
    computed = e_add(masked, mux(v, IDENTITY, GENERATOR))
    return is_equal(computed, enc_vote)


def relation_encrypted_vote_gen(stmt: VoteStatement, wit: VoteWitness,
                                params: CircuitParams) -> bool:
    """Original form: the key y-coordinates are part of the statement."""
    return _vote_checks(stmt.enc_vote, stmt.index, wit.vote, wit.x,
                        wit.pk_x, stmt.pk_y, params.n)


def relation_encrypted_vote_gen_committed(stmt: CommittedVoteStatement,
                                          wit: CommittedVoteWitness,
                                          params: CircuitParams) -> bool:
    """Committed form: both key coordinate lists move into the witness and the
    statement binds them through commit_pk in the variant's shape."""
    if len(wit.pk_y) != params.n:
        raise ValueError("public key lists must have length n")
    backend = params.hash_backend
    if params.variant == "committed-sha256":
        expected = commit.commit_pk_concat(wit.pk_y, backend)
    elif params.progressive:
        expected = commit.commit_pk_progressive(wit.pk_y, backend)
    else:
        raise ValueError(f"variant {params.variant!r} has no committed vote relation")
    if expected != stmt.commit_pk:
        return False
    return _vote_checks(stmt.enc_vote, stmt.index, wit.vote, wit.x,
                        wit.pk_x, wit.pk_y, params.n)


def _sum_and_signs(v_x: Sequence[FieldElement], v_y: Sequence[FieldElement],
                   n: int) -> tuple[Point, list[int]] | None:
    """Point-check every vote; return the running sum and x-coordinate signs."""
    total = PointAccumulator()
    signs = [0] * n
    for i in range(n):
        vx, vy = v_x[i], v_y[i]
        if not is_point(vx, vy):
            return None
        total.add(Point.unchecked(vx, vy))
        signs[i] = sign_bit(vx)
    return total.value(), signs


def _search_count(sum_v: Point, n: int) -> int:
    """Incremental exhaustive search: the i in 0..n with i*G equal to the sum."""
    t = 0
    step = PointAccumulator()
    for i in range(n + 1):
        if step.equals(sum_v):
            t += i
        step.add(GENERATOR)
    return t


def _tally_core(result: int, sum_v: Point, n: int) -> bool:
    t = _search_count(sum_v, n)
    if not is_equal(e_scalar_mul(t, GENERATOR), sum_v):
        return False
    return result == t


def relation_tallying(stmt: TallyStatement, wit: TallyWitness,
                      params: CircuitParams) -> bool:
    """Original form: sign limbs and vote y-coordinates are in the statement."""
    n, limbs = params.n, params.limbs
    if len(stmt.v_y) != n or len(wit.v_x) != n:
        raise ValueError("vote coordinate lists must have length n")
    if len(stmt.sign_limbs) != limbs:
        raise ValueError("sign limb list must have length ceil(n/kappa)")
    checked = _sum_and_signs(wit.v_x, stmt.v_y, n)
    if checked is None:
        return False
    sum_v, signs = checked
    # Positions n..kappa*limbs-1 stay zero.
    signs = signs + [0] * (KAPPA * limbs - n)
    for j in range(limbs):
        if bits2num(signs[KAPPA * j:KAPPA * (j + 1)]) != stmt.sign_limbs[j]:
            return False
    return _tally_core(stmt.result, sum_v, n)


def relation_tallying_committed(stmt: CommittedTallyStatement, wit: CommittedTallyWitness,
                                params: CircuitParams) -> bool:
    """Committed form: the statement carries only the count and commit_v."""
    n, limbs = params.n, params.limbs
    if len(wit.v_y) != n or len(wit.v_x) != n:
        raise ValueError("vote coordinate lists must have length n")
    checked = _sum_and_signs(wit.v_x, wit.v_y, n)
    if checked is None:
        return False
    sum_v, signs = checked
    backend = params.hash_backend
    if params.variant == "committed-sha256":
        signs = signs + [0] * (KAPPA * limbs - n)
        limb_values = [bits2num(signs[KAPPA * j:KAPPA * (j + 1)]) for j in range(limbs)]
        expected = commit.commit_v_concat(wit.v_y, limb_values, backend)
    elif params.progressive:
        # The chain binds both coordinates, so no sign tracking is needed.
        expected = commit.commit_v_progressive(list(zip(wit.v_x, wit.v_y)), backend)
    else:
        raise ValueError(f"variant {params.variant!r} has no committed tally relation")
    if expected != stmt.commit_v:
        return False
    return _tally_core(stmt.result, sum_v, n)


# --- circuit descriptor -------------------------------------------------------

_STATEMENT_TYPES = {
    ("public-key-gen", False): PkStatement,
    ("encrypted-vote-gen", False): VoteStatement,
    ("encrypted-vote-gen", True): CommittedVoteStatement,
    ("tallying", False): TallyStatement,
    ("tallying", True): CommittedTallyStatement,
}

_WITNESS_TYPES = {
    ("public-key-gen", False): PkWitness,
    ("encrypted-vote-gen", False): VoteWitness,
    ("encrypted-vote-gen", True): CommittedVoteWitness,
    ("tallying", False): TallyWitness,
    ("tallying", True): CommittedTallyWitness,
}


@dataclass(frozen=True)
class Circuit:
    """A relation checker bound to fixed parameters, addressable by digest."""

    kind: str
    params: CircuitParams

    def __post_init__(self):
        if self.kind not in CIRCUIT_KINDS:
            raise ValueError(f"unknown circuit kind {self.kind!r}")

    @property
    def _committed(self) -> bool:
        return self.kind != "public-key-gen" and self.params.committed

    def describe(self) -> dict:
        return {"kind": self.kind,
                "params": {"n": self.params.n, "variant": self.params.variant,
                           "kappa": KAPPA}}

    def statement_type(self):
        return _STATEMENT_TYPES[(self.kind, self._committed)]

    def witness_type(self):
        return _WITNESS_TYPES[(self.kind, self._committed)]

    def check(self, statement, witness) -> bool:
        if self.kind == "public-key-gen":
            return relation_public_key_gen(statement, witness)
        if self.kind == "encrypted-vote-gen":
            if self._committed:
                return relation_encrypted_vote_gen_committed(statement, witness, self.params)
            return relation_encrypted_vote_gen(statement, witness, self.params)
        if self._committed:
            return relation_tallying_committed(statement, witness, self.params)
        return relation_tallying(statement, witness, self.params)

    def statement_from_json(self, obj: dict):
        return self.statement_type().from_json(obj)

    def witness_from_json(self, obj: dict):
        return self.witness_type().from_json(obj)


def canonical_json(obj: dict) -> bytes:
    """Serialization used for digests: declared key order, no whitespace."""
    return json.dumps(obj, separators=(",", ":")).encode()


# --- honest witness generation -------------------------------------------------

def make_pk_instance(keypair: ovn_core.VoterKeypair) -> tuple[PkStatement, PkWitness]:
    stmt = PkStatement(pk=keypair.pk)
    wit = PkWitness(x=keypair.x)
    if not relation_public_key_gen(stmt, wit):
        raise RuntimeError("honest key instance does not satisfy its relation")
    return stmt, wit


def make_vote_instance(params: CircuitParams, index: int, vote: int, x: Scalar,
                       public_keys: Sequence[Point]):
    """Encrypt the vote and assemble the (statement, witness) pair for the variant."""
    if len(public_keys) != params.n:
        raise ValueError("need exactly n public keys")
    y_key = ovn_core.blinding_key(index, public_keys)
    enc = ovn_core.encrypt_vote(vote, x, y_key)
    pk_x = tuple(pk.x for pk in public_keys)
    pk_y = tuple(pk.y for pk in public_keys)
    if params.variant == "original":
        stmt = VoteStatement(enc_vote=enc, index=index, pk_y=pk_y)
        wit = VoteWitness(vote=vote, x=x, pk_x=pk_x)
        ok = relation_encrypted_vote_gen(stmt, wit, params)
    else:
        backend = params.hash_backend
        if params.progressive:
            bound = commit.commit_pk_progressive(pk_y, backend)
        else:
            bound = commit.commit_pk_concat(pk_y, backend)
        stmt = CommittedVoteStatement(enc_vote=enc, commit_pk=bound, index=index)
        wit = CommittedVoteWitness(vote=vote, x=x, pk_x=pk_x, pk_y=pk_y)
        ok = relation_encrypted_vote_gen_committed(stmt, wit, params)
    if not ok:
        raise RuntimeError("honest vote instance does not satisfy its relation")
    return stmt, wit


def make_tally_instance(params: CircuitParams, votes: Sequence[Point]):
    """Tally the votes and assemble the (statement, witness) pair for the variant."""
    if len(votes) != params.n:
        raise ValueError("need exactly n encrypted votes")
    result = ovn_core.tally(votes)
    v_x = tuple(v.x for v in votes)
    v_y = tuple(v.y for v in votes)
    if params.variant == "original":
        limbs = sign_limbs_from_bits([sign_bit(vx) for vx in v_x], params.n)
        stmt = TallyStatement(result=result, sign_limbs=tuple(limbs), v_y=v_y)
        wit = TallyWitness(v_x=v_x)
        ok = relation_tallying(stmt, wit, params)
    else:
        backend = params.hash_backend
        if params.progressive:
            bound = commit.commit_v_progressive(list(zip(v_x, v_y)), backend)
        else:
            limbs = sign_limbs_from_bits([sign_bit(vx) for vx in v_x], params.n)
            bound = commit.commit_v_concat(v_y, limbs, backend)
        stmt = CommittedTallyStatement(result=result, commit_v=bound)
        wit = CommittedTallyWitness(v_x=v_x, v_y=v_y)
        ok = relation_tallying_committed(stmt, wit, params)
    if not ok:
        raise RuntimeError("honest tally instance does not satisfy its relation")
    return stmt, wit


def sign_limbs_from_bits(bits: Sequence[int], n: int) -> list[FieldElement]:
    """Pack sign bits into ceil(n/kappa) limbs, little-endian within each limb."""
    limbs = (n + KAPPA - 1) // KAPPA
    padded = list(bits) + [0] * (KAPPA * limbs - len(bits))
    return [bits2num(padded[KAPPA * j:KAPPA * (j + 1)]) for j in range(limbs)]


# --- gadget-count model ---------------------------------------------------------
#
# Approximate constraints one gadget invocation costs in a rank-1 system;
# hashes are charged per compression block / permutation.

GADGET_WEIGHTS = {
    "bit_check": 1,
    "mux": 2,
    "is_equal": 6,
    "is_point": 5,
    "compare": 254,
    "comp_const": 254,
    "bits2num": 254,
    "e_add": 7,
    "e_sub": 8,
    "e_scalar_mul": 4300,
    "sha256_block": 26000,
    "poseidon_perm_w3": 243,
    "poseidon_perm_w4": 264,
}


@dataclass(frozen=True)
class ConstraintCount:
    gadgets: dict[str, int]

    @property
    def total(self) -> int:
        return sum(GADGET_WEIGHTS[name] * count for name, count in self.gadgets.items())


def _hash_gadgets(params: CircuitParams, per_chain_step: int, concat_count: int) -> dict[str, int]:
    backend = params.hash_backend
    n = params.n
    if params.progressive:
        steps = n
        if backend == "sha256":
            return {"sha256_block": steps * commit.absorb_cost("sha256", per_chain_step + 1)}
        return {f"poseidon_perm_w{per_chain_step + 2}": steps}
    return {"sha256_block": commit.absorb_cost("sha256", concat_count)}


def constraint_count(kind: str, params: CircuitParams) -> ConstraintCount:
    """Deterministic gadget tallies for one circuit instance."""
    n, limbs = params.n, params.limbs
    if kind == "public-key-gen":
        return ConstraintCount({"e_scalar_mul": 1, "comp_const": 1, "is_equal": 1})
    if kind == "encrypted-vote-gen":
        gadgets = {
            "bit_check": 1,
            "is_point": n,
            "comp_const": n,
            "compare": 2 * n,
            "mux": 2 * n + 1,
            "e_add": 2 * n + 1,
            "e_sub": 1,
            "e_scalar_mul": 1,
            "is_equal": 1,
        }
        if params.committed:
            for name, count in _hash_gadgets(params, 1, n).items():
                gadgets[name] = gadgets.get(name, 0) + count
        return ConstraintCount(gadgets)
    if kind == "tallying":
        gadgets = {
            "is_point": n,
            "e_add": n + (n + 1),
            "is_equal": (n + 1) + 1,
            "e_scalar_mul": 1,
        }
        if not params.progressive:
            gadgets["comp_const"] = n
            gadgets["bits2num"] = limbs
        if params.committed:
            for name, count in _hash_gadgets(params, 2, n + limbs).items():
                gadgets[name] = gadgets.get(name, 0) + count
        return ConstraintCount(gadgets)
    raise ValueError(f"unknown circuit kind {kind!r}")
