import random

import pytest

from openvote import poseidon
from openvote.commit import (
    absorb_cost,
    commit_pk_concat,
    commit_pk_progressive,
    commit_pk_progressive_step,
    commit_v_concat,
    commit_v_progressive,
    commit_v_progressive_step,
    hash_to_field,
)
from openvote.field_curve import KAPPA, P, FieldElement

rng = random.Random(0x5EED)

BACKENDS = ("sha256", "poseidon")


def elements(n):
    return [FieldElement(rng.randrange(P)) for _ in range(n)]


@pytest.mark.parametrize("backend", BACKENDS)
def test_hash_to_field_deterministic(backend):
    xs = elements(4)
    assert hash_to_field(backend, "", xs) == hash_to_field(backend, "", xs)
    assert hash_to_field(backend, "", xs) != hash_to_field(backend, "", xs[::-1])


def test_sha_output_is_masked_to_kappa_bits():
    for _ in range(50):
        out = hash_to_field("sha256", "", elements(2))
        assert out.value < (1 << KAPPA) <= P


def test_backends_disagree():
    xs = elements(1)
    assert hash_to_field("sha256", "", xs) != hash_to_field("poseidon", "", xs)


@pytest.mark.parametrize("backend", BACKENDS)
def test_domain_tag_separates(backend):
    xs = elements(2)
    assert hash_to_field(backend, "a", xs) != hash_to_field(backend, "b", xs)
    assert hash_to_field(backend, "", xs) != hash_to_field(backend, "a", xs)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        hash_to_field("blake3", "", elements(1))
    with pytest.raises(ValueError):
        hash_to_field("sha256", "", [])


@pytest.mark.parametrize("backend", BACKENDS)
def test_concat_commitments(backend):
    (single,) = elements(1)
    assert commit_pk_concat([single], backend) == hash_to_field(backend, "", [single])
    keys = elements(5)
    permuted = keys[1:] + keys[:1]
    assert commit_pk_concat(keys, backend) != commit_pk_concat(permuted, backend)
    limb = elements(1)
    votes = elements(1)
    assert commit_v_concat(votes, limb, backend) == hash_to_field(backend, "", votes + limb)
    flipped = [FieldElement(limb[0].value ^ 1)]
    assert commit_v_concat(votes, flipped, backend) != commit_v_concat(votes, limb, backend)


@pytest.mark.parametrize("backend", BACKENDS)
def test_progressive_key_chain_unrolls(backend):
    a, b, c = elements(3)
    direct = hash_to_field(backend, "", [
        hash_to_field(backend, "", [hash_to_field(backend, "", [FieldElement(0), a]), b]), c])
    chained = FieldElement(0)
    for item in (a, b, c):
        chained = commit_pk_progressive_step(chained, item, backend)
    assert chained == direct == commit_pk_progressive([a, b, c], backend)


@pytest.mark.parametrize("backend", BACKENDS)
def test_progressive_chain_is_order_sensitive(backend):
    xs = elements(4)
    assert commit_pk_progressive(xs, backend) != commit_pk_progressive(xs[::-1], backend)


@pytest.mark.parametrize("backend", BACKENDS)
def test_progressive_vote_chain(backend):
    coords = list(zip(elements(2), elements(2)))
    acc = FieldElement(0)
    for x, y in coords:
        acc = commit_v_progressive_step(acc, x, y, backend)
    assert acc == commit_v_progressive(coords, backend)
    # both coordinates enter the chain
    negated = [(FieldElement(P - coords[0][0].value), coords[0][1])] + coords[1:]
    assert commit_v_progressive(negated, backend) != acc
    assert commit_v_progressive([], backend) == FieldElement(0)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [1, 2, 3, 17, 64])
def test_incremental_equals_one_shot(backend, n):
    keys = elements(n)
    acc = FieldElement(0)
    for k in keys:
        acc = commit_pk_progressive_step(acc, k, backend)
    assert acc == commit_pk_progressive(keys, backend)
    coords = list(zip(elements(n), elements(n)))
    acc = FieldElement(0)
    for x, y in coords:
        acc = commit_v_progressive_step(acc, x, y, backend)
    assert acc == commit_v_progressive(coords, backend)


def test_sha_mapping_is_a_function_of_bytes():
    xs = elements(3)
    reparsed = [FieldElement.from_hex(x.to_hex()) for x in xs]
    assert hash_to_field("sha256", "", xs) == hash_to_field("sha256", "", reparsed)


def test_absorb_costs():
    assert absorb_cost("sha256", 2) == 2   # 64 bytes + padding
    assert absorb_cost("sha256", 3) == 2
    assert absorb_cost("sha256", 40) == 21
    assert absorb_cost("poseidon", 2) == 1
    assert absorb_cost("poseidon", 3) == 1
    assert absorb_cost("poseidon", 7) == 4
    with pytest.raises(ValueError):
        absorb_cost("md5", 2)


def test_poseidon_self_test_vectors_load():
    # loading runs the digest and permutation self-checks
    assert poseidon.permutation(3).width == 3
    assert poseidon.permutation(4).width == 4
    assert poseidon.hash2(1, 2) == poseidon.sponge([1, 2])
    assert poseidon.hash2(1, 2) != poseidon.hash3(1, 2, 0)


def test_poseidon_params_tamper_detected():
    import json

    from importlib import resources

    from openvote.poseidon import PARAMS_RESOURCE, _build

    text = resources.files("openvote").joinpath("data").joinpath(PARAMS_RESOURCE).read_text()
    payload = json.loads(text)
    payload["instances"]["3"]["round_constants"][0] = "0x1"
    with pytest.raises(ValueError):
        _build(payload)
