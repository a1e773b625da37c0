import json

import pytest

from openvote.costmodel import CostModel, calibrate, load_config, load_cost_model


def test_frozen_config_rederives_from_anchors():
    config = load_config()
    anchors = config["anchors"]
    model = calibrate(anchors["gas"], n=anchors["n"], merkle_depth=anchors["merkle_depth"],
                      per_statement_elem=config["marginals"]["statement_elem"],
                      per_hash=config["marginals"]["hash"],
                      per_storage_write=config["marginals"]["storage_write"])
    assert dict(model.base) == config["base"]


def test_cost_formula():
    model = CostModel(base={"cast_vote": 100}, per_statement_elem=10, per_hash=3,
                      per_storage_write=7)
    assert model.cost("cast_vote", statement_elems=2, hash_calls=1, merkle_hashes=2,
                      storage_writes=1) == 100 + 20 + 9 + 7


def test_calibration_reproduces_anchor_costs_exactly():
    config = load_config()
    model = load_cost_model()
    n = config["anchors"]["n"]
    depth = config["anchors"]["merkle_depth"]
    gas = config["anchors"]["gas"]
    assert model.cost("register", 2, 0, depth + 1, 4) == gas["register"]
    assert model.cost("cast_vote", n + 3, 0, 0, 2) == gas["cast_vote"]
    assert model.cost("set_tally", n + 2, 0, 0, 1) == gas["set_tally"]
    assert model.cost("refund", 0, 0, 0, 2) == gas["refund"]
    assert model.cost("deploy", 0, 0, 0, 11) == gas["deploy"]


def test_overweight_marginals_rejected():
    config = load_config()
    with pytest.raises(ValueError):
        calibrate(config["anchors"]["gas"], n=40, merkle_depth=6,
                  per_statement_elem=10 ** 9, per_hash=0, per_storage_write=0)


def test_load_from_custom_path(tmp_path):
    custom = {"marginals": {"statement_elem": 1, "hash": 1, "storage_write": 1},
              "base": {fn: 10 for fn in ("deploy", "register", "cast_vote",
                                         "set_tally", "refund")}}
    path = tmp_path / "model.json"
    path.write_text(json.dumps(custom))
    model = load_cost_model(str(path))
    assert model.cost("refund", storage_writes=2) == 12
