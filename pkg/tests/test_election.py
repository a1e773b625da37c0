import json

import pytest

from openvote.circuits import VARIANTS
from openvote.election import (
    ConfigError,
    LocalClient,
    RunConfig,
    SCENARIOS,
    run_attack,
    run_election,
    scaling_sweep,
)
from openvote.ledger import replay_transcript


def test_honest_run_small():
    report = run_election(RunConfig(n=5, votes=[1, 0, 1, 1, 0], seed=11))
    assert report.honest_success
    assert report.tally == report.expected == 3
    assert report.refunds_paid == 6 * 1000
    assert not report.void


def test_single_voter_election():
    report = run_election(RunConfig(n=1, votes=[1], seed=4))
    assert report.tally == 1 and report.honest_success


def test_honest_matrix_all_variants():
    """Every variant tallies correctly and refunds fully across 1..12 voters."""
    for variant in VARIANTS:
        for n in range(1, 13):
            config = RunConfig(n=n, variant=variant, seed=100 + n, yes_fraction=0.5)
            report = run_election(config)
            assert report.honest_success, (variant, n, report.rejections)
            assert report.tally == report.expected
            assert report.refunds_paid == (n + 1) * config.deposit


def test_transcripts_deterministic_under_seed(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        report = run_election(RunConfig(n=4, variant="progressive-poseidon", seed=9,
                                        out_dir=str(out)))
        assert report.honest_success
    assert (out_a / "transcript.jsonl").read_bytes() == (out_b / "transcript.jsonl").read_bytes()
    assert (out_a / "costs.csv").read_bytes() == (out_b / "costs.csv").read_bytes()
    other = run_election(RunConfig(n=4, variant="progressive-poseidon", seed=10,
                                   out_dir=str(tmp_path / "c")))
    assert other.honest_success
    assert (tmp_path / "c" / "transcript.jsonl").read_bytes() != \
        (out_a / "transcript.jsonl").read_bytes()


def test_transcript_replays(tmp_path):
    report = run_election(RunConfig(n=3, variant="committed-sha256", seed=2,
                                    out_dir=str(tmp_path)))
    assert report.honest_success
    lines = (tmp_path / "transcript.jsonl").read_text().splitlines()
    replayed = replay_transcript(lines)
    assert replayed.contract.tally_result == report.tally


def test_attack_transcript_replays_with_rejections():
    client = LocalClient()
    run_attack("bad-tally", RunConfig(n=3, votes=[1, 1, 0], seed=6), client)
    lines = client.transcript()
    assert any("rejected:bad-proof" in line for line in lines)
    replayed = replay_transcript(lines)
    assert replayed.contract.tally_result is None
    assert replayed.transcript_lines() == lines


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(n=0).validate()
    with pytest.raises(ConfigError):
        RunConfig(n=2, votes=[1]).validate()
    with pytest.raises(ConfigError):
        RunConfig(n=2, votes=[1, 2]).validate()
    with pytest.raises(ConfigError):
        RunConfig(n=2, variant="nope").validate()
    with pytest.raises(ConfigError):
        RunConfig(n=2, yes_fraction=1.5).validate()
    with pytest.raises(ConfigError):
        RunConfig(n=2, variant="progressive-sha256", hash_backend="poseidon").validate()
    RunConfig(n=2, variant="progressive-sha256", hash_backend="sha256").validate()


def test_yes_fraction_extremes():
    all_no = run_election(RunConfig(n=3, yes_fraction=0.0, seed=1))
    assert all_no.tally == 0
    all_yes = run_election(RunConfig(n=3, yes_fraction=1.0, seed=1))
    assert all_yes.tally == 3


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_attack_scenarios(scenario):
    config = RunConfig(n=4, votes=[1, 0, 1, 1], seed=77)
    report = run_attack(scenario, config)
    codes = {(r["function"], r["code"]) for r in report.rejections}
    if scenario == "bad-tally":
        assert ("set_tally", "bad-proof") in codes
        assert report.tally is None
        assert ("refund", "not-eligible") in codes  # admin forfeits
        assert report.refunds_paid == 4 * config.deposit
    elif scenario == "non-member-register":
        assert ("register", "bad-merkle-proof") in codes
        assert report.tally == report.expected
    elif scenario == "wrong-index-cast":
        assert ("cast_vote", "wrong-sender") in codes
        assert report.tally == report.expected
    elif scenario == "forged-proof":
        assert ("cast_vote", "bad-proof") in codes
        assert report.tally == report.expected
    elif scenario == "duplicate-register":
        assert ("register", "duplicate-voter") in codes
        assert report.tally == report.expected
    elif scenario == "abort-missing-vote":
        assert ("set_tally", "election-void") in codes
        assert report.void and report.tally is None
        assert report.refunds_paid == 5 * config.deposit  # all registered + admin


def test_attack_leaves_conservation_intact():
    for scenario in SCENARIOS:
        client = LocalClient()
        run_attack(scenario, RunConfig(n=3, votes=[1, 0, 1], seed=5), client)
        ledger = client.ledger
        assert ledger.value_received == ledger.value_held() + ledger.value_refunded


def test_unknown_scenario_is_config_error():
    with pytest.raises(ConfigError):
        run_attack("tea-spill", RunConfig(n=2, seed=0))


def test_scaling_sweep_writes_csvs(tmp_path):
    paths = scaling_sweep([2, 3], ["original", "progressive-sha256"], str(tmp_path), seed=3)
    costs = (tmp_path / "sweep_costs.csv").read_text().splitlines()
    circuits = (tmp_path / "sweep_circuits.csv").read_text().splitlines()
    assert paths["costs"].endswith("sweep_costs.csv")
    header = costs[0].split(",")
    assert {"n", "variant", "function", "statement_elems", "model_cost"} <= set(header)
    # 2 n-values x 2 variants x 5 functions
    assert len(costs) == 1 + 20
    assert len(circuits) == 1 + 12
    rows = [dict(zip(header, line.split(","))) for line in costs[1:]]
    cast = {(r["variant"], int(r["n"])): int(r["statement_elems"])
            for r in rows if r["function"] == "cast_vote"}
    assert cast[("original", 2)] == 5 and cast[("original", 3)] == 6
    assert cast[("progressive-sha256", 2)] == 4 == cast[("progressive-sha256", 3)]
