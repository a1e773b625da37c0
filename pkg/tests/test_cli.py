import json

from openvote.cli import EXIT_CONFIG, EXIT_OK, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_command(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "3", "--votes", "1,0,1",
                           "--seed", "5", "--out", str(tmp_path))
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["tally"] == 2 and report["expected"] == 2
    assert (tmp_path / "transcript.jsonl").exists()
    assert (tmp_path / "costs.csv").exists()
    assert (tmp_path / "eligibility.json").exists()


def test_run_is_deterministic(tmp_path, capsys):
    for sub in ("a", "b"):
        code, *_ = run_cli(capsys, "run", "--n", "2", "--seed", "42",
                           "--variant", "committed-sha256", "--out", str(tmp_path / sub))
        assert code == EXIT_OK
    assert (tmp_path / "a" / "transcript.jsonl").read_bytes() == \
        (tmp_path / "b" / "transcript.jsonl").read_bytes()


def test_attack_command(capsys):
    code, out, _ = run_cli(capsys, "attack", "--scenario", "bad-tally",
                           "--n", "3", "--seed", "2")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["tally"] is None
    assert {"function": "set_tally", "code": "bad-proof"} in report["rejections"]


def test_sweep_command(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "sweep", "--n-list", "2,3",
                           "--variants", "original", "--out", str(tmp_path))
    assert code == EXIT_OK
    paths = json.loads(out)
    assert (tmp_path / "sweep_costs.csv").exists()
    assert paths["circuits"].endswith("sweep_circuits.csv")


def test_config_errors_exit_3(capsys):
    assert run_cli(capsys, "run", "--n", "2", "--votes", "1")[0] == EXIT_CONFIG
    assert run_cli(capsys, "run", "--n", "0")[0] == EXIT_CONFIG
    assert run_cli(capsys, "run", "--n", "2", "--variant", "nope")[0] == EXIT_CONFIG
    assert run_cli(capsys, "run", "--n", "2", "--hash", "poseidon",
                   "--variant", "progressive-sha256")[0] == EXIT_CONFIG
    assert run_cli(capsys, "sweep", "--n-list", "2", "--variants", "bogus",
                   "--out", "/tmp/x")[0] == EXIT_CONFIG
    assert run_cli(capsys, "frobnicate")[0] == EXIT_CONFIG


def test_hash_flag_accepted_when_it_matches(capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "1", "--hash", "poseidon",
                           "--variant", "progressive-poseidon", "--seed", "1")
    assert code == EXIT_OK
    assert json.loads(out)["variant"] == "progressive-poseidon"


def test_custom_cost_config_changes_reported_costs(tmp_path, capsys):
    config = {"marginals": {"statement_elem": 1, "hash": 1, "storage_write": 1},
              "base": {fn: 1 for fn in ("deploy", "register", "cast_vote",
                                        "set_tally", "refund")}}
    path = tmp_path / "flat_model.json"
    path.write_text(json.dumps(config))
    out_dir = tmp_path / "run"
    code, *_ = run_cli(capsys, "run", "--n", "2", "--votes", "1,0", "--seed", "3",
                       "--cost-config", str(path), "--out", str(out_dir))
    assert code == EXIT_OK
    rows = (out_dir / "costs.csv").read_text().splitlines()[1:]
    deploy_cost = int(rows[0].split(",")[-1])
    assert deploy_cost == 1 + 11  # flat base + 11 unit storage writes
