"""Command-line batch driver: run elections, attack scenarios, and scaling sweeps.

The CLI is a client. By default it mounts the service in-process and drives it
over the HTTP wire format; pass --url to aim the same commands at a running
server (`openvote serve`). Exit codes: 0 success, 2 a step of an honest path
was rejected, 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .client import HttpClient, ServiceError
from .circuits import VARIANTS
from .election import ConfigError, RunConfig, SCENARIOS, run_attack, run_election, scaling_sweep

EXIT_OK = 0
EXIT_REJECTED = 2
EXIT_CONFIG = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are configuration errors
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True, help="number of eligible voters")
    parser.add_argument("--variant", default="original", choices=VARIANTS)
    parser.add_argument("--hash", dest="hash_backend", default=None,
                        choices=["sha256", "poseidon"],
                        help="must match the variant's backend; validation only")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--votes", default=None,
                       help="explicit comma-separated vote bits, length n")
    group.add_argument("--yes-fraction", type=float, default=0.5,
                       help="probability of a yes vote when --votes is absent")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="directory for transcript and cost files")
    parser.add_argument("--cost-config", default=None,
                        help="path to an alternative cost model config")
    parser.add_argument("--url", default=None,
                        help="base URL of a running service (default: in-process)")


def _parse_votes(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError as exc:
        raise ConfigError(f"bad --votes value: {exc}") from None


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        n=args.n,
        variant=args.variant,
        votes=_parse_votes(args.votes),
        yes_fraction=args.yes_fraction,
        seed=args.seed,
        out_dir=args.out,
        cost_config=args.cost_config,
        hash_backend=args.hash_backend,
    )


def _client(args, config: RunConfig) -> HttpClient:
    return HttpClient(base_url=args.url, cost_config=config.cost_config)


def _finish(report) -> int:
    print(json.dumps(report.to_json(), indent=1))
    return EXIT_OK if report.honest_success else EXIT_REJECTED


def cmd_run(args) -> int:
    config = _config_from_args(args)
    config.validate()
    client = _client(args, config)
    try:
        return _finish(run_election(config, client))
    finally:
        client.close()


def cmd_attack(args) -> int:
    config = _config_from_args(args)
    config.validate()
    client = _client(args, config)
    try:
        report = run_attack(args.scenario, config, client)
    finally:
        client.close()
    print(json.dumps(report.to_json(), indent=1))
    # Attacks are expected to be rejected; the command itself succeeds.
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        n_list = [int(v) for v in args.n_list.split(",") if v != ""]
        variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad sweep list: {exc}") from None
    for variant in variants:
        if variant not in VARIANTS:
            raise ConfigError(f"unknown variant {variant!r}; choose from {VARIANTS}")
    if not n_list or not variants:
        raise ConfigError("sweep needs at least one n and one variant")

    def factory(config: RunConfig) -> HttpClient:
        return HttpClient(base_url=args.url, cost_config=config.cost_config)

    paths = scaling_sweep(n_list, variants, args.out, seed=args.seed,
                          client_factory=factory)
    print(json.dumps(paths, indent=1))
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        import uvicorn
    except ImportError:
        print("serving needs uvicorn: pip install openvote[serve]", file=sys.stderr)
        return EXIT_CONFIG
    uvicorn.run("openvote.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="openvote",
                     description="Self-tallying elections over a simulated ledger")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one honest election end to end")
    _add_run_flags(run)
    run.set_defaults(handler=cmd_run)

    attack = sub.add_parser("attack", help="run one adversarial scenario")
    attack.add_argument("--scenario", required=True, choices=SCENARIOS)
    _add_run_flags(attack)
    attack.set_defaults(handler=cmd_attack)

    sweep = sub.add_parser("sweep", help="run the scaling matrix and emit CSVs")
    sweep.add_argument("--n-list", required=True, help="comma-separated voter counts")
    sweep.add_argument("--variants", default=",".join(VARIANTS),
                       help="comma-separated variant names")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--out", required=True, help="output directory for the CSVs")
    sweep.add_argument("--url", default=None)
    sweep.set_defaults(handler=cmd_sweep)

    serve = sub.add_parser("serve", help="serve the ledger API over HTTP")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ServiceError as exc:
        print(f"service error: {exc}", file=sys.stderr)
        return EXIT_REJECTED


if __name__ == "__main__":
    sys.exit(main())
