"""``mucklesharp`` command line: provision, kms, responder, initiator, bench, vectors."""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path
from typing import List, Optional

from .bench import BenchReport, bench_credentials, run_loopback_bench
from .config import ConfigError, PartyConfig, parse_addr, save_certificate, save_credentials
from .errors import HandshakeRejected, HarnessError
from .key_schedule import LABEL_BINDINGS, RATS_MODES
from .protocol import available_suites, get_suite
from .qkd import HttpKmsClient, KeyManagementService, make_server
from .transport import ResponderServer, TransportError, run_initiator
from .vectors import emit_vectors

log = logging.getLogger("mucklesharp")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _schedule_flags(p: argparse.ArgumentParser, defaults: bool = False) -> None:
    p.add_argument("--label-binding", choices=LABEL_BINDINGS, default="table" if defaults else None)
    p.add_argument("--rats-mode", choices=RATS_MODES, default="figure" if defaults else None)


def _party_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--qkd-endpoint", metavar="URL", help="KMS base URL (overrides the config)")
    _schedule_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mucklesharp", description="Hybrid KEM + QKD key exchange tools.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("provision", help="generate a long-term key pair and certificate")
    p.add_argument("--id", required=True, dest="party_id")
    p.add_argument("--suite", default="toy")
    p.add_argument("--out", default=".", metavar="DIR")
    p.add_argument("--chain-layers", type=int, default=0, help="attach a simulated CA chain of this depth")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("kms", help="serve the simulated QKD key-delivery API over HTTP")
    p.add_argument("--listen", default="127.0.0.1:8020", metavar="ADDR")
    p.add_argument("--link", action="append", default=[], metavar="A:B", required=True)
    p.add_argument("--pool-size", type=int)
    p.add_argument("--rate", type=float, help="keys per second")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("responder", help="serve handshakes on a TCP listener")
    _party_flags(p)
    p.add_argument("--listen", metavar="ADDR")
    p.add_argument("--max-sessions", type=int, help="exit after this many connections")

    p = sub.add_parser("initiator", help="connect and run handshakes, print a bench report")
    _party_flags(p)
    p.add_argument("--connect", metavar="ADDR")
    p.add_argument("--stages", type=int, default=1, metavar="N")
    p.add_argument("--bench", type=int, default=1, metavar="R", help="number of sessions to run")
    p.add_argument("--dump-secrets", action="store_true", help="print stage keys")

    p = sub.add_parser("bench", help="in-process loopback benchmark over TCP")
    p.add_argument("--config", metavar="PATH", help="take suite and schedule flags from a party config")
    p.add_argument("--suite", default=None)
    p.add_argument("--stages", type=int, default=1, metavar="N")
    p.add_argument("--bench", type=int, default=5, metavar="R")
    p.add_argument("--chain-layers", type=int, default=0)
    p.add_argument("--qkd-endpoint", default="inproc", choices=["inproc"])
    p.add_argument("--seed", type=int)
    _schedule_flags(p)

    p = sub.add_parser("vectors", help="emit deterministic handshake test vectors")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--suite", default="toy")
    p.add_argument("--vectors", metavar="PATH", help="output file")
    p.add_argument("--dump-secrets", action="store_true", help="allow printing vectors to stdout")
    _schedule_flags(p, defaults=True)

    sub.add_parser("suites", help="list available cipher suites")
    return parser


def _apply_overrides(cfg: PartyConfig, args: argparse.Namespace) -> PartyConfig:
    for name in ("qkd_endpoint", "label_binding", "rats_mode", "listen", "connect"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def _qkd_url(cfg: PartyConfig) -> str:
    if cfg.qkd_endpoint == "inproc":
        raise ConfigError("separate initiator/responder processes need a KMS URL; use 'bench' for in-process runs")
    return cfg.qkd_endpoint


def cmd_provision(args) -> int:
    suite = get_suite(args.suite)
    rng = random.Random(args.seed) if args.seed is not None else random.SystemRandom()
    creds = bench_credentials(suite, rng, args.chain_layers, ids=(args.party_id,))[0]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_credentials(out / f"{args.party_id}.cred.json", creds)
    save_certificate(out / f"{args.party_id}.cert.json", creds.certificate)
    print(f"wrote {out / args.party_id}.cred.json and .cert.json")
    return EXIT_OK


def cmd_kms(args) -> int:
    rng = random.Random(args.seed) if args.seed is not None else None
    kms = KeyManagementService(rng, pool_size=args.pool_size, keys_per_second=args.rate)
    for link in args.link:
        a, sep, b = link.partition(":")
        if not sep or not a or not b:
            raise ConfigError(f"--link expects A:B, got {link!r}")
        kms.add_link(a, b)
    server = make_server(kms, *parse_addr(args.listen))
    log.info("kms listening on %s:%d", *server.server_address[:2])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def cmd_responder(args) -> int:
    cfg = _apply_overrides(PartyConfig.load(args.config), args)
    if not cfg.listen:
        raise ConfigError("responder needs --listen or 'listen' in the config")
    url = _qkd_url(cfg)
    server = ResponderServer(parse_addr(cfg.listen), cfg.session_config(), lambda: HttpKmsClient(url))
    log.info("responder %s listening on %s:%d", cfg.identity, *server.server_address[:2])
    try:
        if args.max_sessions is None:
            server.serve_forever()
        else:
            server.daemon_threads = False  # server_close() then waits for open sessions
            for _ in range(args.max_sessions):
                server.handle_request()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def cmd_initiator(args) -> int:
    cfg = _apply_overrides(PartyConfig.load(args.config), args)
    if not cfg.connect:
        raise ConfigError("initiator needs --connect or 'connect' in the config")
    if args.stages < 1 or args.bench < 1:
        raise ConfigError("--stages and --bench must be positive")
    session_cfg = cfg.session_config()
    qkd = HttpKmsClient(_qkd_url(cfg))
    records = []
    for run in range(args.bench):
        try:
            got = run_initiator(parse_addr(cfg.connect), session_cfg, qkd, args.stages)
        except HandshakeRejected as exc:
            print(f"handshake rejected: {exc.reason.value}", file=sys.stderr)
            return EXIT_FAIL
        except (TransportError, OSError) as exc:
            print(f"connection failed: {exc}", file=sys.stderr)
            return EXIT_FAIL
        for rec in got:
            log.info("run %d stage %d accept", run + 1, rec.index)
            if args.dump_secrets:
                print(f"run {run + 1} stage {rec.index} key = {rec.key.hex()}", file=sys.stderr)
        records += got
    report = BenchReport.from_records(cfg.suite, args.bench, args.stages, records)
    print(report.table(), file=sys.stderr)
    print(report.to_json())
    return EXIT_OK


def cmd_bench(args) -> int:
    suite_name, binding, mode = args.suite, args.label_binding, args.rats_mode
    if args.config:
        cfg = PartyConfig.load(args.config)
        suite_name = suite_name or cfg.suite
        binding = binding or cfg.label_binding
        mode = mode or cfg.rats_mode
    report = run_loopback_bench(
        get_suite(suite_name or "toy"),
        args.bench,
        args.stages,
        chain_layers=args.chain_layers,
        seed=args.seed,
        label_binding=binding or "table",
        rats_mode=mode or "figure",
    )
    print(report.table(), file=sys.stderr)
    print(report.to_json())
    return EXIT_OK


def cmd_vectors(args) -> int:
    text = emit_vectors(args.seed, args.suite, label_binding=args.label_binding, rats_mode=args.rats_mode)
    if args.vectors:
        Path(args.vectors).write_text(text)
        print(f"wrote {args.vectors}")
    elif args.dump_secrets:
        sys.stdout.write(text)
    else:
        print("vectors contain secrets: pass --vectors PATH or --dump-secrets", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def cmd_suites(args) -> int:
    for suite in available_suites().values():
        print(suite.describe())
    return EXIT_OK


COMMANDS = {
    "provision": cmd_provision,
    "kms": cmd_kms,
    "responder": cmd_responder,
    "initiator": cmd_initiator,
    "bench": cmd_bench,
    "vectors": cmd_vectors,
    "suites": cmd_suites,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, KeyError, ValueError, HarnessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
