"""JSON configuration and credential files for the command-line tools.

A party config looks like::

    {
      "suite": "toy-x25519",
      "identity": "alice",
      "peer": "bob",
      "credentials": "alice.cred.json",
      "trust": ["bob.cert.json"],
      "qkd_endpoint": "http://127.0.0.1:8020",
      "label_binding": "table",
      "rats_mode": "figure"
    }

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

from .protocol import Certificate, Credentials, SessionConfig, TrustStore, get_suite
from .protocol.suites import Suite

PathLike = Union[str, Path]


class ConfigError(ValueError):
    pass


def save_credentials(path: PathLike, creds: Credentials) -> None:
    Path(path).write_text(
        json.dumps(
            {"certificate": creds.certificate.encode().hex(), "secret_key": creds.secret_key.hex()},
            indent=2,
        )
        + "\n"
    )


def save_certificate(path: PathLike, cert: Certificate) -> None:
    Path(path).write_text(json.dumps({"certificate": cert.encode().hex()}, indent=2) + "\n")


def _load_json(path: PathLike) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return data


def load_certificate(path: PathLike) -> Certificate:
    """Accepts either a certificate file or a credentials file."""
    data = _load_json(path)
    try:
        return Certificate.decode(bytes.fromhex(data["certificate"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: bad certificate: {exc}") from None


def load_credentials(path: PathLike) -> Credentials:
    data = _load_json(path)
    try:
        return Credentials(
            Certificate.decode(bytes.fromhex(data["certificate"])), bytes.fromhex(data["secret_key"])
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: bad credentials: {exc}") from None


@dataclass
class PartyConfig:
    suite: str
    identity: str
    peer: str
    credentials: str
    trust: List[str] = field(default_factory=list)
    qkd_endpoint: str = "inproc"
    label_binding: str = "table"
    rats_mode: str = "figure"
    listen: Optional[str] = None
    connect: Optional[str] = None
    base_dir: Path = Path(".")

    @classmethod
    def load(cls, path: PathLike) -> "PartyConfig":
        data = _load_json(path)
        known = set(cls.__dataclass_fields__) - {"base_dir"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
        try:
            cfg = cls(**data, base_dir=Path(path).resolve().parent)
        except TypeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(cfg.trust, list):
            raise ConfigError(f"{path}: 'trust' must be a list of paths")
        return cfg

    def _path(self, p: str) -> Path:
        return self.base_dir / p

    def suite_obj(self) -> Suite:
        try:
            return get_suite(self.suite)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None

    def session_config(self) -> SessionConfig:
        suite = self.suite_obj()
        creds = load_credentials(self._path(self.credentials))
        trust = TrustStore(load_certificate(self._path(p)) for p in self.trust)
        try:
            return SessionConfig(
                self.identity,
                self.peer,
                suite,
                creds,
                trust_store=trust,
                label_binding=self.label_binding,
                rats_mode=self.rats_mode,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def parse_addr(addr: str) -> tuple:
    host, sep, port = addr.rpartition(":")
    if not sep or not port.isdigit():
        raise ConfigError(f"address must be HOST:PORT, got {addr!r}")
    return host or "127.0.0.1", int(port)
