"""HTTP/JSON front-end for :class:`KeyManagementService` and a matching client.

Endpoints (field names follow ETSI GS QKD 014)::

    GET /api/v1/keys/{partner_id}/enc_keys
        -> {"keys": [{"key_ID": "<uuid>", "key": "<base64>"}]}
    GET /api/v1/keys/{partner_id}/dec_keys?key_ID=<uuid>
        -> {"keys": [{"key_ID": "<uuid>", "key": "<base64>"}]}

The caller's own identity travels in the ``X-SAE-ID`` header. A real KME
authenticates it with mutual TLS; that is out of scope here.
"""

from __future__ import annotations

import base64
import json
import logging
import re
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional, Tuple
from urllib.parse import parse_qs, unquote, urlsplit

import requests

from ..errors import QkdAlreadyConsumed, QkdError, QkdKeyNotFound, QkdUnauthorized, QkdUnavailable
from .kms import KeyManagementService

log = logging.getLogger(__name__)

SAE_HEADER = "X-SAE-ID"
_ROUTE = re.compile(r"^/api/v1/keys/(?P<partner>[^/]+)/(?P<op>enc_keys|dec_keys)$")

_STATUS = {
    QkdUnavailable: 503,
    QkdKeyNotFound: 404,
    QkdAlreadyConsumed: 409,
    QkdUnauthorized: 401,
}


def key_id_to_str(key_id: bytes) -> str:
    return str(uuid.UUID(bytes=bytes(key_id)))


def key_id_from_str(text: str) -> bytes:
    return uuid.UUID(text).bytes


def _container(key_id: bytes, key: bytes) -> dict:
    return {"keys": [{"key_ID": key_id_to_str(key_id), "key": base64.b64encode(key).decode()}]}


class _Handler(BaseHTTPRequestHandler):
    kms: KeyManagementService  # set on the subclass built by make_server

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("%s - " + fmt, self.address_string(), *args)

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):  # noqa: N802 - http.server naming
        url = urlsplit(self.path)
        m = _ROUTE.match(url.path)
        if m is None:
            return self._reply(404, {"message": "no such endpoint"})
        requester = self.headers.get(SAE_HEADER)
        if not requester:
            return self._reply(401, {"message": f"missing {SAE_HEADER} header"})
        partner = unquote(m["partner"])
        try:
            if m["op"] == "enc_keys":
                key_id, key = self.kms.get_key(requester, partner)
            else:
                ids = parse_qs(url.query).get("key_ID", [])
                if len(ids) != 1:
                    return self._reply(400, {"message": "exactly one key_ID required"})
                try:
                    key_id = key_id_from_str(ids[0])
                except ValueError:
                    return self._reply(400, {"message": "malformed key_ID"})
                key = self.kms.get_key_by_id(requester, partner, key_id)
        except QkdError as exc:
            return self._reply(_STATUS.get(type(exc), 500), {"message": str(exc), "error": type(exc).__name__})
        return self._reply(200, _container(key_id, key))


def make_server(kms: KeyManagementService, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    handler = type("KmsHandler", (_Handler,), {"kms": kms})
    return ThreadingHTTPServer((host, port), handler)


def serve_in_thread(kms: KeyManagementService, host: str = "127.0.0.1", port: int = 0) -> Tuple[ThreadingHTTPServer, str]:
    """Start a server on a daemon thread; returns (server, base_url)."""
    server = make_server(kms, host, port)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    h, p = server.server_address[:2]
    return server, f"http://{h}:{p}"


_ERRORS = {
    "QkdUnavailable": QkdUnavailable,
    "QkdKeyNotFound": QkdKeyNotFound,
    "QkdAlreadyConsumed": QkdAlreadyConsumed,
    "QkdUnauthorized": QkdUnauthorized,
}


class HttpKmsClient:
    """Speaks to a KMS over HTTP; same call surface as the in-process service."""

    def __init__(self, base_url: str, timeout: float = 5.0, session: Optional[requests.Session] = None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._http = session or requests.Session()

    def _get(self, requester: str, path: str, params: Optional[dict] = None) -> Tuple[bytes, bytes]:
        try:
            resp = self._http.get(
                self.base_url + path, params=params, headers={SAE_HEADER: requester}, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise QkdUnavailable(f"KMS unreachable: {exc}") from exc
        try:
            payload = resp.json()
        except ValueError:
            raise QkdUnavailable(f"KMS returned non-JSON status {resp.status_code}") from None
        if resp.status_code != 200:
            raise _ERRORS.get(payload.get("error"), QkdUnavailable)(payload.get("message", resp.status_code))
        try:
            entry = payload["keys"][0]
            return key_id_from_str(entry["key_ID"]), base64.b64decode(entry["key"], validate=True)
        except (KeyError, IndexError, ValueError, TypeError) as exc:
            raise QkdUnavailable(f"malformed KMS response: {exc}") from None

    def get_key(self, requester: str, partner: str) -> Tuple[bytes, bytes]:
        return self._get(requester, f"/api/v1/keys/{partner}/enc_keys")

    def get_key_by_id(self, requester: str, partner: str, key_id: bytes) -> bytes:
        got_id, key = self._get(
            requester, f"/api/v1/keys/{partner}/dec_keys", {"key_ID": key_id_to_str(key_id)}
        )
        if got_id != bytes(key_id):
            raise QkdUnavailable("KMS answered with a different key_ID")
        return key
