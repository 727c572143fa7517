from .http import HttpKmsClient, make_server, serve_in_thread
from .kms import KEY_ID_LEN, QKD_KEY_LEN, CorruptionEvent, KeyManagementService, QkdKeyRecord

__all__ = [
    "KEY_ID_LEN",
    "QKD_KEY_LEN",
    "CorruptionEvent",
    "HttpKmsClient",
    "KeyManagementService",
    "QkdKeyRecord",
    "make_server",
    "serve_in_thread",
]
