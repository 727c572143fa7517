"""Hybrid (classical + post-quantum + QKD) authenticated key exchange with KEM-based authentication."""

__version__ = "0.1.0"
