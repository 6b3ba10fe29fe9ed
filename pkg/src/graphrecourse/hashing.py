"""Stable hash primitive shared by every identity/embedding computation.

When the native extension is available its 128-bit hash is used, so the
pure-Python reference paths and the native hot path produce byte-identical
keys, digests and embeddings.  Without the extension the package falls back
to blake2b; all invariants hold either way, only the concrete bytes differ.
"""

from __future__ import annotations

import hashlib

try:
    from . import _fastspace as _ext
except ImportError:  # pragma: no cover - built as part of the package
    _ext = None

HAVE_NATIVE = _ext is not None

if HAVE_NATIVE:
    h128 = _ext.h128

    def bucket64(data: bytes, salt: bytes) -> int:
        return _ext.h64_salted(data, salt)

else:  # pragma: no cover - exercised only without the extension

    def h128(data: bytes) -> bytes:
        return hashlib.blake2b(data, digest_size=16).digest()

    def bucket64(data: bytes, salt: bytes) -> int:
        h = hashlib.blake2b(data, digest_size=8, salt=salt).digest()
        return int.from_bytes(h, "big")
