"""Named sub-seeds so pipeline stages can rerun independently."""

import hashlib


def derive_seed(seed: int, *names) -> int:
    """Stable 63-bit seed for the stream ``(seed, *names)``."""
    key = "/".join([str(int(seed))] + [str(n) for n in names]).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1
