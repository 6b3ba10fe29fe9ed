"""Shared Weisfeiler-Lehman refinement engine.

Colors are interned process-wide: a color id is a dense integer naming one
subtree structure, and each color carries a stable 16-byte hash derived only
from the structure (never from discovery order), so digests and feature
hashes are reproducible across runs and processes.
"""

from __future__ import annotations

from .hashing import h128

_palette: dict[tuple, int] = {}
_stable: list[bytes] = []
_label_colors: dict[tuple[str, ...], list[int]] = {}

# Color ids are transient names; everything durable is derived from the
# stable hashes.  When the palette grows past the cap it is rebuilt from
# scratch and EPOCH bumps so dependent caches keyed by color id can drop.
PALETTE_CAP = 3_000_000
EPOCH = 0


def _maybe_reset() -> None:
    global EPOCH
    if len(_stable) > PALETTE_CAP:
        _palette.clear()
        _stable.clear()
        _label_colors.clear()
        EPOCH += 1


def _intern(sig: tuple, payload: bytes) -> int:
    c = _palette.get(sig)
    if c is None:
        c = len(_stable)
        _palette[sig] = c
        _stable.append(h128(payload))
    return c


def stable_hash(color: int) -> bytes:
    return _stable[color]


def refine(labels: tuple[str, ...], adj: list[list[int]],
           rounds: int) -> list[list[int]]:
    """Per-round color ids for every node, rounds+1 lists (round 0 = labels)."""
    _maybe_reset()
    palette_get = _palette.get
    colors = _label_colors.get(labels)
    if colors is None:
        colors = [_intern(("L", lab), b"L:" + lab.encode()) for lab in labels]
        _label_colors[labels] = colors
    out = [colors]
    for _ in range(rounds):
        nxt = []
        for u, nbrs in enumerate(adj):
            nb = [colors[v] for v in nbrs]
            nb.sort()
            sig = (colors[u], *nb)
            c = palette_get(sig)
            if c is None:
                # hash from structure only: own hash, then neighbor hashes in
                # byte order, so the digest never depends on id assignment
                payload = (b"N:" + _stable[colors[u]]
                           + b"".join(sorted(_stable[x] for x in nb)))
                c = _intern(sig, payload)
            nxt.append(c)
        colors = nxt
        out.append(colors)
    return out
