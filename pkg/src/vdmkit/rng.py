"""Seeded randomness with documented stream splitting.

Every stochastic operation in the package draws from a Philox counter-based
generator keyed through ``numpy.random.SeedSequence``. Philox is platform
independent and insensitive to draw order across machines, so a master seed
plus a spawn path identifies a bit-reproducible stream anywhere.

Splitting scheme: a child stream for purpose ``(a, b, ...)`` under master seed
``s`` is ``SeedSequence(s, spawn_key=(a, b, ...))``. Path elements may be
strings naming the purpose; they hash through crc32, which is stable across
platforms and processes (unlike ``hash``). Protocol code derives per-point
seeds with the path ``(n, repeat_index)``; see ``protocols``.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["make_generator", "derive_seeds"]


def _key(path) -> tuple[int, ...]:
    out = []
    for p in path:
        if isinstance(p, str):
            out.append(zlib.crc32(p.encode("utf-8")))
        else:
            out.append(int(p))
    return tuple(out)


def make_generator(seed: int, *path) -> np.random.Generator:
    """Return a Philox generator for ``seed`` split along ``path``."""
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    seq = np.random.SeedSequence(int(seed), spawn_key=_key(path))
    return np.random.Generator(np.random.Philox(seq))


def derive_seeds(seed: int, path: tuple, count: int) -> list[int]:
    """Derive ``count`` independent integer seeds from ``seed`` along ``path``.

    The result is a deterministic function of (seed, path) only; it does not
    depend on how many seeds were derived for other paths.
    """
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    seq = np.random.SeedSequence(int(seed), spawn_key=_key(path))
    return [int(s) for s in seq.generate_state(count, dtype=np.uint32)]
