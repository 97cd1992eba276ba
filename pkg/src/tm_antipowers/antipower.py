"""Anti-power decisions on j-fixes of the Thue-Morse word.

A query ``(j, k, m)`` names the word ``t_{j+1} ... t_{j+km}`` cut into ``k``
blocks of length ``m``; block ``r`` is ``<rm+j+1, (r+1)m+j>``.  Blocks are
compared through 64-bit digests, and every digest collision is settled by
comparing the packed blocks bit for bit, so all answers are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InternalInconsistencyError
from .word import Segment, TmBuffer

_U64 = np.uint64
_GOLDEN = 0x9E3779B97F4A7C15

# rows per digest batch are capped so one batch stays near 8 MiB
_BATCH_WORDS = 1 << 20
_FIRST_BATCH = 64


@dataclass(frozen=True)
class ApQuery:
    j: int
    k: int
    m: int

    def __post_init__(self):
        if self.j < 0 or self.k < 1 or self.m < 1:
            raise DomainError(f"invalid query j={self.j}, k={self.k}, m={self.m}")

    def block(self, r: int) -> Segment:
        return Segment.block(self.j, self.m, r)


@dataclass(frozen=True)
class BlockFingerprint:
    hash64: int
    segment: Segment


def _splitmix(x: np.ndarray) -> np.ndarray:
    x = x + _U64(_GOLDEN)
    x = (x ^ (x >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> _U64(27))) * _U64(0x94D049BB133111EB)
    return x ^ (x >> _U64(31))


_column_keys = _splitmix(np.arange(256, dtype=_U64)) | _U64(1)


def _keys(n: int) -> np.ndarray:
    global _column_keys
    if n > _column_keys.size:
        size = max(n, 2 * _column_keys.size)
        _column_keys = _splitmix(np.arange(size, dtype=_U64)) | _U64(1)
    return _column_keys[:n]


def digest_rows(rows: np.ndarray) -> np.ndarray:
    """64-bit digest of each packed row; a filter only, never a verdict."""
    with np.errstate(over="ignore"):
        x = rows * _keys(rows.shape[1])[None, :]
        x ^= x >> _U64(29)
        np.multiply(x, _U64(0xBF58476D1CE4E5B9), out=x)
        h = x.sum(axis=1, dtype=_U64)
        return _splitmix(h ^ _U64(rows.shape[1]))


def _first_confirmed_repeat(digests: np.ndarray, rows_of) -> Optional[int]:
    """Smallest index whose block equals an earlier block, or None.

    ``rows_of(indices)`` returns the packed rows for the given block indices.
    """
    order = np.argsort(digests, kind="stable")
    ds = digests[order]
    same = ds[1:] == ds[:-1]
    if not same.any():
        return None
    for c in np.sort(order[1:][same]):
        earlier = np.flatnonzero(digests[:c] == digests[c])
        rows = rows_of(np.append(earlier, c))
        if (rows[:-1] == rows[-1]).all(axis=1).any():
            return int(c)
    return None


class AntiPowerEngine:
    """Exact anti-power queries over one shared buffer, with memoised scans.

    For each ``(j, m)`` the engine remembers either the exact index of the
    first repeated block or how many leading blocks are known distinct.
    """

    def __init__(self, buffer: Optional[TmBuffer] = None):
        self.buffer = buffer if buffer is not None else TmBuffer()
        self._repeat: dict[tuple[int, int], int] = {}
        self._distinct: dict[tuple[int, int], int] = {}

    # -- block access -------------------------------------------------
    def block_rows(self, j: int, m: int, indices) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        return self.buffer.blocks(idx * m + j, m)

    def fingerprint(self, seg: Segment) -> BlockFingerprint:
        row = self.buffer.blocks([seg.alpha - 1], len(seg))
        return BlockFingerprint(int(digest_rows(row)[0]), seg)

    def blocks_equal(self, a: Segment, b: Segment) -> bool:
        """Exact comparison: digest filter, then bit-exact confirmation."""
        if len(a) != len(b):
            return False
        if self.fingerprint(a).hash64 != self.fingerprint(b).hash64:
            return False
        rows = self.buffer.blocks([a.alpha - 1, b.alpha - 1], len(a))
        return bool((rows[0] == rows[1]).all())

    # -- scans --------------------------------------------------------
    def _scan(self, j: int, m: int, k_cap: int) -> Optional[int]:
        """Stream blocks 0..k_cap-1 and return the first repeat index."""
        self.buffer.extend_to(j + k_cap * m)
        n_words = (m + 63) // 64
        batch_cap = max(_FIRST_BATCH, _BATCH_WORDS // n_words)
        digests = np.empty(0, dtype=_U64)
        done = 0
        batch = _FIRST_BATCH
        while done < k_cap:
            stop = min(k_cap, done + batch)
            rows = self.block_rows(j, m, np.arange(done, stop))
            digests = np.concatenate([digests, digest_rows(rows)])
            hit = _first_confirmed_repeat(
                digests, lambda ix: self.block_rows(j, m, ix)
            )
            if hit is not None:
                return hit
            done = stop
            batch = min(2 * batch, batch_cap)
        return None

    def first_repeat_index(self, j: int, m: int, k_cap: int) -> Optional[int]:
        """Smallest r < k_cap such that block r equals an earlier block."""
        if j < 0 or m < 1 or k_cap < 1:
            raise DomainError(f"invalid scan j={j}, m={m}, k_cap={k_cap}")
        key = (j, m)
        if key in self._repeat:
            r = self._repeat[key]
            return r if r < k_cap else None
        known = self._distinct.get(key, 0)
        if known >= k_cap:
            return None
        # rescans at least double the distinct prefix, so repeated growth is amortised
        cap = k_cap if known == 0 else max(k_cap, 2 * known)
        r = self._scan(j, m, cap)
        if r is None:
            self._distinct[key] = cap
            return None
        self._repeat[key] = r
        self._distinct.pop(key, None)
        return r if r < k_cap else None

    def is_anti_power(self, j: int, k: int, m: int) -> bool:
        ApQuery(j, k, m)
        return self.first_repeat_index(j, m, k) is None

    def frak_k(self, j: int, m: int, cap: Optional[int] = None) -> int:
        """Smallest k such that the j-fix of length km is not a k-anti-power."""
        if j < 0 or m < 1:
            raise DomainError(f"invalid arguments j={j}, m={m}")
        if cap is None:
            cap = default_frak_cap(j, m)
        r = self.first_repeat_index(j, m, cap)
        if r is None:
            raise InternalInconsistencyError(
                f"no repeated block among the first {cap} blocks for j={j}, m={m}"
            )
        return r + 1

    def gamma(self, j: int, k: int) -> int:
        """Smallest m such that the j-fix of length km is a k-anti-power."""
        if j < 0 or k < 1:
            raise DomainError(f"invalid arguments j={j}, k={k}")
        limit = 8 * k + 64
        for m in range(1, limit + 1):
            if self.is_anti_power(j, k, m):
                return m
        raise InternalInconsistencyError(
            f"gamma search for j={j}, k={k} passed the safety cap m={limit}"
        )

    def big_gamma(self, j: int, k: int) -> Optional[int]:
        """Largest odd m <= 3k-4 outside the anti-power set, or None."""
        if j < 0 or k < 1:
            raise DomainError(f"invalid arguments j={j}, k={k}")
        if k < 3:
            return None
        top = 3 * k - 4
        for m in range(top if top % 2 else top - 1, 0, -2):
            if not self.is_anti_power(j, k, m):
                return m
        return None

    def ap_membership_pair(self, j: int, k: int, m: int) -> tuple[bool, bool]:
        if k < 3:
            raise DomainError(f"membership pairs need k >= 3, got {k}")
        return self.is_anti_power(j, k, m), self.is_anti_power(j, k, 2 * m)


def default_frak_cap(j: int, m: int) -> int:
    """Scan cap for frak_k: twice the case bound plus slack, never above 2^m + 1."""
    from .bounds import case_upper_bound

    pigeonhole = (1 << m) + 1 if m < 64 else None
    if m == 1:
        return pigeonhole
    bound = case_upper_bound(j, m)
    cap = 2 * (bound.numerator // bound.denominator + 1) + 16
    return cap if pigeonhole is None else min(cap, pigeonhole)


_default_engine: Optional[AntiPowerEngine] = None


def default_engine() -> AntiPowerEngine:
    global _default_engine
    if _default_engine is None:
        _default_engine = AntiPowerEngine()
    return _default_engine


def is_anti_power(j: int, k: int, m: int) -> bool:
    return default_engine().is_anti_power(j, k, m)


def first_repeat_index(j: int, m: int, k_cap: int) -> Optional[int]:
    return default_engine().first_repeat_index(j, m, k_cap)


def frak_k(j: int, m: int) -> int:
    return default_engine().frak_k(j, m)


def gamma(j: int, k: int) -> int:
    return default_engine().gamma(j, k)


def big_gamma(j: int, k: int) -> Optional[int]:
    return default_engine().big_gamma(j, k)


def ap_membership_pair(j: int, k: int, m: int) -> tuple[bool, bool]:
    return default_engine().ap_membership_pair(j, k, m)
