"""The Thue-Morse word: letter rule, bit-packed prefix buffer, morphisms.

Public indices are 1-based, so letter ``i`` is ``t_i`` and the segment
``Segment(a, b)`` is ``t_a ... t_b`` inclusive.  Storage is 0-based:
letter ``t_i`` lives at bit offset ``i - 1`` of a little-endian array of
``uint64`` words, least significant bit first.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import CodingError, DomainError, ResourceError

#: Default buffer ceiling in letters (2**31 letters = 256 MiB packed).
DEFAULT_MEM_CAP = 1 << 31

#: t_1 ... t_16 = 0110100110010110, packed LSB-first.
_SEED_WORD = 0x6996
_SEED_LEN = 16

_U64 = np.uint64
_ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


def tm_letter(i: int) -> int:
    """Return ``t_i``, the parity of the number of 1s in ``i - 1``."""
    if i < 1:
        raise DomainError(f"letter index must be >= 1, got {i}")
    return (i - 1).bit_count() & 1


def letters_direct(alpha: int, beta: int) -> np.ndarray:
    """Letters ``t_alpha .. t_beta`` as a uint8 array, computed by popcount.

    Needs no buffer, so it reaches indices far beyond any memory cap; the
    cost is linear in the segment length only.
    """
    if alpha < 1 or beta < alpha:
        raise DomainError(f"invalid segment <{alpha}, {beta}>")
    idx = np.arange(alpha - 1, beta, dtype=_U64)
    return (np.bitwise_count(idx) & 1).astype(np.uint8)


@dataclass(frozen=True)
class Segment:
    """1-based inclusive index range ``<alpha, beta>`` into the word."""

    alpha: int
    beta: int

    def __post_init__(self):
        if not 1 <= self.alpha <= self.beta:
            raise DomainError(f"invalid segment <{self.alpha}, {self.beta}>")

    def __len__(self) -> int:
        return self.beta - self.alpha + 1

    @classmethod
    def block(cls, j: int, m: int, r: int) -> Segment:
        """The r-th block (0-based) of length m in the j-fix."""
        return cls(r * m + j + 1, (r + 1) * m + j)


@dataclass(frozen=True)
class Bits:
    """A packed binary string; bit ``i`` of the string is bit ``i % 8`` of byte ``i // 8``."""

    data: bytes
    length: int

    @classmethod
    def from_array(cls, arr) -> Bits:
        arr = np.asarray(arr, dtype=np.uint8)
        if arr.size and arr.max() > 1:
            raise DomainError("bit arrays may only contain 0 and 1")
        return cls(np.packbits(arr, bitorder="little").tobytes(), int(arr.size))

    @classmethod
    def from_str(cls, s: str) -> Bits:
        if set(s) - {"0", "1"}:
            raise DomainError(f"not a binary string: {s!r}")
        return cls.from_array(np.frombuffer(s.encode(), dtype=np.uint8) - ord("0"))

    def to_array(self) -> np.ndarray:
        raw = np.frombuffer(self.data, dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little", count=self.length)

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return (self.to_array() + ord("0")).tobytes().decode()


def _as_array(word) -> np.ndarray:
    if isinstance(word, Bits):
        return word.to_array()
    if isinstance(word, str):
        return Bits.from_str(word).to_array()
    if isinstance(word, int):
        return np.array([word], dtype=np.uint8)
    return np.asarray(word, dtype=np.uint8)


def mu_apply(word, n: int = 1) -> Bits:
    """Apply the doubling morphism 0 -> 01, 1 -> 10 ``n`` times."""
    if n < 0:
        raise DomainError(f"iteration count must be >= 0, got {n}")
    arr = _as_array(word)
    for _ in range(n):
        arr = np.stack([arr, arr ^ 1], axis=1).reshape(-1)
    return Bits.from_array(arr)


def sigma_apply(word) -> Bits:
    """Decode a word over {01, 10} back to letters (inverse of ``mu_apply``)."""
    arr = _as_array(word)
    if arr.size % 2:
        raise DomainError(f"word length {arr.size} is odd")
    pairs = arr.reshape(-1, 2)
    bad = np.flatnonzero(pairs[:, 0] == pairs[:, 1])
    if bad.size:
        i = int(bad[0])
        raise CodingError(i + 1, f"{pairs[i, 0]}{pairs[i, 1]}")
    return Bits.from_array(pairs[:, 0])


def _tail_mask(nbits: int) -> np.uint64:
    if nbits % 64 == 0:
        return _ALL_ONES
    return _U64((1 << (nbits % 64)) - 1)


class TmBuffer:
    """Bit-packed prefix of the Thue-Morse word, grown by the doubling law.

    Growth appends the complement of the current prefix one whole machine
    word at a time.  Readers may keep using the array they obtained while
    another thread grows the buffer; growth swaps in a new array atomically.
    """

    def __init__(self, mem_cap: int = DEFAULT_MEM_CAP):
        if mem_cap < _SEED_LEN:
            raise ResourceError(f"memory cap of {mem_cap} letters is below the 16-letter seed")
        self.mem_cap = mem_cap
        self._words = np.array([_SEED_WORD, 0], dtype=_U64)
        self._len = _SEED_LEN
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return self._len

    @property
    def words(self) -> np.ndarray:
        """The packed words covering the valid letters (no padding)."""
        return self._words[: (self._len + 63) // 64]

    def extend_to(self, n: int) -> TmBuffer:
        """Grow until at least ``n`` letters are stored (next power of two)."""
        if n < 1:
            raise DomainError(f"letter count must be >= 1, got {n}")
        if n <= self._len:
            return self
        if n > self.mem_cap:
            raise ResourceError(
                f"{n} letters requested, memory cap is {self.mem_cap} letters"
            )
        with self._lock:
            while self._len < n:
                self._double()
        return self

    def _double(self):
        old = self._len
        new = min(2 * old, self.mem_cap)
        words = self._words
        if old < 64:
            # doubling inside word 0
            low = int(words[0]) & ((1 << old) - 1)
            comp = ~low & ((1 << (new - old)) - 1)
            grown = np.zeros(2, dtype=_U64)
            grown[0] = low | (comp << old)
        else:
            # old is a multiple of 64 here: 16 -> 32 -> 64 -> 128 ...
            n_old = old // 64
            n_new = (new + 63) // 64
            # one trailing zero word lets block reads run one word past the end
            grown = np.zeros(n_new + 1, dtype=_U64)
            grown[:n_old] = words[:n_old]
            np.invert(words[: n_new - n_old], out=grown[n_old:n_new])
            grown[n_new - 1] &= _tail_mask(new)
        self._words = grown
        self._len = new

    def letter(self, i: int) -> int:
        if i < 1:
            raise DomainError(f"letter index must be >= 1, got {i}")
        self.extend_to(i)
        return int(self._words[(i - 1) >> 6] >> _U64((i - 1) & 63)) & 1

    def letters(self, alpha: int, beta: int) -> np.ndarray:
        """Letters ``t_alpha .. t_beta`` as a uint8 array read from the buffer."""
        if alpha < 1 or beta < alpha:
            raise DomainError(f"invalid segment <{alpha}, {beta}>")
        self.extend_to(beta)
        w0, w1 = (alpha - 1) >> 6, (beta - 1) >> 6
        chunk = self._words[w0 : w1 + 1].view(np.uint8)
        bits = np.unpackbits(chunk, bitorder="little")
        off = (alpha - 1) - 64 * w0
        return bits[off : off + beta - alpha + 1]

    def segment_bits(self, seg: Segment) -> Bits:
        return Bits.from_array(self.letters(seg.alpha, seg.beta))

    def blocks(self, starts, m: int) -> np.ndarray:
        """Pack blocks of ``m`` letters beginning at the 0-based ``starts``.

        Returns a ``(len(starts), ceil(m / 64))`` uint64 array whose row ``r``
        holds the block's bits LSB-first, with unused tail bits zeroed, so two
        rows are equal exactly when the blocks are equal.
        """
        starts = np.asarray(starts, dtype=np.int64)
        if m < 1:
            raise DomainError(f"block length must be >= 1, got {m}")
        if starts.size == 0:
            return np.zeros((0, (m + 63) // 64), dtype=_U64)
        self.extend_to(int(starts.max()) + m)
        n_out = (m + 63) // 64
        # each block spans at most n_out + 1 consecutive words
        windows = sliding_window_view(self._words, n_out + 1)
        raw = windows[starts >> 6]
        shift = (starts & 63).astype(_U64)[:, None]
        out = raw[:, :-1] >> shift
        # two-step left shift keeps every shift amount below 64
        hi = raw[:, 1:]
        np.left_shift(hi, _U64(1), out=hi)
        np.left_shift(hi, _U64(63) - shift, out=hi)
        out |= hi
        out[:, -1] &= _tail_mask(m)
        return out


def extend_to(buf: TmBuffer, n: int) -> TmBuffer:
    return buf.extend_to(n)


def segment_bits(buf: TmBuffer, seg: Segment) -> Bits:
    return buf.segment_bits(seg)
