"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package: the word is built by string doubling and
blocks are compared as Python strings.
"""

from __future__ import annotations


def tm_prefix(n: int) -> str:
    """First n letters by the doubling law A_{k+1} = A_k B_k."""
    a = "0"
    while len(a) < n:
        a = a + a.translate(str.maketrans("01", "10"))
    return a[:n]


def naive_blocks(word: str, j: int, k: int, m: int) -> list[str]:
    return [word[j + r * m : j + (r + 1) * m] for r in range(k)]


def naive_is_anti_power(word: str, j: int, k: int, m: int) -> bool:
    blocks = naive_blocks(word, j, k, m)
    return len(set(blocks)) == k


def naive_frak_k(word: str, j: int, m: int) -> int:
    seen = set()
    r = 0
    while True:
        b = word[j + r * m : j + (r + 1) * m]
        if len(b) < m:
            raise ValueError("prefix too short")
        if b in seen:
            return r + 1
        seen.add(b)
        r += 1


def naive_gamma(word: str, j: int, k: int) -> int:
    m = 1
    while not naive_is_anti_power(word, j, k, m):
        m += 1
    return m


def naive_big_gamma(word: str, j: int, k: int):
    if k < 3:
        return None
    for m in range(3 * k - 4, 0, -1):
        if m % 2 and not naive_is_anti_power(word, j, k, m):
            return m
    return None


def naive_yvy(word: str, m: int, prefix_len: int, period: int) -> list[tuple[int, int]]:
    """Double loop over equal length-m factors at a < b with b - a >= m."""
    w = word[:prefix_len]
    out = []
    n = prefix_len - m + 1
    for a in range(n):
        y = w[a : a + m]
        for b in range(a + m, n):
            if w[b : b + m] == y and (b - a) % period:
                out.append((a + 1, b - a))
    return out
