"""Lyndon word generation for the full shift on ell symbols."""
from __future__ import annotations

from collections.abc import Iterator


def lyndon_words(ell: int, n: int) -> Iterator[tuple[int, ...]]:
    """All Lyndon words of length exactly n over {0..ell-1}, lexicographic.

    Classic fixed-length generation (Fredricksen-Kessler-Maiorana scheme):
    amortized constant time per word, no storage of the full list.
    """
    if n < 1:
        return
    a = [0] * (n + 1)  # a[0] is a permanent 0 sentinel

    def gen(t: int, p: int):
        if t > n:
            if p == n:
                yield tuple(a[1:])
        else:
            a[t] = a[t - p]
            yield from gen(t + 1, p)
            for v in range(a[t - p] + 1, ell):
                a[t] = v
                yield from gen(t + 1, t)

    yield from gen(1, 1)


def word_value(word: tuple[int, ...], ell: int) -> int:
    """Integer value of the word read as base-ell digits, first digit most significant."""
    j = 0
    for d in word:
        j = j * ell + d
    return j
