"""Suffix array, LCP array and the longest repeated substring."""

from typing import List, Sequence, Tuple

import numpy as np


def suffix_array(seq: Sequence) -> List[int]:
    """Suffix order by prefix doubling over cyclic shifts with a unique sentinel."""
    if not len(seq):
        return []
    vocab = sorted(set(seq))
    ch2idx = {ch: i for i, ch in enumerate(vocab)}
    cls = np.array([ch2idx[t] + 1 for t in seq] + [0], dtype=np.int64)
    size = len(cls)

    n = 1
    while True:
        cls1 = np.roll(cls, -n)
        inds = np.lexsort((cls1, cls))
        changed = np.logical_or(np.diff(cls[inds]), np.diff(cls1[inds]))
        cls = np.empty_like(cls)
        cls[inds[0]] = 0
        cls[inds[1:]] = np.cumsum(changed)
        if cls[inds[-1]] == size - 1 or n >= size:
            break
        n *= 2
    # the sentinel sorts first
    return np.argsort(cls, kind="stable")[1:].tolist()


def lcp_array(seq: Sequence, sa: List[int]) -> Tuple[List[int], List[int]]:
    """Rank array and LCP array; lcp[i] is shared by suffixes sa[i-1] and sa[i]."""
    n = len(sa)
    rank = [0] * n
    for i, start in enumerate(sa):
        rank[start] = i
    lcp = [0] * n
    k = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            k = 0
            continue
        j = sa[r - 1]
        while i + k < n and j + k < n and seq[i + k] == seq[j + k]:
            k += 1
        lcp[r] = k
        if k > 0:
            k -= 1
    return rank, lcp


def longest_repeat(text: Sequence) -> int:
    """Length of the longest substring occurring at least twice (overlaps allowed)."""
    if len(text) < 2:
        return 0
    sa = suffix_array(text)
    _, lcp = lcp_array(text, sa)
    return max(lcp)
