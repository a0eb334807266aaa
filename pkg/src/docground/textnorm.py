"""Text normalization and the fuzzy similarity primitives.

Similarity is ``sim(a, b) = 1 - levenshtein(a, b) / max(|a|, |b|)`` over
Unicode scalar values. On top of it sit the two components of the fuzzy
score: a character-window partial match (best same-length window of the
longer string) and an order-invariant token-set match.

The window scan is exact: it enumerates every stride-1 window of the
haystack. For speed the edit-distance rows are advanced for all windows
at once with numpy, which yields the same integers as the scalar DP.
"""

from __future__ import annotations

import unicodedata
import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NormText:
    """A string with its normalized form and whitespace tokens."""
    original: str
    normalized: str
    tokens: tuple[str, ...]


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def normalize(s: str) -> NormText:
    """Casefold, NFC-normalize, map punctuation to spaces, collapse whitespace."""
    nfc = unicodedata.normalize("NFC", s)
    folded = unicodedata.normalize("NFC", nfc.casefold())
    spaced = "".join(" " if _is_punct(ch) else ch for ch in folded)
    normalized = " ".join(spaced.split())
    return NormText(original=s, normalized=normalized, tokens=tuple(normalized.split(" ")) if normalized else ())


def _codes(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32)


def _lev_rows(a: np.ndarray, b: np.ndarray) -> int:
    # Row-at-a-time DP; the in-row dependency collapses to a running min:
    # cur[j] = j + min_{k<=j}(t[k] - k) with t = [i, min(prev[1:]+1, prev[:-1]+neq)].
    if a.size > b.size:  # fewer python-level iterations on the shorter string
        a, b = b, a
    n = b.size
    idx = np.arange(n + 1)
    prev = idx.copy()
    cur = np.empty(n + 1, dtype=np.int64)
    for i in range(1, a.size + 1):
        neq = (b != a[i - 1]).astype(np.int64)
        cur[0] = i
        cur[1:] = np.minimum(prev[1:] + 1, prev[:-1] + neq)
        np.minimum.accumulate(cur - idx, out=cur)
        cur += idx
        prev, cur = cur, prev
    return int(prev[n])


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert/delete/substitute) between two strings."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) * len(b) <= 1024:
        prev = list(range(len(b) + 1))
        for i, ca in enumerate(a, 1):
            cur = [i]
            for j, cb in enumerate(b, 1):
                cost = 0 if ca == cb else 1
                cur.append(min(cur[-1] + 1, prev[j] + 1, prev[j - 1] + cost))
            prev = cur
        return prev[-1]
    return _lev_rows(_codes(a), _codes(b))


def sim(a: str, b: str) -> float:
    """Normalized similarity: 1 - edit distance over the longer length; 1.0 for two empties."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _window_distances(needle: np.ndarray, windows: np.ndarray) -> np.ndarray:
    """Edit distance from the needle to every row of a (n_windows, m) matrix."""
    n_windows, m = windows.shape
    idx = np.arange(m + 1)
    prev = np.broadcast_to(idx, (n_windows, m + 1)).copy()
    cur = np.empty_like(prev)
    for i in range(1, needle.size + 1):
        neq = (windows != needle[i - 1]).astype(np.int64)
        cur[:, 0] = i
        cur[:, 1:] = np.minimum(prev[:, 1:] + 1, prev[:, :-1] + neq)
        np.minimum.accumulate(cur - idx, axis=1, out=cur)
        cur += idx
        prev, cur = cur, prev
    return prev[:, m]


def partial_ratio(needle: str, hay: str) -> float:
    """Best similarity of the needle against any same-length window of the hay.

    Windows slide by one character and the full hay also counts as a
    window; when the needle is longer than the hay the two strings are
    compared directly. An empty needle scores 1.0 by convention (and
    warns), so callers that must reject empty queries do so themselves.
    """
    if not needle:
        warnings.warn("partial_ratio called with an empty needle; returning 1.0", stacklevel=2)
        return 1.0
    if len(needle) > len(hay):
        return sim(needle, hay)
    if needle in hay:
        return 1.0
    m = len(needle)
    ncodes = _codes(needle)
    hcodes = _codes(hay)
    windows = np.lib.stride_tricks.sliding_window_view(hcodes, m)
    dists = _window_distances(ncodes, windows)
    best = 1.0 - int(dists.min()) / m
    whole = sim(needle, hay)
    return max(best, whole)


def _contained_sim(inner: str, outer: str) -> float:
    # inner is the sorted join of a token subset of outer's tokens, hence a
    # subsequence of outer; the edit distance is then exactly the length
    # difference, so the full DP can be skipped.
    if not outer:
        return 1.0
    return 1.0 - (len(outer) - len(inner)) / len(outer)


def token_set_ratio(a: NormText, b: NormText) -> float:
    """Order-invariant token similarity via the sorted intersection string.

    With token sets S_a and S_b, compares the sorted-joined intersection
    against each sorted-joined set and the sets against each other,
    returning the best of the three similarities. A query whose tokens
    all occur in the other text therefore scores 1.0.
    """
    set_a = set(a.tokens)
    set_b = set(b.tokens)
    join_a = " ".join(sorted(set_a))
    join_b = " ".join(sorted(set_b))
    inter = " ".join(sorted(set_a & set_b))
    best = max(_contained_sim(inter, join_a), _contained_sim(inter, join_b))
    # sim(x, y) <= 1 - |len(x)-len(y)| / max(len): skip the DP when the
    # whole-set comparison cannot beat the intersection-based scores.
    longest = max(len(join_a), len(join_b))
    if longest == 0:
        return 1.0
    if 1.0 - abs(len(join_a) - len(join_b)) / longest > best:
        best = max(best, sim(join_a, join_b))
    return best


def fuzzy_score(answer: NormText, region_text: NormText) -> float:
    """Character-window and token-set similarity, whichever is higher."""
    return max(
        partial_ratio(answer.normalized, region_text.normalized),
        token_set_ratio(answer, region_text),
    )
