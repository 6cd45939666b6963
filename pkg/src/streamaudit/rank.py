"""Top-hashtag rankings and Kendall tau-b agreement between two streams.

Tau-b is computed from explicit pair classes: concordant, discordant,
tied in the reference only, tied in the sample only. Pairs tied in both
lists contribute to neither the numerator nor either tie term.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .corpus import Corpus, extract_hashtags


@dataclass(frozen=True)
class RankedList:
    """Tokens with counts, sorted count-descending, ties broken by token."""

    entries: tuple[tuple[str, int], ...]

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], k: int | None = None) -> "RankedList":
        ordered = sorted(counts.items(), key=lambda e: (-e[1], e[0]))
        if k is not None:
            ordered = ordered[:k]
        return cls(entries=tuple(ordered))

    def tokens(self) -> list[str]:
        return [token for token, _ in self.entries]


@dataclass(frozen=True)
class TauResult:
    """Tau-b at one list depth, with its pair-class counts."""

    n: int
    tau_b: float | None
    concordant: int
    discordant: int
    ties_ref_only: int
    ties_sample_only: int
    status: str = "ok"  # "ok" | "undefined"


def hashtag_counts(corpus: Corpus) -> Counter:
    counts: Counter = Counter()
    for record in corpus:
        counts.update(extract_hashtags(record.text))
    return counts


def top_k_hashtags(corpus: Corpus, k: int) -> RankedList:
    """The k most frequent hashtags (count desc, then token asc)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return RankedList.from_counts(hashtag_counts(corpus), k=k)


def _tied_pair_count(values: Sequence) -> int:
    group_sizes = Counter(values)
    return sum(t * (t - 1) // 2 for t in group_sizes.values())


def _count_inversions(values: list[float]) -> int:
    """Pairs (i < j) with values[i] > values[j], by merge sort."""
    if len(values) < 2:
        return 0
    mid = len(values) // 2
    left, right = values[:mid], values[mid:]
    inversions = _count_inversions(left) + _count_inversions(right)
    left.sort()
    right.sort()
    i = 0
    for r in right:
        while i < len(left) and left[i] <= r:
            i += 1
        inversions += len(left) - i
    return inversions


def kendall_tau_b(ranks_ref: Mapping[str, float], ranks_sample: Mapping[str, float]) -> TauResult:
    """Tau-b between two rankings of the same key set.

    A zero denominator (every pair tied in one list) yields an explicit
    "undefined" result rather than 0.
    """
    if set(ranks_ref) != set(ranks_sample):
        raise ValueError("rank maps must share an identical key set")
    n = len(ranks_ref)
    if n < 2:
        raise ValueError("need at least 2 keys to correlate")

    pairs = sorted((ranks_ref[key], ranks_sample[key]) for key in ranks_ref)
    n0 = n * (n - 1) // 2
    ties_ref = _tied_pair_count([a for a, _ in pairs])
    ties_sample = _tied_pair_count([b for _, b in pairs])
    ties_both = _tied_pair_count(pairs)
    discordant = _count_inversions([b for _, b in pairs])
    concordant = n0 - ties_ref - ties_sample + ties_both - discordant

    denom_sq = (n0 - ties_sample) * (n0 - ties_ref)
    if denom_sq == 0:
        return TauResult(n, None, concordant, discordant,
                         ties_ref - ties_both, ties_sample - ties_both, status="undefined")
    tau = (concordant - discordant) / denom_sq**0.5
    return TauResult(n, tau, concordant, discordant,
                     ties_ref - ties_both, ties_sample - ties_both)


def average_ranks(counts: Mapping[str, int], universe: Sequence[str]) -> dict[str, float]:
    """Rank universe tokens by count (1 = highest), averaging within tie groups.

    Tokens with no count share a single rank one past the last real rank.
    """
    present = sorted((t for t in universe if t in counts), key=lambda t: (-counts[t], t))
    ranks: dict[str, float] = {}
    i = 0
    while i < len(present):
        j = i
        while j < len(present) and counts[present[j]] == counts[present[i]]:
            j += 1
        avg = (i + 1 + j) / 2  # mean of positions i+1 .. j
        for t in present[i:j]:
            ranks[t] = avg
        i = j
    trailing = len(present) + 1
    for t in universe:
        if t not in ranks:
            ranks[t] = float(trailing)
    return ranks


def tau_at_depth(sample_counts: Mapping[str, int], ref_counts: Mapping[str, int], n: int) -> TauResult:
    """Tau-b over the union of the two top-n token sets.

    Tokens in the universe but absent from one side's counts enter that
    side as a shared trailing tie, which tau-b's tie terms absorb.
    """
    top_ref = RankedList.from_counts(ref_counts, k=n).tokens()
    top_sample = RankedList.from_counts(sample_counts, k=n).tokens()
    universe = sorted(set(top_ref) | set(top_sample))
    result = kendall_tau_b(average_ranks(ref_counts, universe), average_ranks(sample_counts, universe))
    return replace(result, n=n)


def tau_curve(
    sample: Corpus,
    reference: Corpus,
    n_min: int = 10,
    n_max: int = 1000,
    step: int = 10,
) -> list[TauResult]:
    """Tau-b as a function of list depth n, from n_min to n_max inclusive."""
    if n_min < 2:
        raise ValueError("n_min must be >= 2")
    if step < 1:
        raise ValueError("step must be >= 1")
    if n_max < n_min:
        raise ValueError("n_max must be >= n_min")
    sample_counts = hashtag_counts(sample)
    ref_counts = hashtag_counts(reference)
    return [tau_at_depth(sample_counts, ref_counts, n) for n in range(n_min, n_max + 1, step)]
