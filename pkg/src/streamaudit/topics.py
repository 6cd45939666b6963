"""Topic fitting, cross-corpus topic alignment, and divergence scoring.

Topics are fit per corpus by collapsed Gibbs sampling (each tweet is one
document), aligned across corpora by maximum-weight bipartite matching on
Jaccard similarity of top-word bags, and scored with base-2 Jensen-Shannon
divergence so that disjoint topics score exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit
from scipy.optimize import linear_sum_assignment

from .corpus import Corpus, tokenize


@njit(cache=True)
def _next_uniform(state):
    # splitmix64: wrapping uint64 arithmetic, identical across runs
    state = state + np.uint64(0x9E3779B97F4A7C15)
    x = state
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    x = x ^ (x >> np.uint64(31))
    return state, (x >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _gibbs_sweeps(doc_ids, word_ids, K, V, D, alpha, eta, iterations, seed):
    T = doc_ids.shape[0]
    z = np.empty(T, np.int32)
    n_kw = np.zeros((K, V), np.int64)
    n_k = np.zeros(K, np.int64)
    n_dk = np.zeros((D, K), np.int64)
    cum = np.empty(K, np.float64)
    state = seed

    for t in range(T):
        state, u = _next_uniform(state)
        k = int(u * K)
        if k >= K:
            k = K - 1
        z[t] = k
        n_kw[k, word_ids[t]] += 1
        n_k[k] += 1
        n_dk[doc_ids[t], k] += 1

    veta = V * eta
    for _ in range(iterations):
        for t in range(T):
            d = doc_ids[t]
            w = word_ids[t]
            k = z[t]
            n_kw[k, w] -= 1
            n_k[k] -= 1
            n_dk[d, k] -= 1
            total = 0.0
            for kk in range(K):
                total += (n_kw[kk, w] + eta) / (n_k[kk] + veta) * (n_dk[d, kk] + alpha)
                cum[kk] = total
            state, u = _next_uniform(state)
            target = u * total
            k = 0
            while k < K - 1 and cum[k] < target:
                k += 1
            z[t] = k
            n_kw[k, w] += 1
            n_k[k] += 1
            n_dk[d, k] += 1
    return n_kw, n_k


@dataclass(frozen=True, eq=False)
class TopicModel:
    """K word distributions (rows of phi) over an ordered vocabulary."""

    vocabulary: tuple[str, ...]
    phi: np.ndarray  # shape (K, V), rows sum to 1
    K: int
    alpha: float
    eta: float
    seed: int
    iterations: int


def fit_lda_docs(
    docs: Sequence[Sequence[str]],
    K: int,
    alpha: float | None = None,
    eta: float = 0.01,
    iterations: int = 1000,
    seed: int = 0,
) -> TopicModel:
    """Fit topics to pre-tokenized documents.

    Deterministic for fixed (document order, K, alpha, eta, iterations,
    seed): two identical calls return bitwise-identical phi.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if alpha is None:
        alpha = 50.0 / K
    nonempty = [doc for doc in docs if doc]
    if len(nonempty) < K:
        raise ValueError(f"need at least K={K} nonempty documents, got {len(nonempty)}")

    vocabulary = tuple(sorted({w for doc in nonempty for w in doc}))
    word_index = {w: i for i, w in enumerate(vocabulary)}
    doc_ids = np.empty(sum(len(d) for d in nonempty), dtype=np.int32)
    word_ids = np.empty(doc_ids.shape[0], dtype=np.int32)
    t = 0
    for d, doc in enumerate(nonempty):
        for w in doc:
            doc_ids[t] = d
            word_ids[t] = word_index[w]
            t += 1

    n_kw, n_k = _gibbs_sweeps(
        doc_ids, word_ids, np.int64(K), np.int64(len(vocabulary)), np.int64(len(nonempty)),
        np.float64(alpha), np.float64(eta), np.int64(iterations), np.uint64(seed),
    )
    phi = (n_kw + eta) / (n_k + len(vocabulary) * eta)[:, None]
    return TopicModel(
        vocabulary=vocabulary, phi=phi, K=K,
        alpha=alpha, eta=eta, seed=seed, iterations=iterations,
    )


def fit_lda(
    corpus: Corpus,
    K: int = 100,
    alpha: float | None = None,
    eta: float = 0.01,
    iterations: int = 1000,
    seed: int = 0,
    stopwords: frozenset[str] = frozenset(),
) -> TopicModel:
    """Fit topics to a corpus, treating each tweet as one document."""
    docs = [tokenize(record.text, stopwords) for record in corpus]
    return fit_lda_docs(docs, K=K, alpha=alpha, eta=eta, iterations=iterations, seed=seed)


def top_words(model: TopicModel, topic: int, m: int) -> set[str]:
    """The m highest-probability words of a topic, ties broken lexicographically."""
    if not 0 <= topic < model.K:
        raise ValueError(f"topic {topic} out of range [0, {model.K})")
    if m < 1:
        raise ValueError("m must be >= 1")
    row = model.phi[topic]
    order = sorted(range(len(model.vocabulary)), key=lambda i: (-row[i], model.vocabulary[i]))
    return {model.vocabulary[i] for i in order[:m]}


def jaccard(a: set, b: set) -> float:
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def jensen_shannon(p: np.ndarray, q: np.ndarray) -> float:
    """Base-2 Jensen-Shannon divergence of two aligned distributions.

    Result lies in [0, 1]; 1 is reached exactly for disjoint supports.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions must be aligned to the same support")
    for name, vec in (("p", p), ("q", q)):
        if (vec < 0).any():
            raise ValueError(f"{name} has negative entries")
        if abs(vec.sum() - 1.0) > 1e-9:
            raise ValueError(f"{name} does not sum to 1 (got {vec.sum()!r})")
    m = 0.5 * (p + q)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl_p = np.where(p > 0, p * np.log2(np.where(p > 0, p / m, 1.0)), 0.0).sum()
        kl_q = np.where(q > 0, q * np.log2(np.where(q > 0, q / m, 1.0)), 0.0).sum()
    js = 0.5 * (kl_p + kl_q)
    return min(max(float(js), 0.0), 1.0)


def align_distributions(
    vocab_p: Sequence[str], p: np.ndarray, vocab_q: Sequence[str], q: np.ndarray
) -> tuple[tuple[str, ...], np.ndarray, np.ndarray]:
    """Embed two distributions into their union vocabulary, zero-filling."""
    union = tuple(sorted(set(vocab_p) | set(vocab_q)))
    index = {w: i for i, w in enumerate(union)}
    p_out = np.zeros(len(union))
    q_out = np.zeros(len(union))
    for w, value in zip(vocab_p, p):
        p_out[index[w]] = value
    for w, value in zip(vocab_q, q):
        q_out[index[w]] = value
    return union, p_out, q_out


def max_weight_assignment(weights: np.ndarray) -> list[tuple[int, int]]:
    """Pairs (row, col) maximizing total weight, covering the smaller side."""
    rows, cols = linear_sum_assignment(weights, maximize=True)
    return sorted(zip((int(i) for i in rows), (int(j) for j in cols)))


@dataclass(frozen=True)
class MatchedPair:
    sample_topic: int
    reference_topic: int
    jaccard: float
    js: float


@dataclass(frozen=True)
class TopicMatching:
    """A maximum-weight pairing of sample topics to reference topics."""

    pairs: tuple[MatchedPair, ...]
    mean_js: float
    std_js: float
    top_m: int


def match_topics(sample_model: TopicModel, reference_model: TopicModel, m: int = 20) -> TopicMatching:
    """Match topics across models by Jaccard of top-m bags, score with JS.

    The matching maximizes total Jaccard weight over min(K_s, K_r) pairs;
    each matched pair carries the JS divergence of its aligned word
    distributions.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    bags_s = [top_words(sample_model, i, m) for i in range(sample_model.K)]
    bags_r = [top_words(reference_model, j, m) for j in range(reference_model.K)]
    weights = np.array([[jaccard(bs, br) for br in bags_r] for bs in bags_s])

    pairs = []
    js_values = []
    for i, j in max_weight_assignment(weights):
        _, p, q = align_distributions(
            sample_model.vocabulary, sample_model.phi[i],
            reference_model.vocabulary, reference_model.phi[j],
        )
        js = jensen_shannon(p, q)
        pairs.append(MatchedPair(int(i), int(j), float(weights[i, j]), js))
        js_values.append(js)
    arr = np.array(js_values)
    return TopicMatching(
        pairs=tuple(pairs),
        mean_js=float(arr.mean()),
        std_js=float(arr.std()),
        top_m=m,
    )


@dataclass(frozen=True)
class DivergenceHistogram:
    """Counts of matched-pair divergences in half-open bins [edge, edge+width)."""

    bins: tuple[tuple[float, int], ...]
    bin_width: float
    mean: float
    std: float
    max_js: float
    note: str | None = None


def _bin_index(value: float, width: float) -> int:
    idx = int(math.floor(value / width))
    # repair float wobble so that edge_idx <= value < edge_(idx+1)
    if (idx + 1) * width <= value:
        idx += 1
    elif idx * width > value:
        idx -= 1
    return max(idx, 0)


def divergence_histogram(matching: TopicMatching, bin_width: float = 0.01) -> DivergenceHistogram:
    """Histogram of matched-pair JS values, with mean and population std."""
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    if not matching.pairs:
        raise ValueError("matching is empty")
    values = [pair.js for pair in matching.pairs]
    top = _bin_index(max(values), bin_width)
    counts = [0] * (top + 1)
    for v in values:
        counts[_bin_index(v, bin_width)] += 1
    arr = np.array(values)
    max_js = float(arr.max())
    note = None
    if max_js > 0.15:
        note = f"max divergence {max_js:.4f} exceeds 0.15"
    return DivergenceHistogram(
        bins=tuple((i * bin_width, c) for i, c in enumerate(counts)),
        bin_width=bin_width,
        mean=float(arr.mean()),
        std=float(arr.std()),
        max_js=max_js,
        note=note,
    )
