"""Top-k ranking and tau-b, checked against pair-enumeration oracles."""

from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamaudit.rank import (
    RankedList,
    average_ranks,
    hashtag_counts,
    kendall_tau_b,
    tau_at_depth,
    tau_curve,
    top_k_hashtags,
)

from helpers import BASE_TS, corpus_of, corpus_of_texts, record
from oracles import tau_b_pair_enumeration


def zipf_tag_corpus(n: int, n_tags: int, seed: int, exponent: float = 1.1):
    """One hashtag per tweet, tags Zipf-distributed over a fixed pool."""
    rng = np.random.default_rng(seed)
    weights = np.arange(1, n_tags + 1, dtype=float) ** -exponent
    weights /= weights.sum()
    picks = rng.choice(n_tags, size=n, p=weights)
    return corpus_of(
        [record(i, ts=BASE_TS + i, text=f"synthetic tweet #tag{picks[i]:04d}") for i in range(n)]
    ), rng


class TestTopK:
    def test_counting(self):
        corpus = corpus_of_texts(["#a one", "#a two", "#a #b", "plain"])
        ranked = top_k_hashtags(corpus, 2)
        assert ranked.entries == (("#a", 3), ("#b", 1))

    def test_tie_breaks_lexicographically(self):
        corpus = corpus_of_texts(["#b #a", "#a #b"])
        assert top_k_hashtags(corpus, 1).entries == (("#a", 2),)

    def test_fewer_tags_than_k(self):
        corpus = corpus_of_texts(["#only"])
        assert top_k_hashtags(corpus, 10).entries == (("#only", 1),)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            top_k_hashtags(corpus_of_texts(["#a"]), 0)

    def test_zipf_corpus_matches_full_count_sort(self):
        corpus, _ = zipf_tag_corpus(5000, 300, seed=11)
        counts = Counter()
        for r in corpus:
            for token in r.text.split():
                if token.startswith("#"):
                    counts[token] += 1
        expected = sorted(counts.items(), key=lambda e: (-e[1], e[0]))[:100]
        assert list(top_k_hashtags(corpus, 100).entries) == expected


class TestKendallTauB:
    def test_identical_is_one(self):
        ranks = {f"k{i}": i for i in range(5)}
        assert kendall_tau_b(ranks, dict(ranks)).tau_b == 1.0

    def test_reversed_is_minus_one(self):
        a = {f"k{i}": i for i in range(5)}
        b = {f"k{i}": -i for i in range(5)}
        assert kendall_tau_b(a, b).tau_b == -1.0

    def test_tied_example_matches_oracle(self):
        a = {"x": 1, "y": 2, "z": 2}
        b = {"x": 1, "y": 2, "z": 3}
        result = kendall_tau_b(a, b)
        tau, c, d, tf, ts = tau_b_pair_enumeration(a, b)
        assert result.tau_b == pytest.approx(tau, abs=1e-15)
        assert (result.concordant, result.discordant) == (c, d)
        assert (result.ties_ref_only, result.ties_sample_only) == (tf, ts)

    def test_key_mismatch_errors(self):
        with pytest.raises(ValueError, match="key set"):
            kendall_tau_b({"a": 1, "b": 2}, {"a": 1, "c": 2})

    def test_fewer_than_two_keys_errors(self):
        with pytest.raises(ValueError):
            kendall_tau_b({"a": 1}, {"a": 1})

    def test_all_tied_is_undefined_not_zero(self):
        a = {"x": 1, "y": 1, "z": 1}
        b = {"x": 1, "y": 2, "z": 3}
        result = kendall_tau_b(a, b)
        assert result.status == "undefined"
        assert result.tau_b is None

    @given(
        st.integers(min_value=2, max_value=200),
        st.integers(min_value=0, max_value=2**31),
        st.integers(min_value=2, max_value=25),
    )
    @settings(max_examples=150, deadline=None)
    def test_matches_pair_enumeration_oracle(self, n, seed, rank_range):
        rng = np.random.default_rng(seed)
        keys = [f"k{i}" for i in range(n)]
        a = {k: int(v) for k, v in zip(keys, rng.integers(1, rank_range + 1, size=n))}
        b = {k: int(v) for k, v in zip(keys, rng.integers(1, rank_range + 1, size=n))}
        result = kendall_tau_b(a, b)
        tau, c, d, tf, ts = tau_b_pair_enumeration(a, b)
        assert (result.concordant, result.discordant) == (c, d)
        assert (result.ties_ref_only, result.ties_sample_only) == (tf, ts)
        if tau is None:
            assert result.status == "undefined"
        else:
            assert result.tau_b == pytest.approx(tau, abs=1e-12)

    @given(st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=60, deadline=None)
    def test_symmetry_and_monotone_invariance(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 60))
        keys = [f"k{i}" for i in range(n)]
        a = {k: int(v) for k, v in zip(keys, rng.integers(1, 10, size=n))}
        b = {k: int(v) for k, v in zip(keys, rng.integers(1, 10, size=n))}
        fwd = kendall_tau_b(a, b)
        rev = kendall_tau_b(b, a)
        assert fwd.tau_b == rev.tau_b
        assert fwd.ties_ref_only == rev.ties_sample_only
        stretched = kendall_tau_b({k: 2.5 * v + 7 for k, v in a.items()},
                                  {k: v**3 for k, v in b.items()})
        if fwd.tau_b is None:
            assert stretched.tau_b is None
        else:
            assert stretched.tau_b == pytest.approx(fwd.tau_b, abs=1e-12)


class TestAverageRanks:
    def test_tie_groups_share_average(self):
        counts = {"a": 5, "b": 3, "c": 3, "d": 2}
        ranks = average_ranks(counts, ["a", "b", "c", "d"])
        assert ranks == {"a": 1.0, "b": 2.5, "c": 2.5, "d": 4.0}

    def test_absent_tokens_share_trailing_rank(self):
        ranks = average_ranks({"a": 5}, ["a", "x", "y"])
        assert ranks == {"a": 1.0, "x": 2.0, "y": 2.0}


class TestTauCurve:
    def test_identity_pair_is_one_everywhere(self):
        corpus, _ = zipf_tag_corpus(2000, 100, seed=3)
        series = tau_curve(corpus, corpus, n_min=10, n_max=100, step=10)
        assert len(series) == 10
        assert all(r.tau_b == pytest.approx(1.0, abs=1e-12) for r in series)

    def test_point_count_formula(self):
        corpus, _ = zipf_tag_corpus(500, 50, seed=5)
        series = tau_curve(corpus, corpus, n_min=10, n_max=95, step=10)
        assert len(series) == (95 - 10) // 10 + 1
        assert [r.n for r in series] == list(range(10, 96, 10))

    def test_uniform_half_sample_regression(self):
        reference, rng = zipf_tag_corpus(50000, 600, seed=123, exponent=1.2)
        keep = rng.random(len(reference)) < 0.5
        sample = corpus_of([r for r, k in zip(reference, keep) if k], label="sample")
        result = tau_at_depth(hashtag_counts(sample), hashtag_counts(reference), 500)
        assert result.tau_b > 0.8
        # seed-locked regression value
        assert result.tau_b == pytest.approx(0.8194322158458197, abs=1e-12)

    def test_adversarial_sampler_scores_below_uniform(self):
        reference, rng = zipf_tag_corpus(20000, 2000, seed=123)
        ref_counts = hashtag_counts(reference)
        top5 = {t for t, _ in RankedList.from_counts(ref_counts, k=5).entries}
        biased = corpus_of(
            [r for r in reference if not (set(r.text.split()) & top5)], label="biased"
        )
        keep = rng.random(len(reference)) < len(biased) / len(reference)
        uniform = corpus_of([r for r, k in zip(reference, keep) if k], label="uniform")
        biased_tau = tau_at_depth(hashtag_counts(biased), ref_counts, 10).tau_b
        uniform_tau = tau_at_depth(hashtag_counts(uniform), ref_counts, 10).tau_b
        assert biased_tau < uniform_tau
