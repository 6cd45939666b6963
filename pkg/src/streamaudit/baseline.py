"""Monte Carlo baselining of a sample statistic against random subsamples.

The observed sample's statistic S is compared with the same statistic on
`repeats` uniform random subsamples of the reference (each the size of the
sample), via a Gaussian maximum-likelihood fit of the subsample values and
a z-score. |z| > 3 flags the sample as inconsistent with random sampling.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .corpus import Corpus, extract_hashtags, tokenize
from .rank import hashtag_counts, tau_at_depth
from .rng import derive_seed, mix64
from .topics import fit_lda_docs, match_topics

StatisticFn = Callable[[Corpus, int], float]  # (corpus, seed) -> statistic value


def random_subsample(reference: Corpus, size: int, seed: int) -> Corpus:
    """A uniform random size-subset without replacement, in timestamp order."""
    if size <= 0:
        raise ValueError("subsample size must be positive")
    if size > len(reference):
        raise ValueError(f"subsample size {size} exceeds corpus size {len(reference)}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(len(reference), size=size, replace=False))
    records = tuple(reference.records[i] for i in idx)
    return Corpus(label=reference.label, records=records, tz_offset_hours=reference.tz_offset_hours)


def gaussian_mle(xs) -> tuple[float, float]:
    """Mean and population (1/R) standard deviation of the values."""
    arr = np.asarray(xs, dtype=float)
    if arr.size < 2:
        raise ValueError("need at least 2 values for a Gaussian fit")
    return float(arr.mean()), float(arr.std(ddof=0))


def z_score(S: float, mu_hat: float, sigma_hat: float) -> float | None:
    """(S - mu) / sigma, or None when sigma is zero (undefined)."""
    if sigma_hat < 0:
        raise ValueError("sigma_hat must be >= 0")
    if sigma_hat == 0:
        return None
    return (S - mu_hat) / sigma_hat


def _tau_b_top_statistic(reference: Corpus, master_seed: int, depth: int = 10) -> StatisticFn:
    ref_counts = hashtag_counts(reference)
    tags_by_id = {r.id: extract_hashtags(r.text) for r in reference}

    def evaluate(corpus: Corpus, seed: int) -> float:
        counts: Counter = Counter()
        for record in corpus:
            tags = tags_by_id.get(record.id)
            counts.update(tags if tags is not None else extract_hashtags(record.text))
        result = tau_at_depth(counts, ref_counts, depth)
        if result.tau_b is None:
            raise ValueError(f"tau_b undefined at depth {depth} for corpus {corpus.label!r}")
        return result.tau_b

    return evaluate


def _mean_matched_js_statistic(
    reference: Corpus,
    master_seed: int,
    K: int = 100,
    alpha: float | None = None,
    eta: float = 0.01,
    iterations: int = 1000,
    top_m: int = 20,
    stopwords: frozenset[str] = frozenset(),
) -> StatisticFn:
    docs_by_id = {r.id: tokenize(r.text, stopwords) for r in reference}
    ref_model = fit_lda_docs(
        [docs_by_id[r.id] for r in reference],
        K=K, alpha=alpha, eta=eta, iterations=iterations,
        seed=derive_seed(master_seed, 0x5245464D),
    )

    def evaluate(corpus: Corpus, seed: int) -> float:
        docs = [
            docs_by_id[r.id] if r.id in docs_by_id else tokenize(r.text, stopwords)
            for r in corpus
        ]
        model = fit_lda_docs(docs, K=K, alpha=alpha, eta=eta, iterations=iterations, seed=seed)
        return match_topics(model, ref_model, m=top_m).mean_js

    return evaluate


STATISTICS: dict[str, Callable[..., StatisticFn]] = {
    "tau_b_top": _tau_b_top_statistic,
    "mean_matched_js": _mean_matched_js_statistic,
}


def make_statistic(name: str, reference: Corpus, master_seed: int, **params) -> StatisticFn:
    """Prepare a registered statistic for repeated evaluation against a reference."""
    try:
        factory = STATISTICS[name]
    except KeyError:
        raise ValueError(f"unknown statistic {name!r}; registered: {sorted(STATISTICS)}") from None
    return factory(reference, master_seed, **params)


@dataclass(frozen=True)
class BaselineResult:
    """Observed statistic vs the Monte Carlo distribution of random subsamples."""

    statistic: str
    S: float
    xs: tuple[float, ...]
    mu_hat: float
    sigma_hat: float
    z: float | None
    repeats: int
    master_seed: int
    seeds: tuple[int, ...]
    exceeds_3sigma: bool
    status: str = "ok"  # "ok" | "undefined"


def run_baseline(
    reference: Corpus,
    sample: Corpus,
    statistic: str,
    repeats: int = 100,
    master_seed: int = 0,
    **params,
) -> BaselineResult:
    """Draw `repeats` random subsamples the size of the sample and z-score S.

    Repeat i draws its subsample with seed_i = mix64(master_seed XOR i);
    a statistic's internal randomness uses one further mix of that seed.
    The observed sample is evaluated as if it were repeat index `repeats`.
    The statistic is evaluated exactly repeats + 1 times.
    """
    if repeats < 2:
        raise ValueError("repeats must be >= 2")
    if len(sample) == 0:
        raise ValueError("sample corpus is empty")
    if len(sample) > len(reference):
        raise ValueError(f"sample size {len(sample)} exceeds reference size {len(reference)}")
    evaluate = make_statistic(statistic, reference, master_seed, **params)

    xs: list[float] = []
    seeds: list[int] = []
    for i in range(repeats):
        seed_i = derive_seed(master_seed, i)
        seeds.append(seed_i)
        subsample = random_subsample(reference, len(sample), seed_i)
        xs.append(evaluate(subsample, mix64(seed_i)))
    S = evaluate(sample, mix64(derive_seed(master_seed, repeats)))

    mu_hat, sigma_hat = gaussian_mle(xs)
    z = z_score(S, mu_hat, sigma_hat)
    return BaselineResult(
        statistic=statistic,
        S=S,
        xs=tuple(xs),
        mu_hat=mu_hat,
        sigma_hat=sigma_hat,
        z=z,
        repeats=repeats,
        master_seed=master_seed,
        seeds=tuple(seeds),
        exceeds_3sigma=z is not None and abs(z) > 3,
        status="ok" if z is not None else "undefined",
    )


def run_baseline_per_day(
    reference: Corpus,
    sample: Corpus,
    statistic: str,
    repeats: int = 100,
    master_seed: int = 0,
    tz_offset_hours: float = 0.0,
    **params,
) -> dict[str, BaselineResult]:
    """Run the baseline protocol independently on each shared day.

    Each day's subsamples match that day's sample size, mirroring per-day
    size matching; days missing from either corpus are skipped.
    """
    from .corpus import partition_by_day

    ref_days = partition_by_day(reference, tz_offset_hours)
    sample_days = partition_by_day(sample, tz_offset_hours)
    results: dict[str, BaselineResult] = {}
    for day_index, day in enumerate(sorted(set(ref_days) & set(sample_days))):
        results[day] = run_baseline(
            ref_days[day], sample_days[day], statistic,
            repeats=repeats, master_seed=derive_seed(master_seed, day_index), **params,
        )
    return results
