"""Synthetic stream generation with controllable structure, plus samplers.

Streams are drawn from a seeded configuration: Zipf-distributed authors,
a topic mixture driving tokens and hashtags, preferential-attachment
retweets, and a geo mixture of bounding boxes. Sampling policies key
their randomness on record ids, so a policy's output is reproducible per
seed and stable under re-ordering of the input.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .corpus import Corpus, TweetRecord, extract_hashtags, parse_timestamp
from .rng import record_uniform

Point = tuple[float, float]  # (lat, lon)


def _zipf_weights(n: int, exponent: float) -> np.ndarray:
    w = np.arange(1, n + 1, dtype=float) ** -exponent
    return w / w.sum()


@dataclass(frozen=True)
class TopicSpec:
    """One generating topic: its word distribution and hashtag pool."""

    words: tuple[str, ...]
    hashtags: tuple[str, ...]
    weight: float
    word_weights: tuple[float, ...] | None = None  # default: Zipf(1.0) over words
    hashtag_weights: tuple[float, ...] | None = None  # default: Zipf(1.1) over hashtags

    def __post_init__(self) -> None:
        if not self.words:
            raise ValueError("topic needs at least one word")
        if self.weight < 0:
            raise ValueError("topic weight must be nonnegative")
        for name, weights, items in (
            ("word_weights", self.word_weights, self.words),
            ("hashtag_weights", self.hashtag_weights, self.hashtags),
        ):
            if weights is not None and len(weights) != len(items):
                raise ValueError(f"{name} length does not match its item list")

    def word_probs(self) -> np.ndarray:
        if self.word_weights is None:
            return _zipf_weights(len(self.words), 1.0)
        w = np.asarray(self.word_weights, dtype=float)
        return w / w.sum()

    def hashtag_probs(self) -> np.ndarray:
        if self.hashtag_weights is None:
            return _zipf_weights(len(self.hashtags), 1.1)
        w = np.asarray(self.hashtag_weights, dtype=float)
        return w / w.sum()


@dataclass(frozen=True)
class GeoComponent:
    """One geo mixture component: a (sw, ne) box, or None for untagged."""

    box: tuple[Point, Point] | None
    weight: float

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValueError("geo weight must be nonnegative")
        if self.box is not None:
            (s_lat, s_lon), (n_lat, n_lon) = self.box
            if s_lat > n_lat or s_lon > n_lon:
                raise ValueError(f"inverted geo box {self.box}")


@dataclass(frozen=True)
class StreamConfig:
    days: int
    tweets_per_day: int
    user_count: int
    topics: tuple[TopicSpec, ...]
    master_seed: int
    user_zipf_exponent: float = 1.2
    mean_tokens: float = 8.0
    hashtags_per_tweet: int = 1
    retweet_probability: float = 0.1
    preferential_attachment: float = 0.75
    geo_mixture: tuple[GeoComponent, ...] = field(default=())
    start_day: str = "2012-01-01"
    label: str = "synthetic"

    def __post_init__(self) -> None:
        for name in ("days", "tweets_per_day", "user_count"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not self.topics:
            raise ValueError("need at least one topic")
        if abs(sum(t.weight for t in self.topics) - 1.0) > 1e-9:
            raise ValueError("topic weights must sum to 1")
        if self.geo_mixture and abs(sum(g.weight for g in self.geo_mixture) - 1.0) > 1e-9:
            raise ValueError("geo mixture weights must sum to 1")
        if not 0.0 <= self.retweet_probability <= 1.0:
            raise ValueError("retweet_probability must be in [0, 1]")
        if not 0.0 <= self.preferential_attachment <= 1.0:
            raise ValueError("preferential_attachment must be in [0, 1]")
        if self.mean_tokens < 1.0:
            raise ValueError("mean_tokens must be >= 1")
        if self.hashtags_per_tweet < 0:
            raise ValueError("hashtags_per_tweet must be >= 0")


def stream_config_from_mapping(obj: Mapping) -> StreamConfig:
    topics = tuple(
        TopicSpec(
            words=tuple(t["words"]),
            hashtags=tuple(t.get("hashtags", ())),
            weight=float(t["weight"]),
            word_weights=tuple(t["word_weights"]) if t.get("word_weights") else None,
            hashtag_weights=tuple(t["hashtag_weights"]) if t.get("hashtag_weights") else None,
        )
        for t in obj["topics"]
    )
    geo = tuple(
        GeoComponent(
            box=(tuple(g["box"][0]), tuple(g["box"][1])) if g.get("box") else None,
            weight=float(g["weight"]),
        )
        for g in obj.get("geo_mixture", ())
    )
    kwargs = {
        k: obj[k]
        for k in (
            "days", "tweets_per_day", "user_count", "master_seed",
            "user_zipf_exponent", "mean_tokens", "hashtags_per_tweet",
            "retweet_probability", "preferential_attachment", "start_day", "label",
        )
        if k in obj
    }
    return StreamConfig(topics=topics, geo_mixture=geo, **kwargs)


def stream_config_from_file(path: str | Path) -> StreamConfig:
    with open(path, encoding="utf-8") as f:
        return stream_config_from_mapping(json.load(f))


def generate_stream(config: StreamConfig) -> Corpus:
    """Draw a full synthetic stream, deterministic per master seed."""
    rng = np.random.default_rng(config.master_seed)
    n = config.days * config.tweets_per_day
    k_true = len(config.topics)

    user_probs = _zipf_weights(config.user_count, config.user_zipf_exponent)
    authors = rng.choice(config.user_count, size=n, p=user_probs)
    topic_of = (
        rng.choice(k_true, size=n, p=np.array([t.weight for t in config.topics]))
        if k_true > 1 else np.zeros(n, dtype=int)
    )
    lengths = 1 + rng.poisson(config.mean_tokens - 1.0, size=n)

    # Per-topic bulk draws, consumed in record order, keep generation fast
    # while remaining deterministic.
    token_queues: list[list[str]] = []
    tag_queues: list[list[str]] = []
    for k, topic in enumerate(config.topics):
        mask = topic_of == k
        total_tokens = int(lengths[mask].sum())
        drawn = rng.choice(len(topic.words), size=total_tokens, p=topic.word_probs())
        token_queues.append([topic.words[i] for i in drawn])
        n_tags = int(mask.sum()) * config.hashtags_per_tweet
        if topic.hashtags and n_tags:
            drawn_tags = rng.choice(len(topic.hashtags), size=n_tags, p=topic.hashtag_probs())
            tag_queues.append([topic.hashtags[i] for i in drawn_tags])
        else:
            tag_queues.append([])

    is_retweet = rng.random(n) < config.retweet_probability
    n_retweets = int(is_retweet.sum())
    prefer_pool = rng.random(n_retweets) < config.preferential_attachment
    uniform_targets = rng.integers(0, config.user_count, size=n_retweets)
    pool_picks = rng.random(n_retweets)

    if config.geo_mixture:
        geo_component = rng.choice(
            len(config.geo_mixture), size=n, p=np.array([g.weight for g in config.geo_mixture])
        )
        lat_u = rng.random(n)
        lon_u = rng.random(n)

    start_epoch = parse_timestamp(config.start_day + "T00:00:00+00:00")
    token_pos = [0] * k_true
    tag_pos = [0] * k_true
    pool: list[int] = []  # past retweet targets; uniform pick = preferential by in-degree
    retweet_idx = 0
    records = []
    for i in range(n):
        k = int(topic_of[i])
        length = int(lengths[i])
        tokens = token_queues[k][token_pos[k]:token_pos[k] + length]
        token_pos[k] += length
        tags = tag_queues[k][tag_pos[k]:tag_pos[k] + config.hashtags_per_tweet]
        tag_pos[k] += len(tags)

        source = None
        if is_retweet[i]:
            if prefer_pool[retweet_idx] and pool:
                target = pool[int(pool_picks[retweet_idx] * len(pool))]
            else:
                target = int(uniform_targets[retweet_idx])
            pool.append(target)
            source = f"u{target:05d}"
            retweet_idx += 1

        geo = None
        if config.geo_mixture:
            component = config.geo_mixture[int(geo_component[i])]
            if component.box is not None:
                (s_lat, s_lon), (n_lat, n_lon) = component.box
                geo = (
                    s_lat + float(lat_u[i]) * (n_lat - s_lat),
                    s_lon + float(lon_u[i]) * (n_lon - s_lon),
                )

        day, j = divmod(i, config.tweets_per_day)
        records.append(
            TweetRecord(
                id=f"t{i:07d}",
                timestamp=start_epoch + day * 86400 + (86400 * j) // config.tweets_per_day,
                author_id=f"u{int(authors[i]):05d}",
                text=" ".join(tokens + ["#" + t for t in tags]),
                retweet_source_id=source,
                geo=geo,
            )
        )
    return Corpus.from_records(records, label=config.label)


@dataclass(frozen=True)
class UniformPolicy:
    """Keep a uniform random fraction: exactly floor(rate * N) records."""

    rate: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("rate must be in [0, 1]")


@dataclass(frozen=True)
class WindowCapPolicy:
    """Keep at most `cap` records per time window, chosen uniformly."""

    window_seconds: int
    cap: int

    def __post_init__(self) -> None:
        if self.window_seconds <= 0:
            raise ValueError("window_seconds must be > 0")
        if self.cap < 0:
            raise ValueError("cap must be >= 0")


@dataclass(frozen=True)
class BiasedPolicy:
    """Keep each record with the minimum retention over its hashtags."""

    retention: Mapping[str, float]
    default_retention: float = 1.0

    def __post_init__(self) -> None:
        normalized = {}
        for tag, p in self.retention.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"retention for {tag!r} must be in [0, 1]")
            key = tag.casefold()
            normalized[key if key.startswith("#") else "#" + key] = p
        if not 0.0 <= self.default_retention <= 1.0:
            raise ValueError("default_retention must be in [0, 1]")
        object.__setattr__(self, "retention", normalized)


SamplingPolicy = UniformPolicy | WindowCapPolicy | BiasedPolicy


def _keep_smallest(records, seed: int, limit: int) -> set[str]:
    keyed = sorted((record_uniform(seed, r.id), r.id) for r in records)
    return {rid for _, rid in keyed[:limit]}


def apply_policy(corpus: Corpus, policy: SamplingPolicy, seed: int) -> Corpus:
    """Sample a corpus under a policy, deterministically per seed."""
    if isinstance(policy, UniformPolicy):
        target = math.floor(policy.rate * len(corpus))
        kept_ids = _keep_smallest(corpus, seed, target)
        kept = [r for r in corpus if r.id in kept_ids]
    elif isinstance(policy, WindowCapPolicy):
        windows: dict[int, list[TweetRecord]] = {}
        for r in corpus:
            windows.setdefault(r.timestamp // policy.window_seconds, []).append(r)
        kept_ids = set()
        for window_records in windows.values():
            if len(window_records) <= policy.cap:
                kept_ids.update(r.id for r in window_records)
            else:
                kept_ids.update(_keep_smallest(window_records, seed, policy.cap))
        kept = [r for r in corpus if r.id in kept_ids]
    elif isinstance(policy, BiasedPolicy):
        kept = []
        for r in corpus:
            tags = extract_hashtags(r.text)
            if tags:
                p = min(policy.retention.get(t, policy.default_retention) for t in tags)
            else:
                p = policy.default_retention
            if record_uniform(seed, r.id) < p:
                kept.append(r)
    else:
        raise TypeError(f"unknown policy type: {type(policy).__name__}")
    return Corpus(label=corpus.label, records=tuple(kept), tz_offset_hours=corpus.tz_offset_hours)


def demo_stream_config(
    days: int = 10,
    tweets_per_day: int = 5000,
    master_seed: int = 7,
    n_topics: int = 5,
    words_per_topic: int = 60,
    hashtags_per_topic: int = 150,
    user_count: int = 1500,
    retweet_probability: float = 0.25,
    mean_tokens: float = 7.0,
    hashtags_per_tweet: int = 2,
    hashtag_jitter: float = 0.5,
) -> StreamConfig:
    """A ready-made multi-topic configuration for demos and tests.

    Topic k owns its own word and hashtag vocabulary, so fitted topics
    and hashtag ranks have unambiguous ground truth. Hashtag popularity
    is Zipf with lognormal jitter: a clean ladder would leave top ranks
    unrealistically well separated, and rank agreement between samples
    would degenerate to exactly 1.
    """
    from .rng import derive_seed

    weights = _zipf_weights(n_topics, 0.8)
    jitter_rng = np.random.default_rng(derive_seed(master_seed, 0x6A177E2))
    topics = []
    for k in range(n_topics):
        tag_weights = np.arange(1, hashtags_per_topic + 1, dtype=float) ** -1.1
        tag_weights *= np.exp(jitter_rng.normal(0.0, hashtag_jitter, size=hashtags_per_topic))
        topics.append(
            TopicSpec(
                words=tuple(f"topic{k}word{i:03d}" for i in range(words_per_topic)),
                hashtags=tuple(f"tag{k}x{i:03d}" for i in range(hashtags_per_topic)),
                weight=float(weights[k]),
                hashtag_weights=tuple(float(w) for w in tag_weights),
            )
        )
    topics = tuple(topics)
    geo = (
        GeoComponent(box=((32.8, 35.9), (37.3, 42.3)), weight=0.02),   # Asia
        GeoComponent(box=((44.0, 2.0), (52.0, 20.0)), weight=0.01),    # Europe
        GeoComponent(box=((32.0, -110.0), (45.0, -80.0)), weight=0.01),  # N. America
        GeoComponent(box=((-10.0, -35.0), (10.0, -20.0)), weight=0.005),  # open ocean
        GeoComponent(box=None, weight=0.955),
    )
    return StreamConfig(
        days=days,
        tweets_per_day=tweets_per_day,
        user_count=user_count,
        topics=topics,
        master_seed=master_seed,
        retweet_probability=retweet_probability,
        mean_tokens=mean_tokens,
        hashtags_per_tweet=hashtags_per_tweet,
        geo_mixture=geo,
    )
