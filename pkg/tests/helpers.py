"""Small builders shared across test modules."""

from __future__ import annotations

from streamaudit.corpus import Corpus, TweetRecord

BASE_TS = 1_323_820_800  # 2011-12-14T00:00:00Z


def record(
    i: int,
    ts: int = BASE_TS,
    author: str = "u1",
    text: str = "",
    rts: str | None = None,
    geo: tuple[float, float] | None = None,
) -> TweetRecord:
    return TweetRecord(
        id=f"id{i:06d}", timestamp=ts, author_id=author, text=text,
        retweet_source_id=rts, geo=geo,
    )


def corpus_of(records, label: str = "test") -> Corpus:
    return Corpus.from_records(records, label=label)


def corpus_of_texts(texts, label: str = "test") -> Corpus:
    return corpus_of(
        [record(i, ts=BASE_TS + i, text=t) for i, t in enumerate(texts)], label=label
    )
