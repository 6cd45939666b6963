import json

import pytest

from streamaudit.cli import main


STREAM_CONFIG = {
    "days": 3,
    "tweets_per_day": 250,
    "user_count": 60,
    "master_seed": 31,
    "retweet_probability": 0.35,
    "mean_tokens": 6,
    "topics": [
        {
            "weight": 0.5,
            "words": [f"alpha{i:02d}" for i in range(25)],
            "hashtags": [f"atag{i:02d}" for i in range(30)],
        },
        {
            "weight": 0.3,
            "words": [f"bravo{i:02d}" for i in range(25)],
            "hashtags": [f"btag{i:02d}" for i in range(30)],
        },
        {
            "weight": 0.2,
            "words": [f"carol{i:02d}" for i in range(25)],
            "hashtags": [f"ctag{i:02d}" for i in range(30)],
        },
    ],
    "geo_mixture": [
        {"box": [[33.0, 36.0], [37.0, 42.0]], "weight": 0.10},
        {"box": [[45.0, 2.0], [52.0, 20.0]], "weight": 0.05},
        {"box": None, "weight": 0.85},
    ],
}


@pytest.fixture(scope="session")
def cli_pair(tmp_path_factory):
    """A (reference, sample) JSONL pair produced through the synth CLI."""
    base = tmp_path_factory.mktemp("pair")
    config_path = base / "stream_config.json"
    config_path.write_text(json.dumps(STREAM_CONFIG), encoding="utf-8")
    out = base / "synthout"
    status = main([
        "synth", "--config", str(config_path), "--policy", "uniform",
        "--rate", "0.5", "--policy-seed", "19", "--out", str(out),
    ])
    assert status == 0
    return out / "stream.jsonl", out / "sample.jsonl", config_path
