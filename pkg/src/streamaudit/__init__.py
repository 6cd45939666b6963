"""streamaudit: audit how faithfully a sampled stream represents a reference."""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    CoverageReport,
    SchemaConfig,
    TweetRecord,
    coverage,
    extract_hashtags,
    ingest,
    ingest_file,
    partition_by_day,
    tokenize,
    write_jsonl,
)
from .rank import RankedList, TauResult, kendall_tau_b, tau_at_depth, tau_curve, top_k_hashtags
from .topics import (
    TopicMatching,
    TopicModel,
    divergence_histogram,
    fit_lda,
    jensen_shannon,
    match_topics,
    top_words,
)
from .baseline import BaselineResult, gaussian_mle, random_subsample, run_baseline, z_score
from .network import (
    RetweetGraph,
    build_retweet_graph,
    betweenness,
    centralization,
    clustering_coefficient,
    in_degree,
    largest_component,
    network_report,
    potential_reach,
    top_k_overlap,
)
from .geo import RegionSet, assign_region, exclude_bbox, filter_geotagged, geo_report
from .synth import (
    BiasedPolicy,
    StreamConfig,
    UniformPolicy,
    WindowCapPolicy,
    apply_policy,
    demo_stream_config,
    generate_stream,
)

__all__ = [name for name in dir() if not name.startswith("_")]
