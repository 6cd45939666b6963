"""Command-line entry point: audit a sampled stream against a reference.

Every run writes its artifacts under --out and a run manifest beside the
output directory. All randomness flows from explicit --seed flags, so
identical inputs and seeds produce byte-identical output directories.

Exit status: 0 success, 1 usage error, 2 input/validation error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .artifacts import (
    baseline_json,
    coverage_csv,
    coverage_summary_json,
    dumps_json,
    edge_list_text,
    geo_csv,
    histogram_csv,
    manifest_json,
    manifest_path_for,
    matching_csv,
    model_text,
    network_overlap_csv,
    network_summary_csv,
    node_list_text,
    RunManifest,
    sha256_file,
    tau_curve_csv,
    topics_summary_json,
)
from .baseline import run_baseline, run_baseline_per_day
from .corpus import Corpus, SchemaConfig, coverage, ingest_file, record_to_object
from .geo import default_regions, geo_report, load_regions_file
from .network import build_retweet_graph, network_report
from .rank import tau_curve
from .synth import (
    BiasedPolicy,
    UniformPolicy,
    WindowCapPolicy,
    apply_policy,
    generate_stream,
    stream_config_from_file,
)
from .topics import divergence_histogram, fit_lda, match_topics

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we map usage errors to 1
        raise UsageError(message)


def _load_schema(path: str | None) -> SchemaConfig | None:
    return SchemaConfig.from_file(path) if path else None


def _load_corpus(path: str, schema_path: str | None, label: str, tz_offset: float) -> Corpus:
    result = ingest_file(path, schema=_load_schema(schema_path), label=label, tz_offset_hours=tz_offset)
    if result.errors:
        print(f"warning: {len(result.errors)} malformed record(s) in {path}", file=sys.stderr)
    return result.corpus


def _load_stopwords(path: str | None) -> frozenset[str]:
    if not path:
        return frozenset()
    with open(path, encoding="utf-8") as f:
        return frozenset(w.strip().casefold() for w in f if w.strip())


def _parse_bbox(text: str) -> tuple[tuple[float, float], tuple[float, float]]:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 4:
        raise UsageError("--exclude-bbox needs 'sw_lat,sw_lon,ne_lat,ne_lon'")
    return (parts[0], parts[1]), (parts[2], parts[3])


def _write_outputs(
    args,
    outputs: dict[str, str],
    seeds: dict[str, int],
    input_paths: list[str],
    config_paths: list[str],
    started: float,
) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    digests: dict[str, str] = {}
    for rel in sorted(outputs):
        path = out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(outputs[rel], encoding="utf-8")
        digests[rel] = sha256_file(path)
    manifest = RunManifest(
        command=list(sys.argv[1:]) if args.argv is None else list(args.argv),
        config_paths=sorted(config_paths),
        seeds=seeds,
        input_digests={p: sha256_file(p) for p in sorted(set(input_paths + config_paths))},
        output_paths=sorted(outputs),
        output_digests=digests,
        tool_version=__version__,
        duration_seconds=time.monotonic() - started,
    )
    manifest_path_for(out).write_text(manifest_json(manifest), encoding="utf-8")


# -- subcommand handlers ------------------------------------------------------

def cmd_ingest(args) -> dict[str, str]:
    result = ingest_file(args.input, schema=_load_schema(args.schema),
                         label=args.label, tz_offset_hours=args.tz_offset)
    lines = "".join(
        json.dumps(record_to_object(r), sort_keys=True, ensure_ascii=False) + "\n"
        for r in result.corpus
    )
    report = dumps_json(
        {
            "records": len(result.corpus),
            "malformed_count": result.malformed_count,
            "errors": [{"line_no": e.line_no, "message": e.message} for e in result.errors],
        }
    )
    return {"corpus.jsonl": lines, "ingest_report.json": report}


def cmd_coverage(args) -> dict[str, str]:
    reference = _load_corpus(args.reference, args.schema, "reference", args.tz_offset)
    sample = _load_corpus(args.sample, args.schema, "sample", args.tz_offset)
    report = coverage(sample, reference, args.tz_offset)
    return {"coverage.csv": coverage_csv(report), "coverage_summary.json": coverage_summary_json(report)}


def cmd_hashtags(args) -> dict[str, str]:
    reference = _load_corpus(args.reference, args.schema, "reference", 0.0)
    sample = _load_corpus(args.sample, args.schema, "sample", 0.0)
    series = tau_curve(sample, reference, n_min=args.n_min, n_max=args.n_max, step=args.step)
    return {"tau_curve.csv": tau_curve_csv(series)}


def cmd_topics(args) -> dict[str, str]:
    reference = _load_corpus(args.reference, args.schema, "reference", 0.0)
    sample = _load_corpus(args.sample, args.schema, "sample", 0.0)
    stopwords = _load_stopwords(args.stopwords)
    common = dict(K=args.k, alpha=args.alpha, eta=args.eta,
                  iterations=args.iterations, stopwords=stopwords)
    ref_model = fit_lda(reference, seed=args.seed, **common)
    sample_model = fit_lda(sample, seed=args.seed + 1, **common)
    matching = match_topics(sample_model, ref_model, m=args.top_words)
    hist = divergence_histogram(matching, bin_width=args.bin_width)
    return {
        "reference_model.txt": model_text(ref_model),
        "sample_model.txt": model_text(sample_model),
        "topics_matching.csv": matching_csv(matching),
        "topics_histogram.csv": histogram_csv(hist),
        "topics_summary.json": topics_summary_json(matching, hist),
    }


def cmd_baseline(args) -> dict[str, str]:
    reference = _load_corpus(args.reference, args.schema, "reference", args.tz_offset)
    sample = _load_corpus(args.sample, args.schema, "sample", args.tz_offset)
    params: dict = {}
    if args.statistic == "tau_b_top":
        params["depth"] = args.depth
    else:
        params.update(K=args.k, alpha=args.alpha, eta=args.eta,
                      iterations=args.iterations, top_m=args.top_words,
                      stopwords=_load_stopwords(args.stopwords))
    if args.per_day:
        per_day = run_baseline_per_day(
            reference, sample, args.statistic, repeats=args.repeats,
            master_seed=args.seed, tz_offset_hours=args.tz_offset, **params,
        )
        body = dumps_json({day: json.loads(baseline_json(r)) for day, r in per_day.items()})
        return {"baseline_per_day.json": body}
    result = run_baseline(reference, sample, args.statistic,
                          repeats=args.repeats, master_seed=args.seed, **params)
    return {"baseline.json": baseline_json(result)}


def cmd_network(args) -> dict[str, str]:
    reference = _load_corpus(args.reference, args.schema, "reference", 0.0)
    sample = _load_corpus(args.sample, args.schema, "sample", 0.0)
    comparison = network_report(reference, sample)
    return {
        "network_summary.csv": network_summary_csv(comparison),
        "network_overlap.csv": network_overlap_csv(comparison),
        "reference_edges.tsv": edge_list_text(build_retweet_graph(reference)),
        "reference_nodes.txt": node_list_text(build_retweet_graph(reference)),
        "sample_edges.tsv": edge_list_text(build_retweet_graph(sample)),
        "sample_nodes.txt": node_list_text(build_retweet_graph(sample)),
    }


def cmd_geo(args) -> dict[str, str]:
    reference = _load_corpus(args.reference, args.schema, "reference", 0.0)
    sample = _load_corpus(args.sample, args.schema, "sample", 0.0)
    regions = load_regions_file(args.regions, fallback=args.fallback_name) if args.regions \
        else default_regions(fallback=args.fallback_name)
    exclude = _parse_bbox(args.exclude_bbox) if args.exclude_bbox else None
    report = geo_report(reference, sample, regions, exclude=exclude)
    return {"geo.csv": geo_csv(report)}


def _build_policy(args):
    if args.policy is None:
        return None
    if args.policy == "uniform":
        return UniformPolicy(rate=args.rate)
    if args.policy == "window_cap":
        return WindowCapPolicy(window_seconds=args.window_seconds, cap=args.cap)
    retention = {}
    for item in args.retention or []:
        tag, _, prob = item.partition("=")
        if not prob:
            raise UsageError(f"--retention needs 'tag=prob', got {item!r}")
        retention[tag] = float(prob)
    return BiasedPolicy(retention=retention, default_retention=args.default_retention)


def cmd_synth(args) -> dict[str, str]:
    config = stream_config_from_file(args.config)
    corpus = generate_stream(config)
    outputs = {
        "stream.jsonl": "".join(
            json.dumps(record_to_object(r), sort_keys=True, ensure_ascii=False) + "\n"
            for r in corpus
        )
    }
    policy = _build_policy(args)
    if policy is not None:
        sampled = apply_policy(corpus, policy, seed=args.policy_seed)
        outputs["sample.jsonl"] = "".join(
            json.dumps(record_to_object(r), sort_keys=True, ensure_ascii=False) + "\n"
            for r in sampled
        )
    return outputs


def cmd_report(args) -> dict[str, str]:
    reference = _load_corpus(args.reference, args.schema, "reference", args.tz_offset)
    sample = _load_corpus(args.sample, args.schema, "sample", args.tz_offset)
    stopwords = _load_stopwords(args.stopwords)

    def sec_coverage() -> dict[str, str]:
        report = coverage(sample, reference, args.tz_offset)
        return {"coverage.csv": coverage_csv(report),
                "coverage_summary.json": coverage_summary_json(report)}

    def sec_hashtags() -> dict[str, str]:
        series = tau_curve(sample, reference, n_min=args.n_min, n_max=args.n_max, step=args.step)
        return {"tau_curve.csv": tau_curve_csv(series)}

    def sec_topics() -> dict[str, str]:
        common = dict(K=args.k, alpha=args.alpha, eta=args.eta,
                      iterations=args.iterations, stopwords=stopwords)
        ref_model = fit_lda(reference, seed=args.seed, **common)
        sample_model = fit_lda(sample, seed=args.seed + 1, **common)
        matching = match_topics(sample_model, ref_model, m=args.top_words)
        hist = divergence_histogram(matching, bin_width=args.bin_width)
        return {
            "reference_model.txt": model_text(ref_model),
            "sample_model.txt": model_text(sample_model),
            "topics_matching.csv": matching_csv(matching),
            "topics_histogram.csv": histogram_csv(hist),
            "topics_summary.json": topics_summary_json(matching, hist),
        }

    def sec_network() -> dict[str, str]:
        comparison = network_report(reference, sample)
        return {
            "network_summary.csv": network_summary_csv(comparison),
            "network_overlap.csv": network_overlap_csv(comparison),
            "reference_edges.tsv": edge_list_text(build_retweet_graph(reference)),
            "reference_nodes.txt": node_list_text(build_retweet_graph(reference)),
            "sample_edges.tsv": edge_list_text(build_retweet_graph(sample)),
            "sample_nodes.txt": node_list_text(build_retweet_graph(sample)),
        }

    def sec_geo() -> dict[str, str]:
        regions = load_regions_file(args.regions, fallback=args.fallback_name) if args.regions \
            else default_regions(fallback=args.fallback_name)
        exclude = _parse_bbox(args.exclude_bbox) if args.exclude_bbox else None
        report = geo_report(reference, sample, regions, exclude=exclude)
        return {"geo.csv": geo_csv(report)}

    def sec_baseline() -> dict[str, str]:
        result = run_baseline(reference, sample, "tau_b_top", repeats=args.baseline_repeats,
                              master_seed=args.baseline_seed, depth=args.baseline_depth)
        return {"baseline_tau.json": baseline_json(result)}

    sections = [sec_coverage, sec_hashtags]
    if not args.no_topics:
        sections.append(sec_topics)
    if not args.no_network:
        sections.append(sec_network)
    if not args.no_geo:
        sections.append(sec_geo)
    if not args.no_baseline:
        sections.append(sec_baseline)

    outputs: dict[str, str] = {}
    if args.jobs > 1:
        # sections are pure; collection order is fixed, so results do not
        # depend on worker count
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            for result in pool.map(lambda s: s(), sections):
                outputs.update(result)
    else:
        for section in sections:
            outputs.update(section())
    return outputs


# -- parser -------------------------------------------------------------------

def _add_pair(p: argparse.ArgumentParser) -> None:
    p.add_argument("--reference", required=True, help="reference (firehose) records file")
    p.add_argument("--sample", required=True, help="sampled records file")
    p.add_argument("--schema", help="schema config JSON mapping canonical to source fields")


def _add_topic_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=100, help="topic count (default 100)")
    p.add_argument("--alpha", type=float, default=None, help="doc-topic prior (default 50/K)")
    p.add_argument("--eta", type=float, default=0.01, help="topic-word prior (default 0.01)")
    p.add_argument("--iterations", type=int, default=1000, help="Gibbs sweeps (default 1000)")
    p.add_argument("--top-words", type=int, default=20, help="bag size for topic matching")
    p.add_argument("--bin-width", type=float, default=0.01, help="divergence histogram bin width")
    p.add_argument("--stopwords", help="file with one stopword per line")


def build_parser() -> _Parser:
    parser = _Parser(prog="streamaudit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"streamaudit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalize a records file")
    p.add_argument("--input", required=True)
    p.add_argument("--schema")
    p.add_argument("--label", default="corpus")
    p.add_argument("--tz-offset", type=float, default=0.0)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("coverage", help="per-day sample/reference volume ratios")
    _add_pair(p)
    p.add_argument("--tz-offset", type=float, default=0.0)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("hashtags", help="tau-b of top hashtags vs list depth")
    _add_pair(p)
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--step", type=int, default=10)
    p.set_defaults(func=cmd_hashtags)

    p = sub.add_parser("topics", help="fit, match and score topics across the pair")
    _add_pair(p)
    _add_topic_params(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("baseline", help="z-score a statistic against random subsamples")
    _add_pair(p)
    p.add_argument("--statistic", required=True, choices=["tau_b_top", "mean_matched_js"])
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=10, help="list depth for tau_b_top")
    p.add_argument("--per-day", action="store_true", help="run per day partition")
    p.add_argument("--tz-offset", type=float, default=0.0)
    _add_topic_params(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("network", help="retweet-network summaries and key-player overlap")
    _add_pair(p)
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("geo", help="continent distribution of geotagged records")
    _add_pair(p)
    p.add_argument("--regions", help="region polygons file (default: shipped continents)")
    p.add_argument("--fallback-name", default="Mid-Ocean")
    p.add_argument("--exclude-bbox", help="'sw_lat,sw_lon,ne_lat,ne_lon' box to exclude")
    p.set_defaults(func=cmd_geo)

    p = sub.add_parser("synth", help="generate a synthetic stream (and optional sample)")
    p.add_argument("--config", required=True, help="stream config JSON")
    p.add_argument("--policy", choices=["uniform", "window_cap", "biased"])
    p.add_argument("--rate", type=float, default=0.5)
    p.add_argument("--window-seconds", type=int, default=60)
    p.add_argument("--cap", type=int, default=100)
    p.add_argument("--retention", action="append", metavar="TAG=PROB")
    p.add_argument("--default-retention", type=float, default=1.0)
    p.add_argument("--policy-seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="full audit: coverage, ranks, topics, network, geo")
    _add_pair(p)
    p.add_argument("--tz-offset", type=float, default=0.0)
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--step", type=int, default=10)
    _add_topic_params(p)
    p.add_argument("--seed", type=int, default=0, help="topics seed")
    p.add_argument("--regions")
    p.add_argument("--fallback-name", default="Mid-Ocean")
    p.add_argument("--exclude-bbox")
    p.add_argument("--baseline-repeats", type=int, default=20)
    p.add_argument("--baseline-depth", type=int, default=10)
    p.add_argument("--baseline-seed", type=int, default=0)
    p.add_argument("--no-topics", action="store_true")
    p.add_argument("--no-network", action="store_true")
    p.add_argument("--no-geo", action="store_true")
    p.add_argument("--no-baseline", action="store_true")
    p.add_argument("--jobs", type=int, default=1, help="worker parallelism bound")
    p.set_defaults(func=cmd_report)

    for sp in sub.choices.values():
        sp.add_argument("--out", required=True, help="output directory")
    return parser


def _seeds_of(args) -> dict[str, int]:
    seeds = {}
    for name in ("seed", "policy_seed", "baseline_seed"):
        if getattr(args, name, None) is not None:
            seeds[name] = getattr(args, name)
    return seeds


def _inputs_of(args) -> tuple[list[str], list[str]]:
    inputs = [p for p in (getattr(args, "reference", None), getattr(args, "sample", None),
                          getattr(args, "input", None)) if p]
    configs = [p for p in (getattr(args, "schema", None), getattr(args, "regions", None),
                           getattr(args, "config", None), getattr(args, "stopwords", None)) if p]
    return inputs, configs


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.argv = argv
        started = time.monotonic()
        outputs = args.func(args)
        inputs, configs = _inputs_of(args)
        _write_outputs(args, outputs, _seeds_of(args), inputs, configs, started)
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit:
        raise
    except Exception as exc:  # invariant violation: report and exit 3
        print(f"internal error: {exc}", file=sys.stderr)
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
