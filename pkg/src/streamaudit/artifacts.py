"""Readers and writers for the tool's file artifacts.

All writers are byte-deterministic: sorted JSON keys, repr-formatted
floats, newline line endings. Every CSV has a header row and a matching
reader, so outputs round-trip through the tool's own parsers.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baseline import BaselineResult
from .corpus import CoverageReport, DayCoverage
from .geo import GeoReport, GeoRegionRow
from .network import NetworkComparison, RetweetGraph
from .rank import TauResult
from .topics import DivergenceHistogram, MatchedPair, TopicMatching, TopicModel


def fmt(value) -> str:
    """Deterministic cell formatting: repr for floats, str otherwise."""
    if isinstance(value, float):
        return repr(float(value))  # plain float repr even for numpy scalars
    return str(value)


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dumps_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    return buf.getvalue()


def parse_csv(text: str) -> tuple[list[str], list[list[str]]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("CSV has no header row")
    return rows[0], rows[1:]


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# -- coverage ---------------------------------------------------------------

COVERAGE_HEADER = ["day", "reference_count", "sample_count", "ratio"]


def coverage_csv(report: CoverageReport) -> str:
    rows = [[d.day, d.reference_count, d.sample_count, d.ratio] for d in report.days]
    return dumps_csv(COVERAGE_HEADER, rows)


def read_coverage_csv(text: str) -> list[DayCoverage]:
    header, rows = parse_csv(text)
    if header != COVERAGE_HEADER:
        raise ValueError(f"unexpected coverage header: {header}")
    return [DayCoverage(day, int(rc), int(sc), float(ratio)) for day, rc, sc, ratio in rows]


def coverage_summary_json(report: CoverageReport) -> str:
    lo, q1, median, q3, hi = report.summary
    return dumps_json(
        {
            "overall_ratio": report.overall_ratio,
            "days": len(report.days),
            "five_number_summary": {"min": lo, "q1": q1, "median": median, "q3": q3, "max": hi},
            "skipped_days": list(report.skipped_days),
        }
    )


# -- rank -------------------------------------------------------------------

TAU_HEADER = ["n", "tau_b", "concordant", "discordant", "ties_ref", "ties_sample", "status"]


def tau_curve_csv(series: list[TauResult]) -> str:
    rows = [
        [r.n, "" if r.tau_b is None else r.tau_b, r.concordant, r.discordant,
         r.ties_ref_only, r.ties_sample_only, r.status]
        for r in series
    ]
    return dumps_csv(TAU_HEADER, rows)


def read_tau_curve_csv(text: str) -> list[TauResult]:
    header, rows = parse_csv(text)
    if header != TAU_HEADER:
        raise ValueError(f"unexpected tau curve header: {header}")
    return [
        TauResult(int(n), float(tau) if tau else None, int(c), int(d), int(tr), int(ts), status)
        for n, tau, c, d, tr, ts, status in rows
    ]


# -- topics -----------------------------------------------------------------

MATCHING_HEADER = ["sample_topic", "reference_topic", "jaccard", "js"]
HISTOGRAM_HEADER = ["bin_lower_edge", "count"]


def matching_csv(matching: TopicMatching) -> str:
    rows = [[p.sample_topic, p.reference_topic, p.jaccard, p.js] for p in matching.pairs]
    return dumps_csv(MATCHING_HEADER, rows)


def read_matching_csv(text: str) -> list[MatchedPair]:
    header, rows = parse_csv(text)
    if header != MATCHING_HEADER:
        raise ValueError(f"unexpected matching header: {header}")
    return [MatchedPair(int(i), int(j), float(w), float(js)) for i, j, w, js in rows]


def histogram_csv(hist: DivergenceHistogram) -> str:
    return dumps_csv(HISTOGRAM_HEADER, [[edge, count] for edge, count in hist.bins])


def read_histogram_csv(text: str) -> list[tuple[float, int]]:
    header, rows = parse_csv(text)
    if header != HISTOGRAM_HEADER:
        raise ValueError(f"unexpected histogram header: {header}")
    return [(float(edge), int(count)) for edge, count in rows]


def topics_summary_json(matching: TopicMatching, hist: DivergenceHistogram) -> str:
    return dumps_json(
        {
            "matched_pairs": len(matching.pairs),
            "top_m": matching.top_m,
            "mean_js": matching.mean_js,
            "std_js": matching.std_js,
            "max_js": hist.max_js,
            "bin_width": hist.bin_width,
            "note": hist.note,
        }
    )


def model_text(model: TopicModel) -> str:
    """Export: one header line, then one "word:prob" row per topic."""
    lines = [
        f"K={model.K} V={len(model.vocabulary)} alpha={model.alpha!r} "
        f"eta={model.eta!r} seed={model.seed} iterations={model.iterations}"
    ]
    for k in range(model.K):
        row = model.phi[k]
        lines.append(" ".join(f"{w}:{float(row[i])!r}" for i, w in enumerate(model.vocabulary)))
    return "\n".join(lines) + "\n"


def read_model_text(text: str) -> TopicModel:
    lines = text.strip("\n").split("\n")
    header = dict(item.split("=", 1) for item in lines[0].split(" "))
    K = int(header["K"])
    V = int(header["V"])
    if len(lines) != K + 1:
        raise ValueError(f"expected {K} topic rows, found {len(lines) - 1}")
    vocabulary: list[str] = []
    phi = np.zeros((K, V))
    for k, line in enumerate(lines[1:]):
        pairs = [item.rsplit(":", 1) for item in line.split(" ")]
        if len(pairs) != V:
            raise ValueError(f"topic {k}: expected {V} entries, found {len(pairs)}")
        if k == 0:
            vocabulary = [w for w, _ in pairs]
        for i, (word, prob) in enumerate(pairs):
            if word != vocabulary[i]:
                raise ValueError(f"topic {k}: vocabulary order mismatch at {i}")
            phi[k, i] = float(prob)
    return TopicModel(
        vocabulary=tuple(vocabulary), phi=phi, K=K,
        alpha=float(header["alpha"]), eta=float(header["eta"]),
        seed=int(header["seed"]), iterations=int(header["iterations"]),
    )


# -- baseline ---------------------------------------------------------------

def baseline_json(result: BaselineResult) -> str:
    return dumps_json(
        {
            "statistic": result.statistic,
            "S": result.S,
            "mu_hat": result.mu_hat,
            "sigma_hat": result.sigma_hat,
            "z": result.z,
            "repeats": result.repeats,
            "master_seed": result.master_seed,
            "exceeds_3sigma": result.exceeds_3sigma,
            "status": result.status,
            "xs": list(result.xs),
            "seeds": list(result.seeds),
        }
    )


def read_baseline_json(text: str) -> BaselineResult:
    obj = json.loads(text)
    return BaselineResult(
        statistic=obj["statistic"],
        S=obj["S"],
        xs=tuple(obj["xs"]),
        mu_hat=obj["mu_hat"],
        sigma_hat=obj["sigma_hat"],
        z=obj["z"],
        repeats=obj["repeats"],
        master_seed=obj["master_seed"],
        seeds=tuple(obj["seeds"]),
        exceeds_3sigma=obj["exceeds_3sigma"],
        status=obj["status"],
    )


# -- network ----------------------------------------------------------------

NETWORK_SUMMARY_HEADER = ["metric", "reference", "sample"]
NETWORK_OVERLAP_HEADER = ["metric", "k", "overlap"]

_SUMMARY_FIELDS = [
    "nodes", "links", "din_positive_pct", "max_din",
    "main_component_size", "main_component_pct", "clustering",
    "centralization_in_degree", "centralization_betweenness",
    "centralization_potential_reach",
]


def network_summary_csv(comparison: NetworkComparison) -> str:
    rows = [
        [name, getattr(comparison.reference, name), getattr(comparison.sample, name)]
        for name in _SUMMARY_FIELDS
    ]
    rows.append(["node_coverage_pct", "", comparison.node_coverage_pct])
    rows.append(["link_coverage_pct", "", comparison.link_coverage_pct])
    return dumps_csv(NETWORK_SUMMARY_HEADER, rows)


def read_network_summary_csv(text: str) -> dict[str, tuple[str, str]]:
    header, rows = parse_csv(text)
    if header != NETWORK_SUMMARY_HEADER:
        raise ValueError(f"unexpected network summary header: {header}")
    return {metric: (ref, sample) for metric, ref, sample in rows}


def network_overlap_csv(comparison: NetworkComparison) -> str:
    rows = [
        [metric, k, count]
        for metric, by_k in sorted(comparison.overlaps.items())
        for k, count in sorted(by_k.items())
    ]
    return dumps_csv(NETWORK_OVERLAP_HEADER, rows)


def read_network_overlap_csv(text: str) -> dict[tuple[str, int], int]:
    header, rows = parse_csv(text)
    if header != NETWORK_OVERLAP_HEADER:
        raise ValueError(f"unexpected network overlap header: {header}")
    return {(metric, int(k)): int(count) for metric, k, count in rows}


def edge_list_text(graph: RetweetGraph) -> str:
    return "".join(f"{u}\t{v}\n" for u, v in sorted(graph.edges))


def node_list_text(graph: RetweetGraph) -> str:
    return "".join(f"{v}\n" for v in graph.sorted_nodes)


def read_edge_list(text: str) -> RetweetGraph:
    edges = set()
    nodes = set()
    for line in text.splitlines():
        if not line.strip():
            continue
        u, v = line.split("\t")
        edges.add((u, v))
        nodes.update((u, v))
    return RetweetGraph(nodes=frozenset(nodes), edges=frozenset(edges))


# -- geo ---------------------------------------------------------------------

GEO_HEADER = ["region", "reference_count", "reference_pct", "sample_count", "sample_pct", "error_pct"]


def geo_csv(report: GeoReport) -> str:
    rows = [
        [r.region, r.reference_count, r.reference_pct, r.sample_count, r.sample_pct, r.error_pct]
        for r in report.rows
    ]
    ref_pct_total = round(sum(r.reference_pct for r in report.rows), 2)
    sample_pct_total = round(sum(r.sample_pct for r in report.rows), 2)
    error_total = round(sum(r.error_pct for r in report.rows), 2)
    rows.append(["Total", report.total_reference, ref_pct_total,
                 report.total_sample, sample_pct_total, error_total])
    return dumps_csv(GEO_HEADER, rows)


def read_geo_csv(text: str) -> list[GeoRegionRow]:
    header, rows = parse_csv(text)
    if header != GEO_HEADER:
        raise ValueError(f"unexpected geo header: {header}")
    return [
        GeoRegionRow(region, int(rc), float(rp), int(sc), float(sp), float(err))
        for region, rc, rp, sc, sp, err in rows
    ]


# -- run manifest -------------------------------------------------------------

@dataclass(frozen=True)
class RunManifest:
    """What a run was given and what it produced, with recomputable digests."""

    command: list[str]
    config_paths: list[str]
    seeds: dict[str, int]
    input_digests: dict[str, str]
    output_paths: list[str]
    output_digests: dict[str, str]
    tool_version: str
    duration_seconds: float


def manifest_json(manifest: RunManifest) -> str:
    return dumps_json(
        {
            "command": manifest.command,
            "config_paths": manifest.config_paths,
            "seeds": manifest.seeds,
            "input_digests": manifest.input_digests,
            "output_paths": manifest.output_paths,
            "output_digests": manifest.output_digests,
            "tool_version": manifest.tool_version,
            "duration_seconds": manifest.duration_seconds,
        }
    )


def manifest_path_for(out_dir: str | Path) -> Path:
    """Manifests sit beside the output directory so that the directory's
    contents stay byte-identical across runs (wall-clock duration varies)."""
    out = Path(out_dir)
    return out.parent / (out.name + ".manifest.json")
