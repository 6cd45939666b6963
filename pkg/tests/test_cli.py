"""CLI subcommands: outputs, exit codes, manifests, and determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from streamaudit.artifacts import (
    manifest_path_for,
    read_baseline_json,
    read_coverage_csv,
    read_edge_list,
    read_geo_csv,
    read_histogram_csv,
    read_matching_csv,
    read_model_text,
    read_network_overlap_csv,
    read_network_summary_csv,
    read_tau_curve_csv,
    model_text,
    sha256_file,
)
from streamaudit.cli import main
from streamaudit.topics import fit_lda_docs


def run_ok(args):
    status = main(args)
    assert status == 0
    return status


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_flag_is_usage_error(self):
        assert main(["coverage", "--reference", "x"]) == 1

    def test_missing_file_is_input_error(self, tmp_path):
        assert main([
            "coverage", "--reference", str(tmp_path / "none.jsonl"),
            "--sample", str(tmp_path / "none.jsonl"), "--out", str(tmp_path / "o"),
        ]) == 2

    def test_bad_config_is_input_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{\"days\": 0}", encoding="utf-8")
        assert main(["synth", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2


class TestCoverageCommand:
    def test_identity_pair_all_ratios_one(self, cli_pair, tmp_path):
        ref, _, _ = cli_pair
        out = tmp_path / "cov"
        run_ok(["coverage", "--reference", str(ref), "--sample", str(ref), "--out", str(out)])
        rows = read_coverage_csv((out / "coverage.csv").read_text())
        assert len(rows) == 3
        assert all(r.ratio == 1.0 for r in rows)
        summary = json.loads((out / "coverage_summary.json").read_text())
        assert summary["overall_ratio"] == 1.0

    def test_half_sample_ratios(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "cov2"
        run_ok(["coverage", "--reference", str(ref), "--sample", str(sample), "--out", str(out)])
        summary = json.loads((out / "coverage_summary.json").read_text())
        assert summary["overall_ratio"] == pytest.approx(0.5, abs=0.01)


class TestHashtagsCommand:
    def test_series_shape(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "tags"
        run_ok([
            "hashtags", "--reference", str(ref), "--sample", str(sample),
            "--n-max", "1000", "--step", "10", "--out", str(out),
        ])
        series = read_tau_curve_csv((out / "tau_curve.csv").read_text())
        assert len(series) == 100
        assert series[0].n == 10
        assert series[-1].n == 1000


class TestTopicsCommand:
    def test_artifacts_roundtrip(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "topics"
        run_ok([
            "topics", "--reference", str(ref), "--sample", str(sample),
            "--k", "3", "--iterations", "30", "--seed", "5", "--out", str(out),
        ])
        model = read_model_text((out / "reference_model.txt").read_text())
        assert model.K == 3
        assert model_text(model) == (out / "reference_model.txt").read_text()
        pairs = read_matching_csv((out / "topics_matching.csv").read_text())
        assert len(pairs) == 3
        hist = read_histogram_csv((out / "topics_histogram.csv").read_text())
        assert sum(c for _, c in hist) == 3
        summary = json.loads((out / "topics_summary.json").read_text())
        assert summary["matched_pairs"] == 3


class TestBaselineCommand:
    def test_tau_baseline_json(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "base"
        run_ok([
            "baseline", "--reference", str(ref), "--sample", str(sample),
            "--statistic", "tau_b_top", "--repeats", "10", "--depth", "5",
            "--seed", "3", "--out", str(out),
        ])
        result = read_baseline_json((out / "baseline.json").read_text())
        assert result.repeats == 10
        assert len(result.xs) == 10
        assert result.exceeds_3sigma == (result.z is not None and abs(result.z) > 3)

    def test_per_day_mode(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "baseday"
        run_ok([
            "baseline", "--reference", str(ref), "--sample", str(sample),
            "--statistic", "tau_b_top", "--repeats", "5", "--depth", "5",
            "--per-day", "--out", str(out),
        ])
        per_day = json.loads((out / "baseline_per_day.json").read_text())
        assert len(per_day) == 3


class TestNetworkCommand:
    def test_outputs_parse(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "net"
        run_ok(["network", "--reference", str(ref), "--sample", str(sample), "--out", str(out)])
        summary = read_network_summary_csv((out / "network_summary.csv").read_text())
        assert "nodes" in summary and "clustering" in summary
        overlaps = read_network_overlap_csv((out / "network_overlap.csv").read_text())
        assert ("in_degree", 10) in overlaps
        graph = read_edge_list((out / "reference_edges.tsv").read_text())
        assert graph.edge_count() == int(summary["links"][0])


class TestGeoCommand:
    def test_geo_report(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "geo"
        run_ok(["geo", "--reference", str(ref), "--sample", str(sample), "--out", str(out)])
        rows = read_geo_csv((out / "geo.csv").read_text())
        by_region = {r.region: r for r in rows}
        assert by_region["Total"].reference_count > 0
        assert by_region["Asia"].reference_count > by_region["Europe"].reference_count

    def test_exclude_bbox_flag(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "geox"
        run_ok([
            "geo", "--reference", str(ref), "--sample", str(sample),
            "--exclude-bbox", "33.0,36.0,37.0,42.0", "--out", str(out),
        ])
        rows = read_geo_csv((out / "geo.csv").read_text())
        by_region = {r.region: r for r in rows}
        assert by_region["Asia"].reference_count == 0


class TestManifest:
    def test_written_beside_out_dir_with_recomputable_digests(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "covm"
        run_ok(["coverage", "--reference", str(ref), "--sample", str(sample), "--out", str(out)])
        manifest_file = manifest_path_for(out)
        assert manifest_file.exists()
        manifest = json.loads(manifest_file.read_text())
        assert sorted(manifest["output_paths"]) == ["coverage.csv", "coverage_summary.json"]
        for rel, digest in manifest["output_digests"].items():
            assert sha256_file(out / rel) == digest
        for path, digest in manifest["input_digests"].items():
            assert sha256_file(path) == digest
        assert manifest["tool_version"]
        assert manifest["duration_seconds"] >= 0


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*")) if p.is_file()
    }


class TestReport:
    REPORT_FLAGS = [
        "--n-max", "200", "--step", "10", "--k", "3", "--iterations", "25",
        "--seed", "4", "--baseline-repeats", "6", "--baseline-depth", "5",
        "--baseline-seed", "9",
    ]

    def test_full_report_artifacts(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "rep"
        run_ok(["report", "--reference", str(ref), "--sample", str(sample),
                "--out", str(out)] + self.REPORT_FLAGS)
        names = {p.name for p in out.iterdir()}
        assert {
            "coverage.csv", "coverage_summary.json", "tau_curve.csv",
            "topics_matching.csv", "topics_histogram.csv", "topics_summary.json",
            "reference_model.txt", "sample_model.txt",
            "network_summary.csv", "network_overlap.csv", "geo.csv",
            "baseline_tau.json",
        } <= names
        # every CSV parses through the tool's own readers
        read_coverage_csv((out / "coverage.csv").read_text())
        read_tau_curve_csv((out / "tau_curve.csv").read_text())
        read_matching_csv((out / "topics_matching.csv").read_text())
        read_histogram_csv((out / "topics_histogram.csv").read_text())
        read_network_summary_csv((out / "network_summary.csv").read_text())
        read_network_overlap_csv((out / "network_overlap.csv").read_text())
        read_geo_csv((out / "geo.csv").read_text())

    def test_byte_identical_across_runs_and_jobs(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        outs = [tmp_path / f"rep{i}" for i in range(3)]
        jobs = ["1", "1", "4"]
        for out, j in zip(outs, jobs):
            run_ok(["report", "--reference", str(ref), "--sample", str(sample),
                    "--out", str(out), "--jobs", j] + self.REPORT_FLAGS)
        first = tree_bytes(outs[0])
        assert first
        assert tree_bytes(outs[1]) == first
        assert tree_bytes(outs[2]) == first

    def test_sections_can_be_skipped(self, cli_pair, tmp_path):
        ref, sample, _ = cli_pair
        out = tmp_path / "repskip"
        run_ok(["report", "--reference", str(ref), "--sample", str(sample),
                "--no-topics", "--no-network", "--no-geo", "--no-baseline",
                "--n-max", "100", "--out", str(out)])
        names = {p.name for p in out.iterdir()}
        assert names == {"coverage.csv", "coverage_summary.json", "tau_curve.csv"}


class TestModelTextFormat:
    def test_bitwise_phi_roundtrip(self):
        docs = [[f"word{i % 9}", f"word{(i + 3) % 9}"] for i in range(30)]
        model = fit_lda_docs(docs, K=3, iterations=20, seed=8)
        parsed = read_model_text(model_text(model))
        assert parsed.vocabulary == model.vocabulary
        assert np.array_equal(parsed.phi, model.phi)
        assert (parsed.K, parsed.alpha, parsed.eta) == (model.K, model.alpha, model.eta)
        assert (parsed.seed, parsed.iterations) == (model.seed, model.iterations)
