"""Command line pipeline: filter, metrics, analyze, complexity, all, synth.

Each stage reads files, writes files, and can be re-run idempotently; later
stages consume earlier stages' outputs from the configured output directory.
Every output carries a provenance header (tool version, config hash, input
digests) and no wall-clock values, so a rerun over identical inputs is
byte-identical.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import urllib.request
from datetime import timedelta
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from . import __version__
from .complexity import (
    MIN_NOTE_CHARS,
    MockModelClient,
    RetryPolicy,
    agreement_stats,
    build_prompt,
    rate_many,
    rating_record,
)
from .config import (
    ConfigError,
    PipelineConfig,
    config_sha256,
    file_sha256,
    load_config,
    resolve_config,
)
from .filters import ClassifiedRelease, filter_semver, pre_release_date, run_filter_cascade
from .ingest import (
    DateOutOfRange,
    PackageRelease,
    RepoIndex,
    SchemaHeaderError,
    SourceUnavailable,
    StreamingDependentCounter,
    read_dependent_edges,
    read_releases,
    read_repo_snapshots,
)
from .metrics import (
    METRICS,
    LogDiffSample,
    LookaheadGrid,
    ReleaseRecord,
    SizeBin,
    build_release_records,
    log_diff_samples,
)
from .report import (
    complexity_descriptives,
    complexity_vs_type_tests,
    fold_release_type,
    format_summary_table_text,
    heatmap_matrix,
    release_demographics,
    render_heatmap_svg,
    summary_table,
    summary_table_rows,
    timepoint_distributions,
)
from .semver import ReleaseType, VersionSeries
from .stats import DegenerateInput

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

MODEL_TOKEN_ENV = "DEPGROWTH_MODEL_TOKEN"


class DataError(RuntimeError):
    """Input data is missing or unusable; distinct from config mistakes."""


# ---------------------------------------------------------------------------
# provenance and output helpers
# ---------------------------------------------------------------------------


def _provenance(config: PipelineConfig, inputs: Mapping[str, str | Path]) -> dict:
    digests: dict[str, str] = {}
    for name in sorted(inputs):
        path = inputs[name]
        try:
            digests[name] = file_sha256(path)
        except OSError as exc:
            raise DataError(f"cannot read input {name} at {path}: {exc}") from exc
    return {
        "tool_version": __version__,
        "config_sha256": config_sha256(config),
        "inputs": digests,
    }


def _write_records(path: Path, schema: str, provenance: dict, rows: Iterable[Mapping]) -> int:
    header = {"schema": schema, "version": 1, "provenance": provenance}
    n = 0
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(header, sort_keys=True) + "\n")
        for row in rows:
            handle.write(json.dumps(row, separators=(",", ":")) + "\n")
            n += 1
    return n


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _write_text(path: Path, provenance: dict, body: str, comment: str = "#") -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{comment} provenance: {json.dumps(provenance, sort_keys=True)}\n")
        handle.write(body)


def _read_record_lines(path: Path) -> Iterable[dict]:
    """Rows of a line-delimited output file, skipping the header line."""
    with open(path, encoding="utf-8") as handle:
        for i, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if i == 0 and isinstance(obj, dict) and "schema" in obj:
                continue
            yield obj


# ---------------------------------------------------------------------------
# shared pipeline pieces
# ---------------------------------------------------------------------------


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise DataError(f"{path} does not exist; {hint}")
    return path


def _load_releases(path: str | Path) -> tuple[list[PackageRelease], int]:
    reader = read_releases(path)
    releases = list(reader)
    return releases, len(reader.violations)


def _load_repo_index(path: str | Path) -> tuple[RepoIndex, int]:
    reader = read_repo_snapshots(path)
    index = RepoIndex()
    for snap in reader:
        index.add(snap)
    return index, len(reader.violations)


def _feed_counter(
    releases: Sequence[PackageRelease],
    edges_path: str | Path,
    offsets: Sequence[int],
) -> tuple[StreamingDependentCounter, int]:
    counter = StreamingDependentCounter()
    one_day = timedelta(days=1)
    for release in releases:
        counter.request(release.package_name, release.ecosystem, release.release_date - one_day)
        for offset in offsets:
            counter.request(
                release.package_name, release.ecosystem, release.release_date + timedelta(days=offset)
            )
    reader = read_dependent_edges(edges_path)
    counter.feed(reader)
    return counter, len(reader.violations)


def _count_provider(
    counter: StreamingDependentCounter, repos: RepoIndex
) -> Callable[[str, str, object], int | None]:
    def count(package_name: str, ecosystem: str, when) -> int | None:
        try:
            return counter.count(package_name, ecosystem, when, repos)
        except DateOutOfRange:
            return None

    return count


def _release_row(release: PackageRelease) -> dict:
    row = {
        "release_date": release.release_date.isoformat(),
        "ecosystem": release.ecosystem,
        "package_name": release.package_name,
        "owner": release.owner,
        "repo_name": release.repo_name,
        "version_text": release.version_text,
    }
    if release.release_notes is not None:
        row["release_notes"] = release.release_notes
    return row


def _release_key(release: PackageRelease) -> str:
    return (
        f"{release.ecosystem}:{release.package_name}:"
        f"{release.release_date.isoformat()}:{release.version_text}"
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_filter(config: PipelineConfig) -> int:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    provenance = _provenance(
        config,
        {
            "releases": config.releases,
            "repo_snapshots": config.repo_snapshots,
            "dependent_edges": config.dependent_edges,
        },
    )
    releases, rel_violations = _load_releases(config.releases)
    repos, repo_violations = _load_repo_index(config.repo_snapshots)
    counter, edge_violations = _feed_counter(releases, config.dependent_edges, offsets=())
    count = _count_provider(counter, repos)

    def pre_count(item: ClassifiedRelease) -> int | None:
        release = item.release
        return count(release.package_name, release.ecosystem, pre_release_date(item))

    survivors, reports = run_filter_cascade(
        releases,
        repos,
        pre_count,
        allowed=config.ecosystems,
        threshold=config.min_dependents,
        zero_split=config.zero_split,
    )
    n = _write_records(
        out / "filtered_releases.jsonl",
        "releases",
        provenance,
        (_release_row(item.release) for item in survivors),
    )
    _write_json(
        out / "filter_report.json",
        {
            "provenance": provenance,
            "schema_violations": {
                "releases": rel_violations,
                "repo_snapshots": repo_violations,
                "dependent_edges": edge_violations,
            },
            "stages": [report.as_dict() for report in reports],
        },
    )
    print(f"filter: {len(releases)} releases in, {n} kept -> {out / 'filtered_releases.jsonl'}")
    return EXIT_OK


def _record_row(record: ReleaseRecord) -> dict:
    version = record.version
    return {
        "release_date": record.release_date.isoformat(),
        "ecosystem": record.ecosystem,
        "package_name": record.package_name,
        "owner": record.owner,
        "repo_name": record.repo_name,
        "version": f"{version.major}.{version.minor}.{version.patch}",
        "release_type": record.release_type.value,
        "series": record.series.value,
        "pre_dependents": record.pre_dependents,
        "bin": record.bin.value,
        "metrics": {
            f"{metric}@{offset}": value
            for (metric, offset), value in sorted(record.metric_values.items())
        },
    }


def _sample_row(sample: LogDiffSample) -> dict:
    return {
        "ecosystem": sample.ecosystem,
        "package_name": sample.package_name,
        "release_date": sample.release_date.isoformat(),
        "version_text": sample.version_text,
        "release_type": sample.release_type.value,
        "series": sample.series.value,
        "bin": sample.bin.value,
        "metric": sample.metric,
        "offset_days": sample.offset_days,
        "value": sample.value,
    }


def cmd_metrics(config: PipelineConfig) -> int:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    filtered = _require(
        out / "filtered_releases.jsonl", "run the filter stage first (depgrowth filter)"
    )
    provenance = _provenance(
        config,
        {
            "filtered_releases": filtered,
            "repo_snapshots": config.repo_snapshots,
            "dependent_edges": config.dependent_edges,
        },
    )
    releases, rel_violations = _load_releases(filtered)
    classified, semver_report = filter_semver(releases, zero_split=config.zero_split)
    if semver_report.reasons:
        raise DataError(
            f"{filtered} contains rows that no longer parse as semver: {dict(semver_report.reasons)}"
        )
    repos, repo_violations = _load_repo_index(config.repo_snapshots)
    grid = LookaheadGrid(*config.grid)
    counter, edge_violations = _feed_counter(
        releases, config.dependent_edges, offsets=(0,) + grid.offsets
    )
    count = _count_provider(counter, repos)
    records, skipped = build_release_records(classified, repos, count, grid)
    n_records = _write_records(
        out / "release_records.jsonl",
        "release-records",
        provenance,
        (_record_row(record) for record in records),
    )
    exclusions: dict[str, dict[str, int]] = {}
    n_samples = 0
    with open(out / "log_diff_samples.jsonl", "w", encoding="utf-8") as handle:
        header = {"schema": "log-diff-samples", "version": 1, "provenance": provenance}
        handle.write(json.dumps(header, sort_keys=True) + "\n")
        for metric in METRICS:
            for offset in grid.offsets:
                samples, tallies = log_diff_samples(records, metric, offset)
                exclusions[f"{metric}@{offset}"] = tallies
                for sample in samples:
                    handle.write(json.dumps(_sample_row(sample), separators=(",", ":")) + "\n")
                    n_samples += 1
    _write_json(
        out / "metrics_report.json",
        {
            "provenance": provenance,
            "schema_violations": {
                "filtered_releases": rel_violations,
                "repo_snapshots": repo_violations,
                "dependent_edges": edge_violations,
            },
            "records": n_records,
            "skipped": skipped,
            "samples": n_samples,
            "exclusions": exclusions,
        },
    )
    print(f"metrics: {n_records} records, {n_samples} samples -> {out / 'log_diff_samples.jsonl'}")
    return EXIT_OK


def _load_samples(path: Path) -> list[LogDiffSample]:
    from datetime import date

    samples = []
    for row in _read_record_lines(path):
        samples.append(
            LogDiffSample(
                ecosystem=row["ecosystem"],
                package_name=row["package_name"],
                release_date=date.fromisoformat(row["release_date"]),
                version_text=row["version_text"],
                release_type=ReleaseType(row["release_type"]),
                series=VersionSeries(row["series"]),
                bin=SizeBin(row["bin"]),
                metric=row["metric"],
                offset_days=row["offset_days"],
                value=row["value"],
            )
        )
    return samples


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def cmd_analyze(config: PipelineConfig) -> int:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    samples_path = _require(
        out / "log_diff_samples.jsonl", "run the metrics stage first (depgrowth metrics)"
    )
    records_path = _require(
        out / "release_records.jsonl", "run the metrics stage first (depgrowth metrics)"
    )
    provenance = _provenance(
        config, {"log_diff_samples": samples_path, "release_records": records_path}
    )
    samples = _load_samples(samples_path)
    grid = LookaheadGrid(*config.grid)
    offset = grid.final_offset
    dependents = [s for s in samples if s.metric == "dependents"]

    for strat_by, stem in (("bin", "table_bins"), ("series", "table_series")):
        summaries = summary_table(
            dependents, strat_by, offset, alpha=config.alpha, fold_zero=config.fold_zero
        )
        _write_text(out / f"{stem}.txt", provenance, format_summary_table_text(summaries))
        header, rows = summary_table_rows(summaries)
        _write_text(out / f"{stem}.csv", provenance, _csv_text(header, rows))
        bundle = heatmap_matrix(summaries)
        cell_rows = []
        for eco in sorted(bundle.matrices):
            matrix = bundle.matrices[eco]
            svg = render_heatmap_svg(
                [list(row) for row in matrix],
                list(bundle.row_labels),
                list(bundle.col_labels),
                (bundle.vmin, bundle.vmax),
                title=eco,
            )
            svg_path = out / f"heatmap_{stem[len('table_'):]}_{eco}.svg"
            with open(svg_path, "w", encoding="utf-8") as handle:
                handle.write(f"<!-- provenance: {json.dumps(provenance, sort_keys=True)} -->\n")
                handle.write(svg)
            for row_label, row in zip(bundle.row_labels, matrix):
                for col_label, value in zip(bundle.col_labels, row):
                    cell_rows.append(
                        {
                            "ecosystem": eco,
                            "stratum": row_label,
                            "release_type": col_label,
                            "value": value,
                        }
                    )
        _write_records(out / f"heatmap_{stem[len('table_'):]}.jsonl", "heatmap-cells", provenance, cell_rows)

    timepoint_rows = []
    for strat_by in ("bin", "series"):
        for dist in timepoint_distributions(dependents, grid, strat_by=strat_by, fold_zero=config.fold_zero):
            row = dataclasses.asdict(dist)
            row["strat_by"] = strat_by
            timepoint_rows.append(row)
    _write_records(out / "timepoints.jsonl", "timepoint-distributions", provenance, timepoint_rows)

    demo_rows = [
        _DemoRecord(row["ecosystem"], ReleaseType(row["release_type"]))
        for row in _read_record_lines(records_path)
    ]
    _write_json(
        out / "demographics.json",
        {"provenance": provenance, "by_ecosystem": release_demographics(demo_rows)},
    )

    ratings_path = out / "ratings.jsonl"
    if ratings_path.exists():
        _write_complexity_reports(out, provenance, ratings_path, config)

    print(f"analyze: tables, heatmaps, timepoints -> {out}")
    return EXIT_OK


@dataclasses.dataclass(frozen=True)
class _DemoRecord:
    ecosystem: str
    release_type: ReleaseType


def _write_complexity_reports(
    out: Path, provenance: dict, ratings_path: Path, config: PipelineConfig
) -> None:
    by_language: dict[str, list[int]] = {}
    by_language_type: dict[str, dict[str, list[int]]] = {}
    for row in _read_record_lines(ratings_path):
        rating = row.get("rating")
        if rating is None:
            continue
        language = row.get("language") or "unknown"
        by_language.setdefault(language, []).append(int(rating))
        raw_type = row.get("release_type")
        if raw_type is None:
            continue
        folded = fold_release_type(ReleaseType(raw_type), config.fold_zero)
        by_language_type.setdefault(language, {}).setdefault(folded, []).append(int(rating))

    descriptives = [
        dataclasses.asdict(d) for d in complexity_descriptives(by_language)
    ]
    _write_json(
        out / "complexity_descriptives.json",
        {"provenance": provenance, "languages": descriptives},
    )
    try:
        result = complexity_vs_type_tests(by_language_type, fold_zero=config.fold_zero)
        tests = {
            f"{lang}:{a}:{b}": dataclasses.asdict(test)
            for (lang, a, b), test in sorted(result.tests.items())
        }
        skipped = {f"{lang}:{a}:{b}": reason for (lang, a, b), reason in sorted(result.skipped.items())}
    except DegenerateInput as exc:
        tests, skipped = {}, {"all": str(exc)}
    _write_json(
        out / "complexity_type_tests.json",
        {"provenance": provenance, "tests": tests, "skipped": skipped},
    )


class HttpModelClient:
    """Minimal JSON-over-HTTP completion client.

    POSTs ``{"model", "system", "user"}`` and expects ``{"text": ...}``
    back. The auth token, when present in the environment, rides in an
    Authorization header. Network and envelope failures surface as OSError
    so the retry policy treats them as transient.
    """

    def __init__(self, endpoint: str, model_id: str, token: str | None = None, timeout: float = 60.0) -> None:
        self.endpoint = endpoint
        self.model_id = model_id
        self._token = token
        self._timeout = timeout

    def complete(self, system_text: str, user_text: str) -> str:
        payload = json.dumps(
            {"model": self.model_id, "system": system_text, "user": user_text}
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self._token:
            headers["Authorization"] = f"Bearer {self._token}"
        request = urllib.request.Request(self.endpoint, data=payload, headers=headers)
        with urllib.request.urlopen(request, timeout=self._timeout) as response:
            try:
                body = json.load(response)
            except json.JSONDecodeError as exc:
                raise OSError(f"model endpoint returned invalid JSON: {exc.msg}") from exc
        if not isinstance(body, dict) or not isinstance(body.get("text"), str):
            raise OSError("model endpoint response lacks a text field")
        return body["text"]


def cmd_complexity(config: PipelineConfig) -> int:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    filtered = _require(
        out / "filtered_releases.jsonl", "run the filter stage first (depgrowth filter)"
    )
    inputs: dict[str, str | Path] = {
        "filtered_releases": filtered,
        "repo_snapshots": config.repo_snapshots,
    }
    if config.human_ratings:
        inputs["human_ratings"] = config.human_ratings
    provenance = _provenance(config, inputs)
    releases, _ = _load_releases(filtered)
    classified, semver_report = filter_semver(releases, zero_split=config.zero_split)
    if semver_report.reasons:
        raise DataError(
            f"{filtered} contains rows that no longer parse as semver: {dict(semver_report.reasons)}"
        )
    repos, _ = _load_repo_index(config.repo_snapshots)

    items = []
    meta: dict[str, dict] = {}
    ineligible = 0
    missing_snapshot = 0
    for item in classified:
        release = item.release
        notes = release.release_notes or ""
        if len(notes.strip()) < MIN_NOTE_CHARS:
            ineligible += 1
            continue
        snap = repos.nearest(release.owner, release.repo_name, release.release_date)
        if snap is None:
            missing_snapshot += 1
            continue
        key = _release_key(release)
        items.append((key, release, snap))
        meta[key] = {
            "language": snap.language,
            "release_type": item.release_type.value,
            "bundle": build_prompt(release, snap),
        }

    ratings_path = out / "ratings.jsonl"
    existing_rows: dict[str, dict] = {}
    if ratings_path.exists():
        for row in _read_record_lines(ratings_path):
            existing_rows[row["key"]] = row

    if config.model_endpoint:
        client = HttpModelClient(
            config.model_endpoint, config.model_id, token=os.environ.get(MODEL_TOKEN_ENV)
        )
    else:
        client = MockModelClient()
    ratings, failures = rate_many(
        items,
        client,
        RetryPolicy(),
        max_workers=config.workers,
        rate_per_sec=config.rate_per_sec,
        skip_keys=existing_rows.keys(),
    )

    merged = dict(existing_rows)
    for key, rating in ratings.items():
        info = meta[key]
        row = dict(
            rating_record(key, rating, info["bundle"], getattr(client, "model_id", config.model_id), config.timestamp)
        )
        row["language"] = info["language"]
        row["release_type"] = info["release_type"]
        merged[key] = row
    n = _write_records(
        ratings_path, "complexity-ratings", provenance, (merged[k] for k in sorted(merged))
    )
    # totals, not per-run deltas, so a resumed run writes the same report
    _write_json(
        out / "complexity_report.json",
        {
            "provenance": provenance,
            "eligible": len(items),
            "ineligible": ineligible,
            "missing_snapshot": missing_snapshot,
            "rated": n,
            "failures": {key: message for key, message in sorted(failures.items())},
        },
    )

    if config.human_ratings:
        human_rows = {
            row["key"]: row["rating"] for row in _read_record_lines(Path(config.human_ratings))
        }
        model_scores, human_scores = [], []
        for key in sorted(merged):
            model_rating = merged[key].get("rating")
            human_rating = human_rows.get(key)
            if model_rating is None or human_rating is None:
                continue
            model_scores.append(int(model_rating))
            human_scores.append(int(human_rating))
        try:
            stats = agreement_stats(model_scores, human_scores)
            agreement = dataclasses.asdict(stats)
        except (ValueError, DegenerateInput) as exc:
            agreement = {"error": str(exc), "n": len(model_scores)}
        _write_json(out / "agreement.json", {"provenance": provenance, **agreement})

    print(f"complexity: {n} ratings ({len(ratings)} new) -> {ratings_path}")
    return EXIT_OK


def cmd_all(config: PipelineConfig) -> int:
    cmd_filter(config)
    cmd_metrics(config)
    cmd_complexity(config)
    cmd_analyze(config)
    return EXIT_OK


def cmd_synth(out_dir: str, scale: str, seed: int) -> int:
    from .synth import SynthConfig, build_world, small_config, write_corpus

    if scale == "small":
        synth_config = small_config(seed=seed)
    else:
        synth_config = SynthConfig(seed=seed)
    world = build_world(synth_config)
    counts = write_corpus(world, out_dir)
    print(f"synth: {counts} -> {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.replace(":", ",").split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("grid must look like 365,90")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError("grid must be two integers") from exc


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--releases", help="release records file")
    parser.add_argument("--repo-snapshots", dest="repo_snapshots", help="repository snapshots file")
    parser.add_argument("--dependent-edges", dest="dependent_edges", help="dependent edge file")
    parser.add_argument("--out-dir", dest="out_dir", help="output directory")
    parser.add_argument("--ecosystems", help="comma-separated ecosystem ids")
    parser.add_argument("--min-dependents", dest="min_dependents", type=int)
    parser.add_argument("--grid", type=_parse_grid, help="horizon,step e.g. 365,90")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--zero-split", dest="zero_split", choices=("patch", "folded"))
    parser.add_argument(
        "--no-fold-zero", dest="fold_zero", action="store_const", const=False, default=None
    )
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--model-id", dest="model_id")
    parser.add_argument("--model-endpoint", dest="model_endpoint")
    parser.add_argument("--rate-per-sec", dest="rate_per_sec", type=float)
    parser.add_argument("--human-ratings", dest="human_ratings")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depgrowth", description="Release adoption and complexity pipeline"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("filter", "apply the release filter cascade"),
        ("metrics", "compute look-ahead records and log-difference samples"),
        ("analyze", "produce tables, heatmaps, and distribution artifacts"),
        ("complexity", "rate release notes with the configured model"),
        ("all", "run filter, metrics, complexity, analyze in order"),
    ):
        command = sub.add_parser(name, help=text)
        _add_pipeline_flags(command)
    synth = sub.add_parser("synth", help="generate a synthetic corpus")
    synth.add_argument("--out-dir", dest="out_dir", required=True)
    synth.add_argument("--scale", choices=("small", "full"), default="small")
    synth.add_argument("--seed", type=int, default=7)
    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides = {}
    for key in (
        "releases",
        "repo_snapshots",
        "dependent_edges",
        "out_dir",
        "min_dependents",
        "grid",
        "alpha",
        "zero_split",
        "fold_zero",
        "seed",
        "workers",
        "model_id",
        "model_endpoint",
        "rate_per_sec",
        "human_ratings",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    ecosystems = getattr(args, "ecosystems", None)
    if ecosystems is not None:
        overrides["ecosystems"] = tuple(part.strip() for part in ecosystems.split(",") if part.strip())
    return overrides


_COMMANDS = {
    "filter": cmd_filter,
    "metrics": cmd_metrics,
    "analyze": cmd_analyze,
    "complexity": cmd_complexity,
    "all": cmd_all,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return cmd_synth(args.out_dir, args.scale, args.seed)
        config = resolve_config(args.config, _overrides_from_args(args))
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, SourceUnavailable, SchemaHeaderError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
