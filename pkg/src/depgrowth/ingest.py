"""Snapshot ingestion: record model, line-delimited readers, join indexes.

Input files are line-delimited JSON (one record per line, UTF-8, ISO-8601
dates). The first line of a file may be a schema header of the form
``{"schema": "<name>", "version": 1}``; readers validate it when present.
Malformed records are surfaced as per-record :class:`SchemaViolation` entries
on the reader, never as stream aborts, so one bad row cannot poison a
multi-gigabyte ingest. Field-level details live in docs/DATA_FORMAT.md.

Join rule: a lookup at date D uses the same-day snapshot when one exists,
otherwise the latest snapshot strictly before D but at most 7 days older.
The same staleness bound applies to dependent-edge coverage dates.
"""

from __future__ import annotations

import http.client
import json
import re
import time
import urllib.error
import urllib.request
from array import array
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import IO, Callable, Iterable, Iterator, Sequence, Union

__all__ = [
    "DateOutOfRange",
    "DependentEdge",
    "EdgeIndex",
    "HttpSource",
    "PackageRelease",
    "RepoIndex",
    "RepoSnapshot",
    "SchemaHeaderError",
    "SchemaViolation",
    "SourceUnavailable",
    "StreamingDependentCounter",
    "count_dependents",
    "nearest_repo_snapshot",
    "read_dependent_edges",
    "read_releases",
    "read_repo_snapshots",
]

SCHEMA_VERSION = 1
JOIN_WINDOW_DAYS = 7

_ECOSYSTEM_RE = re.compile(r"^[a-z][a-z0-9_-]*$")

Source = Union[str, Path, IO[str], Iterable[str]]


class SourceUnavailable(OSError):
    """The underlying file or HTTP source could not be read."""


class SchemaHeaderError(ValueError):
    """The file-level schema header names a different schema or version."""


class SchemaViolation(ValueError):
    """One record failed validation; carries its 1-based line number."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.message = message


class DateOutOfRange(LookupError):
    """A dependent-count lookup has no edge coverage within the join window."""


@dataclass(frozen=True)
class RepoSnapshot:
    snapshot_date: date
    owner: str
    name: str
    stars: int
    forks: int
    is_fork: bool
    description: str | None = None
    topics: tuple[str, ...] = ()
    language: str | None = None


@dataclass(frozen=True)
class PackageRelease:
    release_date: date
    ecosystem: str
    package_name: str
    owner: str
    repo_name: str
    version_text: str
    release_notes: str | None = None


@dataclass(frozen=True)
class DependentEdge:
    snapshot_date: date
    dependent_owner: str
    dependent_repo: str
    ecosystem: str
    package_name: str


# ---------------------------------------------------------------------------
# line sources
# ---------------------------------------------------------------------------


def _iter_lines(source: Source) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        try:
            handle = open(source, "r", encoding="utf-8")
        except OSError as exc:
            raise SourceUnavailable(f"cannot open {source}: {exc}") from exc
        with handle:
            for line in handle:
                yield line.rstrip("\n").rstrip("\r")
        return
    if hasattr(source, "read"):
        for line in source:  # type: ignore[union-attr]
            yield line.rstrip("\n").rstrip("\r")
        return
    for line in source:  # already an iterable of lines
        yield line.rstrip("\n").rstrip("\r")


class HttpSource:
    """Fetches the same line-delimited payloads over HTTP.

    Supports mid-stream resume: when the connection drops, the next attempt
    sends a ``Range: bytes=<received>-`` header so already-received bytes are
    not transferred again. Servers that ignore the range restart the stream
    transparently.
    """

    def __init__(
        self,
        base_url: str,
        timeout: float = 30.0,
        retries: int = 3,
        backoff: float = 0.5,
        sleeper: Callable[[float], None] = time.sleep,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._sleep = sleeper

    def lines(self, name: str) -> Iterator[str]:
        """Stream decoded lines of ``<base_url>/<name>``, resuming on drops."""
        url = f"{self.base_url}/{name}"
        received = 0
        buffer = b""
        attempt = 0
        while True:
            request = urllib.request.Request(url)
            if received:
                request.add_header("Range", f"bytes={received}-")
            try:
                with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                    # A server may ignore the range request and replay the
                    # whole payload; discard the prefix we already consumed
                    # so no line is yielded twice.
                    skip = received if (received and resp.status != 206) else 0
                    declared = resp.headers.get("Content-Length")
                    expected = int(declared) if declared is not None else None
                    got = 0
                    while True:
                        chunk = resp.read(65536)
                        if not chunk:
                            break
                        got += len(chunk)
                        if skip:
                            if len(chunk) <= skip:
                                skip -= len(chunk)
                                continue
                            chunk = chunk[skip:]
                            skip = 0
                        received += len(chunk)
                        buffer += chunk
                        while True:
                            newline = buffer.find(b"\n")
                            if newline < 0:
                                break
                            line = buffer[:newline]
                            buffer = buffer[newline + 1 :]
                            yield line.decode("utf-8").rstrip("\r")
                    if skip:
                        raise ConnectionError("payload ended before the resume offset")
                    if expected is not None and got < expected:
                        # read(amt) signals a premature close with a bare
                        # EOF, not an exception; treat short bodies as drops
                        raise ConnectionError("connection closed mid-payload")
                if buffer:
                    yield buffer.decode("utf-8").rstrip("\r")
                return
            except urllib.error.HTTPError as exc:
                if exc.code < 500:
                    raise SourceUnavailable(f"GET {url}: HTTP {exc.code}") from exc
                attempt += 1
            except (
                urllib.error.URLError,
                http.client.HTTPException,
                ConnectionError,
                TimeoutError,
            ):
                attempt += 1
            if attempt > self.retries:
                raise SourceUnavailable(f"GET {url}: retries exhausted")
            self._sleep(self.backoff * (2 ** (attempt - 1)))


# ---------------------------------------------------------------------------
# record parsing
# ---------------------------------------------------------------------------


def _parse_date(raw: object, field: str) -> date:
    if not isinstance(raw, str):
        raise ValueError(f"{field} must be an ISO date string")
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise ValueError(f"{field} is not a valid ISO date: {raw!r}") from None


def _req_str(obj: dict, field: str) -> str:
    value = obj.get(field)
    if not isinstance(value, str) or not value:
        raise ValueError(f"{field} must be a non-empty string")
    return value


def _opt_str(obj: dict, field: str) -> str | None:
    value = obj.get(field)
    if value is None:
        return None
    if not isinstance(value, str):
        raise ValueError(f"{field} must be a string or null")
    return value


def _req_count(obj: dict, field: str) -> int:
    value = obj.get(field)
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValueError(f"{field} must be a non-negative integer")
    return value


def _req_bool(obj: dict, field: str) -> bool:
    value = obj.get(field)
    if not isinstance(value, bool):
        raise ValueError(f"{field} must be a boolean")
    return value


def _req_ecosystem(obj: dict) -> str:
    value = _req_str(obj, "ecosystem")
    if not _ECOSYSTEM_RE.match(value):
        raise ValueError(f"ecosystem must be a lowercase identifier, got {value!r}")
    return value


def _topics(obj: dict) -> tuple[str, ...]:
    value = obj.get("topics", [])
    if not isinstance(value, list) or any(not isinstance(t, str) for t in value):
        raise ValueError("topics must be a list of strings")
    return tuple(value)


def _repo_snapshot(obj: dict) -> RepoSnapshot:
    return RepoSnapshot(
        snapshot_date=_parse_date(obj.get("snapshot_date"), "snapshot_date"),
        owner=_req_str(obj, "owner"),
        name=_req_str(obj, "name"),
        stars=_req_count(obj, "stars"),
        forks=_req_count(obj, "forks"),
        is_fork=_req_bool(obj, "is_fork"),
        description=_opt_str(obj, "description"),
        topics=_topics(obj),
        language=_opt_str(obj, "language"),
    )


def _package_release(obj: dict) -> PackageRelease:
    return PackageRelease(
        release_date=_parse_date(obj.get("release_date"), "release_date"),
        ecosystem=_req_ecosystem(obj),
        package_name=_req_str(obj, "package_name"),
        owner=_req_str(obj, "owner"),
        repo_name=_req_str(obj, "repo_name"),
        version_text=_req_str(obj, "version_text"),
        release_notes=_opt_str(obj, "release_notes"),
    )


def _dependent_edge(obj: dict) -> DependentEdge:
    return DependentEdge(
        snapshot_date=_parse_date(obj.get("snapshot_date"), "snapshot_date"),
        dependent_owner=_req_str(obj, "dependent_owner"),
        dependent_repo=_req_str(obj, "dependent_repo"),
        ecosystem=_req_ecosystem(obj),
        package_name=_req_str(obj, "package_name"),
    )


class RecordReader:
    """Single-use iterator over one line-delimited file.

    Yields parsed records; per-record failures are appended to
    ``violations`` (with their 1-based line numbers) and iteration
    continues. A schema header naming the wrong schema aborts with
    :class:`SchemaHeaderError` since nothing after it can be trusted.
    """

    def __init__(self, source: Source, schema: str, parse: Callable[[dict], object]) -> None:
        self._source = source
        self._schema = schema
        self._parse = parse
        self.violations: list[SchemaViolation] = []

    def __iter__(self) -> Iterator[object]:
        for line_no, line in enumerate(_iter_lines(self._source), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                self.violations.append(SchemaViolation(line_no, f"invalid JSON: {exc.msg}"))
                continue
            if not isinstance(obj, dict):
                self.violations.append(SchemaViolation(line_no, "record must be an object"))
                continue
            if line_no == 1 and "schema" in obj:
                name = obj.get("schema")
                version = obj.get("version")
                if name != self._schema:
                    raise SchemaHeaderError(
                        f"expected schema {self._schema!r}, file declares {name!r}"
                    )
                if version != SCHEMA_VERSION:
                    raise SchemaHeaderError(
                        f"unsupported {name} schema version {version!r}"
                    )
                continue
            try:
                yield self._parse(obj)
            except ValueError as exc:
                self.violations.append(SchemaViolation(line_no, str(exc)))


def read_repo_snapshots(source: Source) -> RecordReader:
    """Reader for repository snapshot records (schema ``repo-snapshots``)."""
    return RecordReader(source, "repo-snapshots", _repo_snapshot)


def read_releases(source: Source) -> RecordReader:
    """Reader for package release records (schema ``releases``)."""
    return RecordReader(source, "releases", _package_release)


def read_dependent_edges(source: Source) -> RecordReader:
    """Reader for dependent edge records (schema ``dependent-edges``)."""
    return RecordReader(source, "dependent-edges", _dependent_edge)


# ---------------------------------------------------------------------------
# indexes and joins
# ---------------------------------------------------------------------------


class RepoIndex:
    """Per-repository snapshot timeline with nearest-date lookup.

    Rows are stored as parallel arrays per repository (ordinal date, stars,
    forks, fork flag) so that multi-million-row corpora stay compact;
    description/topics/language are kept only when ``keep_metadata`` is true
    (the complexity pipeline needs them, the filters do not).
    """

    def __init__(self, keep_metadata: bool = True) -> None:
        self._keep_metadata = keep_metadata
        # key -> [ordinals, stars, forks, fork_flags, metas]; parallel arrays
        # instead of per-row tuples keep multi-million-row loads in the tens
        # of megabytes
        self._rows: dict[tuple[str, str], list] = {}
        self._frozen: dict[tuple[str, str], tuple] = {}
        # metadata rarely changes day to day; intern equal tuples so daily
        # snapshots of the same repo share one object
        self._meta_intern: dict[tuple, tuple] = {}

    @classmethod
    def build(cls, snapshots: Iterable[RepoSnapshot], keep_metadata: bool = True) -> "RepoIndex":
        index = cls(keep_metadata=keep_metadata)
        for snap in snapshots:
            index.add(snap)
        return index

    def add(self, snap: RepoSnapshot) -> None:
        key = (snap.owner, snap.name)
        if self._keep_metadata:
            meta = (snap.description, snap.topics, snap.language)
            meta = self._meta_intern.setdefault(meta, meta)
        else:
            meta = None
        store = self._rows.get(key)
        if store is None:
            frozen = self._frozen.pop(key, None)
            if frozen is not None:
                # thaw so late additions land in the same timeline
                store = [
                    array("l", frozen[0]),
                    array("l", frozen[1]),
                    array("l", frozen[2]),
                    array("b", frozen[3]),
                    list(frozen[4]),
                ]
            else:
                store = [array("l"), array("l"), array("l"), array("b"), []]
            self._rows[key] = store
        store[0].append(snap.snapshot_date.toordinal())
        store[1].append(snap.stars)
        store[2].append(snap.forks)
        store[3].append(int(snap.is_fork))
        store[4].append(meta)

    def __len__(self) -> int:
        return len(self._rows) + len(self._frozen)

    def _timeline(self, key: tuple[str, str]) -> tuple | None:
        frozen = self._frozen.get(key)
        if frozen is not None:
            return frozen
        store = self._rows.get(key)
        if store is None:
            return None
        raw_ordinals, raw_stars, raw_forks, raw_flags, raw_metas = store
        n = len(raw_ordinals)
        order = range(n)
        if any(raw_ordinals[i] > raw_ordinals[i + 1] for i in range(n - 1)):
            # stable, so same-day duplicates keep arrival order: last wins
            order = sorted(order, key=raw_ordinals.__getitem__)
        ordinals = array("l")
        stars = array("l")
        forks = array("l")
        fork_flags = array("b")
        metas: list[tuple | None] = []
        for i in order:
            if len(ordinals) and ordinals[-1] == raw_ordinals[i]:
                stars[-1] = raw_stars[i]
                forks[-1] = raw_forks[i]
                fork_flags[-1] = raw_flags[i]
                metas[-1] = raw_metas[i]
                continue
            ordinals.append(raw_ordinals[i])
            stars.append(raw_stars[i])
            forks.append(raw_forks[i])
            fork_flags.append(raw_flags[i])
            metas.append(raw_metas[i])
        frozen = (ordinals, stars, forks, fork_flags, metas)
        self._frozen[key] = frozen
        del self._rows[key]
        return frozen

    def nearest(self, owner: str, name: str, when: date) -> RepoSnapshot | None:
        """Snapshot joined to ``when``: same day, else latest within 7 days back."""
        timeline = self._timeline((owner, name))
        if timeline is None:
            return None
        ordinals, stars, forks, fork_flags, metas = timeline
        target = when.toordinal()
        pos = bisect_right(ordinals, target) - 1
        if pos < 0 or target - ordinals[pos] > JOIN_WINDOW_DAYS:
            return None
        meta = metas[pos] or (None, (), None)
        return RepoSnapshot(
            snapshot_date=date.fromordinal(ordinals[pos]),
            owner=owner,
            name=name,
            stars=stars[pos],
            forks=forks[pos],
            is_fork=bool(fork_flags[pos]),
            description=meta[0],
            topics=meta[1],
            language=meta[2],
        )

    def quality_ok(self, owner: str, name: str, when: date) -> bool:
        """True when the joined snapshot exists, is not a fork, and has >= 1 star."""
        timeline = self._timeline((owner, name))
        if timeline is None:
            return False
        ordinals, stars, _forks, fork_flags, _metas = timeline
        target = when.toordinal()
        pos = bisect_right(ordinals, target) - 1
        if pos < 0 or target - ordinals[pos] > JOIN_WINDOW_DAYS:
            return False
        return not fork_flags[pos] and stars[pos] >= 1


def nearest_repo_snapshot(
    owner: str, name: str, when: date, index: RepoIndex
) -> RepoSnapshot | None:
    """Module-level alias for :meth:`RepoIndex.nearest` (the join rule)."""
    return index.nearest(owner, name, when)


def _resolve_coverage(coverage: Sequence[int], target: int) -> int | None:
    """Latest coverage ordinal at or before ``target`` within the join window."""
    pos = bisect_right(coverage, target) - 1
    if pos < 0 or target - coverage[pos] > JOIN_WINDOW_DAYS:
        return None
    return coverage[pos]


class EdgeIndex:
    """In-memory dependent-edge index for small and medium corpora.

    Stores per (ecosystem, package) per coverage date the distinct dependent
    set. Coverage dates are the distinct snapshot dates across the whole
    dataset: a package with no rows on a covered date genuinely had zero
    dependents that day.
    """

    def __init__(self) -> None:
        self._cells: dict[tuple[str, str], dict[int, set[str]]] = {}
        self._coverage: set[int] = set()
        self._sorted_coverage: list[int] | None = None

    @classmethod
    def build(cls, edges: Iterable[DependentEdge]) -> "EdgeIndex":
        index = cls()
        for edge in edges:
            index.add(edge)
        return index

    def add(self, edge: DependentEdge) -> None:
        ordinal = edge.snapshot_date.toordinal()
        self._coverage.add(ordinal)
        self._sorted_coverage = None
        cell = self._cells.setdefault((edge.ecosystem, edge.package_name), {})
        cell.setdefault(ordinal, set()).add(f"{edge.dependent_owner}/{edge.dependent_repo}")

    @property
    def coverage(self) -> list[int]:
        if self._sorted_coverage is None:
            self._sorted_coverage = sorted(self._coverage)
        return self._sorted_coverage

    def dependents_at(self, package_name: str, ecosystem: str, when: date) -> set[str]:
        """Raw distinct dependents at the resolved coverage date (no quality check)."""
        effective = _resolve_coverage(self.coverage, when.toordinal())
        if effective is None:
            raise DateOutOfRange(f"no edge coverage within {JOIN_WINDOW_DAYS} days of {when}")
        return self._cells.get((ecosystem, package_name), {}).get(effective, set())


def count_dependents(
    package_name: str,
    ecosystem: str,
    when: date,
    edges: EdgeIndex,
    repos: RepoIndex,
) -> int:
    """Distinct quality dependents of a package on a given day.

    A dependent counts when its own repository snapshot joined to ``when``
    exists, is not a fork, and has at least one star.

    Raises:
        DateOutOfRange: the edge dataset has no coverage within the join
            window of ``when``.
    """
    deps = edges.dependents_at(package_name, ecosystem, when)
    count = 0
    for dep in deps:
        owner, _, name = dep.partition("/")
        if repos.quality_ok(owner, name, when):
            count += 1
    return count


class StreamingDependentCounter:
    """Single-pass distinct-dependent counting for requested package-dates.

    Register every (ecosystem, package, date) cell of interest up front, then
    feed the edge stream once. Working memory is proportional to the number
    of requested cells plus the distinct dependents inside them, never to the
    total edge row count.
    """

    def __init__(self) -> None:
        # (eco, pkg) -> sorted list of requested ordinals is built lazily
        self._requests: dict[tuple[str, str], set[int]] = {}
        self._windows: dict[tuple[str, str], list[int]] | None = None
        # (eco, pkg, candidate ordinal) -> distinct dependent keys
        self._buckets: dict[tuple[str, str, int], set[str]] = {}
        self._coverage: set[int] = set()
        self._sorted_coverage: list[int] | None = None
        self._dep_cache: dict[str, str] = {}

    def request(self, package_name: str, ecosystem: str, when: date) -> None:
        self._requests.setdefault((ecosystem, package_name), set()).add(when.toordinal())
        self._windows = None

    def _window_lists(self) -> dict[tuple[str, str], list[int]]:
        if self._windows is None:
            self._windows = {k: sorted(v) for k, v in self._requests.items()}
        return self._windows

    def feed(self, edges: Iterable[DependentEdge]) -> None:
        windows = self._window_lists()
        buckets = self._buckets
        coverage = self._coverage
        cache = self._dep_cache
        self._sorted_coverage = None
        for edge in edges:
            ordinal = edge.snapshot_date.toordinal()
            coverage.add(ordinal)
            key = (edge.ecosystem, edge.package_name)
            requested = windows.get(key)
            if not requested:
                continue
            # keep the row only if its date can serve some requested date:
            # candidate iff requested ordinal in [ordinal, ordinal + window]
            pos = bisect_left(requested, ordinal)
            if pos == len(requested) or requested[pos] - ordinal > JOIN_WINDOW_DAYS:
                continue
            dep = f"{edge.dependent_owner}/{edge.dependent_repo}"
            dep = cache.setdefault(dep, dep)
            buckets.setdefault((key[0], key[1], ordinal), set()).add(dep)

    def count(
        self, package_name: str, ecosystem: str, when: date, repos: RepoIndex
    ) -> int:
        """Quality-dependent count for a previously requested cell.

        Raises:
            KeyError: the cell was never requested.
            DateOutOfRange: no edge coverage within the join window.
        """
        target = when.toordinal()
        if target not in self._requests.get((ecosystem, package_name), set()):
            raise KeyError(f"cell ({ecosystem}, {package_name}, {when}) was not requested")
        if self._sorted_coverage is None:
            self._sorted_coverage = sorted(self._coverage)
        effective = _resolve_coverage(self._sorted_coverage, target)
        if effective is None:
            raise DateOutOfRange(f"no edge coverage within {JOIN_WINDOW_DAYS} days of {when}")
        deps = self._buckets.get((ecosystem, package_name, effective), set())
        count = 0
        for dep in deps:
            owner, _, name = dep.partition("/")
            if repos.quality_ok(owner, name, when):
                count += 1
        return count
