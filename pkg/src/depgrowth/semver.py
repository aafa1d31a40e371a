"""Semantic-version parsing and release-type classification.

Release version strings are the raw tag text that ecosystems publish, so the
parser is deliberately strict: exactly three dot-separated numeric components,
an optional leading ``v``/``V``, optional build metadata after ``+`` (ignored),
and no leading zeros. Pre-release versions are not malformed, but they are out
of scope for release classification, so they raise a dedicated error that
callers can tally separately from garbage strings.

Key responsibilities:
    * ``parse_version``: text -> ``Version`` or a typed rejection.
    * ``classify_release``: five-way release type from the version components.
    * ``version_series``: coarse maturity series keyed on the major component.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

__all__ = [
    "MalformedVersion",
    "PreReleaseExcluded",
    "ReleaseType",
    "Version",
    "VersionParseError",
    "VersionSeries",
    "classify_release",
    "classify_release_diff",
    "format_version",
    "parse_version",
]


class VersionParseError(ValueError):
    """Base class for version-text rejections."""

    def __init__(self, text: str, reason: str) -> None:
        super().__init__(f"{reason}: {text!r}")
        self.text = text
        self.reason = reason


class MalformedVersion(VersionParseError):
    """Text is not ``[v]MAJOR.MINOR.PATCH`` with plain numeric components."""

    def __init__(self, text: str) -> None:
        super().__init__(text, "not a MAJOR.MINOR.PATCH version")


class PreReleaseExcluded(VersionParseError):
    """Text is a valid semantic version but carries a pre-release suffix."""

    def __init__(self, text: str) -> None:
        super().__init__(text, "pre-release versions are excluded")


# Strict grammar: numeric core without leading zeros, optional pre-release and
# build-metadata suffixes with the usual dotted-identifier alphabet. The
# pre-release group is matched (not rejected by the regex) so that it can be
# reported as PreReleaseExcluded rather than MalformedVersion.
_NUM = r"(?:0|[1-9]\d*)"
_PRE_IDENT = r"(?:0|[1-9]\d*|\d*[A-Za-z-][0-9A-Za-z-]*)"
_VERSION_RE = re.compile(
    rf"^[vV]?(?P<major>{_NUM})\.(?P<minor>{_NUM})\.(?P<patch>{_NUM})"
    rf"(?:-(?P<pre>{_PRE_IDENT}(?:\.{_PRE_IDENT})*))?"
    rf"(?:\+(?P<build>[0-9A-Za-z-]+(?:\.[0-9A-Za-z-]+)*))?$"
)


@dataclass(frozen=True, order=True)
class Version:
    """A parsed three-component version.

    Ordering and equality use only the numeric components; ``raw`` keeps the
    original text for audit output and is excluded from comparisons.
    """

    major: int
    minor: int
    patch: int
    raw: str = field(default="", compare=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("major", "minor", "patch"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"{name} must be a non-negative int, got {value!r}")


class ReleaseType(enum.Enum):
    """Five-way release classification.

    The zero-major rows exist because 0.y.z projects signal breaking vs.
    additive changes one component lower than stable projects do.
    """

    MAJOR = "major"
    MINOR = "minor"
    PATCH = "patch"
    ZERO_MAJOR = "zero_major"
    ZERO_MINOR = "zero_minor"


class VersionSeries(enum.Enum):
    """Coarse project-maturity series keyed on the major component."""

    ZERO_VER = "zero_ver"
    ONE_VER = "one_ver"
    TWO_PLUS_VER = "two_plus_ver"


def parse_version(text: str) -> Version:
    """Parse raw tag text into a :class:`Version`.

    Accepts an optional leading ``v`` or ``V`` and strips build metadata
    (everything after ``+``). Exactly three numeric components are required
    and leading zeros are rejected.

    Args:
        text: Raw version text as published by the ecosystem.

    Returns:
        The parsed version, with ``raw`` preserving ``text`` verbatim.

    Raises:
        MalformedVersion: ``text`` does not match the grammar at all.
        PreReleaseExcluded: ``text`` parses but has a pre-release suffix
            (for example ``1.2.3-rc1``).
    """
    match = _VERSION_RE.match(text)
    if match is None:
        raise MalformedVersion(text)
    if match.group("pre") is not None:
        raise PreReleaseExcluded(text)
    return Version(
        major=int(match.group("major")),
        minor=int(match.group("minor")),
        patch=int(match.group("patch")),
        raw=text,
    )


def format_version(version: Version) -> str:
    """Render the canonical ``MAJOR.MINOR.PATCH`` text (no prefix, no build)."""
    return f"{version.major}.{version.minor}.{version.patch}"


def classify_release(version: Version, zero_split: str = "patch") -> ReleaseType:
    """Classify a version into one of the five release types.

    The default rule table::

        major >= 1, minor == 0, patch == 0  -> MAJOR
        major >= 1, patch == 0, minor  > 0  -> MINOR
        major >= 1, patch  > 0             -> PATCH
        major == 0, patch == 0             -> ZERO_MAJOR
        major == 0, patch  > 0             -> ZERO_MINOR

    Args:
        version: Parsed version.
        zero_split: How to split 0.y.z releases. ``"patch"`` (default) uses
            the patch component as above. ``"folded"`` treats every 0.y.z
            except the bare 0.0.0 as ZERO_MINOR, for sensitivity analysis.

    Raises:
        ValueError: unknown ``zero_split`` mode.
    """
    if zero_split not in ("patch", "folded"):
        raise ValueError(f"unknown zero_split mode: {zero_split!r}")
    if version.major >= 1:
        if version.minor == 0 and version.patch == 0:
            return ReleaseType.MAJOR
        if version.patch == 0:
            return ReleaseType.MINOR
        return ReleaseType.PATCH
    if zero_split == "folded":
        if version.minor == 0 and version.patch == 0:
            return ReleaseType.ZERO_MAJOR
        return ReleaseType.ZERO_MINOR
    if version.patch == 0:
        return ReleaseType.ZERO_MAJOR
    return ReleaseType.ZERO_MINOR


def classify_release_diff(
    previous: Version | None, version: Version, zero_split: str = "patch"
) -> ReleaseType:
    """Diff-based classification for sensitivity analysis.

    Classifies by the highest-order component that changed relative to the
    package's previous parsed version. Falls back to the string-based rule
    table when there is no previous version or nothing changed.
    """
    if previous is None:
        return classify_release(version, zero_split=zero_split)
    if version.major >= 1:
        if version.major != previous.major:
            return ReleaseType.MAJOR
        if version.minor != previous.minor:
            return ReleaseType.MINOR
        if version.patch != previous.patch:
            return ReleaseType.PATCH
        return classify_release(version, zero_split=zero_split)
    if version.minor != previous.minor or version.major != previous.major:
        return ReleaseType.ZERO_MAJOR
    if version.patch != previous.patch:
        return ReleaseType.ZERO_MINOR
    return classify_release(version, zero_split=zero_split)


def version_series(version: Version) -> VersionSeries:
    """Map a version to its maturity series: 0 -> zero, 1 -> one, >=2 -> two-plus."""
    if version.major == 0:
        return VersionSeries.ZERO_VER
    if version.major == 1:
        return VersionSeries.ONE_VER
    return VersionSeries.TWO_PLUS_VER
