"""depgrowth: dependent-adoption growth and release-note complexity metrics.

The package turns daily ecosystem snapshots (repositories, package releases,
dependent edges) into release-level adoption measurements: semver-classified
releases, look-ahead log-differences of dependent counts, stratified summary
statistics, and model-rated release-note complexity.
"""

__version__ = "0.1.0"
