"""Literal nested-loop join oracles for unit-scale cross-checks.

No indexes, no bisect: every lookup scans the full row lists, so these stay
honest but are only usable on small fixtures.
"""

WINDOW = 7


def naive_repo_join(repo_rows, owner, name, when):
    """Latest snapshot row for (owner, name) at/before `when` within the window.

    Same-day duplicates resolve to the later row in file order.
    """
    best = None
    for idx, row in enumerate(repo_rows):
        if row.owner != owner or row.name != name:
            continue
        gap = (when - row.snapshot_date).days
        if gap < 0 or gap > WINDOW:
            continue
        if best is None or (row.snapshot_date, idx) > (best[0].snapshot_date, best[1]):
            best = (row, idx)
    return best[0] if best else None


def naive_dependent_count(edge_rows, repo_rows, pkg, eco, when):
    """Distinct quality dependents, or None when no coverage date qualifies."""
    effective = None
    for row in edge_rows:
        gap = (when - row.snapshot_date).days
        if gap < 0 or gap > WINDOW:
            continue
        if effective is None or row.snapshot_date > effective:
            effective = row.snapshot_date
    if effective is None:
        return None
    deps = set()
    for row in edge_rows:
        if (
            row.snapshot_date == effective
            and row.package_name == pkg
            and row.ecosystem == eco
        ):
            deps.add((row.dependent_owner, row.dependent_repo))
    count = 0
    for owner, name in deps:
        snap = naive_repo_join(repo_rows, owner, name, when)
        if snap is not None and not snap.is_fork and snap.stars >= 1:
            count += 1
    return count
