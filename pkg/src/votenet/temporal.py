"""Cross-window community comparison: persistence, NMI, member flows."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping


@dataclass(frozen=True)
class WindowPartition:
    label: str
    assignment: Mapping[str, int]

    @property
    def members(self) -> frozenset[str]:
        return frozenset(self.assignment)


@dataclass(frozen=True)
class WindowPair:
    earlier: WindowPartition
    later: WindowPartition

    def __post_init__(self):
        if self.earlier.label == self.later.label:
            raise ValueError("window labels must be distinct")

    @property
    def common(self) -> frozenset[str]:
        return self.earlier.members & self.later.members


@dataclass(frozen=True)
class FlowTable:
    rows: tuple[tuple[int, int, int], ...]  # (community_x, community_x1, count)
    exited_count: int
    entered_count: int


def persistence(wp: WindowPair) -> float:
    """Fraction of the earlier window's members present in the later one."""
    earlier = wp.earlier.members
    if not earlier:
        raise ValueError(f"window {wp.earlier.label!r} has no members")
    return len(wp.common) / len(earlier)


def nmi(wp: WindowPair) -> float:
    """Normalized mutual information of the two partitions over persisting members.

    Mutual information over the joint community distribution, normalized by
    the geometric mean of the two entropies; degenerate cases: both
    partitions single-community -> 1, exactly one single-community -> 0.
    """
    common = sorted(wp.common)
    if not common:
        raise ValueError("no member persists across the window pair")
    n = len(common)
    joint = Counter((wp.earlier.assignment[m], wp.later.assignment[m]) for m in common)
    px = Counter(x for x, _ in joint.elements())
    py = Counter(y for _, y in joint.elements())

    def entropy(counts: Counter) -> float:
        # fsum keeps the value independent of community label order
        return -math.fsum((c / n) * math.log(c / n) for c in counts.values() if c)

    hx, hy = entropy(px), entropy(py)
    if hx == 0.0 and hy == 0.0:
        return 1.0
    if hx == 0.0 or hy == 0.0:
        return 0.0
    info = math.fsum(
        (c / n) * math.log((c / n) / ((px[x] / n) * (py[y] / n)))
        for (x, y), c in joint.items())
    return min(1.0, max(0.0, info / math.sqrt(hx * hy)))


def flow_table(wp: WindowPair) -> FlowTable:
    """Cross-tabulate persisting members by (earlier, later) community.

    Communities with no persisting member are omitted; churn shows up only
    in the exited/entered counts.
    """
    common = wp.common
    counts = Counter((wp.earlier.assignment[m], wp.later.assignment[m]) for m in common)
    rows = tuple(sorted((cx, cy, c) for (cx, cy), c in counts.items()))
    return FlowTable(
        rows=rows,
        exited_count=len(wp.earlier.members - common),
        entered_count=len(wp.later.members - common),
    )


def write_flow(wp: WindowPair, table: FlowTable, path: str | Path,
               include_churn: bool = False) -> None:
    """Sankey-ready flow export: ``window_x community_x window_x1 community_x1 count``.

    With include_churn, synthetic EXITED/ENTERED pseudo-communities record
    members who left or joined between the windows.
    """
    lines = ["# window_x\tcommunity_x\twindow_x1\tcommunity_x1\tcount"]
    for cx, cy, c in table.rows:
        lines.append(f"{wp.earlier.label}\t{cx}\t{wp.later.label}\t{cy}\t{c}")
    if include_churn:
        if table.exited_count:
            lines.append(f"{wp.earlier.label}\tEXITED\t{wp.later.label}\tEXITED\t{table.exited_count}")
        if table.entered_count:
            lines.append(f"{wp.earlier.label}\tENTERED\t{wp.later.label}\tENTERED\t{table.entered_count}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class TemporalReport:
    rows: tuple[tuple[str, str, float, float], ...]  # (x, x+1, persistence, nmi)


def temporal_report(windows: list[WindowPartition],
                    boundaries: set[tuple[str, str]] = frozenset()) -> TemporalReport:
    """Persistence and NMI for every consecutive window pair.

    Pairs listed in `boundaries` (e.g. legislature changes) are skipped.
    """
    rows = []
    for a, b in zip(windows, windows[1:]):
        if (a.label, b.label) in boundaries:
            continue
        wp = WindowPair(a, b)
        rows.append((a.label, b.label, persistence(wp), nmi(wp)))
    return TemporalReport(tuple(rows))


def write_temporal_report(report: TemporalReport, path: str | Path) -> None:
    lines = ["# window_x\twindow_x1\tpersistence\tnmi"]
    for a, b, pers, score in report.rows:
        lines.append(f"{a}\t{b}\t{pers:.12g}\t{score:.12g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
