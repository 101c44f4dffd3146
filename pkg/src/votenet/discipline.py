"""Discipline of a member relative to a group, and per-group averages."""
from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from . import instrumentation
from .dataset import VoteDataset, VoteOption

# group = party or community; a GroupAssignment is just member_id -> group_id
GroupAssignment = Mapping[str, object]


class UndefinedDisciplineError(ValueError):
    """Member has no session with a counted vote and a group majority."""


@dataclass(frozen=True)
class DisciplineReport:
    per_member: dict[str, float]
    per_group: dict[object, Optional[tuple[float, float]]]  # (mean, population SD)
    undefined_members: frozenset[str] = field(default_factory=frozenset)


def _counted_votes(d: VoteDataset) -> dict[str, dict[str, VoteOption]]:
    out: dict[str, dict[str, VoteOption]] = {s: {} for s in d.sessions}
    for r in d.records:
        if r.option.counted:
            instrumentation.observe(r.option)
            out[r.session_id][r.member_id] = r.option
    return out


def _majority(counts: Counter) -> Optional[VoteOption]:
    if not counts:
        return None
    ranked = counts.most_common(2)
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        return None
    return ranked[0][0]


def majority_option(d: VoteDataset, group: Iterable[str], session_id: str,
                    exclude: str | None = None) -> Optional[VoteOption]:
    """Strict-plurality option of the group's counted votes in one session.

    Returns None when the top count is tied or the group cast no counted
    vote. `exclude` supports the leave-one-out variant.
    """
    if session_id not in d.sessions:
        raise KeyError(f"unknown session {session_id!r}")
    votes = _counted_votes(d)[session_id]
    counts = Counter(votes[m] for m in group if m in votes and m != exclude)
    return _majority(counts)


def partisan_discipline(d: VoteDataset, member_id: str, group: Iterable[str],
                        include_self: bool = True) -> float:
    """Fraction of eligible sessions where the member matched the group majority.

    Eligible sessions are those where the member cast a counted vote and the
    group has a strict plurality; tied sessions count in neither numerator
    nor denominator. With include_self=False the member's own vote is left
    out of the majority count (leave-one-out variant).
    """
    group = set(group)
    votes = _counted_votes(d)
    agreed = eligible = 0
    exclude = None if include_self else member_id
    for session_votes in votes.values():
        mine = session_votes.get(member_id)
        if mine is None:
            continue
        counts = Counter(session_votes[m] for m in group
                         if m in session_votes and m != exclude)
        majority = _majority(counts)
        if majority is None:
            continue
        eligible += 1
        if mine == majority:
            agreed += 1
    if eligible == 0:
        raise UndefinedDisciplineError(
            f"member {member_id!r} has no session with a counted vote and a group majority")
    return agreed / eligible


def group_discipline(d: VoteDataset, assignment: GroupAssignment,
                     include_self: bool = True) -> DisciplineReport:
    """Discipline of every assigned member against their own group.

    Groups whose members all have undefined discipline are reported with no
    value (None). Standard deviation is population SD.
    """
    votes = _counted_votes(d)
    groups: dict[object, list[str]] = {}
    for m, g in assignment.items():
        groups.setdefault(g, []).append(m)

    per_member: dict[str, float] = {}
    undefined: set[str] = set()
    per_group: dict[object, Optional[tuple[float, float]]] = {}
    for gid, members in groups.items():
        member_set = set(members)
        # majority per session, computed once per group
        majorities: dict[str, Optional[VoteOption]] = {}
        if include_self:
            for sid, session_votes in votes.items():
                counts = Counter(session_votes[m] for m in member_set if m in session_votes)
                majorities[sid] = _majority(counts)
        values = []
        for m in sorted(member_set):
            agreed = eligible = 0
            for sid, session_votes in votes.items():
                mine = session_votes.get(m)
                if mine is None:
                    continue
                if include_self:
                    majority = majorities[sid]
                else:
                    counts = Counter(session_votes[x] for x in member_set
                                     if x in session_votes and x != m)
                    majority = _majority(counts)
                if majority is None:
                    continue
                eligible += 1
                if mine == majority:
                    agreed += 1
            if eligible == 0:
                undefined.add(m)
                continue
            pd = agreed / eligible
            per_member[m] = pd
            values.append(pd)
        if values:
            mean = statistics.fmean(values)
            sd = statistics.pstdev(values)
            per_group[gid] = (mean, sd)
        else:
            per_group[gid] = None
    return DisciplineReport(per_member, per_group, frozenset(undefined))


def party_assignment(d: VoteDataset) -> dict[str, str]:
    """GroupAssignment mapping each member to their party label."""
    return dict(d.members)
