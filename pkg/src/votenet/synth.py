"""Planted-bloc synthetic vote generator for fixtures and acceptance runs."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .dataset import VoteDataset, VoteOption, VoteRecord


@dataclass(frozen=True)
class PlantedBlocs:
    dataset: VoteDataset
    bloc_of: dict[str, int]  # ground-truth member -> bloc


def generate(blocs: int = 2, members: int = 200, sessions: int = 100,
             loyalty: float = 0.95, absence: float = 0.0, seed: int = 0,
             window_label: str = "synth") -> PlantedBlocs:
    """Generate a voting window with `blocs` planted voting blocs.

    Each session every bloc takes a uniform Yes/No stance; a member votes
    their bloc's stance with probability `loyalty`, the opposite otherwise,
    and is marked not-counted with probability `absence` first. Party labels
    follow the blocs (B0, B1, ...), so bloc recovery can be checked against
    ground truth.
    """
    if blocs < 1 or members < blocs:
        raise ValueError("need at least one bloc and one member per bloc")
    if not 0.0 <= loyalty <= 1.0 or not 0.0 <= absence <= 1.0:
        raise ValueError("loyalty and absence must be fractions")
    rng = random.Random(seed)
    width = len(str(members - 1))
    ids = [f"m{idx:0{width}d}" for idx in range(members)]
    bloc_of = {m: i % blocs for i, m in enumerate(ids)}
    records = []
    session_ids = [f"s{j:04d}" for j in range(sessions)]
    for sid in session_ids:
        stance = [rng.choice((VoteOption.YES, VoteOption.NO)) for _ in range(blocs)]
        for m in ids:
            if rng.random() < absence:
                option = VoteOption.NOT_COUNTED
            else:
                wanted = stance[bloc_of[m]]
                if rng.random() < loyalty:
                    option = wanted
                else:
                    option = VoteOption.NO if wanted is VoteOption.YES else VoteOption.YES
            records.append(VoteRecord(sid, m, f"B{bloc_of[m]}", option))
    dataset = VoteDataset.build(window_label, records, sessions=session_ids)
    return PlantedBlocs(dataset, bloc_of)


def bloc_agreement(bloc_of: dict[str, int], assignment: dict[str, int]) -> float:
    """Fraction of assigned members whose community maps onto their bloc.

    Each community is matched to its majority bloc; members in a community
    matched to another bloc count as disagreements.
    """
    if not assignment:
        raise ValueError("empty assignment")
    from collections import Counter
    per_comm: dict[int, Counter] = {}
    for m, cid in assignment.items():
        per_comm.setdefault(cid, Counter())[bloc_of[m]] += 1
    correct = sum(counts.most_common(1)[0][1] for counts in per_comm.values())
    return correct / len(assignment)
