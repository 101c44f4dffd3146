import pytest

from votenet.dataset import VoteDataset, VoteOption, VoteRecord

OPT = {
    "Y": VoteOption.YES,
    "N": VoteOption.NO,
    "O": VoteOption.OBSTRUCTION,
    "-": VoteOption.NOT_COUNTED,
}


def make_dataset(rows, label="w"):
    """rows: (session, member, party, option-letter) tuples."""
    records = [VoteRecord(s, m, p, OPT[o]) for s, m, p, o in rows]
    return VoteDataset.build(label, records)


def votes_matrix(pattern, parties=None, label="w"):
    """Compact dataset builder: pattern[member] = string of option letters per session.

    Sessions are named s0, s1, ...; a '.' means no record at all.
    """
    rows = []
    parties = parties or {}
    for member, options in pattern.items():
        for i, o in enumerate(options):
            if o == ".":
                continue
            rows.append((f"s{i}", member, parties.get(member, "P"), o))
    n_sessions = max(len(v) for v in pattern.values())
    records = [VoteRecord(s, m, p, OPT[o]) for s, m, p, o in rows]
    return VoteDataset.build(label, records, sessions=[f"s{i}" for i in range(n_sessions)])


@pytest.fixture
def tiny_dataset():
    return make_dataset([
        ("s1", "a", "P1", "Y"), ("s1", "b", "P1", "Y"),
        ("s2", "a", "P1", "N"), ("s2", "b", "P1", "Y"),
    ])
