"""Test hooks: observers for votes entering similarity/discipline math."""
from __future__ import annotations

from typing import Callable, List

from .dataset import VoteOption

# Tests append callbacks here to assert which options reach the numeric core.
vote_observers: List[Callable[[VoteOption], None]] = []


def observe(option: VoteOption) -> None:
    for cb in vote_observers:
        cb(option)
