"""Exhaustive branch enumeration by replay.

A stochastic procedure is run once per leaf of its outcome tree.  The
:class:`BranchChooser` handed to it replays a fixed prefix of decisions,
then takes the first possible option at every new decision point while
queueing the untaken siblings.  Leaf weight is the product of the chosen
branch probabilities, so the leaf list is an exact distribution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Generic, Sequence, TypeVar

T = TypeVar("T")

MAX_LEAVES = 2**24


class BranchExplosion(RuntimeError):
    pass


class BranchChooser:
    def __init__(self, prefix: Sequence[int]):
        self.prefix = list(prefix)
        self.path: list[int] = []
        self.prob = 1.0
        self.pending: list[list[int]] = []

    def choice(self, probs: Sequence[float]) -> int:
        total = float(sum(probs))
        pos = len(self.path)
        if pos < len(self.prefix):
            i = self.prefix[pos]
        else:
            options = [j for j, p in enumerate(probs) if p > 0.0]
            i = options[0]
            for j in options[1:]:
                self.pending.append(self.path + [j])
        self.path.append(i)
        self.prob *= probs[i] / total
        return i

    def bit(self) -> int:
        return self.choice((0.5, 0.5))

    def integer(self, k: int) -> int:
        return self.choice([1.0 / k] * k)


@dataclass
class Leaf(Generic[T]):
    prob: float
    value: T
    path: tuple[int, ...]


def enumerate_branches(
    fn: Callable[[BranchChooser], T], max_leaves: int = MAX_LEAVES
) -> list[Leaf[T]]:
    """Run ``fn`` on every branch; return one weighted :class:`Leaf` per run."""
    leaves: list[Leaf[T]] = []
    stack: list[list[int]] = [[]]
    while stack:
        prefix = stack.pop()
        chooser = BranchChooser(prefix)
        value = fn(chooser)
        leaves.append(Leaf(chooser.prob, value, tuple(chooser.path)))
        if len(leaves) > max_leaves:
            raise BranchExplosion(f"more than {max_leaves} branches")
        stack.extend(reversed(chooser.pending))
    return leaves
