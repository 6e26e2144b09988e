"""Instances (G, L) of list homomorphism into a target H, and witnesses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import PreconditionViolated
from .graph import Graph, bits, to_mask


@dataclass(frozen=True)
class Instance:
    g: Graph
    lists: tuple[frozenset[int], ...]
    target: Graph

    def __post_init__(self):
        if len(self.lists) != self.g.n:
            raise PreconditionViolated(
                f"{len(self.lists)} lists given for a graph with {self.g.n} vertices"
            )
        for v, lst in enumerate(self.lists):
            for u in lst:
                if not 0 <= u < self.target.n:
                    raise PreconditionViolated(f"list of vertex {v} names unknown target vertex {u}")

    @classmethod
    def make(cls, g: Graph, lists: Sequence[Iterable[int]] | None, target: Graph) -> "Instance":
        if lists is None:
            full = frozenset(range(target.n))
            return cls(g, tuple(full for _ in range(g.n)), target)
        return cls(g, tuple(frozenset(lst) for lst in lists), target)

    @classmethod
    def from_masks(cls, g: Graph, masks: Sequence[int], target: Graph) -> "Instance":
        return cls(g, tuple(frozenset(bits(m)) for m in masks), target)

    def list_masks(self) -> list[int]:
        return [to_mask(lst) for lst in self.lists]


def witness_problems(inst: Instance, mapping: Sequence[int]) -> list[str]:
    """Every way `mapping` fails to be a list homomorphism (empty when valid)."""
    out = []
    if len(mapping) != inst.g.n:
        return [f"mapping has {len(mapping)} entries for {inst.g.n} vertices"]
    for v, u in enumerate(mapping):
        if u not in inst.lists[v]:
            out.append(f"vertex {v} mapped to {u} outside its list")
    for a, b in inst.g.edges():
        if not inst.target.has_edge(mapping[a], mapping[b]):
            out.append(f"edge {a}-{b} mapped to non-edge {mapping[a]}-{mapping[b]}")
    return out


def is_list_homomorphism(inst: Instance, mapping: Sequence[int]) -> bool:
    return not witness_problems(inst, mapping)
