"""Graphs with loops, bipartitions, neighbourhood comparability and H*."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

X, Y = 0, 1


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of set bits in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


class Graph:
    """Undirected graph on vertices 0..n-1; v in N(v) encodes a loop at v.

    Adjacency is held as one integer bitmask per vertex, which keeps
    neighbourhood containment tests to a couple of machine operations.
    """

    __slots__ = ("n", "masks", "_hash")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        masks = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        self.n = n
        self.masks = tuple(masks)
        self._hash = None

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "Graph":
        g = cls.__new__(cls)
        g.n = len(masks)
        g.masks = tuple(masks)
        g._hash = None
        for u, m in enumerate(g.masks):
            for v in bits(m):
                if v >= g.n or not (g.masks[v] >> u) & 1:
                    raise ValueError("adjacency masks are not symmetric")
        return g

    def __eq__(self, other):
        return isinstance(other, Graph) and self.masks == other.masks

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.masks)
        return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, edges={list(self.edges())})"

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(bits(m)) for m in self.masks)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(bits(self.masks[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.masks[u] >> v) & 1)

    def has_loop(self, v: int) -> bool:
        return bool((self.masks[v] >> v) & 1)

    @property
    def loop_mask(self) -> int:
        return to_mask(v for v in range(self.n) if self.has_loop(v))

    def edges(self) -> Iterator[tuple[int, int]]:
        """Every edge once as (u, v) with u <= v; loops appear as (v, v)."""
        for u, m in enumerate(self.masks):
            for v in bits(m >> u):
                yield u, u + v

    def num_edges(self) -> int:
        return sum(1 for _ in self.edges())

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph and the tuple mapping new index -> old index."""
        old = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(old)}
        keep = to_mask(old)
        masks = []
        for v in old:
            masks.append(to_mask(index[w] for w in bits(self.masks[v] & keep)))
        return Graph.from_masks(masks), old

    def neighborhood_of_set(self, vertices: Iterable[int]) -> int:
        """Union of neighbourhoods as a mask (open, loops included)."""
        out = 0
        for v in vertices:
            out |= self.masks[v]
        return out

    def closed_neighborhood_of_set(self, vertices: Iterable[int]) -> int:
        vs = list(vertices)
        return self.neighborhood_of_set(vs) | to_mask(vs)

    def is_connected(self, within: int | None = None) -> bool:
        comps = components(self, within)
        return len(comps) <= 1


def components(g: Graph, within: int | None = None) -> list[int]:
    """Connected components (as masks) of g restricted to `within`.

    Components are ordered by their lowest vertex.
    """
    remaining = ((1 << g.n) - 1) if within is None else within
    out = []
    while remaining:
        start = remaining & -remaining
        comp = start
        frontier = start
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= g.masks[v]
            nxt &= remaining & ~comp
            comp |= nxt
            frontier = nxt
        out.append(comp)
        remaining &= ~comp
    return out


@dataclass(frozen=True)
class Bipartition:
    """Side label per vertex, X = 0 and Y = 1."""

    side: tuple[int, ...]

    @property
    def x_mask(self) -> int:
        return to_mask(v for v, s in enumerate(self.side) if s == X)

    @property
    def y_mask(self) -> int:
        return to_mask(v for v, s in enumerate(self.side) if s == Y)

    def class_mask(self, side: int) -> int:
        return self.x_mask if side == X else self.y_mask

    @property
    def classes(self) -> tuple[frozenset[int], frozenset[int]]:
        return (frozenset(bits(self.x_mask)), frozenset(bits(self.y_mask)))


def is_bipartite(g: Graph) -> Bipartition | None:
    """Two-colouring with the lowest vertex of each component on side X."""
    side = [-1] * g.n
    for s in range(g.n):
        if side[s] != -1:
            continue
        side[s] = X
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in bits(g.masks[u]):
                if side[v] == -1:
                    side[v] = 1 - side[u]
                    queue.append(v)
                elif side[v] == side[u]:
                    return None
    return Bipartition(tuple(side))


def comparable(g: Graph, u: int, v: int) -> bool:
    """True iff N(u) and N(v) are nested (equality counts)."""
    a, b = g.masks[u], g.masks[v]
    return (a & ~b) == 0 or (b & ~a) == 0


def is_incomparable_set(g: Graph, vertices: Iterable[int]) -> bool:
    return all(not comparable(g, u, v) for u, v in combinations(list(vertices), 2))


def max_incomparable_set(g: Graph, within: Iterable[int]) -> frozenset[int]:
    """Largest pairwise-incomparable subset of `within`.

    Dilworth: a maximum antichain of the containment order equals the
    number of elements minus a maximum matching in the strict-containment
    split graph; the antichain is read off a Konig vertex cover.
    """
    reps: dict[int, int] = {}
    for v in sorted(set(within)):
        reps.setdefault(g.masks[v], v)
    elems = sorted(reps.values())
    if not elems:
        return frozenset()
    m = len(elems)
    nb = [g.masks[v] for v in elems]
    # strict containment: an arc i -> j when N(i) is a proper subset of N(j)
    succ = [[j for j in range(m) if j != i and (nb[i] & ~nb[j]) == 0] for i in range(m)]
    match_right = [-1] * m
    match_left = [-1] * m

    def augment(i, seen):
        for j in succ[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match_right[j] == -1 or augment(match_right[j], seen):
                match_right[j] = i
                match_left[i] = j
                return True
        return False

    for i in range(m):
        augment(i, [False] * m)

    # alternating reachability from unmatched left vertices
    left_seen = [False] * m
    right_seen = [False] * m
    queue = deque(i for i in range(m) if match_left[i] == -1)
    for i in queue:
        left_seen[i] = True
    while queue:
        i = queue.popleft()
        for j in succ[i]:
            if right_seen[j] or match_left[i] == j:
                continue
            right_seen[j] = True
            k = match_right[j]
            if k != -1 and not left_seen[k]:
                left_seen[k] = True
                queue.append(k)
    # cover = unreached left + reached right; antichain avoids both copies
    chosen = [elems[i] for i in range(m) if left_seen[i] and not right_seen[i]]
    return frozenset(chosen)


def incomparability_number(g: Graph, bip: Bipartition | None = None) -> int:
    """i(H): largest incomparable set inside one bipartition class."""
    bip = bip or is_bipartite(g)
    if bip is None:
        raise ValueError("incomparability number needs a bipartite graph")
    return max(
        len(max_incomparable_set(g, bits(bip.x_mask))),
        len(max_incomparable_set(g, bits(bip.y_mask))),
    )


@dataclass(frozen=True)
class TwinMap:
    """Vertex u of H becomes u' = u and u'' = n + u in H*."""

    n: int

    def prime(self, u: int) -> int:
        return u

    def doubleprime(self, u: int) -> int:
        return self.n + u

    def origin(self, w: int) -> tuple[int, int]:
        """(vertex of H, side) with side X for primes and Y for doubleprimes."""
        return (w, X) if w < self.n else (w - self.n, Y)

    def twin(self, w: int) -> int:
        return w + self.n if w < self.n else w - self.n

    @property
    def bipartition(self) -> Bipartition:
        return Bipartition(tuple([X] * self.n + [Y] * self.n))


def associated_bipartite(h: Graph) -> tuple[Graph, TwinMap]:
    """H* with u'v'' adjacent iff uv is an edge (a loop gives u'u'')."""
    n = h.n
    masks = [0] * (2 * n)
    for u in range(n):
        masks[u] = h.masks[u] << n
        masks[n + u] = h.masks[u]
    return Graph.from_masks(masks), TwinMap(n)


def is_isomorphic_small(a: Graph, b: Graph) -> bool:
    """Brute-force isomorphism with degree/loop refinement; meant for n <= 12."""
    if a.n != b.n or a.num_edges() != b.num_edges():
        return False

    def sig(g, v):
        return (bin(g.masks[v]).count("1"), g.has_loop(v))

    if sorted(sig(a, v) for v in range(a.n)) != sorted(sig(b, v) for v in range(b.n)):
        return False
    n = a.n
    image = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            return True
        for c in range(n):
            if used[c] or sig(a, i) != sig(b, c):
                continue
            ok = all(a.has_edge(i, j) == b.has_edge(c, image[j]) for j in range(i))
            if not ok:
                continue
            image[i] = c
            used[c] = True
            if extend(i + 1):
                return True
            used[c] = False
        image[i] = -1
        return False

    return extend(0)


def cycle(k: int) -> Graph:
    return Graph(k, [(i, (i + 1) % k) for i in range(k)])


def path(k: int, reflexive: bool = False) -> Graph:
    edges = [(i, i + 1) for i in range(k - 1)]
    if reflexive:
        edges += [(i, i) for i in range(k)]
    return Graph(k, edges)


def complete(k: int, reflexive: bool = False) -> Graph:
    edges = list(combinations(range(k), 2))
    if reflexive:
        edges += [(i, i) for i in range(k)]
    return Graph(k, edges)


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def crown(k: int) -> Graph:
    """K_{k,k} minus a perfect matching; sides 0..k-1 and k..2k-1."""
    return Graph(2 * k, [(i, k + j) for i in range(k) for j in range(k) if i != j])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def layered_crowns(k: int, j: int) -> Graph:
    """Start from one crown and, j times, add a fresh crown whose first
    vertex is made complete to the opposite class of the current graph.

    The class bookkeeping keeps the result bipartite: the fresh crown's
    side is chosen so its attachment vertex lands opposite the class it
    is joined to.
    """
    base = crown(k)
    edges = list(base.edges())
    side = [X] * k + [Y] * k
    n = 2 * k
    for _ in range(j):
        offset = n
        edges += [(offset + a, offset + b) for a, b in base.edges()]
        # attachment vertex sits in Y of the new copy; join it to all of class X
        attach = offset + k
        edges += [(v, attach) for v in range(n) if side[v] == X]
        side += [X] * k + [Y] * k
        n += 2 * k
    return Graph(n, edges)
