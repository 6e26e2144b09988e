"""Tree (and path) decompositions: validation, min-fill heuristic, nice form."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import permutations

from .errors import InvalidDecomposition
from .graph import Graph, bits


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbors(self) -> list[list[int]]:
        out = [[] for _ in self.bags]
        for a, b in self.edges:
            out[a].append(b)
            out[b].append(a)
        return out

    def restrict(self, vertices: tuple[int, ...]) -> "TreeDecomposition":
        """Decomposition of the induced subgraph on `vertices` (renumbered)."""
        index = {v: i for i, v in enumerate(vertices)}
        bags = tuple(frozenset(index[v] for v in b if v in index) for b in self.bags)
        return TreeDecomposition(bags, self.edges).compact()

    def compact(self) -> "TreeDecomposition":
        """Contract tree edges whose one bag contains the other."""
        m = len(self.bags)
        parent = list(range(m))
        bag = list(self.bags)

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if bag[ra] <= bag[rb]:
                parent[ra] = rb
            elif bag[rb] <= bag[ra]:
                parent[rb] = ra
        roots = sorted({find(a) for a in range(m)})
        index = {r: i for i, r in enumerate(roots)}
        edges = []
        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                edges.append((index[ra], index[rb]))
        return TreeDecomposition(tuple(bag[r] for r in roots), tuple(edges))


def decomposition_problems(g: Graph, td: TreeDecomposition, path: bool = False) -> list[str]:
    out = []
    m = len(td.bags)
    if g.n and m == 0:
        return ["no bags"]
    for a, b in td.edges:
        if not (0 <= a < m and 0 <= b < m) or a == b:
            return [f"tree edge ({a}, {b}) is invalid"]
    if len(td.edges) != max(m - 1, 0):
        out.append("bag graph is not a tree (wrong edge count)")
    nb = td.neighbors()
    if m:
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in nb[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != m:
            out.append("bag graph is not connected")
    if path and any(len(x) > 2 for x in nb):
        out.append("decomposition is not a path")
    for b in td.bags:
        if any(not 0 <= v < g.n for v in b):
            out.append("bag names an unknown vertex")
            return out
    holders = [[] for _ in range(g.n)]
    for i, b in enumerate(td.bags):
        for v in b:
            holders[v].append(i)
    for v in range(g.n):
        if not holders[v]:
            out.append(f"vertex {v} is in no bag")
            continue
        own = set(holders[v])
        seen = {holders[v][0]}
        stack = [holders[v][0]]
        while stack:
            x = stack.pop()
            for y in nb[x]:
                if y in own and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(own):
            out.append(f"bags holding vertex {v} are not connected")
    for u, v in g.edges():
        if u == v:
            continue
        if not set(holders[u]) & set(holders[v]):
            out.append(f"edge {u}-{v} is in no bag")
    return out


def validate(g: Graph, td: TreeDecomposition, path: bool = False) -> None:
    problems = decomposition_problems(g, td, path)
    if problems:
        raise InvalidDecomposition("; ".join(problems[:5]))


def _fill_in(adj: list[set], v: int) -> int:
    nb = list(adj[v])
    missing = 0
    for i, a in enumerate(nb):
        aa = adj[a]
        for b in nb[i + 1:]:
            if b not in aa:
                missing += 1
    return missing


def min_fill_order(g: Graph) -> list[int]:
    adj = [set(bits(m)) - {v} for v, m in enumerate(g.masks)]
    fill = [_fill_in(adj, v) for v in range(g.n)]
    heap = [(fill[v], v) for v in range(g.n)]
    heapq.heapify(heap)
    done = [False] * g.n
    order = []
    while heap:
        f, v = heapq.heappop(heap)
        if done[v] or f != fill[v]:
            continue
        done[v] = True
        order.append(v)
        nb = list(adj[v])
        for i, a in enumerate(nb):
            adj[a].discard(v)
            for b in nb[i + 1:]:
                if b not in adj[a]:
                    adj[a].add(b)
                    adj[b].add(a)
        touched = set(nb)
        for a in nb:
            touched |= adj[a]
        for w in touched:
            if not done[w]:
                nf = _fill_in(adj, w)
                if nf != fill[w]:
                    fill[w] = nf
                    heapq.heappush(heap, (nf, w))
        adj[v] = set()
    return order


def from_elimination_order(g: Graph, order: list[int]) -> TreeDecomposition:
    if g.n == 0:
        return TreeDecomposition((frozenset(),), ())
    pos = {v: i for i, v in enumerate(order)}
    adj = [set(bits(m)) - {v} for v, m in enumerate(g.masks)]
    bags = []
    later_nbrs = []
    for v in order:
        nb = {w for w in adj[v] if pos[w] > pos[v]}
        later_nbrs.append(nb)
        bags.append(frozenset(nb | {v}))
        nbl = list(nb)
        for i, a in enumerate(nbl):
            for b in nbl[i + 1:]:
                adj[a].add(b)
                adj[b].add(a)
    edges = []
    roots = []
    for i, v in enumerate(order):
        nb = later_nbrs[i]
        if nb:
            parent = min(pos[w] for w in nb)
            edges.append((i, parent))
        else:
            roots.append(i)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(tuple(bags), tuple(edges))


def min_fill_tree_decomposition(g: Graph) -> TreeDecomposition:
    """Valid (not necessarily optimal) decomposition from greedy min-fill elimination."""
    td = from_elimination_order(g, min_fill_order(g))
    return td


# ---------------------------------------------------------------------------
# nice decompositions

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass(frozen=True)
class NiceDecomposition:
    """Nodes listed children-first; the last node is the root."""

    kinds: tuple[str, ...]
    vertex: tuple[int, ...]          # introduced/forgotten vertex, -1 otherwise
    children: tuple[tuple[int, ...], ...]
    bags: tuple[tuple[int, ...], ...]  # sorted

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


def make_nice(td: TreeDecomposition, root: int = 0) -> NiceDecomposition:
    kinds, vertex, children, bags = [], [], [], []

    def add(kind, v, kids, bag):
        kinds.append(kind)
        vertex.append(v)
        children.append(tuple(kids))
        bags.append(tuple(sorted(bag)))
        return len(kinds) - 1

    def chain(node, frm: frozenset, to: frozenset):
        cur = set(frm)
        for v in sorted(frm - to):
            cur.discard(v)
            node = add(FORGET, v, [node], cur)
        for v in sorted(to - frm):
            cur.add(v)
            node = add(INTRODUCE, v, [node], cur)
        return node

    nb = td.neighbors()
    # iterative post-order from the root
    parent = {root: -1}
    order = []
    stack = [root]
    while stack:
        x = stack.pop()
        order.append(x)
        for y in nb[x]:
            if y not in parent:
                parent[y] = x
                stack.append(y)
    built = {}
    for x in reversed(order):
        bag = td.bags[x]
        kids = [y for y in nb[x] if parent.get(y) == x]
        if not kids:
            node = add(LEAF, -1, [], ())
            built[x] = chain(node, frozenset(), bag)
            continue
        branches = [chain(built[y], td.bags[y], bag) for y in kids]
        while len(branches) > 1:
            a, b = branches.pop(), branches.pop()
            branches.append(add(JOIN, -1, [a, b], bag))
        built[x] = branches[0]
    return NiceDecomposition(tuple(kinds), tuple(vertex), tuple(children), tuple(bags))


def nice_problems(g: Graph, nice: NiceDecomposition) -> list[str]:
    """Structural check of a nice decomposition (each node kind obeys its rule)."""
    out = []
    for i, kind in enumerate(nice.kinds):
        bag = set(nice.bags[i])
        kids = nice.children[i]
        if kind == LEAF and (kids or bag):
            out.append(f"leaf {i} malformed")
        elif kind == INTRODUCE and set(nice.bags[kids[0]]) | {nice.vertex[i]} != bag:
            out.append(f"introduce {i} malformed")
        elif kind == FORGET and set(nice.bags[kids[0]]) - {nice.vertex[i]} != bag:
            out.append(f"forget {i} malformed")
        elif kind == JOIN and any(set(nice.bags[k]) != bag for k in kids):
            out.append(f"join {i} malformed")
        if any(k >= i for k in kids):
            out.append(f"node {i} precedes its child")
    # back to an ordinary decomposition and validate it
    edges = tuple((k, i) for i in range(len(nice.kinds)) for k in nice.children[i])
    out += decomposition_problems(g, TreeDecomposition(tuple(frozenset(b) for b in nice.bags), edges))
    return out


# ---------------------------------------------------------------------------
# path decompositions for small graphs

def path_decomposition_from_order(g: Graph, order) -> TreeDecomposition:
    """Bags X_i = {v_i} plus earlier vertices with a neighbour at or after v_i."""
    pos = {v: i for i, v in enumerate(order)}
    last_nbr = {v: max([pos[w] for w in bits(g.masks[v]) if w != v] + [pos[v]]) for v in order}
    bags = []
    for i, v in enumerate(order):
        bag = {v} | {w for w in order[:i] if last_nbr[w] >= i}
        bags.append(frozenset(bag))
    edges = tuple((i, i + 1) for i in range(len(bags) - 1))
    if not bags:
        bags = [frozenset()]
    return TreeDecomposition(tuple(bags), edges)


def exact_path_decomposition(g: Graph, max_vertices: int = 9) -> TreeDecomposition:
    """Minimum-width path decomposition by trying every vertex order."""
    if g.n > max_vertices:
        raise ValueError(f"exhaustive pathwidth limited to {max_vertices} vertices")
    best = None
    for order in permutations(range(g.n)):
        pd = path_decomposition_from_order(g, order)
        if best is None or pd.width < best.width:
            best = pd
    return best if best is not None else TreeDecomposition((frozenset(),), ())
