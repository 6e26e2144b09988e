"""Target analysis: bi-arc and strong-split tests, the recursion tree, i*(H)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .decompositions import (
    BDecomposition,
    BipartiteDecomposition,
    BPDecomposition,
    FDecomposition,
    Factors,
    GeneralDecomposition,
    factors,
    find_bipartite_decomposition,
    find_general_decomposition,
    is_strong_split_sets,
)
from .errors import PreconditionViolated
from .graph import (
    X,
    Y,
    Bipartition,
    Graph,
    associated_bipartite,
    bits,
    components,
    incomparability_number,
    is_bipartite,
    to_mask,
)
from .obstructions import Obstruction, find_obstruction

LEAF_TAGS = ("BiArc", "BipartitePoly", "BipartiteUndecomposable", "StrongSplit", "Undecomposable")


@dataclass(frozen=True)
class StrongSplitPartition:
    B: frozenset[int]
    P: frozenset[int]


def is_strong_split(h: Graph) -> StrongSplitPartition | None:
    """Loopless vertices independent and looped vertices a reflexive clique."""
    res = is_strong_split_sets(h)
    return StrongSplitPartition(*res) if res else None


def bi_arc_obstruction(h: Graph) -> Obstruction | None:
    """An obstruction in some component of H* (in H* numbering), if any."""
    h_star, _ = associated_bipartite(h)
    star_sides = is_bipartite(h_star)
    for comp in components(h_star):
        if bin(comp).count("1") < 6:
            continue
        sub, old = h_star.induced(bits(comp))
        ob = find_obstruction(sub, Bipartition(tuple(star_sides.side[v] for v in old)))
        if ob is not None:
            return _relabel_obstruction(ob, old)
    return None


def _relabel_obstruction(ob: Obstruction, old) -> Obstruction:
    f = lambda seq: tuple(old[v] for v in seq)
    return Obstruction(ob.kind, f(ob.cycle), ob.k, f(ob.u), f(ob.v), tuple(f(p) for p in ob.paths))


def is_bi_arc(h: Graph) -> bool:
    return bi_arc_obstruction(h) is None


# ---------------------------------------------------------------------------
# recursion tree

@dataclass
class RecursionNode:
    """One target in the recursion.

    kind is a leaf tag, "decomposed" (children = (h1 node, h2 node)), or
    "components" (children are the components, `parts` their vertex tuples).
    """

    graph: Graph
    kind: str
    sides: Bipartition | None = None
    decomposition: GeneralDecomposition | None = None
    factors: Factors | None = None
    children: tuple["RecursionNode", ...] = ()
    parts: tuple[tuple[int, ...], ...] = ()
    obstruction: Obstruction | None = None
    strong_split: StrongSplitPartition | None = None

    @property
    def is_leaf(self) -> bool:
        return self.kind in LEAF_TAGS

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def node_count(self) -> int:
        return sum(1 for _ in self.walk())

    def leaves(self):
        return [n for n in self.walk() if n.is_leaf]

    def outline(self, indent: int = 0) -> list[str]:
        pad = "  " * indent
        label = self.kind
        if self.decomposition is not None:
            label += f" via {self.decomposition.kind}"
        lines = [f"{pad}{label} |V|={self.graph.n}"]
        for c in self.children:
            lines.extend(c.outline(indent + 1))
        return lines


def _analyse_connected(h: Graph, cache: dict) -> RecursionNode:
    key = h.masks
    if key in cache:
        return cache[key]
    sides = is_bipartite(h)
    if sides is not None:
        ob = find_obstruction(h, sides) if h.n >= 6 else None
        if ob is None:
            node = RecursionNode(h, "BipartitePoly", sides)
        else:
            dec = find_bipartite_decomposition(h, sides)
            if dec is None:
                node = RecursionNode(h, "BipartiteUndecomposable", sides, obstruction=ob)
            else:
                node = _decomposed(h, dec, sides, cache)
    else:
        ob = bi_arc_obstruction(h)
        split = is_strong_split(h)
        if ob is None:
            node = RecursionNode(h, "BiArc")
        elif split is not None:
            node = RecursionNode(h, "StrongSplit", strong_split=split, obstruction=ob)
        else:
            dec = find_general_decomposition(h)
            if dec is None:
                node = RecursionNode(h, "Undecomposable", obstruction=ob)
            else:
                node = _decomposed(h, dec, None, cache)
    cache[key] = node
    return node


def _decomposed(h, dec, sides, cache) -> RecursionNode:
    fac = factors(h, dec, sides)
    kids = (analyse_target(fac.h1, cache), analyse_target(fac.h2, cache))
    return RecursionNode(h, "decomposed", sides, dec, fac, kids)


def analyse_target(h: Graph, cache: dict | None = None) -> RecursionNode:
    """Recursion tree of a possibly disconnected target."""
    cache = {} if cache is None else cache
    comps = components(h)
    if len(comps) == 1:
        return _analyse_connected(h, cache)
    kids, parts = [], []
    for comp in comps:
        sub, old = h.induced(bits(comp))
        kids.append(_analyse_connected(sub, cache))
        parts.append(old)
    return RecursionNode(h, "components", is_bipartite(h), children=tuple(kids), parts=tuple(parts))


def build_recursion_tree(h: Graph) -> RecursionNode:
    if len(components(h)) != 1:
        raise PreconditionViolated("recursion tree needs a connected target")
    return analyse_target(h)


# ---------------------------------------------------------------------------
# H'* inside H*

def _pick_pair(h: Graph, a: frozenset, b: frozenset):
    """Representatives of two groups, adjacent when any edge joins them."""
    for x in sorted(a):
        for y in sorted(b):
            if h.has_edge(x, y):
                return x, y
    return (min(a) if a else None), (min(b) if b else None)


def _looped_or_min(h: Graph, group: frozenset) -> int:
    for v in sorted(group):
        if h.has_loop(v):
            return v
    return min(group)


def _child_images(node: RecursionNode, image):
    """Images (prime, doubleprime) in the root H* for the vertices of each child."""
    if node.kind == "components":
        for part, child in zip(node.parts, node.children):
            yield child, [image[v] for v in part]
        return
    fac = node.factors
    h = node.graph
    yield node.children[0], [image[v] for v in fac.h1_origin]
    reps = {}
    dec = node.decomposition
    names = fac.contracted
    pairs = {"dX": "dY", "p": "b", "b1": "b2"}
    for first, second in pairs.items():
        ga = fac.h2_origin[names[first]] if first in names else frozenset()
        gb = fac.h2_origin[names[second]] if second in names else frozenset()
        if not ga and not gb:
            continue
        x, y = _pick_pair(h, ga, gb)
        if first == "p" and x is not None:
            # every vertex of P has a loop, so any one represents p
            pass
        if x is not None:
            reps[names[first]] = (image[x][0], image[x][1])
        if y is not None:
            reps[names[second]] = (image[y][0], image[y][1])
    if "f" in names:
        grp = fac.h2_origin[names["f"]]
        looped = [v for v in sorted(grp) if h.has_loop(v)]
        if looped:
            a = looped[0]
            reps[names["f"]] = (image[a][0], image[a][1])
        else:
            edge = next(((a, b) for a in sorted(grp) for b in sorted(grp) if h.has_edge(a, b)), None)
            if edge is None:
                a = min(grp)
                reps[names["f"]] = (image[a][0], image[a][1])
            else:
                a, b = edge
                reps[names["f"]] = (image[a][0], image[b][1])
    h2_images = []
    for i, grp in enumerate(fac.h2_origin):
        if i in reps:
            h2_images.append(reps[i])
        else:
            (v,) = tuple(grp)
            h2_images.append(image[v])
    yield node.children[1], h2_images


def hstar_embeddings(root: RecursionNode):
    """Yield (node, image) with image[v] = (v', v'') placed inside the root's H*."""
    n = root.graph.n
    start = [(v, n + v) for v in range(n)]
    stack = [(root, start)]
    while stack:
        node, image = stack.pop()
        yield node, image
        if node.is_leaf:
            continue
        for child, img in _child_images(node, image):
            stack.append((child, img))


def embedding_problems(root_star: Graph, node_graph: Graph, image) -> list[str]:
    """Check that image embeds node_graph* into root_star as an induced subgraph."""
    n = node_graph.n
    flat = [image[v][0] for v in range(n)] + [image[v][1] for v in range(n)]
    out = []
    if len(set(flat)) != len(flat):
        out.append("embedding is not injective")
    star, _ = associated_bipartite(node_graph)
    for i in range(2 * n):
        for j in range(i + 1, 2 * n):
            if star.has_edge(i, j) != root_star.has_edge(flat[i], flat[j]):
                out.append(f"pair {i},{j} adjacency differs")
                return out
    return out


# ---------------------------------------------------------------------------
# i*

def _i_star_bipartite(h: Graph, sides: Bipartition) -> int:
    """Largest i(H') over connected, undecomposable, non-co-circular-arc H' in h.

    When S has a decomposition (D, N, R), a connected undecomposable H'
    inside S either lies in D, or meets D in at most one vertex per class.
    All D_X vertices see exactly N_Y outside D (and D_Y sees N_X), so the
    second kind embeds into N + R plus one D_X and one D_Y vertex, where only
    their mutual adjacency matters. That leaves at most three smaller sets
    to recurse on. Returns 0 when no such H' exists.
    """
    memo: dict[int, int] = {}
    side = sides.side

    def rec(S: int) -> int:
        if S in memo:
            return memo[S]
        comps = components(h, S)
        if len(comps) > 1:
            best = max(rec(c) for c in comps)
            memo[S] = best
            return best
        sub, old = h.induced(bits(S))
        sub_sides = Bipartition(tuple(side[v] for v in old))
        dec = find_bipartite_decomposition(sub, sub_sides)
        if dec is None:
            if sub.n >= 6 and find_obstruction(sub, sub_sides) is not None:
                best = incomparability_number(sub, sub_sides)
            else:
                best = 0
            memo[S] = best
            return best
        D = [old[v] for v in dec.D]
        base = to_mask(old[v] for v in dec.N | dec.R)
        dx = [v for v in D if side[v] == X]
        dy = [v for v in D if side[v] == Y]
        candidates = [to_mask(D)]
        if dx and dy:
            adj_pair = next(((a, b) for a in dx for b in dy if h.has_edge(a, b)), None)
            non_pair = next(((a, b) for a in dx for b in dy if not h.has_edge(a, b)), None)
            for pair in (adj_pair, non_pair):
                if pair:
                    candidates.append(base | (1 << pair[0]) | (1 << pair[1]))
        else:
            candidates.append(base | (1 << (dx or dy)[0]))
        best = max(rec(c) for c in candidates)
        memo[S] = best
        return best

    return rec((1 << h.n) - 1) if h.n else 0


def compute_i_star(h: Graph) -> int:
    """i*(H): the exponent base guaranteed by the decomposition algorithm.

    For bipartite H the scan runs on H itself; otherwise on H*. A target
    without any qualifying induced subgraph (a polynomial case) gets 1.
    """
    if len(components(h)) != 1:
        raise PreconditionViolated("i* is only defined here for connected targets")
    sides = is_bipartite(h)
    if sides is not None:
        value = _i_star_bipartite(h, sides)
    else:
        h_star, twins = associated_bipartite(h)
        value = _i_star_bipartite(h_star, twins.bipartition)
    return max(value, 1)
