"""Hardness gadgets over bipartite targets and the k-colouring reduction.

Walk families are found by breadth-first search over the joint positions
of all walks; every gadget is built from path gadgets of such families (or
from the fixed OR_3 drawings for C6 and C8) and certified by checking, for
each assignment of the interface, whether it extends to the whole gadget.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .decompositions import find_bipartite_decomposition, find_general_decomposition
from .errors import BudgetExceeded, PreconditionViolated, SearchExhausted
from .graph import (
    X,
    Y,
    Bipartition,
    Graph,
    TwinMap,
    associated_bipartite,
    bits,
    components,
    is_bipartite,
    is_incomparable_set,
    max_incomparable_set,
    to_mask,
)
from .instance import Instance
from .obstructions import Obstruction, find_obstruction
from .solver import dp_solve, prune_lists
from .treedec import (
    TreeDecomposition,
    exact_path_decomposition,
    min_fill_order,
    min_fill_tree_decomposition,
    path_decomposition_from_order,
    validate,
)

Walk = tuple[int, ...]

DEFAULT_TUPLE_BUDGET = 1 << 14

# ---------------------------------------------------------------------------
# walks


def is_walk(h: Graph, p: Sequence[int]) -> bool:
    return len(p) > 0 and all(h.has_edge(a, b) for a, b in zip(p, p[1:]))


def reverse(p: Sequence[int]) -> Walk:
    return tuple(reversed(p))


def compose(p: Sequence[int], q: Sequence[int]) -> Walk:
    """p followed by q; q must start where p ends."""
    if p[-1] != q[0]:
        raise PreconditionViolated("walks do not meet: cannot compose")
    return tuple(p) + tuple(q[1:])


def avoids(h: Graph, p: Sequence[int], q: Sequence[int], sides: Bipartition | None = None) -> bool:
    """p avoids q: equal lengths, same class, p1 != q1 and no edge p_i q_{i+1}.

    The class condition is only checked when h is bipartite.
    """
    if len(p) != len(q) or not p or p[0] == q[0]:
        return False
    sides = sides or is_bipartite(h)
    if sides is not None and sides.side[p[0]] != sides.side[q[0]]:
        return False
    return not any(h.has_edge(p[i], q[i + 1]) for i in range(len(p) - 1))


def length_cap(h: Graph) -> int:
    return 4 * h.n * h.n


def _private_neighbour_problems(h: Graph, walks, groups, two_way: bool) -> list[str]:
    """If P avoids Q then q2 is a neighbour of q1 but not of p1."""
    out = []
    for i, p in enumerate(walks):
        for j, q in enumerate(walks):
            if groups[i] == groups[j] or (groups[i] == 1 and not two_way):
                continue
            if len(q) >= 2 and (not h.has_edge(q[0], q[1]) or h.has_edge(p[0], q[1])):
                out.append(f"walk {j} has no private second vertex against walk {i}")
    return out


def find_avoiding_walks(
    h: Graph,
    starts: Sequence[int],
    ends: Sequence[int],
    groups: Sequence[int],
    two_way: bool = False,
    within: int | None = None,
    min_length: int = 2,
) -> tuple[Walk, ...] | None:
    """Shortest equal-length walks starts[i] -> ends[i] where group 0 avoids group 1.

    With two_way the groups avoid each other in both directions. The search
    runs over tuples of current positions, one synchronised step at a time;
    walks of one group heading to the same end move together once they meet,
    which loses nothing since constraints only link different groups.
    Returns None when no family exists at any length.
    """
    k = len(starts)
    if not (len(ends) == len(groups) == k):
        raise PreconditionViolated("starts, ends and groups must have equal length")
    allowed = (1 << h.n) - 1 if within is None else within
    for v in list(starts) + list(ends):
        if not (allowed >> v) & 1:
            return None
    a_idx = [i for i in range(k) if groups[i] == 0]
    b_idx = [i for i in range(k) if groups[i] == 1]
    if {starts[i] for i in a_idx} & {starts[i] for i in b_idx}:
        return None
    masks = h.masks
    start = (tuple(starts), 0)
    goal = tuple(ends)
    parent: dict = {start: None}
    queue = deque([start])
    found = None
    bound = 1
    for _ in range(k):
        bound *= bin(allowed).count("1")
    while queue:
        state = queue.popleft()
        pos, steps = state
        if steps >= min_length and pos == goal:
            found = state
            break
        near_a = 0
        for i in a_idx:
            near_a |= masks[pos[i]]
        near_b = 0
        if two_way:
            for i in b_idx:
                near_b |= masks[pos[i]]
        clusters: dict = {}
        for i in range(k):
            clusters.setdefault((groups[i], ends[i], pos[i]), []).append(i)
        keys = list(clusters)
        options = []
        for grp, _, p in keys:
            opts = masks[p] & allowed & ~(near_a if grp == 1 else near_b)
            if not opts:
                break
            options.append(tuple(bits(opts)))
        else:
            nsteps = min(steps + 1, min_length)
            for choice in product(*options):
                nxt = [0] * k
                for key, c in zip(keys, choice):
                    for i in clusters[key]:
                        nxt[i] = c
                ns = (tuple(nxt), nsteps)
                if ns not in parent:
                    parent[ns] = state
                    queue.append(ns)
    assert len(parent) <= bound * (min_length + 1), "joint state count exceeds |V|^k bound"
    if found is None:
        return None
    trail = []
    state = found
    while state is not None:
        trail.append(state[0])
        state = parent[state]
    trail.reverse()
    walks = tuple(tuple(t[i] for t in trail) for i in range(k))
    # a solution found by search is re-checked against the definitions
    sides = is_bipartite(h)
    for i in a_idx:
        for j in b_idx:
            assert avoids(h, walks[i], walks[j], sides), "search returned non-avoiding walks"
            if two_way:
                assert avoids(h, walks[j], walks[i], sides), "search returned non-avoiding walks"
    assert not _private_neighbour_problems(h, walks, groups, two_way)
    return walks


@dataclass(frozen=True)
class WalkFamily:
    """Walks D_v for each v in S; group 0 ends at alpha, group 1 at beta."""

    starts: tuple[int, ...]
    walks: tuple[Walk, ...]
    groups: tuple[int, ...]
    alpha: int
    beta: int

    @property
    def length(self) -> int:
        return len(self.walks[0]) - 1


def find_avoiding_family(h: Graph, S: Sequence[int], a: int, b: int, alpha: int, beta: int) -> WalkFamily:
    """Walks from every v in S to alpha or beta, a to alpha and b to beta,
    each alpha-walk avoiding each beta-walk.

    Group assignments of the remaining starts are tried in a fixed order
    (binary counting, alpha first).
    """
    S = tuple(S)
    if a == b or a not in S or b not in S:
        raise PreconditionViolated("a and b must be distinct members of S")
    rest = [v for v in S if v not in (a, b)]
    for code in range(1 << len(rest)):
        grp = {a: 0, b: 1}
        for i, v in enumerate(rest):
            grp[v] = (code >> i) & 1
        groups = tuple(grp[v] for v in S)
        ends = tuple(alpha if g == 0 else beta for g in groups)
        walks = find_avoiding_walks(h, S, ends, groups)
        if walks is not None:
            return WalkFamily(S, walks, groups, alpha, beta)
    raise SearchExhausted(f"no avoiding walk family from {list(S)} to ({alpha}, {beta})")


# ---------------------------------------------------------------------------
# gadgets


@dataclass(frozen=True)
class Gadget:
    """A graph with H-lists and an ordered interface.

    With exact=True the interface relation must equal required_relation;
    otherwise it must contain it and miss every tuple in `forbidden`, and
    with `total` every value on the first interface vertex must occur.
    """

    name: str
    target: Graph
    graph: Graph
    lists: tuple[frozenset[int], ...]
    interface: tuple[int, ...]
    required_relation: frozenset[tuple[int, ...]]
    exact: bool = True
    forbidden: frozenset[tuple[int, ...]] = frozenset()
    total: bool = False
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def size(self) -> int:
        return self.graph.n

    def instance(self) -> Instance:
        return Instance(self.graph, self.lists, self.target)

    def with_lists(self, lists) -> "Gadget":
        return Gadget(self.name, self.target, self.graph, tuple(frozenset(x) for x in lists), self.interface,
                      self.required_relation, self.exact, self.forbidden, self.total, dict(self.meta))

    def interface_lists(self) -> list[frozenset[int]]:
        return [self.lists[v] for v in self.interface]


class _Assembly:
    """Vertices, lists and edges of a gadget under construction."""

    def __init__(self, target: Graph):
        self.target = target
        self.lists: list[frozenset[int]] = []
        self.edges: list[tuple[int, int]] = []

    def vertex(self, lst: Iterable[int]) -> int:
        self.lists.append(frozenset(lst))
        return len(self.lists) - 1

    def edge(self, a: int, b: int) -> None:
        self.edges.append((a, b))

    def add(self, gadget: Gadget, glue: dict[int, int] | None = None) -> list[int]:
        """Copy a gadget in; glue maps interface positions to existing vertices."""
        glue = glue or {}
        where = {}
        for pos, at in glue.items():
            v = gadget.interface[pos]
            if gadget.lists[v] != self.lists[at]:
                raise PreconditionViolated("identified vertices must carry equal lists")
            if v in where and where[v] != at:
                raise PreconditionViolated("interface vertex glued twice")
            where[v] = at
        out = []
        for v in range(gadget.graph.n):
            out.append(where[v] if v in where else self.vertex(gadget.lists[v]))
        for a, b in gadget.graph.edges():
            self.edge(out[a], out[b])
        return out

    def build(self, name, interface, required, exact=True, forbidden=(), total=False, **meta) -> Gadget:
        g = Graph(len(self.lists), self.edges)
        return Gadget(name, self.target, g, tuple(self.lists), tuple(interface), frozenset(required),
                      exact, frozenset(forbidden), total, meta)


def build_path_gadget(h: Graph, walks: Sequence[Sequence[int]], groups: Sequence[int] | None = None,
                      two_way: bool = False, name: str = "path") -> Gadget:
    """Path P on len(walk) vertices whose i-th list holds the i-th vertices.

    Input is the first vertex, output the last. The required relation
    holds the traced (start, end) pairs; with two groups a start of group 0
    may not reach an end of group 1 (and the other way round with two_way).
    """
    walks = [tuple(w) for w in walks]
    if not walks or len({len(w) for w in walks}) != 1:
        raise PreconditionViolated("path gadget needs walks of one common length")
    if any(not is_walk(h, w) for w in walks):
        raise PreconditionViolated("path gadget got a sequence that is not a walk")
    groups = tuple(groups) if groups is not None else (0,) * len(walks)
    sides = is_bipartite(h)
    A = [w for w, g in zip(walks, groups) if g == 0]
    B = [w for w, g in zip(walks, groups) if g == 1]
    if {w[0] for w in A} & {w[0] for w in B} or {w[-1] for w in A} & {w[-1] for w in B}:
        raise PreconditionViolated("groups share a start or an end")
    for p in A:
        for q in B:
            if not avoids(h, p, q, sides) or (two_way and not avoids(h, q, p, sides)):
                raise PreconditionViolated("a walk of the first group does not avoid one of the second")
    n = len(walks[0])
    asm = _Assembly(h)
    for i in range(n):
        asm.vertex(w[i] for w in walks)
    for i in range(n - 1):
        asm.edge(i, i + 1)
    traced = {(w[0], w[-1]) for w in walks}
    forbidden = {(p[0], q[-1]) for p in A for q in B}
    if two_way:
        forbidden |= {(q[0], p[-1]) for p in A for q in B}
    # with avoidance both ways, only start/end pairs inside one group can extend
    inside = {(p[0], q[-1]) for grp in (A, B) for p in grp for q in grp}
    exact = two_way and traced == inside
    return asm.build(name, (0, n - 1), traced, exact=exact, forbidden=forbidden,
                     walks=tuple(walks), groups=groups)


def _compose_relations(r: Iterable[tuple], s: Iterable[tuple]) -> frozenset:
    s_by = {}
    for a, b in s:
        s_by.setdefault(a, set()).add(b)
    return frozenset((a, c) for a, b in r for c in s_by.get(b, ()))


def compose_gadgets(first: Gadget, second: Gadget, name: str | None = None) -> Gadget:
    """Identify the output of `first` with the input of `second`."""
    asm = _Assembly(first.target)
    m1 = asm.add(first)
    m2 = asm.add(second, {0: m1[first.interface[1]]})
    rel = _compose_relations(first.required_relation, second.required_relation)
    return asm.build(name or f"{first.name}*{second.name}", (m1[first.interface[0]], m2[second.interface[1]]),
                     rel, exact=first.exact and second.exact)


def _binary_product(alpha: int, beta: int, k: int):
    return product((alpha, beta), repeat=k)


def or_relation(alpha: int, beta: int, k: int) -> frozenset:
    return frozenset(t for t in _binary_product(alpha, beta, k) if beta in t)


def nand_relation(alpha: int, beta: int) -> frozenset:
    return frozenset({(alpha, alpha), (alpha, beta), (beta, alpha)})


def neq_relation(S: Iterable[int]) -> frozenset:
    S = sorted(S)
    return frozenset((a, b) for a in S for b in S if a != b)


# ---------------------------------------------------------------------------
# relation computation and certification


@dataclass(frozen=True)
class Verification:
    ok: bool
    counterexample: tuple[int, ...] | None
    relation: frozenset
    problem: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _interface_tuples(gadget: Gadget, budget: int):
    lists = [sorted(x) for x in gadget.interface_lists()]
    count = 1
    for x in lists:
        count *= len(x)
    if count > budget:
        raise BudgetExceeded(f"{count} interface tuples exceed the budget of {budget}")
    return product(*lists)


def interface_relation(gadget: Gadget, budget: int = DEFAULT_TUPLE_BUDGET) -> frozenset:
    """Interface tuples that extend to a list homomorphism of the whole gadget.

    Each tuple is fixed on the interface, the lists are pruned by arc
    consistency, and the remainder is decided by the tree-decomposition DP.
    """
    g, h = gadget.graph, gadget.target
    td = min_fill_tree_decomposition(g)
    base = [to_mask(x) for x in gadget.lists]
    out = set()
    for tup in _interface_tuples(gadget, budget):
        masks = list(base)
        for v, c in zip(gadget.interface, tup):
            masks[v] &= 1 << c
        pruned = prune_lists(g, masks, h)
        if any(m == 0 for m in pruned):
            continue
        ok, _ = dp_solve(Instance.from_masks(g, pruned, h), td, witness=False)
        if ok:
            out.add(tup)
    return frozenset(out)


def interface_relation_by_enumeration(gadget: Gadget, budget: int = 10**7) -> frozenset:
    """Same relation from the brute-force enumeration of all list homomorphisms."""
    from .oracle import brute_force_lhom

    out = set()
    for m in brute_force_lhom(gadget.instance(), "enumerate", budget):
        out.add(tuple(m[v] for v in gadget.interface))
    return frozenset(out)


def verify_gadget(gadget: Gadget, relation: frozenset | None = None,
                  budget: int = DEFAULT_TUPLE_BUDGET) -> Verification:
    """Compare the realised interface relation with the gadget's demands.

    The counterexample is the first interface tuple (in sorted order) on
    which the two disagree.
    """
    rel = interface_relation(gadget, budget) if relation is None else relation
    req = gadget.required_relation
    for tup in _interface_tuples(gadget, budget):
        have = tup in rel
        if gadget.exact:
            if have != (tup in req):
                what = "extends but is not required" if have else "is required but does not extend"
                return Verification(False, tup, rel, f"tuple {tup} {what}")
        else:
            if tup in req and not have:
                return Verification(False, tup, rel, f"tuple {tup} is required but does not extend")
            if tup in gadget.forbidden and have:
                return Verification(False, tup, rel, f"tuple {tup} is forbidden but extends")
    if gadget.total and gadget.interface:
        seen = {t[0] for t in rel}
        for c in sorted(gadget.lists[gadget.interface[0]]):
            if c not in seen:
                return Verification(False, (c,), rel, f"input value {c} extends to nothing")
    return Verification(True, None, rel)


def certified(gadget: Gadget) -> Gadget:
    res = verify_gadget(gadget)
    if not res:
        raise AssertionError(f"gadget {gadget.name} failed certification: {res.problem}")
    gadget.meta["verified"] = True
    return gadget


# ---------------------------------------------------------------------------
# corners and fixed drawings for the two cycles

# lists and edges of the OR_3 drawings, by cycle index (w1 = 1); interface first
_C6_OR3 = {
    "lists": {"a": (1, 5), "b": (4, 6), "c": (1, 3), "d": (2, 4), "g": (1, 3, 5), "f": (4, 6), "e": (1, 5),
              "h": (2, 4), "i": (3, 5), "j": (4, 6), "k": (1, 5)},
    "edges": "ab bc cd dg gf fe gh hi ij jk",
    "interface": "aek",
}
_C8_OR3 = {
    "lists": {"a": (1, 5), "b": (6, 8), "c": (5, 7), "d": (4, 6, 8), "i": (1, 3, 5), "h": (2, 4), "g": (1, 3),
              "f": (4, 8), "e": (1, 5), "o": (2, 4), "n": (3, 5), "m": (4, 6), "l": (5, 7), "k": (4, 8),
              "j": (1, 5)},
    "edges": "ab bc cd di ih hg gf fe io on nm ml lk kj",
    "interface": "aej",
}
# (X, Y, X', Y') with alpha = w1 and beta = w5
_CYCLE_NEQ_WALKS = {
    6: ((1, 6, 5, 4, 5), (5, 4, 3, 2, 1), (1, 2, 3, 4, 5), (5, 6, 1, 2, 1)),
    8: ((1, 2, 3, 4, 5), (5, 6, 7, 8, 1), (1, 2, 3, 4, 5), (5, 6, 7, 8, 1)),
}


def _cycle_labels(ob: Obstruction, pair: tuple[int, int]) -> tuple[int, ...]:
    """The cycle read from alpha so that w5 is beta (either direction)."""
    w = ob.cycle
    n = len(w)
    alpha, beta = pair
    for s in range(n):
        for d in (1, -1):
            r = tuple(w[(s + d * i) % n] for i in range(n))
            if r[0] == alpha and r[4] == beta:
                return r
    raise PreconditionViolated(f"({alpha}, {beta}) is not a corner pair of {ob.summary()}")


def corner_pairs(ob: Obstruction) -> tuple[tuple[int, int], ...]:
    pairs = ob.corners()
    if ob.kind == "Asteroid":
        return pairs
    return pairs + tuple((b, a) for a, b in pairs)


def _check_pair(ob: Obstruction, pair) -> tuple[int, int]:
    pair = tuple(pair)
    if pair not in corner_pairs(ob):
        raise PreconditionViolated(f"{pair} is not a corner pair of {ob.summary()}")
    return pair


def third_corner(ob: Obstruction, pair) -> int:
    """gamma: w3 on the cycles, u_{k+1} (or v_{k+1}) on an asteroid."""
    if ob.kind != "Asteroid":
        return _cycle_labels(ob, pair)[2]
    return ob.u[ob.k + 1] if pair == (ob.u[0], ob.u[1]) else ob.v[ob.k + 1]


def cycle_or3_fixture(h: Graph, ob: Obstruction, pair) -> Gadget:
    """The fixed OR_3 drawing for an induced C6 or C8, relabelled to the pair."""
    spec = {"C6": _C6_OR3, "C8": _C8_OR3}.get(ob.kind)
    if spec is None:
        raise PreconditionViolated("fixed OR_3 drawings exist only for C6 and C8")
    r = _cycle_labels(ob, pair)
    asm = _Assembly(h)
    ids = {name: asm.vertex(r[i - 1] for i in lst) for name, lst in spec["lists"].items()}
    for e in spec["edges"].split():
        asm.edge(ids[e[0]], ids[e[1]])
    alpha, beta = pair
    return asm.build(f"OR3[{ob.kind}]", [ids[c] for c in spec["interface"]], or_relation(alpha, beta, 3))


def _within(ob: Obstruction) -> int:
    return to_mask(ob.vertices)


def _search(h, ob, starts, ends, groups, two_way):
    walks = find_avoiding_walks(h, starts, ends, groups, two_way=two_way, within=_within(ob))
    if walks is None:
        raise SearchExhausted(f"no avoiding walks {list(starts)} -> {list(ends)} inside {ob.summary()}")
    return walks


def build_neq2_gadget(h: Graph, ob: Obstruction, pair) -> Gadget:
    """NEQ on {alpha, beta}: two path gadgets sharing their ends."""
    alpha, beta = _check_pair(ob, pair)
    if ob.kind in ("C6", "C8"):
        r = _cycle_labels(ob, pair)
        Xw, Yw, Xp, Yp = (tuple(r[i - 1] for i in w) for w in _CYCLE_NEQ_WALKS[len(r)])
    else:
        Xw, Yw = _search(h, ob, (alpha, beta), (beta, alpha), (0, 1), False)
        Yp, Xp = _search(h, ob, (beta, alpha), (alpha, beta), (0, 1), False)
    p1 = build_path_gadget(h, (Xw, Yw), (0, 1))
    p2 = build_path_gadget(h, (Yp, Xp), (0, 1))
    asm = _Assembly(h)
    m1 = asm.add(p1)
    m2 = asm.add(p2, {0: m1[p1.interface[0]], 1: m1[p1.interface[1]]})
    return asm.build(f"NEQ2[{ob.kind}]", (m1[p1.interface[0]], m1[p1.interface[1]]),
                     {(alpha, beta), (beta, alpha)})


def _asteroid_or3(h: Graph, ob: Obstruction, pair) -> Gadget:
    alpha, beta = pair
    gamma = third_corner(ob, pair)
    # F realises {alpha alpha, beta alpha, beta beta}
    wa, wb1, wb2 = _search(h, ob, (alpha, beta, beta), (alpha, beta, gamma), (0, 1, 1), True)
    wa1, wa2, wb = _search(h, ob, (alpha, beta, gamma), (alpha, alpha, beta), (0, 0, 1), True)
    f1 = build_path_gadget(h, (wa, wb1, wb2), (0, 1, 1), two_way=True)
    f2 = build_path_gadget(h, (wa1, wa2, wb), (0, 0, 1), two_way=True)
    F = compose_gadgets(f1, f2, "F")
    asm = _Assembly(h)
    out = asm.vertex((alpha, beta, gamma))
    ins = []
    for c in (alpha, beta, gamma):
        a, b = [v for v in (alpha, beta, gamma) if v != c]
        xc, yc, zc = _search(h, ob, (alpha, alpha, beta), (a, b, c), (0, 0, 1), True)
        pc = build_path_gadget(h, (xc, yc, zc), (0, 0, 1), two_way=True)
        rc = compose_gadgets(F, pc, f"R({c})")
        m = asm.add(rc, {1: out})
        ins.append(m[rc.interface[0]])
    return asm.build("OR3[Asteroid]", ins, or_relation(alpha, beta, 3))


def build_or_gadget(h: Graph, obstruction: Obstruction, corner_pair, k: int) -> Gadget:
    """OR_k on {alpha, beta} (beta read as true): every tuple but alpha^k."""
    pair = _check_pair(obstruction, corner_pair)
    alpha, beta = pair
    if k < 2:
        raise PreconditionViolated("OR_k needs k >= 2")
    if obstruction.kind == "Asteroid":
        or3 = _asteroid_or3(h, obstruction, pair)
    else:
        or3 = cycle_or3_fixture(h, obstruction, pair)
    if k == 2:
        x2, x3 = or3.interface[1], or3.interface[2]
        return _identify(or3, x2, x3, f"OR2[{obstruction.kind}]", or_relation(alpha, beta, 2),
                         (or3.interface[0], x2))
    if k == 3:
        return or3
    neq = build_neq2_gadget(h, obstruction, pair)
    cur = or3
    for size in range(4, k + 1):
        asm = _Assembly(h)
        m = asm.add(cur)
        y = m[cur.interface[-1]]
        yp = asm.vertex((alpha, beta))
        asm.add(neq, {0: y, 1: yp})
        m3 = asm.add(or3, {0: yp})
        inter = [m[v] for v in cur.interface[:-1]] + [m3[or3.interface[1]], m3[or3.interface[2]]]
        cur = asm.build(f"OR{size}[{obstruction.kind}]", inter, or_relation(alpha, beta, size))
    return cur


def _identify(gadget: Gadget, keep: int, drop: int, name: str, relation, interface) -> Gadget:
    if gadget.lists[keep] != gadget.lists[drop]:
        raise PreconditionViolated("identified vertices must carry equal lists")
    old = [v for v in range(gadget.graph.n) if v != drop]
    index = {v: i for i, v in enumerate(old)}
    index[drop] = index[keep]
    edges = [(index[a], index[b]) for a, b in gadget.graph.edges()]
    g = Graph(len(old), edges)
    return Gadget(name, gadget.target, g, tuple(gadget.lists[v] for v in old), tuple(index[v] for v in interface),
                  frozenset(relation))


def build_nand_gadget(h: Graph, obstruction: Obstruction, corner_pair) -> Gadget:
    """NAND_2 = NEQ, then OR_2, then NEQ."""
    alpha, beta = _check_pair(obstruction, corner_pair)
    neq = build_neq2_gadget(h, obstruction, corner_pair)
    or2 = build_or_gadget(h, obstruction, corner_pair, 2)
    asm = _Assembly(h)
    x1 = asm.vertex((alpha, beta))
    x2 = asm.vertex((alpha, beta))
    m1 = asm.add(neq, {0: x1})
    z1 = m1[neq.interface[1]]
    m2 = asm.add(or2, {0: z1})
    z2 = m2[or2.interface[1]]
    asm.add(neq, {0: z2, 1: x2})
    return asm.build(f"NAND2[{obstruction.kind}]", (x1, x2), nand_relation(alpha, beta))


def _same_class(h: Graph, vertices) -> bool:
    sides = is_bipartite(h)
    return sides is not None and len({sides.side[v] for v in vertices}) == 1


def build_distinguisher(h: Graph, S: Sequence[int], a: int, b: int, corner_pair) -> Gadget:
    """D_{a/b}: input list S, output list {alpha, beta}; a may not reach beta."""
    alpha, beta = corner_pair
    S = tuple(sorted(S))
    if not is_incomparable_set(h, S) or not _same_class(h, S + (alpha, beta)):
        raise PreconditionViolated("S must be incomparable and share a class with the corner pair")
    fam = find_avoiding_family(h, S, a, b, alpha, beta)
    path = build_path_gadget(h, fam.walks, fam.groups)
    required = {(a, alpha), (b, beta)}
    forbidden = {(v, beta) for v, g in zip(fam.starts, fam.groups) if g == 0}
    gadget = Gadget("D[a/b]", h, path.graph, path.lists, path.interface, frozenset(required), False,
                    frozenset(forbidden), True, {"family": fam, "S": S, "a": a, "b": b, "pair": (alpha, beta)})
    if gadget.lists[gadget.interface[0]] != frozenset(S) or gadget.lists[gadget.interface[1]] != {alpha, beta}:
        raise AssertionError("distinguisher has the wrong interface lists")
    return gadget


def distinguisher_problems(gadget: Gadget, S, a: int, b: int, alpha: int, beta: int,
                           relation: frozenset | None = None) -> list[str]:
    """Which of the five distinguisher conditions fail (empty when all hold)."""
    x, y = gadget.interface
    out = []
    if gadget.lists[x] != frozenset(S) or gadget.lists[y] != {alpha, beta}:
        out.append("D1")
    rel = interface_relation(gadget) if relation is None else relation
    if (a, alpha) not in rel:
        out.append("D2")
    if (b, beta) not in rel:
        out.append("D3")
    if any(not ({(c, alpha), (c, beta)} & rel) for c in S if c not in (a, b)):
        out.append("D4")
    if (a, beta) in rel:
        out.append("D5")
    return out


def pick_corner_pair(h: Graph, ob: Obstruction, S) -> tuple[int, int]:
    """The corner pair lying in the class of S."""
    sides = is_bipartite(h)
    side = sides.side[next(iter(S))]
    for pair in ob.corners():
        if sides.side[pair[0]] == side:
            return pair
    raise SearchExhausted("no corner pair in the class of S")


def build_neq_gadget(h: Graph, S: Iterable[int], obstruction: Obstruction | None = None,
                     corner_pair=None) -> Gadget:
    """NEQ(S): interface (x, x') with lists S, exactly the unequal pairs extend."""
    S = tuple(sorted(set(S)))
    if len(S) < 2:
        raise PreconditionViolated("NEQ(S) needs |S| >= 2")
    sides = is_bipartite(h)
    if sides is None or len(components(h)) != 1:
        raise PreconditionViolated("NEQ(S) is built over a connected bipartite target")
    if not is_incomparable_set(h, S) or len({sides.side[v] for v in S}) != 1:
        raise PreconditionViolated("S must be an incomparable set inside one class")
    ob = obstruction or find_obstruction(h, sides)
    if ob is None:
        raise PreconditionViolated("target has no obstruction: it is co-circular-arc")
    pair = tuple(corner_pair) if corner_pair is not None else pick_corner_pair(h, ob, S)
    alpha, beta = pair
    if not _same_class(h, S + pair):
        raise PreconditionViolated("corner pair must share the class of S")
    k = len(S)
    ork = build_or_gadget(h, ob, pair, k)
    nand = build_nand_gadget(h, ob, pair)
    dist = {(vi, vj): build_distinguisher(h, S, vi, vj, pair) for vi in S for vj in S if vi != vj}

    def block(asm: _Assembly):
        x = asm.vertex(S)
        cs = []
        for vi in S:
            c = asm.vertex((alpha, beta))
            ys = []
            for vj in S:
                if vj == vi:
                    continue
                d = dist[(vi, vj)]
                m = asm.add(d, {0: x})
                ys.append(m[d.interface[1]])
            asm.add(ork, dict(enumerate([c] + ys)))
            cs.append(c)
        return x, cs

    asm = _Assembly(h)
    x, cs = block(asm)
    xp, cps = block(asm)
    for c, cp in zip(cs, cps):
        asm.add(nand, {0: c, 1: cp})
    return asm.build(f"NEQ(k={k})[{ob.kind}]", (x, xp), neq_relation(S),
                     S=S, pair=pair, obstruction=ob)


# ---------------------------------------------------------------------------
# general targets


def lift_gadget_to_general(h: Graph, bipartite_gadget: Gadget, twins: TwinMap) -> Gadget:
    """Project a gadget over H* to H: L'(x) holds u whenever u' or u'' is in L(x)."""
    g = bipartite_gadget.graph
    if twins.n != h.n or bipartite_gadget.target.n != 2 * h.n:
        raise PreconditionViolated("gadget target does not match the associated bipartite graph of h")
    sides = is_bipartite(g)
    if sides is None:
        raise PreconditionViolated("lifting needs a bipartite gadget graph")
    for comp in components(g):
        orient = set()
        for v in bits(comp):
            cls = {twins.origin(w)[1] for w in bipartite_gadget.lists[v]}
            if len(cls) > 1:
                raise PreconditionViolated(f"list of gadget vertex {v} straddles both classes")
            if cls:
                orient.add(cls.pop() ^ sides.side[v])
        if len(orient) > 1:
            raise PreconditionViolated("gadget lists do not follow one bipartition class")
    lift = lambda w: twins.origin(w)[0]
    lists = tuple(frozenset(lift(w) for w in lst) for lst in bipartite_gadget.lists)
    rel = frozenset(tuple(lift(w) for w in t) for t in bipartite_gadget.required_relation)
    forb = frozenset(tuple(lift(w) for w in t) for t in bipartite_gadget.forbidden)
    return Gadget(bipartite_gadget.name + "/lifted", h, g, lists, bipartite_gadget.interface, rel,
                  bipartite_gadget.exact, forb, bipartite_gadget.total, dict(bipartite_gadget.meta))


@dataclass(frozen=True)
class NeqHost:
    """Where NEQ(S) is built for a target h.

    host is bipartite; embed maps host vertices into H* (None when h itself
    is the host) and S is given in host vertices.
    """

    h: Graph
    host: Graph
    embed: tuple[int, ...] | None
    S: tuple[int, ...]


def _undecomposable_bipartite(host: Graph) -> bool:
    sides = is_bipartite(host)
    return (len(components(host)) == 1 and find_bipartite_decomposition(host, sides) is None
            and find_obstruction(host, sides) is not None)


def _largest_incomparable(host: Graph, prefer: int | None = None) -> tuple[int, ...]:
    sides = is_bipartite(host)
    best = ()
    for side in (X, Y):
        if prefer is not None and side != prefer:
            continue
        cand = tuple(sorted(max_incomparable_set(host, bits(sides.class_mask(side)))))
        if len(cand) > len(best):
            best = cand
    return best


def neq_host(h: Graph, S: Iterable[int] | None = None) -> NeqHost:
    """Choose the bipartite graph that carries the gadgets for h."""
    if len(components(h)) != 1:
        raise PreconditionViolated("target must be connected")
    sides = is_bipartite(h)
    S = tuple(sorted(set(S))) if S is not None else None
    if sides is not None:
        if not _undecomposable_bipartite(h):
            raise PreconditionViolated("bipartite target must be undecomposable and not co-circular-arc")
        return NeqHost(h, h, None, S or _largest_incomparable(h))
    n = h.n
    star, twins = associated_bipartite(h)
    from .analysis import is_strong_split

    split = is_strong_split(h)
    if split is not None:
        # drop the edges inside P; B goes to primes, P to doubleprimes
        order = sorted(split.B) + sorted(split.P)
        embed = tuple(b for b in sorted(split.B)) + tuple(n + p for p in sorted(split.P))
        host, _ = star.induced(embed)
        if not _undecomposable_bipartite(host):
            raise PreconditionViolated("strong split target whose bipartite part is decomposable")
        pos = {v: i for i, v in enumerate(order)}
        if S is None:
            hs = _largest_incomparable(host)
        else:
            hs = tuple(sorted(pos[v] for v in S))
        return NeqHost(h, host, embed, hs)
    if find_general_decomposition(h) is not None:
        raise PreconditionViolated("target is decomposable: build gadgets for a recursion leaf instead")
    if not _undecomposable_bipartite(star):
        raise PreconditionViolated("associated bipartite graph has no obstruction")
    hs = S if S is not None else _largest_incomparable(star, prefer=X)
    return NeqHost(h, star, tuple(range(2 * n)), tuple(twins.prime(v) for v in hs) if S is not None else hs)


def neq_gadget_for(h: Graph, S: Iterable[int] | None = None) -> Gadget:
    """A certified NEQ(S) over h, through H* when h is not bipartite."""
    host = neq_host(h, S)
    gadget = certified(build_neq_gadget(host.host, host.S))
    if host.embed is None:
        return gadget
    star, twins = associated_bipartite(h)
    emb = host.embed
    in_star = Gadget(gadget.name, star, gadget.graph, tuple(frozenset(emb[w] for w in lst) for lst in gadget.lists),
                     gadget.interface, frozenset(tuple(emb[w] for w in t) for t in gadget.required_relation),
                     meta=dict(gadget.meta))
    return certified(lift_gadget_to_general(h, in_star, twins))


# ---------------------------------------------------------------------------
# the colouring reduction


@dataclass(frozen=True)
class ReducedInstance:
    instance: Instance
    pd: TreeDecomposition
    width: int
    width_bound: int
    base_width: int
    edge_map: dict
    gadget: Gadget
    S: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.S)


def _coloring_path_decomposition(g: Graph) -> TreeDecomposition:
    if g.n <= 8:
        return exact_path_decomposition(g, max_vertices=8)
    return path_decomposition_from_order(g, min_fill_order(g))


def reduce_coloring(g: Graph, h: Graph, S: Iterable[int] | None = None, gadget: Gadget | None = None) -> ReducedInstance:
    """G*: vertices of g with list S, each edge replaced by a fresh NEQ(S) copy.

    (G*, L) -> h exactly when g is |S|-colourable. The path decomposition
    follows one of g and adds, after the first bag holding both ends of an
    edge, that bag together with the edge's gadget copy.
    """
    if any(g.has_loop(v) for v in range(g.n)):
        raise PreconditionViolated("graph to colour has a loop")
    if gadget is None:
        gadget = neq_gadget_for(h, S)
    elif not gadget.meta.get("verified"):
        raise PreconditionViolated("reduce_coloring only accepts certified gadgets")
    x, xp = gadget.interface
    Sl = gadget.lists[x]
    if gadget.target != h or gadget.lists[xp] != Sl or gadget.required_relation != neq_relation(Sl):
        raise PreconditionViolated("gadget is not a NEQ(S) gadget over h")
    asm = _Assembly(h)
    for _ in range(g.n):
        asm.vertex(Sl)
    edge_map = {}
    for u, v in g.edges():
        m = asm.add(gadget, {0: u, 1: v})
        edge_map[(u, v)] = tuple(m)
    g_star = Graph(len(asm.lists), asm.edges)
    inst = Instance(g_star, tuple(asm.lists), h)
    base = _coloring_path_decomposition(g)
    bags = []
    pending = list(edge_map.items())
    for bag in base.bags:
        bags.append(bag)
        rest = []
        for (u, v), verts in pending:
            if u in bag and v in bag:
                bags.append(bag | frozenset(verts))
            else:
                rest.append(((u, v), verts))
        pending = rest
    assert not pending, "an edge of g is covered by no bag"
    pd = TreeDecomposition(tuple(bags), tuple((i, i + 1) for i in range(len(bags) - 1)))
    validate(g_star, pd, path=True)
    bound = base.width + gadget.size
    assert pd.width <= bound
    return ReducedInstance(inst, pd, pd.width, bound, base.width, edge_map, gadget, tuple(sorted(Sl)))
