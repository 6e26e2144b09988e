"""Decision and witness algorithm for list homomorphism on tree decompositions.

The pipeline prunes lists, walks the target's recursion tree rewriting the
instance at each decomposition, and finishes every leaf with a dynamic
programme over a nice tree decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .analysis import RecursionNode, analyse_target, is_strong_split
from .decompositions import (
    BDecomposition,
    BipartiteDecomposition,
    BPDecomposition,
    FDecomposition,
    Factors,
    decomposition_problems,
    factors,
)
from .errors import BudgetExceeded, PreconditionViolated
from .graph import X, Bipartition, Graph, bits, components, is_bipartite, to_mask
from .instance import Instance, witness_problems
from .treedec import (
    FORGET,
    INTRODUCE,
    JOIN,
    TreeDecomposition,
    make_nice,
    min_fill_tree_decomposition,
    validate,
)

Mapping = list  # G-vertex -> target vertex


# ---------------------------------------------------------------------------
# list pruning


def _dominators(h: Graph) -> list[int]:
    """dom[u]: vertices v that make u redundant in any list holding both."""
    out = []
    for u in range(h.n):
        nu = h.masks[u]
        m = 0
        for v in range(h.n):
            if v == u:
                continue
            nv = h.masks[v]
            if nu & ~nv == 0 and (nu != nv or v < u):
                m |= 1 << v
        out.append(m)
    return out


@lru_cache(maxsize=512)
def _dominators_cached(masks: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(_dominators(Graph.from_masks(masks)))


def prune_lists(g: Graph, lists: Sequence[int], h: Graph, arc_consistency: bool = True) -> list[int]:
    """Loop rule, incomparable pruning and arc consistency to a fixed point.

    Never changes whether a list homomorphism exists; any homomorphism for
    the pruned lists is one for the original lists.
    """
    L = list(lists)
    loops = h.loop_mask
    for x in range(g.n):
        if g.has_loop(x):
            L[x] &= loops
    dom = _dominators_cached(h.masks)
    hm = h.masks
    nbrs = [tuple(y for y in bits(g.masks[x]) if y != x) for x in range(g.n)]
    changed = True
    while changed:
        changed = False
        for x in range(g.n):
            lx = L[x]
            keep = 0
            for u in bits(lx):
                if lx & dom[u] == 0:
                    keep |= 1 << u
            if keep != lx:
                L[x] = keep
                changed = True
        if not arc_consistency:
            break
        queue = list(range(g.n))
        queued = [True] * g.n
        while queue:
            y = queue.pop()
            queued[y] = False
            ly = L[y]
            for x in nbrs[y]:
                lx = L[x]
                keep = 0
                for u in bits(lx):
                    if hm[u] & ly:
                        keep |= 1 << u
                if keep != lx:
                    L[x] = keep
                    changed = True
                    if not queued[x]:
                        queued[x] = True
                        queue.append(x)
                    if keep == 0:
                        return L
    return L


@dataclass(frozen=True)
class SubInstance:
    """One consistent piece of an instance.

    `vertices` are the G-vertices it covers (in order). The original answer is
    YES iff every `group` has at least one YES member.
    """

    instance: Instance
    group: int
    vertices: tuple[int, ...]
    label: str


def make_consistent(inst: Instance, arc_consistency: bool = True) -> list[SubInstance]:
    """Split by G- and H-components (and class orientation), then prune lists."""
    g, h = inst.g, inst.target
    masks = inst.list_masks()
    h_comps = components(h)
    out = []
    for group, comp in enumerate(components(g)):
        sub, old = g.induced(bits(comp))
        base = [masks[v] for v in old]
        for hi, hc in enumerate(h_comps):
            hsub, _ = h.induced(bits(hc))
            hsides = is_bipartite(hsub)
            lists = [m & hc for m in base]
            if hsides is None:
                variants = [(f"H-component {hi}", lists)]
            else:
                gsides = is_bipartite(sub)
                if gsides is None:
                    continue
                xs = _lift_mask(hsides.x_mask, hc)
                ys = hc & ~xs
                variants = []
                for orient in (0, 1):
                    aligned = [
                        m & (xs if (gsides.side[i] ^ orient) == X else ys) for i, m in enumerate(lists)
                    ]
                    variants.append((f"H-component {hi}, orientation {orient}", aligned))
            for label, lst in variants:
                pruned = prune_lists(sub, lst, h, arc_consistency)
                out.append(SubInstance(Instance.from_masks(sub, pruned, h), group, old, label))
        if not any(s.group == group for s in out):
            # no H-component can host this piece: a trivially NO member
            empty = Instance.from_masks(sub, [0] * sub.n, h)
            out.append(SubInstance(empty, group, old, "no compatible component"))
    return out


def _lift_mask(mask: int, within: int) -> int:
    """Re-index a mask over the induced subgraph on `within` back to the parent."""
    old = list(bits(within))
    return to_mask(old[i] for i in bits(mask))


# ---------------------------------------------------------------------------
# dynamic programming


# cap on states times bag size in one table; too wide a decomposition fails loudly
DP_TABLE_LIMIT = 10_000_000


@dataclass
class DPStats:
    states: int = 0
    largest_table: int = 0
    max_list: int = 0
    limit: int = DP_TABLE_LIMIT


def _dp(g: Graph, L: Sequence[int], h: Graph, td: TreeDecomposition, stats: DPStats) -> Mapping | None:
    n = g.n
    if n == 0:
        return []
    if any(m == 0 for m in L):
        return None
    stats.max_list = max(stats.max_list, max(bin(m).count("1") for m in L))
    nice = make_nice(td)
    hm = h.masks
    loops = h.loop_mask
    tables: list[dict] = []
    for i, kind in enumerate(nice.kinds):
        bag = nice.bags[i]
        kids = nice.children[i]
        if kind == "leaf":
            table = {(): None}
        elif kind == INTRODUCE:
            v = nice.vertex[i]
            pos = bag.index(v)
            child = tables[kids[0]]
            base = L[v]
            if g.has_loop(v):
                base &= loops
            gm = g.masks[v]
            links = [j for j, w in enumerate(bag) if w != v and (gm >> w) & 1]
            links = [j if j < pos else j - 1 for j in links]
            table = {}
            for key in child:
                allowed = base
                for j in links:
                    allowed &= hm[key[j]]
                    if not allowed:
                        break
                for c in bits(allowed):
                    table[key[:pos] + (c,) + key[pos:]] = None
                if len(table) * len(bag) > stats.limit:
                    raise BudgetExceeded(f"DP table outgrew its budget (decomposition width {td.width})")
        elif kind == FORGET:
            v = nice.vertex[i]
            pos = nice.bags[kids[0]].index(v)
            table = {}
            for key in tables[kids[0]]:
                short = key[:pos] + key[pos + 1:]
                if short not in table:
                    table[short] = key
        elif kind == JOIN:
            a, b = tables[kids[0]], tables[kids[1]]
            if len(a) > len(b):
                a, b = b, a
            table = {key: None for key in a if key in b}
        else:
            raise ValueError(kind)
        bound = 1
        for v in bag:
            bound *= bin(L[v]).count("1")
        if len(table) > bound:
            raise AssertionError(f"table {i} holds {len(table)} > {bound} states")
        stats.states += len(table)
        stats.largest_table = max(stats.largest_table, len(table))
        tables.append(table)
        if not table:
            return None
    root = len(nice.kinds) - 1
    if not tables[root]:
        return None
    mapping = [-1] * n
    stack = [(root, next(iter(tables[root])))]
    while stack:
        i, key = stack.pop()
        for v, c in zip(nice.bags[i], key):
            mapping[v] = c
        kind = nice.kinds[i]
        kids = nice.children[i]
        if kind == INTRODUCE:
            pos = nice.bags[i].index(nice.vertex[i])
            stack.append((kids[0], key[:pos] + key[pos + 1:]))
        elif kind == FORGET:
            stack.append((kids[0], tables[i][key]))
        elif kind == JOIN:
            stack.append((kids[0], key))
            stack.append((kids[1], key))
    return mapping


def dp_solve(inst: Instance, td: TreeDecomposition, witness: bool = True):
    """(answer, witness or None) by the tree-decomposition DP on the given lists."""
    validate(inst.g, td)
    stats = DPStats()
    mapping = _dp(inst.g, inst.list_masks(), inst.target, td, stats)
    if mapping is None:
        return False, None
    _check_witness(inst.g, inst.list_masks(), inst.target, mapping)
    return True, (tuple(mapping) if witness else None)


def _check_witness(g: Graph, L: Sequence[int], h: Graph, mapping: Sequence[int]) -> None:
    for v, c in enumerate(mapping):
        if c < 0 or not (L[v] >> c) & 1:
            raise AssertionError(f"witness puts vertex {v} on {c}, outside its list")
    for a, b in g.edges():
        if not h.has_edge(mapping[a], mapping[b]):
            raise AssertionError(f"witness maps edge {a}-{b} to a non-edge")


# ---------------------------------------------------------------------------
# rewriting along decompositions


@dataclass
class Rewrite:
    """Lists for the second factor plus the rule that turns its witnesses back.

    `h1_calls` records (vertices, solved) for every first-factor subproblem.
    """

    lists: list[int]
    recombine: Callable[[Sequence[int]], Mapping]
    h1_calls: list[tuple[tuple[int, ...], bool]] = field(default_factory=list)


SolveH1 = Callable[[tuple[int, ...], list[int]], "Mapping | None"]


class _Index:
    """Vertex bookkeeping between a target and its two factors."""

    def __init__(self, h: Graph, fac: Factors):
        self.fac = fac
        self.to_h1 = {v: i for i, v in enumerate(fac.h1_origin)}
        contracted = set(fac.contracted.values())
        self.to_h2 = {}
        for i, grp in enumerate(fac.h2_origin):
            if i not in contracted:
                (v,) = tuple(grp)
                self.to_h2[v] = i
        self.from_h2 = {i: v for v, i in self.to_h2.items()}
        self.name = fac.contracted

    def h1_mask(self, mask: int) -> int:
        return to_mask(self.to_h1[v] for v in bits(mask) if v in self.to_h1)

    def h2_mask(self, mask: int) -> int:
        """Retained vertices only; contracted groups are added by the caller."""
        return to_mask(self.to_h2[v] for v in bits(mask) if v in self.to_h2)

    def bit(self, name: str) -> int:
        return 1 << self.name[name] if name in self.name else 0

    def h1_vertex(self, i: int) -> int:
        return self.fac.h1_origin[i]


def _solve_pieces(g: Graph, pieces, L1_of, solve_h1):
    """Run solve_h1 on each vertex set; returns per-piece mappings (or None)."""
    results, calls = [], []
    for verts in pieces:
        l1 = [L1_of(x) for x in verts]
        sol = None if any(m == 0 for m in l1) else solve_h1(verts, l1)
        results.append(sol)
        calls.append((verts, sol is not None))
    return results, calls


def _mask_tuple(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def _rewrite_bipartite(g, L, h, dec: BipartiteDecomposition, fac, sides, solve_h1) -> Rewrite:
    idx = _Index(h, fac)
    Dm, Nm = to_mask(dec.D), to_mask(dec.N)
    dxm = Dm & sides.x_mask
    dym = Dm & sides.y_mask
    Q = to_mask(x for x in range(g.n) if L[x] & Nm)
    for x in bits(Q):
        if L[x] & Dm:
            raise PreconditionViolated(f"list of vertex {x} meets both N and D")
    # components whose lists miss D have nothing to hand to the first factor
    pieces = [_mask_tuple(c) for c in components(g, ((1 << g.n) - 1) & ~Q) if any(L[x] & Dm for x in bits(c))]
    for x in range(g.n):
        if L[x] & dxm and L[x] & dym:
            raise PreconditionViolated(f"list of vertex {x} is not class-aligned")
    sols, calls = _solve_pieces(g, pieces, lambda x: idx.h1_mask(L[x] & Dm), solve_h1)
    owner = {}
    L2 = [idx.h2_mask(L[x] & ~Dm) for x in range(g.n)]
    for verts, sol in zip(pieces, sols):
        if sol is None:
            continue
        for x, c in zip(verts, sol):
            owner[x] = idx.h1_vertex(c)
            if L[x] & dxm:
                L2[x] |= idx.bit("dX")
            if L[x] & dym:
                L2[x] |= idx.bit("dY")
    contracted = {idx.name[k] for k in ("dX", "dY") if k in idx.name}
    return Rewrite(L2, _recombiner(idx, contracted, lambda x, c: owner[x]), calls)


def _recombiner(idx: _Index, contracted: set[int], inner):
    def recombine(h2_map):
        out = []
        for x, c in enumerate(h2_map):
            out.append(inner(x, c) if c in contracted else idx.from_h2[c])
        return out

    return recombine


def _rewrite_f(g, L, h, dec: FDecomposition, fac, solve_h1) -> Rewrite:
    idx = _Index(h, fac)
    Fm, Km = to_mask(dec.F), to_mask(dec.K)
    Q = to_mask(x for x in range(g.n) if L[x] & Km)
    for x in bits(Q):
        if L[x] & Fm:
            raise PreconditionViolated(f"list of vertex {x} meets both K and F")
    pieces = [_mask_tuple(c) for c in components(g, ((1 << g.n) - 1) & ~Q)]
    sols, calls = _solve_pieces(g, pieces, lambda x: idx.h1_mask(L[x] & Fm), solve_h1)
    owner = {}
    L2 = [idx.h2_mask(L[x] & ~Fm) for x in range(g.n)]
    for verts, sol in zip(pieces, sols):
        if sol is None:
            continue
        for x, c in zip(verts, sol):
            owner[x] = idx.h1_vertex(c)
            if L[x] & Fm:
                L2[x] |= idx.bit("f")
    return Rewrite(L2, _recombiner(idx, {idx.name["f"]}, lambda x, c: owner[x]), calls)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self):
        out: dict[int, list[int]] = {}
        for a in range(len(self.parent)):
            out.setdefault(self.find(a), []).append(a)
        return [out[r] for r in sorted(out)]


def _rewrite_bp(g, L, h, dec: BPDecomposition, fac, solve_h1) -> Rewrite:
    idx = _Index(h, fac)
    Bm, Pm = to_mask(dec.B), to_mask(dec.P)
    Q = to_mask(x for x in range(g.n) if L[x] & to_mask(dec.M | dec.K))
    type_b = to_mask(x for x in range(g.n) if L[x] & Bm)
    type_p = to_mask(x for x in range(g.n) if L[x] & Pm)
    if type_b & type_p:
        raise PreconditionViolated("a list meets both B and P")
    if type_b & Q:
        raise PreconditionViolated("a list meets B and the separator")
    q_prime = Q & type_p
    comps = components(g, ((1 << g.n) - 1) & ~Q)
    items = comps + [1 << x for x in bits(q_prime)]
    uf = _UnionFind(len(items))
    for qi, x in enumerate(bits(q_prime)):
        touch = g.masks[x] & type_b
        for ci, comp in enumerate(comps):
            if touch & comp:
                uf.union(ci, len(comps) + qi)
    pieces = []
    for cls in uf.classes():
        m = 0
        for i in cls:
            m |= items[i]
        pieces.append(_mask_tuple(m))
    sols, calls = _solve_pieces(g, pieces, lambda x: idx.h1_mask(L[x] & (Bm | Pm)), solve_h1)
    owner = {}
    L2 = [idx.h2_mask(L[x] & ~(Bm | Pm)) for x in range(g.n)]
    for verts, sol in zip(pieces, sols):
        if sol is None:
            continue
        for x, c in zip(verts, sol):
            owner[x] = idx.h1_vertex(c)
            if (type_p >> x) & 1:
                L2[x] |= idx.bit("p")
            elif (type_b >> x) & 1:
                L2[x] |= idx.bit("b")
    contracted = {idx.name[k] for k in ("p", "b") if k in idx.name}
    return Rewrite(L2, _recombiner(idx, contracted, lambda x, c: owner[x]), calls)


def _two_colour(g: Graph, verts: int):
    """(A, B) masks of a proper two-colouring of g[verts], or None."""
    a = b = 0
    for comp in components(g, verts):
        sub, old = g.induced(bits(comp))
        s = is_bipartite(sub)
        if s is None:
            return None
        a |= to_mask(old[i] for i in bits(s.x_mask))
        b |= to_mask(old[i] for i in bits(s.y_mask))
    return a, b


def _has_inner_edge(g: Graph, mask: int) -> bool:
    return any(g.masks[v] & mask for v in bits(mask))


def _rewrite_b(g, L, h, dec: BDecomposition, fac, solve_h1) -> Rewrite:
    idx = _Index(h, fac)
    L = list(L)
    B1m, B2m = to_mask(dec.B1), to_mask(dec.B2)
    Bm = B1m | B2m
    sep = to_mask(dec.M1 | dec.M2 | dec.K)
    full = (1 << g.n) - 1
    Q = to_mask(x for x in range(g.n) if L[x] & sep)
    Q1 = to_mask(x for x in bits(Q) if L[x] & B1m)
    Q2 = to_mask(x for x in bits(Q) if L[x] & B2m)
    if Q1 & Q2:
        raise PreconditionViolated("a separator list meets both B1 and B2")

    triples_1, triples_2 = [], []
    for comp in components(g, full & ~Q):
        split = _two_colour(g, comp)
        if split is None:
            for x in bits(comp):
                L[x] &= ~Bm
            continue
        a, b = split
        triples_1.append((a, b))
        triples_1.append((b, a))
    # auxiliary graph on Q1 + Q2 keeping only Q1-Q2 edges
    aux_masks = [0] * g.n
    for x in bits(Q1):
        aux_masks[x] = g.masks[x] & Q2
    for y in bits(Q2):
        aux_masks[y] = g.masks[y] & Q1
    aux = Graph.from_masks(aux_masks)
    for comp in components(aux, Q1 | Q2):
        if _two_colour(g, comp) is None:
            for x in bits(comp):
                L[x] &= ~Bm
            continue
        triples_2.append((comp & Q1, comp & Q2))

    triples = triples_1 + triples_2
    uf = _UnionFind(len(triples))
    off = len(triples_1)
    for i, (x1, y1) in enumerate(triples_1):
        nx1 = g.neighborhood_of_set(bits(x1))
        ny1 = g.neighborhood_of_set(bits(y1))
        for j, (x2, y2) in enumerate(triples_2):
            if nx1 & y2 or ny1 & x2:
                uf.union(i, off + j)
    pieces = []
    for cls in uf.classes():
        xs = ys = 0
        for i in cls:
            xs |= triples[i][0]
            ys |= triples[i][1]
        if xs & ys or _has_inner_edge(g, xs) or _has_inner_edge(g, ys):
            for x in bits(xs):
                L[x] &= ~B1m
            for y in bits(ys):
                L[y] &= ~B2m
            continue
        pieces.append((xs, ys))

    vertex_sets = [_mask_tuple(xs | ys) for xs, ys in pieces]
    results, calls = [], []
    for (xs, ys), verts in zip(pieces, vertex_sets):
        l1 = [idx.h1_mask(L[x] & (B1m if (xs >> x) & 1 else B2m)) for x in verts]
        sol = None if any(m == 0 for m in l1) else solve_h1(verts, l1)
        results.append(sol)
        calls.append((verts, sol is not None))

    as_b1, as_b2 = {}, {}
    L2 = [idx.h2_mask(L[x] & ~Bm) for x in range(g.n)]
    for (xs, ys), verts, sol in zip(pieces, vertex_sets, results):
        if sol is None:
            continue
        for x, c in zip(verts, sol):
            if (xs >> x) & 1:
                as_b1[x] = idx.h1_vertex(c)
                L2[x] |= idx.bit("b1")
            else:
                as_b2[x] = idx.h1_vertex(c)
                L2[x] |= idx.bit("b2")
    b1 = idx.name.get("b1")

    def inner(x, c):
        return as_b1[x] if c == b1 else as_b2[x]

    contracted = {idx.name[k] for k in ("b1", "b2") if k in idx.name}
    return Rewrite(L2, _recombiner(idx, contracted, inner), calls)


# public forms of the rewriting steps, operating on whole instances


def _default_h1(h1: Graph):
    def run(sub_inst: Instance):
        res = solve(sub_inst, witness=True)
        return res.witness

    return run


def _public_rewrite(inst: Instance, dec, fac: Factors | None, solve_h1, sides=None):
    h = inst.target
    problems = decomposition_problems(h, dec, sides)
    if problems:
        raise PreconditionViolated("not a decomposition of the target: " + "; ".join(problems))
    fac = fac or factors(h, dec, sides)
    call = solve_h1 or _default_h1(fac.h1)
    g = inst.g

    def inner(verts, l1):
        sub, _ = g.induced(verts)
        sol = call(Instance.from_masks(sub, l1, fac.h1))
        return None if sol is None else list(sol)

    L = inst.list_masks()
    if isinstance(dec, BipartiteDecomposition):
        sides = sides or is_bipartite(h)
        rw = _rewrite_bipartite(g, L, h, dec, fac, sides, inner)
    elif isinstance(dec, FDecomposition):
        rw = _rewrite_f(g, L, h, dec, fac, inner)
    elif isinstance(dec, BPDecomposition):
        rw = _rewrite_bp(g, L, h, dec, fac, inner)
    else:
        rw = _rewrite_b(g, L, h, dec, fac, inner)
    return Instance.from_masks(g, rw.lists, fac.h2), rw, fac


@dataclass
class RewriteResult:
    """The second-factor instance and how to get back from its witnesses."""

    h2_instance: Instance
    factors: Factors
    h1_calls: list[tuple[tuple[int, ...], bool]]
    _recombine: Callable

    def recombine(self, h2_witness: Sequence[int]) -> tuple[int, ...]:
        return tuple(self._recombine(list(h2_witness)))


def _wrap(inst, dec, fac, solve_h1, sides=None) -> RewriteResult:
    h2_inst, rw, fac = _public_rewrite(inst, dec, fac, solve_h1, sides)
    return RewriteResult(h2_inst, fac, rw.h1_calls, rw.recombine)


def apply_bipartite_decomposition(inst: Instance, dec: BipartiteDecomposition, fac: Factors | None = None,
                                  solve_h1=None, sides: Bipartition | None = None) -> RewriteResult:
    """Rewrite a class-aligned, pruned instance onto the second factor.

    solve_h1(instance over h1) returns a witness or None; by default the full
    solver is used.
    """
    return _wrap(inst, dec, fac, solve_h1, sides)


def apply_f_decomposition(inst: Instance, dec: FDecomposition, fac: Factors | None = None, solve_h1=None) -> RewriteResult:
    return _wrap(inst, dec, fac, solve_h1)


def apply_bp_decomposition(inst: Instance, dec: BPDecomposition, fac: Factors | None = None, solve_h1=None) -> RewriteResult:
    return _wrap(inst, dec, fac, solve_h1)


def apply_b_decomposition(inst: Instance, dec: BDecomposition, fac: Factors | None = None, solve_h1=None) -> RewriteResult:
    return _wrap(inst, dec, fac, solve_h1)


# ---------------------------------------------------------------------------
# strong split targets


def _strong_split_reduction(g: Graph, L: Sequence[int], h: Graph, B: frozenset, P: frozenset):
    """(g', h') with Y-Y and P-P edges removed, or None when X has an edge."""
    Bm, Pm = to_mask(B), to_mask(P)
    xs = to_mask(x for x in range(g.n) if L[x] & Bm)
    ys = to_mask(x for x in range(g.n) if L[x] & Pm)
    if xs & ys:
        raise PreconditionViolated("a list meets both B and P")
    if _has_inner_edge(g, xs):
        return None
    g2 = Graph.from_masks([(m & ~ys) if (ys >> v) & 1 else m for v, m in enumerate(g.masks)])
    h2 = Graph.from_masks([(m & ~Pm) if (Pm >> u) & 1 else m for u, m in enumerate(h.masks)])
    return g2, h2


def solve_strong_split(inst: Instance, td: TreeDecomposition | None = None, witness: bool = True):
    """(answer, witness) for a strong split target via its bipartite relative."""
    split = is_strong_split(inst.target)
    if split is None:
        raise PreconditionViolated("target is not a strong split graph")
    L = prune_lists(inst.g, inst.list_masks(), inst.target)
    if any(m == 0 for m in L):
        return False, None
    red = _strong_split_reduction(inst.g, L, inst.target, split.B, split.P)
    if red is None:
        return False, None
    g2, h2 = red
    res = solve(Instance.from_masks(g2, L, h2), td=td, witness=True)
    if not res.answer:
        return False, None
    _check_witness(inst.g, L, inst.target, res.witness)
    return True, (res.witness if witness else None)


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class LeafStat:
    kind: str
    target_size: int
    vertices: int
    max_list: int
    states: int


@dataclass
class SolveStats:
    width: int = -1
    leaves: list[LeafStat] = field(default_factory=list)

    @property
    def total_states(self) -> int:
        return sum(s.states for s in self.leaves)

    @property
    def max_list(self) -> int:
        return max((s.max_list for s in self.leaves), default=0)

    def max_list_at(self, kind: str) -> int:
        return max((s.max_list for s in self.leaves if s.kind == kind), default=0)


@dataclass
class SolveResult:
    answer: bool
    witness: tuple[int, ...] | None
    stats: SolveStats


@lru_cache(maxsize=256)
def _analysis(masks: tuple[int, ...]) -> RecursionNode:
    return analyse_target(Graph.from_masks(masks))


class _Pipeline:
    def __init__(self, stats: SolveStats, limit: int = DP_TABLE_LIMIT):
        self.stats = stats
        self.limit = limit

    def run(self, g, L, node: RecursionNode, td) -> Mapping | None:
        h = node.graph
        L = prune_lists(g, L, h)
        if any(m == 0 for m in L):
            return None
        if g.n == 0:
            return []
        comps = components(g)
        if len(comps) > 1:
            out = [-1] * g.n
            for comp in comps:
                verts = tuple(bits(comp))
                sub, _ = g.induced(verts)
                sol = self.connected(sub, [L[v] for v in verts], node, td.restrict(verts))
                if sol is None:
                    return None
                for v, c in zip(verts, sol):
                    out[v] = c
            return out
        return self.connected(g, L, node, td)

    def connected(self, g, L, node, td):
        h = node.graph
        if node.kind == "components":
            for part, child in zip(node.parts, node.children):
                pm = to_mask(part)
                if any(m & pm == 0 for m in L):
                    continue
                local = {v: i for i, v in enumerate(part)}
                l2 = [to_mask(local[u] for u in bits(m & pm)) for m in L]
                sol = self.run(g, l2, child, td)
                if sol is not None:
                    return [part[c] for c in sol]
            return None
        if node.sides is not None:
            gs = is_bipartite(g)
            if gs is None:
                return None
            xs, ys = node.sides.x_mask, node.sides.y_mask
            for orient in (0, 1):
                aligned = [m & (xs if (gs.side[v] ^ orient) == X else ys) for v, m in enumerate(L)]
                if any(m == 0 for m in aligned):
                    continue
                aligned = prune_lists(g, aligned, h)
                if any(m == 0 for m in aligned):
                    continue
                sol = self.aligned(g, aligned, node, td)
                if sol is not None:
                    return sol
            return None
        return self.aligned(g, L, node, td)

    def aligned(self, g, L, node, td):
        h = node.graph
        if node.is_leaf and node.kind != "StrongSplit":
            dstats = DPStats(limit=self.limit)
            sol = _dp(g, L, h, td, dstats)
            self.stats.leaves.append(LeafStat(node.kind, h.n, g.n, dstats.max_list, dstats.states))
            return sol
        if node.kind == "StrongSplit":
            split = node.strong_split
            red = _strong_split_reduction(g, L, h, split.B, split.P)
            if red is None:
                return None
            g2, h2 = red
            return self.run(g2, L, _analysis(h2.masks), td)
        dec, fac = node.decomposition, node.factors
        h1_node, h2_node = node.children

        def solve_h1(verts, l1):
            sub, _ = g.induced(verts)
            return self.run(sub, l1, h1_node, td.restrict(verts))

        if isinstance(dec, BipartiteDecomposition):
            rw = _rewrite_bipartite(g, L, h, dec, fac, node.sides, solve_h1)
        elif isinstance(dec, FDecomposition):
            rw = _rewrite_f(g, L, h, dec, fac, solve_h1)
        elif isinstance(dec, BPDecomposition):
            rw = _rewrite_bp(g, L, h, dec, fac, solve_h1)
        else:
            rw = _rewrite_b(g, L, h, dec, fac, solve_h1)
        sol2 = self.run(g, rw.lists, h2_node, td)
        if sol2 is None:
            return None
        sol = rw.recombine(sol2)
        _check_witness(g, L, h, sol)
        return sol


def solve(inst: Instance, td: TreeDecomposition | None = None, witness: bool = False,
          decompose: bool = True, state_limit: int = DP_TABLE_LIMIT) -> SolveResult:
    """Decide (G, L) -> H; with decompose=False the DP runs on H directly."""
    g, h = inst.g, inst.target
    if td is None:
        td = min_fill_tree_decomposition(g)
    else:
        validate(g, td)
    stats = SolveStats(width=td.width)
    L = inst.list_masks()
    if g.n == 0:
        return SolveResult(True, () if witness else None, stats)
    if decompose:
        sol = _Pipeline(stats, state_limit).run(g, L, _analysis(h.masks), td)
    else:
        pruned = prune_lists(g, L, h)
        dstats = DPStats(limit=state_limit)
        sol = None if any(m == 0 for m in pruned) else _dp(g, pruned, h, td, dstats)
        stats.leaves.append(LeafStat("direct", h.n, g.n, dstats.max_list, dstats.states))
    if sol is None:
        return SolveResult(False, None, stats)
    problems = witness_problems(inst, sol)
    if problems:
        raise AssertionError("solver produced an invalid witness: " + problems[0])
    return SolveResult(True, tuple(sol) if witness else None, stats)
