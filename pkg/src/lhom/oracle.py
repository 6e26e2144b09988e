"""Brute-force ground truth and seeded generators.

Everything here is deliberately simple: plain backtracking over label or
colour assignments, checked directly against the defining conditions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import BudgetExceeded, TargetTooLarge
from .graph import X, Y, Bipartition, Graph, bits, components, is_bipartite, to_mask
from .instance import Instance, witness_problems
from .rng import SplitMix64

DEFAULT_BUDGET = 10**8


class _Budget:
    __slots__ = ("left",)

    def __init__(self, nodes: int):
        self.left = nodes

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("brute-force search exceeded its node budget")


def _lhom_search(
    g: Graph,
    domains: list[int],
    h: Graph,
    budget: _Budget,
    coupled: dict[int, tuple[int, Callable[[int], int]]] | None = None,
) -> Iterator[list[int]]:
    """Yield every list homomorphism; domains are masks over V(h).

    `coupled[v] = (w, f)` forces w to colour f(c) whenever v gets c.
    """
    n = g.n
    hm = h.masks
    loops = h.loop_mask
    doms = list(domains)
    for v in range(n):
        if g.has_loop(v):
            doms[v] &= loops
    assignment = [-1] * n

    def propagate(doms, v, c):
        doms = list(doms)
        doms[v] = 1 << c
        work = [(v, c)]
        while work:
            x, cx = work.pop()
            for y in bits(g.masks[x]):
                if assignment[y] != -1 or y == x:
                    continue
                nd = doms[y] & hm[cx]
                if nd == 0:
                    return None
                doms[y] = nd
            if coupled and x in coupled:
                w, f = coupled[x]
                fc = f(cx)
                if not (doms[w] >> fc) & 1:
                    return None
                if assignment[w] == -1 and doms[w] != 1 << fc:
                    doms[w] = 1 << fc
        return doms

    def rec(doms, remaining):
        budget.spend()
        if not remaining:
            yield list(assignment)
            return
        # smallest domain first, ties by index
        v = min(remaining, key=lambda x: (bin(doms[x]).count("1"), x))
        rest = remaining - {v}
        for c in bits(doms[v]):
            nd = propagate(doms, v, c)
            if nd is None:
                continue
            assignment[v] = c
            yield from rec(nd, rest)
            assignment[v] = -1

    if any(d == 0 for d in doms):
        return
    yield from rec(doms, frozenset(range(n)))


def brute_force_lhom(inst: Instance, mode: str = "decide", budget: int = DEFAULT_BUDGET):
    """Ground truth for (G, L) -> H.

    decide: a witness tuple or None; count: number of list homomorphisms;
    enumerate: iterator over all of them.
    """
    b = _Budget(budget)
    gen = _lhom_search(inst.g, inst.list_masks(), inst.target, b)
    if mode == "enumerate":
        return (tuple(m) for m in gen)
    if mode == "count":
        return sum(1 for _ in gen)
    if mode == "decide":
        for m in gen:
            w = tuple(m)
            assert not witness_problems(inst, w)
            return w
        return None
    raise ValueError(f"unknown mode {mode!r}")


def brute_force_clean(
    g_star: Graph,
    lists: list[int],
    h_star: Graph,
    g_twin: Callable[[int], int],
    h_twin: Callable[[int], int],
    budget: int = DEFAULT_BUDGET,
) -> tuple[int, ...] | None:
    """First homomorphism g_star -> h_star sending twins to twins, if any."""
    coupled = {x: (g_twin(x), h_twin) for x in range(g_star.n)}
    for m in _lhom_search(g_star, lists, h_star, _Budget(budget), coupled):
        for x in range(g_star.n):
            assert m[g_twin(x)] == h_twin(m[x])
        return tuple(m)
    return None


# ---------------------------------------------------------------------------
# decomposition enumeration

EDGE, NONE = 1, 0


@dataclass(frozen=True)
class _LabelScheme:
    names: tuple[str, ...]
    looped: frozenset[int]       # labels whose vertices need a loop
    loopless: frozenset[int]     # labels whose vertices must not have a loop
    rules: dict                  # (label, label) -> EDGE | NONE
    accept: Callable[[list[int]], bool]  # global check on label sizes


def _rule_table(pairs_edge, pairs_none):
    rules = {}
    for a, b in pairs_edge:
        rules[(a, b)] = rules[(b, a)] = EDGE
    for a, b in pairs_none:
        rules[(a, b)] = rules[(b, a)] = NONE
    return rules


def _scheme(kind: str) -> _LabelScheme:
    if kind == "F":
        Fl, K, Z = range(3)
        return _LabelScheme(
            ("F", "K", "Z"), frozenset({K}), frozenset(),
            _rule_table([(K, K), (Fl, K)], [(Fl, Z)]),
            lambda s: s[K] >= 1 and s[Fl] >= 2,
        )
    if kind == "BP":
        B, P, M, K, Z = range(5)
        return _LabelScheme(
            ("B", "P", "M", "K", "Z"), frozenset({P, K}), frozenset({B}),
            _rule_table(
                [(K, K), (P, P), (K, P), (M, P), (M, K), (B, K)],
                [(P, Z), (B, Z), (B, B), (B, M)],
            ),
            lambda s: s[K] + s[M] >= 1 and (s[P] >= 2 or s[B] >= 2),
        )
    if kind == "B":
        B1, B2, K, M1, M2, Z = range(6)
        return _LabelScheme(
            ("B1", "B2", "K", "M1", "M2", "Z"), frozenset({K}), frozenset({B1, B2}),
            _rule_table(
                [(K, K), (K, M1), (K, M2), (K, B1), (K, B2), (M2, M1), (M2, B1), (M1, B2)],
                [(B1, Z), (B2, Z), (B1, B1), (B2, B2), (B1, M1), (B2, M2)],
            ),
            lambda s: s[K] + s[3] + s[4] >= 1 and (s[B1] >= 2 or s[B2] >= 2),
        )
    if kind == "bipartite":
        # labels carry the class: DX, DY, NX, NY, RX, RY
        DX, DY, NX, NY, RX, RY = range(6)
        return _LabelScheme(
            ("DX", "DY", "NX", "NY", "RX", "RY"), frozenset(), frozenset(range(6)),
            _rule_table(
                [(NX, NY), (DX, NY), (DY, NX)],
                [(a, b) for a in (DX, DY) for b in (RX, RY)],
            ),
            lambda s: s[NX] + s[NY] >= 1 and (s[DX] >= 2 or s[DY] >= 2),
        )
    raise ValueError(f"unknown decomposition kind {kind!r}")


def _enumerate_labelings(h: Graph, scheme: _LabelScheme, allowed: list[tuple[int, ...]]):
    n = h.n
    nl = len(scheme.names)
    members = [0] * nl
    sizes = [0] * nl
    labels = [-1] * n
    loops = h.loop_mask
    rules = scheme.rules

    def rec(v):
        if v == n:
            if scheme.accept(sizes):
                yield list(labels)
            return
        adj = h.masks[v] & ~(1 << v)
        looped = (loops >> v) & 1
        for lab in allowed[v]:
            if lab in scheme.looped and not looped:
                continue
            if lab in scheme.loopless and looped:
                continue
            ok = True
            for other in range(nl):
                r = rules.get((lab, other))
                if r is None or not members[other]:
                    continue
                if r == EDGE and members[other] & ~adj:
                    ok = False
                    break
                if r == NONE and members[other] & adj:
                    ok = False
                    break
            if not ok:
                continue
            labels[v] = lab
            members[lab] |= 1 << v
            sizes[lab] += 1
            yield from rec(v + 1)
            members[lab] &= ~(1 << v)
            sizes[lab] -= 1
            labels[v] = -1

    yield from rec(0)


def brute_force_decompositions(
    h: Graph,
    kind: str,
    sides: Bipartition | None = None,
    first_only: bool = False,
    max_vertices: int = 10,
) -> list[tuple[frozenset[int], ...]]:
    """Every partition of V(h) satisfying the condition list of `kind`.

    kind is one of "bipartite" (D, N, R), "F" (F, K, Z),
    "BP" (B, P, M, K, Z) or "B" (B1, B2, K, M1, M2, Z).
    """
    if h.n > max_vertices:
        raise TargetTooLarge(f"{h.n} vertices exceeds the enumeration cap {max_vertices}")
    scheme = _scheme(kind)
    if kind == "bipartite":
        sides = sides or is_bipartite(h)
        if sides is None:
            raise ValueError("bipartite decompositions need a bipartite graph")
        allowed = [(0, 2, 4) if sides.side[v] == X else (1, 3, 5) for v in range(h.n)]
    else:
        allowed = [tuple(range(len(scheme.names)))] * h.n
    out = []
    for labels in _enumerate_labelings(h, scheme, allowed):
        if kind == "bipartite":
            parts = [frozenset(v for v in range(h.n) if labels[v] in pair) for pair in ((0, 1), (2, 3), (4, 5))]
        else:
            parts = [frozenset(v for v in range(h.n) if labels[v] == lab) for lab in range(len(scheme.names))]
        out.append(tuple(parts))
        if first_only:
            break
    return out


def is_decomposable_brute(h: Graph, kind: str, sides=None, max_vertices: int = 10) -> bool:
    return bool(brute_force_decompositions(h, kind, sides, first_only=True, max_vertices=max_vertices))


def is_general_decomposable_brute(h: Graph, max_vertices: int = 10) -> bool:
    return any(is_decomposable_brute(h, kind, max_vertices=max_vertices) for kind in ("F", "BP", "B"))


# ---------------------------------------------------------------------------
# colouring

def chromatic_upper(g: Graph, k: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Exact test whether g is k-colourable."""
    if any(g.has_loop(v) for v in range(g.n)):
        return False
    n = g.n
    colour = [-1] * n
    order = sorted(range(n), key=lambda v: (-bin(g.masks[v]).count("1"), v))
    b = _Budget(budget)

    def rec(i, used):
        b.spend()
        if i == n:
            return True
        v = order[i]
        taken = {colour[w] for w in bits(g.masks[v]) if colour[w] != -1}
        # symmetry breaking: a fresh colour is only tried once
        for c in range(min(k, used + 1)):
            if c in taken:
                continue
            colour[v] = c
            if rec(i + 1, max(used, c + 1)):
                return True
            colour[v] = -1
        return False

    return rec(0, 0)


# ---------------------------------------------------------------------------
# generators

@dataclass(frozen=True)
class SeededGenerator:
    seed: int
    min_vertices: int = 1
    max_vertices: int = 8
    edge_num: int = 1
    edge_den: int = 2
    loop_num: int = 1
    loop_den: int = 2
    list_num: int = 1
    list_den: int = 2

    def rng(self) -> SplitMix64:
        return SplitMix64(self.seed)


def random_graph(rng: SplitMix64, n: int, edge=(1, 2), loop=(0, 1)) -> Graph:
    edges = []
    for u in range(n):
        if loop[0] and rng.chance(*loop):
            edges.append((u, u))
        for v in range(u + 1, n):
            if rng.chance(*edge):
                edges.append((u, v))
    return Graph(n, edges)


def random_connected_graph(rng: SplitMix64, n: int, edge=(1, 2), loop=(0, 1)) -> Graph:
    while True:
        g = random_graph(rng, n, edge, loop)
        if len(components(g)) <= 1:
            return g


def random_lists(rng: SplitMix64, n: int, h: Graph, density=(1, 2)) -> list[frozenset[int]]:
    out = []
    for _ in range(n):
        lst = frozenset(u for u in range(h.n) if rng.chance(*density))
        if not lst:
            lst = frozenset({rng.below(h.n)})
        out.append(lst)
    return out


def random_strong_split(rng: SplitMix64, n_b: int, n_p: int, edge=(1, 2)) -> tuple[Graph, frozenset, frozenset]:
    """Independent loopless B = 0..n_b-1, reflexive clique P after it."""
    edges = []
    p_range = range(n_b, n_b + n_p)
    for p in p_range:
        edges.append((p, p))
        for q in p_range:
            if q > p:
                edges.append((p, q))
        for b in range(n_b):
            if rng.chance(*edge):
                edges.append((b, p))
    return Graph(n_b + n_p, edges), frozenset(range(n_b)), frozenset(p_range)


def _relabel(rng: SplitMix64, n: int, edges, parts):
    perm = list(range(n))
    rng.shuffle(perm)
    g = Graph(n, [(perm[a], perm[b]) for a, b in edges])
    return g, tuple(frozenset(perm[v] for v in part) for part in parts)


def _blocks(sizes):
    out, start = [], 0
    for s in sizes:
        out.append(list(range(start, start + s)))
        start += s
    return out, start


def planted_decomposable_target(rng: SplitMix64, kind: str, max_vertices: int = 8, edge=(1, 2)):
    """Random connected target with a planted decomposition of `kind`.

    Returns (graph, parts) where parts is the planted partition in the
    order used by brute_force_decompositions.
    """
    while True:
        g, parts = _planted_once(rng, kind, max_vertices, edge)
        if len(components(g)) == 1:
            return g, parts


def _planted_once(rng, kind, max_vertices, edge):
    edges = []

    def rand_between(a, b, loops=False):
        for u in a:
            for v in b:
                if u < v and rng.chance(*edge):
                    edges.append((u, v))
        if loops:
            for u in a:
                if rng.chance(*edge):
                    edges.append((u, u))

    def rand_across(a, b):
        for u in a:
            for v in b:
                if rng.chance(*edge):
                    edges.append((u, v))

    def full(a, b):
        edges.extend((u, v) for u in a for v in b if u != v)

    def reflexive_clique(a):
        edges.extend((u, v) for i, u in enumerate(a) for v in a[i:])

    budget = max_vertices
    if kind == "bipartite":
        dx = rng.between(2, 3)
        dy = rng.between(0, 2)
        nx = rng.between(0, 2)
        ny = rng.between(1 if nx == 0 else 0, 2)
        rest = max(0, budget - dx - dy - nx - ny)
        rx = rng.between(0, rest)
        ry = rng.between(0, rest - rx)
        (DX, DY, NX, NY, RX, RY), n = _blocks([dx, dy, nx, ny, rx, ry])
        rand_across(DX, DY)
        full(NX, NY)
        full(DX, NY)
        full(DY, NX)
        rand_across(RX, RY)
        rand_across(NX, RY)
        rand_across(RX, NY)
        return _relabel(rng, n, edges, [DX + DY, NX + NY, RX + RY])
    if kind == "F":
        f = rng.between(2, 3)
        k = rng.between(1, 2)
        z = rng.between(0, max(0, budget - f - k))
        (Fs, Ks, Zs), n = _blocks([f, k, z])
        rand_between(Fs, Fs, loops=True)
        reflexive_clique(Ks)
        full(Fs, Ks)
        rand_across(Ks, Zs)
        rand_between(Zs, Zs, loops=True)
        return _relabel(rng, n, edges, [Fs, Ks, Zs])
    if kind == "BP":
        b = rng.between(0, 3)
        p = rng.between(2 if b < 2 else 0, 3)
        m = rng.between(0, 2)
        k = rng.between(1 if m == 0 else 0, 2)
        z = rng.between(0, max(0, budget - b - p - m - k))
        (Bs, Ps, Ms, Ks, Zs), n = _blocks([b, p, m, k, z])
        reflexive_clique(Ps + Ks)
        rand_across(Bs, Ps)
        full(Ms, Ps + Ks)
        full(Bs, Ks)
        rand_between(Ms, Ms, loops=True)
        rand_across(Ms, Zs)
        rand_across(Ks, Zs)
        rand_between(Zs, Zs, loops=True)
        return _relabel(rng, n, edges, [Bs, Ps, Ms, Ks, Zs])
    if kind == "B":
        b1 = rng.between(0, 3)
        b2 = rng.between(2 if b1 < 2 else 0, 3)
        m1 = rng.between(0, 2)
        m2 = rng.between(0, 2)
        k = rng.between(1 if m1 + m2 == 0 else 0, 1)
        z = rng.between(0, max(0, budget - b1 - b2 - m1 - m2 - k))
        (B1, B2, Ks, M1, M2, Zs), n = _blocks([b1, b2, k, m1, m2, z])
        reflexive_clique(Ks)
        full(Ks, M1 + M2 + B1 + B2)
        full(M2, M1 + B1)
        full(M1, B2)
        rand_across(B1, B2)
        rand_between(M1, M1, loops=True)
        rand_between(M2, M2, loops=True)
        rand_across(M1 + M2 + Ks, Zs)
        rand_between(Zs, Zs, loops=True)
        return _relabel(rng, n, edges, [B1, B2, Ks, M1, M2, Zs])
    raise ValueError(f"unknown decomposition kind {kind!r}")


def random_instance(rng: SplitMix64, h: Graph, n_min=1, n_max=10, edge=(1, 3), density=(1, 2)) -> Instance:
    n = rng.between(n_min, n_max)
    g = random_graph(rng, n, edge)
    return Instance.make(g, random_lists(rng, n, h, density), h)


def generate(kind: str, gen: SeededGenerator, **params):
    """Deterministic object factory keyed by `kind`.

    target, instance (needs target=), strong_split, decomposable_target
    (needs decomposition=), gnp_loops (edges and loops with the given odds).
    """
    rng = gen.rng()
    e = (gen.edge_num, gen.edge_den)
    lo = (gen.loop_num, gen.loop_den)
    if kind == "target":
        n = rng.between(gen.min_vertices, gen.max_vertices)
        return random_graph(rng, n, e, lo)
    if kind == "gnp_loops":
        return random_graph(rng, gen.max_vertices, e, lo)
    if kind == "instance":
        h = params["target"]
        return random_instance(rng, h, gen.min_vertices, gen.max_vertices, e, (gen.list_num, gen.list_den))
    if kind == "strong_split":
        total = rng.between(max(2, gen.min_vertices), max(2, gen.max_vertices))
        n_b = rng.between(1, total - 1)
        return random_strong_split(rng, n_b, total - n_b, e)
    if kind == "decomposable_target":
        return planted_decomposable_target(rng, params["decomposition"], gen.max_vertices, e)
    raise ValueError(f"unknown generator kind {kind!r}")


def brute_force_i_star_bipartite(h: Graph, is_cocircular: Callable[[Graph], bool], max_vertices: int = 14) -> int:
    """i* of a bipartite graph by scanning every induced subgraph.

    Intended only as a cross-check: exponential in |V(h)|.
    """
    from .graph import incomparability_number

    if h.n > max_vertices:
        raise TargetTooLarge(f"{h.n} vertices exceeds the brute-force cap {max_vertices}")
    best = 1
    for mask in range(1, 1 << h.n):
        if len(components(h, mask)) != 1:
            continue
        sub, _ = h.induced(bits(mask))
        bip = is_bipartite(sub)
        if is_decomposable_brute(sub, "bipartite", bip, max_vertices=max_vertices):
            continue
        if is_cocircular(sub):
            continue
        best = max(best, incomparability_number(sub, bip))
    return best
