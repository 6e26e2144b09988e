"""Obstruction search in bipartite graphs: induced C6, C8, or an edge asteroid.

A bipartite graph has no obstruction exactly when it is the complement of
a circular-arc graph. Longer induced cycles are not searched separately:
every induced cycle on ten or more vertices already carries an asteroid.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import TargetTooLarge
from .graph import X, Bipartition, Graph, bits, components, is_bipartite, to_mask

MAX_OBSTRUCTION_VERTICES = 24


@dataclass(frozen=True)
class Obstruction:
    kind: str                                   # "C6", "C8" or "Asteroid"
    cycle: tuple[int, ...] = ()                 # w1..wk for cycle kinds
    k: int = 0                                  # asteroid order, 2k+1 edges
    u: tuple[int, ...] = ()
    v: tuple[int, ...] = ()
    paths: tuple[tuple[int, ...], ...] = field(default=())   # W_{i,i+1}

    @property
    def vertices(self) -> frozenset[int]:
        if self.kind != "Asteroid":
            return frozenset(self.cycle)
        out = set(self.u) | set(self.v)
        for p in self.paths:
            out.update(p)
        return frozenset(out)

    def corners(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """The two distinguished (alpha, beta) pairs."""
        if self.kind == "C6":
            w = self.cycle
            return (w[0], w[4]), (w[1], w[3])
        if self.kind == "C8":
            w = self.cycle
            return (w[0], w[4]), (w[1], w[5])
        return (self.u[0], self.u[1]), (self.v[0], self.v[1])

    def summary(self, offset: int = 0) -> str:
        f = lambda seq: [x + offset for x in seq]
        if self.kind == "Asteroid":
            return f"Asteroid(k={self.k}, u={f(self.u)}, v={f(self.v)})"
        return f"{self.kind}({f(self.cycle)})"


def induced_cycle(h: Graph, length: int) -> tuple[int, ...] | None:
    """Lexicographically first chordless cycle of the given length.

    The first vertex is the smallest on the cycle and w2 < wk, so each
    cycle is met exactly once.
    """
    n = h.n
    adj = [m & ~(1 << v) for v, m in enumerate(h.masks)]
    for start in range(n):
        higher = ~((1 << (start + 1)) - 1)
        path = [start]
        # vertices that may not be used next: on the path or adjacent to an interior path vertex
        def extend(blocked):
            last = path[-1]
            if len(path) == length:
                if (adj[last] >> start) & 1 and path[1] < path[-1]:
                    return tuple(path)
                return None
            for w in bits(adj[last] & higher & ~blocked):
                # w must not touch the start unless it closes the cycle
                if 2 <= len(path) < length - 1 and (adj[w] >> start) & 1:
                    continue
                if len(path) == length - 1 and not (adj[w] >> start) & 1:
                    continue
                path.append(w)
                # the start's neighbours stay open: the closing vertex is one of them
                res = extend(blocked | (1 << w) | (adj[last] if last != start else 0))
                if res:
                    return res
                path.pop()
            return None

        res = extend(1 << start)
        if res:
            return res
    return None


def _shortest_path(h: Graph, allowed: int, s: int, t: int) -> tuple[int, ...] | None:
    """Preferred shortest s-t path inside `allowed`: lexicographically least."""
    if not ((allowed >> s) & 1 and (allowed >> t) & 1):
        return None
    dist = _bfs(h, allowed, t)
    if s not in dist:
        return None
    return _lex_walk(h, allowed, dist, s)


def _bfs(h: Graph, allowed: int, source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in bits(h.masks[x] & allowed):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def _lex_walk(h, allowed, dist_to_t, s):
    out = [s]
    cur = s
    while dist_to_t[cur] > 0:
        for y in bits(h.masks[cur] & allowed):
            if dist_to_t.get(y) == dist_to_t[cur] - 1:
                cur = y
                break
        out.append(cur)
    return tuple(out)


def select_asteroid_path(h: Graph, allowed: int, s: int, t: int, vs: int, vt: int) -> tuple[int, ...] | None:
    """Shortest s-t path in `allowed`, preferring ones through vs, then vt.

    On a shortest path vs can only sit right after s and vt right before t.
    """
    base = _shortest_path(h, allowed, s, t)
    if base is None:
        return None
    best_len = len(base)

    def through(first, last):
        # path s, first, ..., last, t of length best_len
        inner_allowed = allowed
        if first is not None and not ((allowed >> first) & 1 and h.has_edge(s, first)):
            return None
        if last is not None and not ((allowed >> last) & 1 and h.has_edge(last, t)):
            return None
        a = first if first is not None else s
        b = last if last is not None else t
        need = best_len - (first is not None) - (last is not None)
        if first is not None and last is not None and first == last:
            return None
        mid_allowed = inner_allowed & ~(1 << s) & ~(1 << t)
        if first is not None:
            mid_allowed |= 1 << first
        if last is not None:
            mid_allowed |= 1 << last
        if a == b:
            return None
        dist = _bfs(h, mid_allowed | (1 << a) | (1 << b), b)
        if dist.get(a) != need - 1:
            return None
        core = _lex_walk(h, mid_allowed | (1 << a) | (1 << b), dist, a)
        return ((s,) if first is not None else ()) + core + ((t,) if last is not None else ())

    for first, last in ((vs, vt), (vs, None), (None, vt)):
        p = through(first, last)
        if p is not None and len(p) == best_len and len(set(p)) == len(p):
            return p
    return base


def _closed(h: Graph, *vertices: int) -> int:
    out = 0
    for v in vertices:
        out |= h.masks[v] | (1 << v)
    return out


def check_asteroid(h: Graph, k: int, u: Sequence[int], v: Sequence[int], paths: Sequence[Sequence[int]]) -> list[str]:
    """Conditions (a) and (b) checked edge by edge; empty when valid."""
    m = 2 * k + 1
    problems = []
    if len(set(u)) != m or len(set(v)) != m or set(u) & set(v):
        problems.append("asteroid vertices are not distinct")
    for i in range(m):
        if not h.has_edge(u[i], v[i]):
            problems.append(f"u{i} v{i} not adjacent")
        p = paths[i]
        if p[0] != u[i] or p[-1] != u[(i + 1) % m]:
            problems.append(f"W{i} has wrong ends")
        for a, b in zip(p, p[1:]):
            if not h.has_edge(a, b):
                problems.append(f"W{i} is not a path")
    for i in range(m):
        j = (i + k) % m
        far = {v[j], v[(j + 1) % m], *paths[j]}
        for a in (u[i], v[i]):
            if a in far or any(h.has_edge(a, b) for b in far):
                problems.append(f"condition (a) fails at i={i}")
                break
    far0 = set(v[1:])
    for i in range(1, 2 * k):
        far0.update(paths[i])
    for a in (u[0], v[0]):
        if a in far0 or any(h.has_edge(a, b) for b in far0):
            problems.append("condition (b) fails")
            break
    return problems


def dual_paths(k: int, u, v, paths) -> tuple[tuple[int, ...], ...]:
    """v_i-v_{i+1} paths from the chosen u-paths by swapping the end vertices."""
    m = 2 * k + 1
    out = []
    for i in range(m):
        p = list(paths[i])
        vi, vn = v[i], v[(i + 1) % m]
        if len(p) >= 2 and p[1] == vi:
            p = p[1:]
        else:
            p = [vi] + p
        if len(p) >= 2 and p[-2] == vn:
            p = p[:-1]
        else:
            p = p + [vn]
        out.append(tuple(p))
    return tuple(out)


def _reaches(h: Graph, allowed: int, s: int, t: int) -> bool:
    if not ((allowed >> s) & 1 and (allowed >> t) & 1):
        return False
    seen = frontier = 1 << s
    masks = h.masks
    while frontier:
        if (seen >> t) & 1:
            return True
        nxt = 0
        for x in bits(frontier):
            nxt |= masks[x]
        frontier = nxt & allowed & ~seen
        seen |= frontier
    return bool((seen >> t) & 1)


def find_asteroid(h: Graph, sides: Bipartition, k: int) -> Obstruction | None:
    """First edge asteroid of order k in index order of (u_i, v_i) choices.

    Pairs i and i +- k must have disjoint closed neighbourhoods, which is
    enforced with masks while the tuple grows; each W path only has to
    exist during the search and the preferred one is picked at the end.
    For k = 1 every permutation of an asteroid is one again, so the three
    pairs are taken in increasing order.
    """
    symmetric = k == 1
    m = 2 * k + 1
    full = (1 << h.n) - 1
    masks = h.masks
    xs = sides.x_mask
    u = [-1] * m
    v = [-1] * m
    closed = [0] * m
    # far[i]: earlier indices whose pair must stay outside N[pair i]
    far = [[a for a in range(i) if (i - a) % m in (k, k + 1)] for i in range(m)]
    # path j can be checked once j, j+1 and j+k+1 are all placed
    ready = [[] for _ in range(m)]
    for j in range(m):
        ready[max(j, (j + 1) % m, (j + k + 1) % m)].append(j)

    def path_allowed(j):
        mask = closed[(j + k + 1) % m]
        if 1 <= j <= 2 * k - 1:
            mask |= closed[0]
        return full & ~mask

    def rec(i):
        if i == m:
            return True
        used_u = used_v = 0
        block = 0
        for a in far[i]:
            block |= closed[a]
        for a in range(i):
            used_u |= 1 << u[a]
            used_v |= 1 << v[a]
        cand_u = xs & ~block & ~used_u
        block_v = block | used_v
        if i >= 1:
            block_v |= masks[u[0]]
        for a in bits(cand_u):
            if symmetric and i and a < u[i - 1]:
                continue
            for b in bits(masks[a] & ~block_v):
                if symmetric and i and a == u[i - 1] and b < v[i - 1]:
                    continue
                u[i], v[i], closed[i] = a, b, masks[a] | masks[b] | (1 << a) | (1 << b)
                if all(_reaches(h, path_allowed(j), u[j], u[(j + 1) % m]) for j in ready[i]):
                    if rec(i + 1):
                        return True
        u[i] = v[i] = -1
        closed[i] = 0
        return False

    if not rec(0):
        return None
    paths = []
    for j in range(m):
        p = select_asteroid_path(h, path_allowed(j), u[j], u[(j + 1) % m], v[j], v[(j + 1) % m])
        paths.append(p)
    ob = Obstruction("Asteroid", k=k, u=tuple(u), v=tuple(v), paths=tuple(paths))
    problems = check_asteroid(h, k, ob.u, ob.v, ob.paths)
    if problems:
        raise AssertionError("asteroid search produced an invalid asteroid: " + problems[0])
    return ob


def find_obstruction(h: Graph, sides: Bipartition | None = None) -> Obstruction | None:
    """Some obstruction of a bipartite graph, or None if it is co-circular-arc."""
    sides = sides or is_bipartite(h)
    if sides is None:
        raise ValueError("obstruction search needs a bipartite graph")
    for length, kind in ((6, "C6"), (8, "C8")):
        if h.n >= length:
            cyc = induced_cycle(h, length)
            if cyc is not None:
                return Obstruction(kind, cycle=cyc)
    if h.n > MAX_OBSTRUCTION_VERTICES:
        raise TargetTooLarge(f"asteroid search capped at {MAX_OBSTRUCTION_VERTICES} vertices, got {h.n}")
    k = 1
    while 4 * k + 2 <= h.n:
        ob = find_asteroid(h, sides, k)
        if ob is not None:
            return ob
        k += 1
    return None


def is_cocircular(h: Graph) -> bool:
    """Complement of a circular-arc graph, tested per component."""
    for comp in components(h):
        sub, _ = h.induced(bits(comp))
        if sub.n >= 6 and find_obstruction(sub) is not None:
            return False
    return True
