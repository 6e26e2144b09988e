"""Bipartite and general (F / BP / B) decompositions of targets, and their factors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import PreconditionViolated
from .graph import X, Y, Bipartition, Graph, associated_bipartite, bits, components, is_bipartite, to_mask


@dataclass(frozen=True)
class BipartiteDecomposition:
    D: frozenset[int]
    N: frozenset[int]
    R: frozenset[int]
    kind = "Bipartite"

    def parts(self):
        return (self.D, self.N, self.R)


@dataclass(frozen=True)
class FDecomposition:
    F: frozenset[int]
    K: frozenset[int]
    Z: frozenset[int]
    kind = "F"

    def parts(self):
        return (self.F, self.K, self.Z)


@dataclass(frozen=True)
class BPDecomposition:
    B: frozenset[int]
    P: frozenset[int]
    M: frozenset[int]
    K: frozenset[int]
    Z: frozenset[int]
    kind = "BP"

    def parts(self):
        return (self.B, self.P, self.M, self.K, self.Z)


@dataclass(frozen=True)
class BDecomposition:
    B1: frozenset[int]
    B2: frozenset[int]
    K: frozenset[int]
    M1: frozenset[int]
    M2: frozenset[int]
    Z: frozenset[int]
    kind = "B"

    def parts(self):
        return (self.B1, self.B2, self.K, self.M1, self.M2, self.Z)


GeneralDecomposition = Union[BipartiteDecomposition, FDecomposition, BPDecomposition, BDecomposition]


# ---------------------------------------------------------------------------
# condition lists

def _complete(h: Graph, a, b) -> bool:
    return all(h.has_edge(x, y) for x in a for y in b if x != y) and all(
        h.has_loop(x) for x in set(a) & set(b)
    )


def _nonadjacent(h: Graph, a, b) -> bool:
    return not any(h.has_edge(x, y) for x in a for y in b)


def _reflexive_clique(h: Graph, a) -> bool:
    return all(h.has_loop(x) for x in a) and all(h.has_edge(x, y) for x in a for y in a)


def _independent(h: Graph, a) -> bool:
    return not any(h.has_edge(x, y) for x in a for y in a)


def _is_partition(h: Graph, parts) -> bool:
    seen = set()
    for p in parts:
        if seen & p:
            return False
        seen |= p
    return seen == set(range(h.n))


def decomposition_problems(h: Graph, dec: GeneralDecomposition, sides: Bipartition | None = None) -> list[str]:
    """Names of violated defining conditions; empty means valid."""
    out = []
    if not _is_partition(h, dec.parts()):
        return ["sets do not partition the vertex set"]
    if isinstance(dec, BipartiteDecomposition):
        sides = sides or is_bipartite(h)
        if sides is None:
            return ["graph is not bipartite"]
        cls = lambda s, c: {v for v in s if sides.side[v] == c}
        D, N, R = dec.D, dec.N, dec.R
        if not N:
            out.append("N is empty")
        if not _nonadjacent(h, D, R):
            out.append("N does not separate D and R")
        if len(cls(D, X)) < 2 and len(cls(D, Y)) < 2:
            out.append("|D_X| < 2 and |D_Y| < 2")
        if not _complete(h, cls(N, X), cls(N, Y)):
            out.append("N is not a biclique")
        if not (_complete(h, cls(D, X), cls(N, Y)) and _complete(h, cls(D, Y), cls(N, X))):
            out.append("D is not bipartite-complete to N")
        return out
    if isinstance(dec, FDecomposition):
        F, K, Z = dec.F, dec.K, dec.Z
        if not K:
            out.append("K is empty")
        if not _nonadjacent(h, F, Z):
            out.append("K does not separate F and Z")
        if len(F) < 2:
            out.append("|F| < 2")
        if not _reflexive_clique(h, K):
            out.append("K is not a reflexive clique")
        if not _complete(h, F, K):
            out.append("F is not complete to K")
        return out
    if isinstance(dec, BPDecomposition):
        B, P, M, K, Z = dec.B, dec.P, dec.M, dec.K, dec.Z
        if not (K | M):
            out.append("K and M are both empty")
        if not _nonadjacent(h, P | B, Z):
            out.append("edge between P or B and Z")
        if len(P) < 2 and len(B) < 2:
            out.append("|P| < 2 and |B| < 2")
        if not _reflexive_clique(h, K | P):
            out.append("K with P is not a reflexive clique")
        if not _independent(h, B):
            out.append("B is not independent")
        if not _complete(h, M, P | K):
            out.append("M is not complete to P and K")
        if not _complete(h, B, K):
            out.append("B is not complete to K")
        if not _nonadjacent(h, B, M):
            out.append("B is adjacent to M")
        return out
    if isinstance(dec, BDecomposition):
        B1, B2, K, M1, M2, Z = dec.parts()
        if not (K | M1 | M2):
            out.append("K, M1, M2 are all empty")
        if not _nonadjacent(h, B1 | B2, Z):
            out.append("separator fails between B and Z")
        if len(B1) < 2 and len(B2) < 2:
            out.append("|B1| < 2 and |B2| < 2")
        if not _reflexive_clique(h, K):
            out.append("K is not a reflexive clique")
        if not (_independent(h, B1) and _independent(h, B2)):
            out.append("B1 or B2 is not independent")
        if not _complete(h, K, M1 | M2 | B1 | B2):
            out.append("K is not complete to M1, M2, B1, B2")
        if not _complete(h, M2, M1 | B1):
            out.append("M2 is not complete to M1 and B1")
        if not _complete(h, M1, B2):
            out.append("M1 is not complete to B2")
        if not _nonadjacent(h, B1, M1):
            out.append("B1 is adjacent to M1")
        if not _nonadjacent(h, B2, M2):
            out.append("B2 is adjacent to M2")
        return out
    raise TypeError(f"not a decomposition: {dec!r}")


# ---------------------------------------------------------------------------
# bipartite decomposition search

def find_bipartite_decomposition(h: Graph, sides: Bipartition | None = None) -> BipartiteDecomposition | None:
    """A decomposition (D, N, R) of a bipartite graph, or None if there is none.

    D is grown from every same-class seed pair. A vertex adjacent to D but
    not complete to D's opposite-class part can only be in D, so it is
    pulled in; when the boundary N is not yet a biclique some non-adjacent
    pair x, y of N must lose a member to D, which gives a two-way branch.
    The search is exhaustive over all D containing a seed pair.
    """
    sides = sides or is_bipartite(h)
    if sides is None:
        raise PreconditionViolated("bipartite decomposition needs a bipartite graph")
    n = h.n
    cls = [sides.x_mask, sides.y_mask]
    side = sides.side
    adj = h.masks

    def grow(D, excluded):
        while True:
            boundary = 0
            for d in bits(D):
                boundary |= adj[d]
            boundary &= ~D
            forced = 0
            for w in bits(boundary):
                opp = D & cls[1 - side[w]]
                if opp & ~adj[w]:
                    forced |= 1 << w
            if not forced:
                return D, boundary
            if forced & excluded:
                return None
            D |= forced

    def search(D, excluded):
        res = grow(D, excluded)
        if res is None:
            return None
        D, N = res
        if not N:
            return None
        nx, ny = N & cls[X], N & cls[Y]
        for x in bits(nx):
            missing = ny & ~adj[x]
            if missing:
                y = missing & -missing
                found = search(D | (1 << x), excluded)
                if found:
                    return found
                if excluded & y:
                    return None
                return search(D | y, excluded | (1 << x))
        return D, N

    for c in (X, Y):
        members = list(bits(cls[c]))
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                found = search((1 << a) | (1 << b), 0)
                if found:
                    D, N = found
                    R = ((1 << n) - 1) & ~D & ~N
                    dec = BipartiteDecomposition(frozenset(bits(D)), frozenset(bits(N)), frozenset(bits(R)))
                    assert not decomposition_problems(h, dec, sides), decomposition_problems(h, dec, sides)
                    return dec
    # closed D made of isolated vertices of one class, with N a lone vertex of that class
    for c in (X, Y):
        isolated = [v for v in bits(cls[c]) if adj[v] == 0]
        if len(isolated) >= 2:
            rest = [v for v in bits(cls[c]) if v not in isolated[:2]]
            if rest:
                D = frozenset(isolated[:2])
                N = frozenset({rest[0]})
                dec = BipartiteDecomposition(D, N, frozenset(range(n)) - D - N)
                assert not decomposition_problems(h, dec, sides)
                return dec
    return None


# ---------------------------------------------------------------------------
# general decomposition via H*, replaying the case analysis

def is_strong_split_sets(h: Graph) -> tuple[frozenset[int], frozenset[int]] | None:
    B = frozenset(v for v in range(h.n) if not h.has_loop(v))
    P = frozenset(range(h.n)) - B
    if _independent(h, B) and _reflexive_clique(h, P):
        return B, P
    return None


def nine_sets(h: Graph, dec_star: BipartiteDecomposition) -> dict[str, frozenset[int]]:
    """Split V(h) by where the twins x' and x'' land in (D, N, R) of H*."""
    n = h.n
    where = {}
    for name, part in zip("DNR", dec_star.parts()):
        for w in part:
            where[w] = name
    table = {
        ("D", "D"): "F", ("D", "N"): "P", ("D", "R"): "B1",
        ("N", "D"): "Q", ("N", "N"): "K", ("N", "R"): "M1",
        ("R", "D"): "B2", ("R", "N"): "M2", ("R", "R"): "Z",
    }
    out = {name: set() for name in table.values()}
    for x in range(n):
        out[table[(where[x], where[n + x])]].add(x)
    return {k: frozenset(v) for k, v in out.items()}


def general_from_star(h: Graph, dec_star: BipartiteDecomposition) -> GeneralDecomposition:
    """Turn a decomposition of H* into an F-, BP- or B-decomposition of h."""
    s = nine_sets(h, dec_star)
    F, P, B1, Q, K, M1, B2, M2, Z = (s[k] for k in ("F", "P", "B1", "Q", "K", "M1", "B2", "M2", "Z"))
    empty = frozenset()

    def swap():
        nonlocal P, Q, B1, B2, M1, M2
        P, Q = Q, P
        B1, B2 = B2, B1
        M1, M2 = M2, M1

    if F:
        if K:
            return FDecomposition(F | P | Q | B1 | B2, K, Z | M1 | M2)
        if not P:
            swap()
        if Q:
            return FDecomposition(F | Q, P, frozenset(range(h.n)) - F - Q - P)
        if len(F) >= 2:
            return FDecomposition(F, P, frozenset(range(h.n)) - F - P)
        if len(B2) >= 2 or len(P) >= 2:
            return BPDecomposition(B2, P, F, empty, frozenset(range(h.n)) - B2 - P - F)
        raise PreconditionViolated("target is a bi-arc graph")
    if B1 and not B2:
        swap()
    if B1 and B2:
        return BDecomposition(B1, B2, K, M1, M2, Z | P | Q)
    if B2:
        if P:
            if M2 | K:
                return BPDecomposition(B2, P, M2, K, Z | Q | M1)
            raise PreconditionViolated("target is a strong split graph")
        return BDecomposition(empty, B2, K, M1, M2, Z | Q)
    # no B vertices at all
    if M1 and not M2:
        swap()
    if M2 and not M1:
        return BPDecomposition(empty, P, M2, K, Z | Q)
    if not M1 and not M2:
        if len(P) < 2:
            swap()
        if Q | K:
            return FDecomposition(P, Q | K, Z)
        raise PreconditionViolated("target is a reflexive clique")
    raise AssertionError("decomposition of H* falls outside the case analysis")


def find_general_decomposition(h: Graph) -> GeneralDecomposition | None:
    """An F-, BP- or B-decomposition of a connected non-bipartite target.

    The search runs on H* (a bipartite decomposition there exists iff one
    of the three kinds exists for h); the result is checked against its
    full condition list before it is returned.
    """
    if len(components(h)) > 1:
        raise PreconditionViolated("general decomposition needs a connected target")
    if is_strong_split_sets(h) is not None:
        raise PreconditionViolated("target is a strong split graph")
    h_star, twins = associated_bipartite(h)
    dec_star = find_bipartite_decomposition(h_star, twins.bipartition)
    if dec_star is None:
        return None
    dec = general_from_star(h, dec_star)
    problems = decomposition_problems(h, dec)
    assert not problems, (dec, problems)
    return dec


# ---------------------------------------------------------------------------
# factors

@dataclass(frozen=True)
class Factors:
    """h1 is induced on `h1_origin`; h2 keeps the rest and adds contracted vertices.

    h2_origin[i] lists the parent vertices that vertex i of h2 stands for;
    `contracted` names the added vertices (dX, dY, f, p, b, b1, b2).
    """

    h1: Graph
    h1_origin: tuple[int, ...]
    h2: Graph
    h2_origin: tuple[frozenset[int], ...]
    contracted: dict

    def h2_index(self, parent_vertex: int) -> int | None:
        for i, grp in enumerate(self.h2_origin):
            if len(grp) == 1 and parent_vertex in grp and i not in self.contracted.values():
                return i
        return None


def contract(h: Graph, groups: list[tuple[str, frozenset[int]]]) -> tuple[Graph, tuple[frozenset[int], ...], dict]:
    """Collapse each nonempty group to one vertex; adjacency is the union."""
    grouped = set()
    for _, g in groups:
        grouped |= g
    retained = [v for v in range(h.n) if v not in grouped]
    origin = [frozenset({v}) for v in retained]
    names = {}
    for name, g in groups:
        if g:
            names[name] = len(origin)
            origin.append(frozenset(g))
    masks_of = [to_mask(o) for o in origin]
    m = len(origin)
    edges = []
    for i in range(m):
        ni = h.neighborhood_of_set(origin[i])
        for j in range(i, m):
            if ni & masks_of[j]:
                edges.append((i, j))
    return Graph(m, edges), tuple(origin), names


def factors(h: Graph, dec: GeneralDecomposition, sides: Bipartition | None = None) -> Factors:
    if isinstance(dec, BipartiteDecomposition):
        sides = sides or is_bipartite(h)
        inner = dec.D
        groups = [
            ("dX", frozenset(v for v in dec.D if sides.side[v] == X)),
            ("dY", frozenset(v for v in dec.D if sides.side[v] == Y)),
        ]
    elif isinstance(dec, FDecomposition):
        inner = dec.F
        groups = [("f", dec.F)]
    elif isinstance(dec, BPDecomposition):
        inner = dec.B | dec.P
        groups = [("p", dec.P), ("b", dec.B)]
    elif isinstance(dec, BDecomposition):
        inner = dec.B1 | dec.B2
        groups = [("b1", dec.B1), ("b2", dec.B2)]
    else:
        raise TypeError(dec)
    h1, h1_origin = h.induced(inner)
    h2, h2_origin, names = contract(h, groups)
    assert h1.n < h.n and h2.n < h.n, "factors must shrink"
    return Factors(h1, h1_origin, h2, h2_origin, names)
