import pytest

from lhom.errors import PreconditionViolated, SearchExhausted
from lhom.gadgets import (
    Gadget,
    avoids,
    build_distinguisher,
    build_nand_gadget,
    build_neq2_gadget,
    build_neq_gadget,
    build_or_gadget,
    build_path_gadget,
    compose,
    compose_gadgets,
    corner_pairs,
    cycle_or3_fixture,
    distinguisher_problems,
    find_avoiding_family,
    find_avoiding_walks,
    interface_relation,
    interface_relation_by_enumeration,
    is_walk,
    lift_gadget_to_general,
    nand_relation,
    neq_gadget_for,
    neq_relation,
    or_relation,
    reduce_coloring,
    reverse,
    verify_gadget,
)
from lhom.graph import (
    Graph,
    associated_bipartite,
    bits,
    complete,
    complete_bipartite,
    components,
    cycle,
    is_bipartite,
    max_incomparable_set,
    path,
)
from lhom.instance import Instance
from lhom.obstructions import find_obstruction
from lhom.oracle import brute_force_lhom, chromatic_upper, random_graph
from lhom.rng import SplitMix64
from lhom.solver import solve
from lhom.treedec import decomposition_problems

C6 = cycle(6)
C6_OB = find_obstruction(C6)


def class_set(h, pair):
    sides = is_bipartite(h)
    return sorted(max_incomparable_set(h, bits(sides.class_mask(sides.side[pair[0]]))))


def test_walk_helpers():
    assert is_walk(C6, (0, 1, 2, 1))
    assert not is_walk(C6, (0, 2))
    assert reverse((1, 2, 3)) == (3, 2, 1)
    assert compose((0, 1, 2), (2, 3)) == (0, 1, 2, 3)
    with pytest.raises(PreconditionViolated):
        compose((0, 1), (3, 4))


def test_avoids_definition():
    # 0-1-2 against 2-3-4 on C6: p1 != q1 and neither 0-3 nor 1-4 is an edge
    assert avoids(C6, (0, 1, 2), (2, 3, 4))
    assert not avoids(C6, (0, 1, 2), (0, 1, 2))
    assert not avoids(C6, (0, 1, 2), (2, 1, 0))          # p1 q2 is the edge 0-1
    assert not avoids(C6, (0, 1), (1, 2))                # different classes
    assert not avoids(C6, (0, 1, 2), (2, 3))


def _random_walk(rng, h, start, length):
    w = [start]
    for _ in range(length):
        w.append(rng.choice(h.neighbors(w[-1])))
    return tuple(w)


def test_avoidance_closed_under_composition():
    rng = SplitMix64(3)
    h = cycle(8)
    found = 0
    for _ in range(4000):
        p = _random_walk(rng, h, rng.below(8), 3)
        q = _random_walk(rng, h, rng.below(8), 3)
        if not avoids(h, p, q):
            continue
        p2 = _random_walk(rng, h, p[-1], 2)
        q2 = _random_walk(rng, h, q[-1], 2)
        if not avoids(h, p2, q2):
            continue
        found += 1
        assert avoids(h, compose(p, p2), compose(q, q2))
    assert found > 10


def test_find_avoiding_walks_on_c6():
    walks = find_avoiding_walks(C6, (0, 2), (0, 4), (0, 1))
    assert walks is not None
    p, q = walks
    assert p[0] == 0 and p[-1] == 0 and q[0] == 2 and q[-1] == 4
    assert avoids(C6, p, q)


def test_complete_bipartite_has_no_avoiding_walks():
    h = complete_bipartite(3, 3)
    assert find_avoiding_walks(h, (0, 1), (0, 1), (0, 1)) is None
    with pytest.raises(SearchExhausted):
        find_avoiding_family(h, (0, 1, 2), 0, 1, 0, 1)


def test_path_gadget_relation():
    walks = find_avoiding_walks(C6, (0, 2), (0, 4), (0, 1))
    g = build_path_gadget(C6, walks, (0, 1))
    rel = interface_relation(g)
    assert (0, 0) in rel and (2, 4) in rel
    # one-way: only the group-0 start is kept away from the group-1 end
    assert (0, 4) not in rel
    assert verify_gadget(g).ok
    assert rel == interface_relation_by_enumeration(g)


def test_relations():
    assert neq_relation([1, 2, 3]) == {(a, b) for a in (1, 2, 3) for b in (1, 2, 3) if a != b}
    assert (3, 3) not in or_relation(3, 5, 2) and len(or_relation(3, 5, 3)) == 7
    assert nand_relation(3, 5) == {(3, 3), (3, 5), (5, 3)}


@pytest.mark.parametrize("pair", corner_pairs(C6_OB))
def test_c6_or3_fixture(pair):
    fixture = cycle_or3_fixture(C6, C6_OB, pair)
    assert fixture.required_relation == or_relation(*pair, 3)
    res = verify_gadget(fixture)
    assert res.ok
    assert res.relation == interface_relation_by_enumeration(fixture)


@pytest.mark.parametrize("pair", corner_pairs(C6_OB))
def test_c6_relation_gadgets(pair):
    assert verify_gadget(build_neq2_gadget(C6, C6_OB, pair)).ok
    for k in (2, 3, 4):
        assert verify_gadget(build_or_gadget(C6, C6_OB, pair, k)).ok
    assert verify_gadget(build_nand_gadget(C6, C6_OB, pair)).ok


@pytest.mark.parametrize("pair", corner_pairs(C6_OB))
def test_c6_distinguishers(pair):
    S = class_set(C6, pair)
    for a in S:
        for b in S:
            if a != b:
                d = build_distinguisher(C6, S, a, b, pair)
                assert verify_gadget(d).ok
                assert distinguisher_problems(d, S, a, b, *pair) == []


def test_widened_list_breaks_d5():
    pair = corner_pairs(C6_OB)[0]
    S = class_set(C6, pair)
    d = build_distinguisher(C6, S, S[0], S[1], pair)
    inner = next(v for v in range(d.size) if v not in d.interface)
    wide = d.with_lists([frozenset(range(6)) if v == inner else lst for v, lst in enumerate(d.lists)])
    assert "D5" in distinguisher_problems(wide, S, S[0], S[1], *pair)
    res = verify_gadget(wide)
    assert not res.ok and res.counterexample == (S[0], pair[1])


def test_corrupted_requirement_yields_counterexample():
    pair = corner_pairs(C6_OB)[0]
    good = cycle_or3_fixture(C6, C6_OB, pair)
    dropped = min(good.required_relation)
    bad = Gadget(good.name, good.target, good.graph, good.lists, good.interface, good.required_relation - {dropped})
    res = verify_gadget(bad)
    assert not res.ok and res.counterexample == dropped


def test_neq_over_c6():
    gadget = neq_gadget_for(C6)
    S = tuple(sorted(gadget.lists[gadget.interface[0]]))
    assert len(S) == 3
    res = verify_gadget(gadget)
    assert res.ok and res.relation == neq_relation(S)
    assert gadget.meta["verified"]


def test_neq_rejects_bad_sets():
    with pytest.raises(PreconditionViolated):
        build_neq_gadget(C6, [0])
    with pytest.raises(PreconditionViolated):
        build_neq_gadget(C6, [0, 1])
    with pytest.raises(PreconditionViolated):
        build_neq_gadget(complete_bipartite(3, 3), [0, 1])


def test_compose_gadgets_relation():
    pair = corner_pairs(C6_OB)[0]
    neq2 = build_neq2_gadget(C6, C6_OB, pair)
    both = compose_gadgets(neq2, neq2)
    res = verify_gadget(both)
    assert res.ok
    assert res.relation == {(pair[0], pair[0]), (pair[1], pair[1])}


# lifting to non-bipartite targets


def _random_aligned_gadget(rng, h_star, twins):
    """A small bipartite gadget over H* whose lists follow the gadget's classes."""
    while True:
        g = random_graph(rng, rng.between(2, 5), (1, 2))
        sides = is_bipartite(g)
        if sides is not None and len(components(g)) == 1:
            break
    flip = rng.below(2)
    lists = []
    for v in range(g.n):
        cls = sides.side[v] ^ flip
        pool = [twins.prime(u) if cls == 0 else twins.doubleprime(u) for u in range(twins.n)]
        lists.append(frozenset(rng.sample(pool, rng.between(1, len(pool)))))
    iface = tuple(rng.sample(range(g.n), 2))
    bare = Gadget("random", h_star, g, tuple(lists), iface, frozenset())
    rel = interface_relation(bare)
    return Gadget("random", h_star, g, tuple(lists), iface, rel)


def test_lifting_preserves_relations():
    rng = SplitMix64(41)
    pairs = 0
    while pairs < 50:
        h = random_graph(rng, rng.between(2, 5), (1, 2), (1, 3))
        if len(components(h)) != 1:
            continue
        h_star, twins = associated_bipartite(h)
        gadget = _random_aligned_gadget(rng, h_star, twins)
        lifted = lift_gadget_to_general(h, gadget, twins)
        assert verify_gadget(lifted).ok
        assert interface_relation(lifted) == lifted.required_relation
        pairs += 1


def test_lifting_rejects_mixed_lists():
    h = complete(3)
    h_star, twins = associated_bipartite(h)
    g = Gadget("mixed", h_star, path(2), (frozenset({0, 3}), frozenset({4})), (0, 1), frozenset())
    with pytest.raises(PreconditionViolated):
        lift_gadget_to_general(h, g, twins)


def test_k3_neq_is_lifted():
    gadget = neq_gadget_for(complete(3))
    assert gadget.name.endswith("/lifted")
    assert gadget.target == complete(3)
    S = gadget.lists[gadget.interface[0]]
    assert S == frozenset(range(3))
    assert verify_gadget(gadget).relation == neq_relation(S)


def test_bipartite_target_is_not_lifted():
    gadget = neq_gadget_for(C6)
    assert gadget.target == C6 and not gadget.name.endswith("/lifted")


def test_strong_split_target_neq():
    # C6 whose odd vertices form a reflexive clique
    h = Graph(6, [(i, (i + 1) % 6) for i in range(6)] + [(1, 1), (3, 3), (5, 5), (1, 3), (3, 5), (1, 5)])
    gadget = neq_gadget_for(h)
    S = gadget.lists[gadget.interface[0]]
    assert verify_gadget(gadget).relation == neq_relation(S)


# the colouring reduction


@pytest.fixture(scope="module")
def c6_neq():
    return neq_gadget_for(C6)


@pytest.mark.parametrize("g", [complete(3), complete(4), cycle(5), Graph(4, [(0, 1), (2, 3)]), Graph(3)],
                         ids=["K3", "K4", "C5", "2K2", "empty3"])
def test_reduction_answers(g, c6_neq):
    red = reduce_coloring(g, C6, gadget=c6_neq)
    assert decomposition_problems(red.instance.g, red.pd, path=True) == []
    assert red.width <= red.width_bound == red.base_width + c6_neq.size
    assert red.k == 3
    assert solve(red.instance).answer == chromatic_upper(g, 3)


def test_reduction_rejects_loops_and_uncertified(c6_neq):
    with pytest.raises(PreconditionViolated):
        reduce_coloring(Graph(1, [(0, 0)]), C6, gadget=c6_neq)
    raw = Gadget(c6_neq.name, c6_neq.target, c6_neq.graph, c6_neq.lists, c6_neq.interface, c6_neq.required_relation)
    with pytest.raises(PreconditionViolated):
        reduce_coloring(complete(2), C6, gadget=raw)


def test_reduction_edge_copies_are_disjoint(c6_neq):
    red = reduce_coloring(cycle(4), C6, gadget=c6_neq)
    seen = set()
    for (u, v), verts in red.edge_map.items():
        inner = set(verts) - {u, v}
        assert not inner & seen
        seen |= inner
    assert red.instance.g.n == 4 + 4 * (c6_neq.size - 2)


def test_k3_reduction_small():
    gadget = neq_gadget_for(complete(3))
    for g in (complete(3), complete(4)):
        red = reduce_coloring(g, complete(3), gadget=gadget)
        assert solve(red.instance).answer == chromatic_upper(g, 3)
