import pytest

from lhom.analysis import (
    analyse_target,
    build_recursion_tree,
    compute_i_star,
    embedding_problems,
    hstar_embeddings,
    is_bi_arc,
    is_strong_split,
)
from lhom.decompositions import (
    FDecomposition,
    decomposition_problems,
    find_bipartite_decomposition,
    find_general_decomposition,
)
from lhom.errors import PreconditionViolated
from lhom.graph import (
    Graph,
    associated_bipartite,
    comparable,
    complete,
    complete_bipartite,
    components,
    crown,
    cycle,
    is_bipartite,
    layered_crowns,
    path,
)
from lhom.obstructions import check_asteroid, find_obstruction, induced_cycle
from lhom.oracle import (
    brute_force_decompositions,
    is_decomposable_brute,
    is_general_decomposable_brute,
    planted_decomposable_target,
    random_graph,
    random_strong_split,
)
from lhom.rng import SplitMix64


def test_obstruction_examples():
    ob = find_obstruction(cycle(6))
    assert ob.kind == "C6" and set(ob.cycle) == set(range(6))
    assert find_obstruction(complete_bipartite(3, 3)) is None
    assert find_obstruction(crown(3)).kind == "C6"
    assert find_obstruction(cycle(8)).kind == "C8"


def test_long_cycles_give_asteroids():
    for n in (10, 12, 14):
        h = cycle(n)
        ob = find_obstruction(h)
        assert ob.kind == "Asteroid"
        assert check_asteroid(h, ob.k, ob.u, ob.v, ob.paths) == []


def test_obstruction_refuses_non_bipartite():
    with pytest.raises(ValueError):
        find_obstruction(complete(3))


def test_induced_cycle_is_chordless():
    h = Graph(8, [(i, (i + 1) % 8) for i in range(8)] + [(0, 3)])
    cyc = induced_cycle(h, 6)
    assert cyc is not None
    for i, a in enumerate(cyc):
        for j, b in enumerate(cyc):
            if i < j:
                assert h.has_edge(a, b) == ((j - i) % 6 in (1, 5))


def test_bipartite_decomposition_examples():
    assert find_bipartite_decomposition(cycle(6)) is None
    assert brute_force_decompositions(cycle(6), "bipartite") == []
    # K_{2,2} with a pendant vertex on one side
    h = Graph(5, [(0, 2), (0, 3), (1, 2), (1, 3), (4, 2)])
    mine = find_bipartite_decomposition(h)
    assert (mine is not None) == is_decomposable_brute(h, "bipartite")
    if mine is not None:
        assert decomposition_problems(h, mine) == []


def test_all_incomparable_means_undecomposable():
    rng = SplitMix64(4)
    seen = 0
    while seen < 20:
        a, b = rng.between(3, 6), rng.between(3, 6)
        h = Graph(a + b, [(i, a + j) for i in range(a) for j in range(b) if rng.chance(1, 2)])
        if len(components(h)) != 1:
            continue
        if any(comparable(h, u, v) for u in range(h.n) for v in range(u + 1, h.n)):
            continue
        seen += 1
        assert find_bipartite_decomposition(h) is None


def test_f_decomposition_toy():
    # a, b plus a looped k adjacent to both, and z hanging off k
    a, b, k, z = range(4)
    h = Graph(4, [(a, k), (b, k), (k, k), (k, z)])
    dec = FDecomposition(frozenset({a, b}), frozenset({k}), frozenset({z}))
    assert decomposition_problems(h, dec) == []
    assert dec.parts() in brute_force_decompositions(h, "F")
    # the toy is also strong split, which the general search leaves to its own case
    assert is_strong_split(h) is not None
    with pytest.raises(PreconditionViolated):
        find_general_decomposition(h)


def test_reflexive_c4_agrees_with_enumeration():
    h = Graph(4, [(i, (i + 1) % 4) for i in range(4)] + [(i, i) for i in range(4)])
    mine = find_general_decomposition(h)
    assert (mine is not None) == is_general_decomposable_brute(h)


def test_irreflexive_targets_never_f_or_bp():
    rng = SplitMix64(9)
    for _ in range(60):
        h = random_graph(rng, rng.between(2, 7), (1, 2))
        if len(components(h)) != 1 or is_bipartite(h) is not None:
            continue
        assert not is_decomposable_brute(h, "F")
        assert not is_decomposable_brute(h, "BP")
        dec = find_general_decomposition(h)
        assert dec is None or dec.kind == "B"


def test_strong_split_examples():
    split = is_strong_split(complete(3, reflexive=True))
    assert split.B == frozenset() and split.P == frozenset({0, 1, 2})
    assert is_strong_split(cycle(6)) is None
    x, y, p = range(3)
    split = is_strong_split(Graph(3, [(x, p), (y, p), (p, p)]))
    assert split.B == {x, y} and split.P == {p}


def test_recursion_tree_examples():
    root = build_recursion_tree(cycle(6))
    assert root.is_leaf and root.kind == "BipartiteUndecomposable"
    root = build_recursion_tree(path(3, reflexive=True))
    assert root.kind == "BiArc"
    with pytest.raises(PreconditionViolated):
        build_recursion_tree(Graph(2))


def test_bi_arc_examples():
    assert not is_bi_arc(complete(3))
    assert is_bi_arc(Graph(1, [(0, 0)]))
    assert not is_bi_arc(crown(3))


def test_i_star_examples():
    assert compute_i_star(layered_crowns(3, 1)) == 4
    assert compute_i_star(cycle(6)) == 3
    assert compute_i_star(complete(3)) == 3
    assert compute_i_star(path(3, reflexive=True)) == 1
    with pytest.raises(PreconditionViolated):
        compute_i_star(Graph(2))


def _planted_targets(seed, count, max_vertices=9):
    rng = SplitMix64(seed)
    out = []
    kinds = ["bipartite", "F", "BP", "B"]
    for i in range(count):
        h, _ = planted_decomposable_target(rng, kinds[i % 4], max_vertices)
        out.append(h)
    for _ in range(count // 4):
        h, _, _ = random_strong_split(rng, rng.between(2, 4), rng.between(2, 4))
        out.append(h)
    return out


@pytest.fixture(scope="module")
def planted():
    return [(h, analyse_target(h)) for h in _planted_targets(21, 60) if len(components(h)) == 1]


def test_emitted_decompositions_are_valid(planted):
    found = 0
    for h, root in planted:
        for node in root.walk():
            if node.decomposition is None:
                continue
            found += 1
            assert decomposition_problems(node.graph, node.decomposition, node.sides) == []
            assert node.factors.h1.n < node.graph.n
            assert node.factors.h2.n < node.graph.n
    assert found > 20


def test_node_count_is_linear(planted):
    # three nodes per vertex is comfortably above what the sweep ever hits
    for h, root in planted:
        assert root.node_count() <= 3 * h.n


def test_every_node_embeds_into_root_star(planted):
    for h, root in planted:
        h_star, _ = associated_bipartite(h)
        for node, image in hstar_embeddings(root):
            assert embedding_problems(h_star, node.graph, image) == []


def test_i_star_monotone_along_tree(planted):
    for h, root in planted[:30]:
        top = compute_i_star(h)
        for node in root.walk():
            if node.kind != "components" and len(components(node.graph)) == 1:
                assert compute_i_star(node.graph) <= top


def test_general_matches_star_decomposability_sample():
    # the full sweep is an acceptance criterion; this is a quick smoke run
    rng = SplitMix64(2)
    checked = 0
    while checked < 25:
        h = random_graph(rng, rng.between(3, 5), (1, 2), (1, 2))
        if len(components(h)) != 1 or is_strong_split(h) or is_bi_arc(h):
            continue
        checked += 1
        h_star, twins = associated_bipartite(h)
        general = is_general_decomposable_brute(h)
        star = is_decomposable_brute(h_star, "bipartite", twins.bipartition, max_vertices=16)
        assert general == star
        assert (find_general_decomposition(h) is not None) == general


def _all_pairs_incomparable(h):
    return not any(comparable(h, u, v) for u in range(h.n) for v in range(u + 1, h.n))


def _incomparable_fraction(n, samples, seed):
    rng = SplitMix64(seed)
    hits = sum(_all_pairs_incomparable(random_graph(rng, n, (1, 2), (1, 2))) for _ in range(samples))
    return hits / samples


@pytest.mark.xfail(strict=True, reason="at n=12 the all-incomparable probability is only about 0.025")
def test_random_12_vertex_graphs_mostly_all_incomparable():
    assert _incomparable_fraction(12, 200, seed=6) >= 0.5


def test_random_40_vertex_graphs_mostly_all_incomparable():
    assert _incomparable_fraction(40, 200, seed=6) >= 0.5


def test_incomparability_fraction_grows():
    assert _incomparable_fraction(12, 200, 6) < _incomparable_fraction(24, 200, 6) < _incomparable_fraction(40, 200, 6)
