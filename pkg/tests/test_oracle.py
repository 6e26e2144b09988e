import itertools

import pytest

from lhom.errors import BudgetExceeded, TargetTooLarge
from lhom.graph import Graph, associated_bipartite, complete, cycle, petersen
from lhom.instance import Instance, witness_problems
from lhom.oracle import (
    SeededGenerator,
    brute_force_clean,
    brute_force_decompositions,
    brute_force_lhom,
    chromatic_upper,
    generate,
    random_instance,
)
from lhom.rng import SplitMix64


def test_splitmix_reference_stream():
    # first outputs of the reference splitmix64 for seed 0
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4
    assert rng.next_u64() == 0x06C45D188009454F


def test_rng_helpers_are_in_range():
    rng = SplitMix64(5)
    assert all(0 <= rng.below(7) < 7 for _ in range(200))
    assert all(3 <= rng.between(3, 5) <= 5 for _ in range(200))
    with pytest.raises(ValueError):
        rng.below(0)


def test_counts():
    k2 = complete(2)
    assert brute_force_lhom(Instance.make(k2, None, k2), "count") == 2
    c6 = cycle(6)
    inst = Instance.make(c6, None, c6)
    # all homomorphisms are the closed 6-walks, trace(A^6); bijective ones are the 12 automorphisms
    assert brute_force_lhom(inst, "count") == _closed_walks(c6, 6) == 132
    assert sum(1 for m in brute_force_lhom(inst, "enumerate") if len(set(m)) == 6) == 12


def _closed_walks(g, length):
    n = g.n
    a = [[int(g.has_edge(i, j)) for j in range(n)] for i in range(n)]
    p = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(length):
        p = [[sum(p[i][k] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return sum(p[i][i] for i in range(n))


def test_count_matches_naive_product():
    rng = SplitMix64(3)
    for _ in range(40):
        h = generate("target", SeededGenerator(rng.next_u64(), max_vertices=4))
        inst = random_instance(rng, h, 1, 5)
        naive = sum(
            1
            for m in itertools.product(*[sorted(l) for l in inst.lists])
            if not witness_problems(inst, m)
        )
        assert brute_force_lhom(inst, "count") == naive
        assert len(set(brute_force_lhom(inst, "enumerate"))) == naive


def test_empty_list():
    inst = Instance.make(Graph(2, [(0, 1)]), [set(), {0}], complete(2))
    assert brute_force_lhom(inst) is None
    assert brute_force_lhom(inst, "count") == 0


def test_budget():
    inst = Instance.make(Graph(12), None, complete(3))
    with pytest.raises(BudgetExceeded):
        brute_force_lhom(inst, "count", budget=100)
    with pytest.raises(ValueError):
        brute_force_lhom(inst, "sample")


def test_decomposition_enumeration_examples():
    assert brute_force_decompositions(cycle(6), "bipartite") == []
    a, b, k, z = range(4)
    h = Graph(4, [(a, k), (b, k), (k, k), (k, z)])
    assert (frozenset({a, b}), frozenset({k}), frozenset({z})) in brute_force_decompositions(h, "F")
    with pytest.raises(TargetTooLarge):
        brute_force_decompositions(cycle(12), "bipartite")


def test_planted_decomposition_is_recovered():
    for seed in range(10):
        for kind in ("bipartite", "F", "BP", "B"):
            h, parts = generate("decomposable_target", SeededGenerator(seed, max_vertices=7), decomposition=kind)
            assert tuple(parts) in brute_force_decompositions(h, kind)


def test_chromatic_examples():
    assert chromatic_upper(complete(3), 3)
    assert not chromatic_upper(complete(4), 3)
    assert chromatic_upper(petersen(), 3)
    assert not chromatic_upper(petersen(), 2)
    assert not chromatic_upper(Graph(1, [(0, 0)]), 5)


def test_generator_golden():
    assert generate("target", SeededGenerator(42)).masks == (30, 43, 53, 3, 53, 22)
    h, parts = generate("decomposable_target", SeededGenerator(42), decomposition="F")
    assert parts == (frozenset({1, 4, 5}), frozenset({0, 2}), frozenset({3, 6}))
    assert h.num_edges() == 18


def test_generator_determinism():
    for kind, extra in [("target", {}), ("strong_split", {}), ("gnp_loops", {}), ("decomposable_target", {"decomposition": "BP"})]:
        a = generate(kind, SeededGenerator(7), **extra)
        b = generate(kind, SeededGenerator(7), **extra)
        assert repr(a) == repr(b)
    h = complete(3)
    assert generate("instance", SeededGenerator(9), target=h) == generate("instance", SeededGenerator(9), target=h)
    with pytest.raises(ValueError):
        generate("nothing", SeededGenerator(1))


def test_clean_homomorphism_on_k3():
    h_star, ht = associated_bipartite(complete(3))
    g_star, gt = associated_bipartite(complete(3))
    full = (1 << h_star.n) - 1
    lists = [full] * g_star.n
    w = brute_force_clean(g_star, lists, h_star, gt.twin, ht.twin)
    assert w is not None
    for x in range(g_star.n):
        assert w[gt.twin(x)] == ht.twin(w[x])
    # K4 has no homomorphism to K3, so no clean one either
    g4, t4 = associated_bipartite(complete(4))
    assert brute_force_clean(g4, [full] * g4.n, h_star, t4.twin, ht.twin) is None
