"""lhom: command-line front end.

Exit codes: 0 YES or pass, 1 NO or fail, 2 usage or format error,
3 budget or size error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import formats
from .analysis import analyse_target, bi_arc_obstruction, compute_i_star, is_strong_split
from .errors import (
    BudgetExceeded,
    FormatError,
    InvalidDecomposition,
    PreconditionViolated,
    SearchExhausted,
    TargetTooLarge,
)
from .gadgets import (
    DEFAULT_TUPLE_BUDGET,
    build_distinguisher,
    build_nand_gadget,
    build_or_gadget,
    certified,
    distinguisher_problems,
    neq_gadget_for,
    reduce_coloring,
    verify_gadget,
)
from .graph import Graph, associated_bipartite, bits, components, incomparability_number, is_bipartite, max_incomparable_set
from .instance import Instance
from .obstructions import find_obstruction
from .oracle import DEFAULT_BUDGET, brute_force_lhom, is_decomposable_brute, is_general_decomposable_brute
from .oracle import random_connected_graph, random_graph, random_instance
from .rng import SplitMix64
from .solver import solve

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _budget(default: int) -> int:
    raw = os.environ.get("LHOM_BUDGET")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise FormatError(f"LHOM_BUDGET must be an integer, got {raw!r}") from None
    if value <= 0:
        raise FormatError("LHOM_BUDGET must be positive")
    return value


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def _read_graph(path: str) -> Graph:
    try:
        return formats.parse_graph(_read(path))
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def _parse_ids(text: str | None, n: int, what: str):
    if text is None:
        return None
    try:
        vals = [int(t) - 1 for t in text.split(",") if t.strip()]
    except ValueError:
        raise FormatError(f"{what} must be comma-separated vertex numbers") from None
    if any(not 0 <= v < n for v in vals):
        raise FormatError(f"{what} names a vertex outside 1..{n}")
    return vals


# ---------------------------------------------------------------------------
# analyze


def leaf_incomparability(g: Graph) -> int:
    sides = is_bipartite(g)
    if sides is not None:
        return incomparability_number(g, sides)
    star, twins = associated_bipartite(g)
    return incomparability_number(star, twins.bipartition)


def analysis_report(h: Graph, name: str) -> formats.AnalysisReport:
    t0 = time.perf_counter()
    if len(components(h)) != 1:
        raise PreconditionViolated("analysis needs a connected target")
    sides = is_bipartite(h)
    if sides is not None:
        ob = find_obstruction(h, sides) if h.n >= 6 else None
    else:
        ob = bi_arc_obstruction(h)
    root = analyse_target(h)
    leaves = root.leaves()
    return formats.AnalysisReport(
        target=name, vertices=h.n, edges=h.num_edges(), bipartite=sides is not None,
        bi_arc=ob is None, strong_split=is_strong_split(h) is not None,
        obstruction=(ob.summary(1) + ("" if sides else " in H*")) if ob else "none", i_star=compute_i_star(h), tree=root.outline(),
        leaf_kinds=[n.kind for n in leaves], leaf_i=[leaf_incomparability(n.graph) for n in leaves],
        time_ms=f"{(time.perf_counter() - t0) * 1000:.1f}",
    )


def cmd_analyze(args) -> int:
    h = _read_graph(args.target)
    sys.stdout.write(analysis_report(h, Path(args.target).name).to_text())
    return EXIT_YES


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    h = _read_graph(args.target)
    g = _read_graph(args.graph)
    lists = formats.parse_lists(_read(args.lists), g.n, h.n) if args.lists else None
    inst = Instance.make(g, lists, h)
    td = formats.parse_td(_read(args.td), g.n) if args.td else None
    res = solve(inst, td=td, witness=args.witness, decompose=not args.no_decompose)
    text = "YES\n" if res.answer else "NO\n"
    if res.answer and args.witness:
        text += formats.format_witness(res.witness)
    if args.stats:
        st = res.stats
        items = [("width", st.width), ("leaves", len(st.leaves)), ("total_states", st.total_states),
                 ("max_list", st.max_list)]
        for i, leaf in enumerate(st.leaves):
            items.append((f"leaf.{i}", f"{leaf.kind} target={leaf.target_size} vertices={leaf.vertices} "
                                       f"max_list={leaf.max_list} states={leaf.states}"))
        text += formats.format_kv(items)
    sys.stdout.write(text)
    return EXIT_YES if res.answer else EXIT_NO


# ---------------------------------------------------------------------------
# reduce


def cmd_reduce(args) -> int:
    g = _read_graph(args.graph)
    h = _read_graph(args.target)
    S = _parse_ids(args.S, h.n, "--S")
    red = reduce_coloring(g, h, S)
    if args.k is not None and args.k != red.k:
        raise PreconditionViolated(f"requested k = {args.k}, but the chosen incomparable set has size {red.k}")
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    inst = red.instance
    (out / "instance.gr").write_text(formats.format_graph(inst.g))
    (out / "target.gr").write_text(formats.format_graph(h))
    (out / "lists.txt").write_text(formats.format_lists(inst.lists))
    (out / "decomposition.td").write_text(formats.format_td(red.pd, inst.g.n))
    items = [("source", args.graph), ("target", args.target), ("k", red.k),
             ("S", ",".join(str(s + 1) for s in red.S)), ("gadget", red.gadget.name),
             ("gadget_vertices", red.gadget.size), ("vertices", inst.g.n), ("edges", inst.g.num_edges()),
             ("base_width", red.base_width), ("width", red.width), ("width_bound", red.width_bound)]
    for (u, v), verts in red.edge_map.items():
        fresh = [w for w in verts if w >= g.n]
        items.append((f"copy.{u + 1}-{v + 1}", f"{min(fresh) + 1}..{max(fresh) + 1}"))
    (out / "manifest.txt").write_text(formats.format_kv(items))
    sys.stdout.write(formats.format_kv(items[:11]))
    return EXIT_YES


# ---------------------------------------------------------------------------
# gadget / verify


def _bipartite_setup(h: Graph, args):
    sides = is_bipartite(h)
    if sides is None or len(components(h)) != 1:
        raise PreconditionViolated("this gadget kind needs a connected bipartite target")
    ob = find_obstruction(h, sides)
    if ob is None:
        raise PreconditionViolated("target is co-circular-arc: no obstruction, no gadgets")
    pair = _parse_ids(args.pair, h.n, "--pair")
    if pair is not None:
        if len(pair) != 2:
            raise FormatError("--pair takes two vertices")
        pair = tuple(pair)
    else:
        pair = ob.corners()[0]
    return sides, ob, pair


def cmd_gadget(args) -> int:
    h = _read_graph(args.target)
    S = _parse_ids(args.S, h.n, "--S")
    if args.kind == "neq":
        gadget = neq_gadget_for(h, S)
    else:
        sides, ob, pair = _bipartite_setup(h, args)
        if args.kind == "or":
            gadget = build_or_gadget(h, ob, pair, args.k or 3)
        elif args.kind == "nand":
            gadget = build_nand_gadget(h, ob, pair)
        else:
            if S is None:
                S = sorted(max_incomparable_set(h, bits(sides.class_mask(sides.side[pair[0]]))))
            ab = _parse_ids(args.ab, h.n, "--ab") or S[:2]
            if len(ab) != 2:
                raise FormatError("--ab takes two vertices")
            gadget = build_distinguisher(h, S, ab[0], ab[1], pair)
            bad = distinguisher_problems(gadget, S, ab[0], ab[1], *pair)
            if bad:
                raise AssertionError("distinguisher fails " + ", ".join(bad))
        gadget = certified(gadget)
    text = formats.format_gadget(gadget)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    sys.stderr.write(formats.format_kv([("gadget", gadget.name), ("vertices", gadget.size),
                                        ("relation", len(gadget.required_relation)), ("verified", True)]))
    return EXIT_YES


def cmd_verify(args) -> int:
    gadget = formats.parse_gadget(_read(args.gadget))
    res = verify_gadget(gadget, budget=_budget(DEFAULT_TUPLE_BUDGET))
    items = [("gadget", gadget.name), ("result", "pass" if res.ok else "fail"),
             ("relation", len(res.relation))]
    if not res.ok:
        items += [("counterexample", " ".join(str(c + 1) for c in res.counterexample)), ("problem", res.problem)]
    sys.stdout.write(formats.format_kv(items))
    return EXIT_YES if res.ok else EXIT_NO


# ---------------------------------------------------------------------------
# selftest


def _graph_code(g: Graph) -> str:
    return f"{g.n}:" + ",".join(f"{u}-{v}" for u, v in g.edges())


def selftest_lines(seed: int, cases: int, budget: int = DEFAULT_BUDGET) -> tuple[list[tuple[str, str]], int]:
    """Seeded oracle-equivalence and decomposition-equivalence checks."""
    rng = SplitMix64(seed)
    items = []
    failures = 0
    for i in range(cases):
        h = random_graph(rng, rng.between(1, 5), (1, 2), (1, 3))
        inst = random_instance(rng, h, 1, 7, (1, 3), (1, 2))
        got = solve(inst, witness=True)
        want = brute_force_lhom(inst, "decide", budget) is not None
        ok = got.answer == want
        failures += not ok
        items.append((f"equivalence.{i}", f"h={_graph_code(h)} g={_graph_code(inst.g)} "
                                          f"answer={'YES' if got.answer else 'NO'} {'ok' if ok else 'MISMATCH'}"))
    done = 0
    tries = 0
    while done < cases and tries < 200 * cases:
        tries += 1
        h = random_connected_graph(rng, rng.between(3, 5), (1, 2), (1, 2))
        if is_bipartite(h) is not None or is_strong_split(h) is not None or bi_arc_obstruction(h) is None:
            continue
        star, twins = associated_bipartite(h)
        left = is_general_decomposable_brute(h)
        right = is_decomposable_brute(star, "bipartite", twins.bipartition)
        ok = left == right
        failures += not ok
        items.append((f"decomposition.{done}", f"h={_graph_code(h)} decomposable={'yes' if left else 'no'} "
                                               f"{'ok' if ok else 'MISMATCH'}"))
        done += 1
    items += [("seed", seed), ("cases", cases), ("failures", failures), ("result", "pass" if not failures else "fail")]
    return items, failures


def cmd_selftest(args) -> int:
    if args.cases < 0:
        raise FormatError("--cases must be non-negative")
    items, failures = selftest_lines(args.seed, args.cases, _budget(DEFAULT_BUDGET))
    sys.stdout.write(formats.format_kv(items))
    return EXIT_YES if not failures else EXIT_NO


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lhom", description="List homomorphism solver and hardness gadgets.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="recursion tree, obstruction and i* of a target")
    a.add_argument("target")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("solve", help="decide (G, L) -> H")
    s.add_argument("target")
    s.add_argument("graph")
    s.add_argument("--lists")
    s.add_argument("--td", help="tree decomposition of the instance graph (PACE format)")
    s.add_argument("--witness", action="store_true")
    s.add_argument("--no-decompose", action="store_true", help="run the plain DP on H")
    s.add_argument("--stats", action="store_true")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("reduce", help="k-colouring of GRAPH to list homomorphism into TARGET")
    r.add_argument("graph")
    r.add_argument("target")
    r.add_argument("--k", type=int)
    r.add_argument("--S", help="incomparable set, comma-separated")
    r.add_argument("-o", "--output", required=True, help="output directory")
    r.set_defaults(func=cmd_reduce)

    g = sub.add_parser("gadget", help="build and certify a gadget")
    g.add_argument("kind", choices=("neq", "or", "nand", "distinguisher"))
    g.add_argument("target")
    g.add_argument("--k", type=int, help="arity of OR")
    g.add_argument("--S", help="colour set, comma-separated")
    g.add_argument("--pair", help="corner pair alpha,beta")
    g.add_argument("--ab", help="distinguisher vertices a,b")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gadget)

    v = sub.add_parser("verify", help="re-check a gadget file")
    v.add_argument("gadget")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("selftest", help="seeded oracle-equivalence checks")
    t.add_argument("--seed", type=int, default=1)
    t.add_argument("--cases", type=int, default=20)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_YES
    try:
        return args.func(args)
    except (FormatError, PreconditionViolated, InvalidDecomposition) as exc:
        sys.stderr.write(f"lhom: error: {exc}\n")
        return EXIT_USAGE
    except (BudgetExceeded, TargetTooLarge, SearchExhausted) as exc:
        sys.stderr.write(f"lhom: {type(exc).__name__}: {exc}\n")
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
