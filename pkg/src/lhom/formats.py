"""Text formats: graphs, lists, decompositions, witnesses, gadgets, reports.

All vertex numbers in files are 1-based; '#' starts a comment line.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterable, Iterator, Sequence

from .errors import FormatError
from .graph import Graph
from .treedec import TreeDecomposition


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield no, line.split()


def _int(tok: str, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"{what} must be an integer, got {tok!r}", no) from None


def _vertex(tok: str, no: int, n: int, what: str = "vertex") -> int:
    v = _int(tok, no, what)
    if not 1 <= v <= n:
        raise FormatError(f"{what} {v} out of range 1..{n}", no)
    return v - 1


# ---------------------------------------------------------------------------
# graphs


def _parse_edges(items, n: int, m: int, tag: str, header_line: int) -> Graph:
    edges = []
    seen = set()
    for no, tok in items:
        if len(tok) != 3:
            raise FormatError(f"'{tag}' line needs two vertices", no)
        u, v = _vertex(tok[1], no, n), _vertex(tok[2], no, n)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise FormatError(f"duplicate edge {u + 1} {v + 1}", no)
        seen.add(key)
        edges.append((u, v))
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges, found {len(edges)}", header_line)
    return Graph(n, edges)


def parse_graph(text: str) -> Graph:
    header = None
    items = []
    for no, tok in _lines(text):
        if tok[0] == "p":
            if header is not None:
                raise FormatError("second header line", no)
            if len(tok) != 4 or tok[1] != "graph":
                raise FormatError("header must read 'p graph <n> <m>'", no)
            header = (no, _int(tok[2], no, "n"), _int(tok[3], no, "m"))
        elif tok[0] == "e":
            if header is None:
                raise FormatError("edge before the header", no)
            items.append((no, tok))
        else:
            raise FormatError(f"unknown line type {tok[0]!r}", no)
    if header is None:
        raise FormatError("missing 'p graph' header")
    no, n, m = header
    if n < 0 or m < 0:
        raise FormatError("negative size in header", no)
    return _parse_edges(items, n, m, "e", no)


def format_graph(g: Graph) -> str:
    edges = list(g.edges())
    out = [f"p graph {g.n} {len(edges)}"]
    out += [f"e {u + 1} {v + 1}" for u, v in edges]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# lists


def parse_lists(text: str, n: int, target_n: int) -> tuple[frozenset[int], ...]:
    full = frozenset(range(target_n))
    lists: list[frozenset[int] | None] = [None] * n
    for no, tok in _lines(text):
        if tok[0] != "l" or len(tok) < 2:
            raise FormatError("list lines read 'l <v> <u1> <u2> ...'", no)
        v = _vertex(tok[1], no, n)
        if lists[v] is not None:
            raise FormatError(f"second list for vertex {v + 1}", no)
        lists[v] = frozenset(_vertex(t, no, target_n, "target vertex") for t in tok[2:])
    return tuple(full if lst is None else lst for lst in lists)


def format_lists(lists: Sequence[Iterable[int]]) -> str:
    out = []
    for v, lst in enumerate(lists):
        out.append(" ".join(["l", str(v + 1)] + [str(u + 1) for u in sorted(lst)]))
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# tree decompositions (PACE style)


def parse_td(text: str, n: int | None = None) -> TreeDecomposition:
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    for no, tok in _lines(text):
        if tok[0] == "s":
            if header is not None:
                raise FormatError("second header line", no)
            if len(tok) != 5 or tok[1] != "td":
                raise FormatError("header must read 's td <bags> <maxbag> <n>'", no)
            header = tuple(_int(t, no, "header field") for t in tok[2:])
            if n is not None and header[2] != n:
                raise FormatError(f"decomposition is for {header[2]} vertices, graph has {n}", no)
        elif header is None:
            raise FormatError("line before the 's td' header", no)
        elif tok[0] == "b":
            if len(tok) < 2:
                raise FormatError("bag line needs an id", no)
            i = _vertex(tok[1], no, header[0], "bag id")
            if i in bags:
                raise FormatError(f"bag {i + 1} given twice", no)
            bags[i] = frozenset(_vertex(t, no, header[2]) for t in tok[2:])
            if len(bags[i]) > header[1]:
                raise FormatError(f"bag {i + 1} exceeds the announced size {header[1]}", no)
        else:
            if len(tok) != 2:
                raise FormatError("tree edge lines read '<a> <b>'", no)
            edges.append((_vertex(tok[0], no, header[0], "bag id"), _vertex(tok[1], no, header[0], "bag id")))
    if header is None:
        raise FormatError("missing 's td' header")
    if len(bags) != header[0]:
        raise FormatError(f"header announces {header[0]} bags, found {len(bags)}")
    return TreeDecomposition(tuple(bags[i] for i in range(header[0])), tuple(edges))


def format_td(td: TreeDecomposition, n: int) -> str:
    maxbag = max((len(b) for b in td.bags), default=0)
    out = [f"s td {len(td.bags)} {maxbag} {n}"]
    for i, bag in enumerate(td.bags):
        out.append(" ".join(["b", str(i + 1)] + [str(v + 1) for v in sorted(bag)]))
    out += [f"{a + 1} {b + 1}" for a, b in td.edges]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# witnesses


def parse_witness(text: str, n: int, target_n: int) -> tuple[int, ...]:
    out = [-1] * n
    for no, tok in _lines(text):
        if tok[0] != "m" or len(tok) != 3:
            raise FormatError("witness lines read 'm <v> <u>'", no)
        v = _vertex(tok[1], no, n)
        if out[v] != -1:
            raise FormatError(f"vertex {v + 1} mapped twice", no)
        out[v] = _vertex(tok[2], no, target_n, "target vertex")
    missing = [v + 1 for v in range(n) if out[v] == -1]
    if missing:
        raise FormatError(f"no image for vertex {missing[0]}")
    return tuple(out)


def format_witness(mapping: Sequence[int]) -> str:
    return "".join(f"m {v + 1} {u + 1}\n" for v, u in enumerate(mapping))


# ---------------------------------------------------------------------------
# gadgets


def format_gadget(gadget) -> str:
    h, g = gadget.target, gadget.graph
    out = [f"name {gadget.name}", f"kind {'exact' if gadget.exact else 'contains'}",
           f"total {'yes' if gadget.total else 'no'}"]
    h_edges = list(h.edges())
    out.append(f"p target {h.n} {len(h_edges)}")
    out += [f"t {u + 1} {v + 1}" for u, v in h_edges]
    g_edges = list(g.edges())
    out.append(f"p graph {g.n} {len(g_edges)}")
    out += [f"e {u + 1} {v + 1}" for u, v in g_edges]
    out += format_lists(gadget.lists).splitlines()
    out.append(" ".join(["i"] + [str(v + 1) for v in gadget.interface]))
    out += [" ".join(["r"] + [str(c + 1) for c in t]) for t in sorted(gadget.required_relation)]
    out += [" ".join(["f"] + [str(c + 1) for c in t]) for t in sorted(gadget.forbidden)]
    return "\n".join(out) + "\n"


def parse_gadget(text: str):
    from .gadgets import Gadget

    name, exact, total = "gadget", True, False
    heads: dict[str, tuple[int, int, int]] = {}
    items = {"t": [], "e": []}
    list_lines, interface, req, forb = [], None, [], []
    for no, tok in _lines(text):
        kind = tok[0]
        if kind == "name":
            name = " ".join(tok[1:])
        elif kind == "kind":
            if len(tok) != 2 or tok[1] not in ("exact", "contains"):
                raise FormatError("kind must be 'exact' or 'contains'", no)
            exact = tok[1] == "exact"
        elif kind == "total":
            if len(tok) != 2 or tok[1] not in ("yes", "no"):
                raise FormatError("total must be 'yes' or 'no'", no)
            total = tok[1] == "yes"
        elif kind == "p":
            if len(tok) != 4 or tok[1] not in ("target", "graph") or tok[1] in heads:
                raise FormatError("expected one 'p target <n> <m>' and one 'p graph <n> <m>'", no)
            heads[tok[1]] = (no, _int(tok[2], no, "n"), _int(tok[3], no, "m"))
        elif kind in items:
            if ("target" if kind == "t" else "graph") not in heads:
                raise FormatError(f"'{kind}' line before its header", no)
            items[kind].append((no, tok))
        elif kind == "l":
            list_lines.append((no, tok))
        elif kind == "i":
            interface = (no, tok[1:])
        elif kind in ("r", "f"):
            (req if kind == "r" else forb).append((no, tok[1:]))
        else:
            raise FormatError(f"unknown line type {kind!r}", no)
    for part in ("target", "graph"):
        if part not in heads:
            raise FormatError(f"missing 'p {part}' header")
    hn, gn = heads["target"][1], heads["graph"][1]
    h = _parse_edges(items["t"], hn, heads["target"][2], "t", heads["target"][0])
    g = _parse_edges(items["e"], gn, heads["graph"][2], "e", heads["graph"][0])
    lists_text = "\n".join(" ".join(t) for _, t in list_lines)
    try:
        lists = parse_lists(lists_text, gn, hn)
    except FormatError as exc:
        line = list_lines[exc.line - 1][0] if exc.line else None
        raise FormatError(str(exc).split(": ", 1)[-1], line) from None
    if interface is None:
        raise FormatError("missing interface line 'i'")
    ino, itok = interface
    iface = tuple(_vertex(t, ino, gn) for t in itok)

    def tuples(entries):
        out = set()
        for no, tok in entries:
            if len(tok) != len(iface):
                raise FormatError(f"tuple has {len(tok)} entries for an interface of {len(iface)}", no)
            out.add(tuple(_vertex(t, no, hn, "target vertex") for t in tok))
        return frozenset(out)

    return Gadget(name, h, g, lists, iface, tuples(req), exact, tuples(forb), total)


# ---------------------------------------------------------------------------
# analysis report


@dataclass
class AnalysisReport:
    """Target analysis summary; serialises as one flat key = value document."""

    target: str
    vertices: int
    edges: int
    bipartite: bool
    bi_arc: bool
    strong_split: bool
    obstruction: str
    i_star: int
    tree: list[str] = field(default_factory=list)
    leaf_kinds: list[str] = field(default_factory=list)
    leaf_i: list[int] = field(default_factory=list)
    time_ms: str = "0"

    def to_text(self) -> str:
        out = []
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, list):
                out.append(f"{f.name}.count = {len(val)}")
                out += [f"{f.name}.{i} = {_fmt(x)}" for i, x in enumerate(val)]
            else:
                out.append(f"{f.name} = {_fmt(val)}")
        return "\n".join(out) + "\n"


def _fmt(val) -> str:
    if isinstance(val, bool):
        return "yes" if val else "no"
    return str(val)


def parse_kv(text: str) -> dict[str, str]:
    out = {}
    for no, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        if " = " not in raw:
            raise FormatError("report lines read 'key = value'", no)
        key, val = raw.split(" = ", 1)
        if key in out:
            raise FormatError(f"duplicate key {key!r}", no)
        out[key] = val
    return out


def format_kv(items: Iterable[tuple[str, object]]) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in items)


def parse_report(text: str) -> AnalysisReport:
    kv = parse_kv(text)

    def get(key):
        if key not in kv:
            raise FormatError(f"report lacks {key!r}")
        return kv[key]

    def flag(key):
        val = get(key)
        if val not in ("yes", "no"):
            raise FormatError(f"{key} must be yes or no")
        return val == "yes"

    def seq(key, conv=str):
        count = int(get(f"{key}.count"))
        return [conv(get(f"{key}.{i}")) for i in range(count)]

    return AnalysisReport(
        target=get("target"), vertices=int(get("vertices")), edges=int(get("edges")),
        bipartite=flag("bipartite"), bi_arc=flag("bi_arc"), strong_split=flag("strong_split"),
        obstruction=get("obstruction"), i_star=int(get("i_star")), tree=seq("tree"),
        leaf_kinds=seq("leaf_kinds"), leaf_i=seq("leaf_i", int), time_ms=get("time_ms"),
    )
