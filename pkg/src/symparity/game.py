"""Symbolic parity games: vertex sets and per-group edge relations as MDDs.

Vertices are vectors over the slots of a :class:`Layout` (or, for games
read from explicit files, a plain fixed-width encoding).  Eloise (player
0) wins a play whose least infinitely-often priority is even; a player
who cannot move loses.
"""
from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field
from typing import Any

from .data import format_value
from .mdd import FALSE, TRUE, NodeStore

ELOISE = 0
ABELARD = 1

MAGIC = "symparity-game"
VERSION = 1


class GameError(Exception):
    pass


class ExplicitLimit(GameError):
    pass


@dataclass
class Layout:
    """Slot names and per-slot value tables.

    Slot 0 holds the equation index (``Var``); its table lists equation
    names followed by the sink names.  Other tables grow as values are
    met during instantiation.  Value index 0 doubles as the filler for
    slots an equation does not use.
    """
    slot_names: list[str]
    slot_sorts: list[Any]
    eq_names: list[str]
    eq_params: list[tuple[str, ...]]
    eq_slots: list[tuple[int, ...]]
    tables: list[list[Any]] = field(default_factory=list)
    index: list[dict] = field(default_factory=list)

    @property
    def width(self) -> int:
        return len(self.slot_names)

    @property
    def true_sink(self) -> int:
        return len(self.eq_names)

    @property
    def false_sink(self) -> int:
        return len(self.eq_names) + 1

    def encode(self, slot: int, value: Any) -> int:
        ix = self.index[slot]
        i = ix.get(value)
        if i is None:
            i = ix[value] = len(self.tables[slot])
            self.tables[slot].append(value)
        return i

    def decode(self, slot: int, i: int) -> Any:
        return self.tables[slot][i]

    def label(self, vec) -> str:
        v = vec[0]
        if v == self.true_sink:
            return "true"
        if v == self.false_sink:
            return "false"
        if v >= len(self.eq_names):
            return "trap"
        args = ", ".join(f"{p}={format_value(self.decode(k, vec[k]))}"
                         for p, k in zip(self.eq_params[v], self.eq_slots[v]))
        return f"{self.eq_names[v]}({args})"


@dataclass
class Group:
    name: str
    deps: tuple[int, ...]
    rel: int = FALSE
    reads: tuple[int, ...] = ()
    writes: tuple[int, ...] = ()


@dataclass
class SymbolicGame:
    store: NodeStore
    width: int
    init: tuple[int, ...]
    vertices: int
    owner: tuple[int, int]              # roots of V_Eloise, V_Abelard
    priorities: dict[int, int]          # priority -> root
    groups: list[Group]
    layout: Layout | None = None

    def count(self, root: int | None = None) -> int:
        return self.store.count(self.vertices if root is None else root)

    def restrict_var(self, values) -> int:
        """Vertices whose slot-0 value is in ``values``."""
        vs = set(values)
        items = [(v, d) for v, d in self.store.children(self.vertices) if v in vs]
        return self.store.chain(0, items)


def stats(g: SymbolicGame) -> dict[str, Any]:
    st = g.store
    rel_nodes = [st.node_count([gr.rel]) for gr in g.groups]
    return {
        "vertices": st.count(g.vertices),
        "eloise": st.count(g.owner[ELOISE]),
        "abelard": st.count(g.owner[ABELARD]),
        "priorities": {p: st.count(r) for p, r in sorted(g.priorities.items())},
        "groups": len(g.groups),
        "width": g.width,
        "vertex_nodes": st.node_count([g.vertices]),
        "relation_nodes": sum(rel_nodes),
        "relation_nodes_per_group": rel_nodes,
        "deps_total": sum(len(gr.deps) for gr in g.groups),
        # fraction of slots each group depends on
        "row_density": [round(len(gr.deps) / g.width, 4) for gr in g.groups],
    }


def format_stats(s: dict[str, Any]) -> str:
    lines = [
        f"vertices: {s['vertices']}",
        f"  eloise: {s['eloise']}",
        f"  abelard: {s['abelard']}",
    ]
    for p, n in s["priorities"].items():
        lines.append(f"  priority {p}: {n}")
    lines += [
        f"groups: {s['groups']}",
        f"slots: {s['width']}",
        f"vertex set nodes: {s['vertex_nodes']}",
        f"relation nodes: {s['relation_nodes']}",
    ]
    return "\n".join(lines) + "\n"


def _short_successors(g: SymbolicGame, gr: Group) -> dict[tuple, list[tuple]]:
    out: dict[tuple, list[tuple]] = {}
    for vec in g.store.iter_vectors(gr.rel):
        out.setdefault(vec[0::2], []).append(vec[1::2])
    return out


def explicit_edges(g: SymbolicGame, limit: int | None = None):
    """Vertex list (sorted vectors) and successor index lists."""
    n = g.count()
    if limit is not None and n > limit:
        raise ExplicitLimit(f"{n} vertices exceed the explicit limit {limit}")
    verts = list(g.store.iter_vectors(g.vertices))
    ids = {v: i for i, v in enumerate(verts)}
    succ: list[list[int]] = [[] for _ in verts]
    by_var: dict[int, list[int]] = {}
    for i, v in enumerate(verts):
        by_var.setdefault(v[0], []).append(i)
    for gr in g.groups:
        table = _short_successors(g, gr)
        deps = gr.deps
        if deps and deps[0] == 0:
            cand = [i for x in sorted({k[0] for k in table}) for i in by_var.get(x, ())]
        else:
            cand = range(len(verts))
        for i in cand:
            v = verts[i]
            targets = table.get(tuple(v[d] for d in deps))
            if not targets:
                continue
            for t in targets:
                w = list(v)
                for d, x in zip(deps, t):
                    w[d] = x
                j = ids.get(tuple(w))
                if j is None:
                    raise GameError(f"edge leaves the vertex set at {v}")
                succ[i].append(j)
    return verts, [sorted(set(s)) for s in succ]


def export_pgsolver(g: SymbolicGame, limit: int | None = 10**6) -> str:
    """PGSolver text with ids in enumeration order.  A ``start`` line names
    the initial vertex when it is not vertex 0."""
    verts, succ = explicit_edges(g, limit)
    start = verts.index(g.init)
    eloise = g.owner[ELOISE]
    prio_of = {}
    for p, root in g.priorities.items():
        for v in g.store.iter_vectors(root):
            prio_of[v] = p
    lines = [f"parity {len(verts) - 1};"]
    if start:
        lines.append(f"start {start};")
    for i, v in enumerate(verts):
        owner = 0 if _member(g.store, eloise, v) else 1
        label = g.layout.label(v) if g.layout else ",".join(map(str, v))
        label = label.replace('"', "'")
        succs = ",".join(map(str, succ[i]))
        lines.append(f'{i} {prio_of[v]} {owner} {succs} "{label}";')
    return "\n".join(lines) + "\n"


def _member(store: NodeStore, root: int, vec) -> bool:
    n = root
    for x in vec:
        n = store.child(n, x)
        if n == FALSE:
            return False
    return n == TRUE


# -- container -----------------------------------------------------------------


def _nodes_of(store: NodeStore, roots) -> list[int]:
    """Non-terminal nodes reachable from ``roots``, children before parents."""
    order: list[int] = []
    seen = set()
    for r in roots:
        stack = [(r, False)]
        while stack:
            x, done = stack.pop()
            if x <= TRUE or (x in seen and not done):
                continue
            if done:
                order.append(x)
                continue
            seen.add(x)
            stack.append((x, True))
            stack.append((store._right[x], False))
            stack.append((store._down[x], False))
    return order


def save_game(g: SymbolicGame) -> str:
    """Serialise to a JSON document with a versioned magic header."""
    st = g.store
    roots = [g.vertices, g.owner[0], g.owner[1]] + list(g.priorities.values()) \
        + [gr.rel for gr in g.groups]
    nodes = _nodes_of(st, roots)
    num = {FALSE: 0, TRUE: 1}
    for k, x in enumerate(nodes):
        num[x] = k + 2
    doc: dict[str, Any] = {
        "magic": MAGIC,
        "version": VERSION,
        "width": g.width,
        "init": list(g.init),
        "nodes": [[st._slot[x], st._val[x], num[st._down[x]], num[st._right[x]]] for x in nodes],
        "vertices": num[g.vertices],
        "owner": [num[g.owner[0]], num[g.owner[1]]],
        "priorities": [[p, num[r]] for p, r in sorted(g.priorities.items())],
        "groups": [{"name": gr.name, "deps": list(gr.deps), "rel": num[gr.rel],
                    "reads": list(gr.reads), "writes": list(gr.writes)} for gr in g.groups],
    }
    if g.layout is not None:
        lay = g.layout
        doc["layout"] = {
            "slot_names": lay.slot_names,
            "eq_names": lay.eq_names,
            "eq_params": [list(p) for p in lay.eq_params],
            "eq_slots": [list(s) for s in lay.eq_slots],
            # values are Python literals (bool, int, str, tuple)
            "tables": [[repr(v) for v in t] for t in lay.tables],
        }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def load_game(text: str, store: NodeStore | None = None) -> SymbolicGame:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameError(f"not a game container: {e}") from None
    if not isinstance(doc, dict) or doc.get("magic") != MAGIC:
        raise GameError("not a game container: bad magic")
    if doc.get("version") != VERSION:
        raise GameError(f"unsupported container version {doc.get('version')}")
    st = store or NodeStore()
    ids = [FALSE, TRUE]
    for slot, val, down, right in doc["nodes"]:
        if down >= len(ids) or right >= len(ids):
            raise GameError("node refers forward")
        ids.append(st.mk(slot, val, ids[down], ids[right]))
    layout = None
    if "layout" in doc:
        lay = doc["layout"]
        tables = [[ast.literal_eval(v) for v in t] for t in lay["tables"]]
        layout = Layout(lay["slot_names"], [None] * len(lay["slot_names"]), lay["eq_names"],
                        [tuple(p) for p in lay["eq_params"]],
                        [tuple(s) for s in lay["eq_slots"]], tables,
                        [{v: i for i, v in enumerate(t)} for t in tables])
    return SymbolicGame(
        store=st,
        width=doc["width"],
        init=tuple(doc["init"]),
        vertices=ids[doc["vertices"]],
        owner=(ids[doc["owner"][0]], ids[doc["owner"][1]]),
        priorities={p: ids[r] for p, r in doc["priorities"]},
        groups=[Group(gr["name"], tuple(gr["deps"]), ids[gr["rel"]], tuple(gr["reads"]),
                      tuple(gr["writes"])) for gr in doc["groups"]],
        layout=layout,
    )
