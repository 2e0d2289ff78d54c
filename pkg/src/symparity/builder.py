"""From a parameterised parity game to a symbolic parity game.

Each vertex ``X(v)`` becomes a vector: slot 0 holds the equation index and
the remaining slots hold parameter values.  Parameters with the same name
and sort share a slot.  Edges are split into groups that each read and
write only a few slots, and each group's relation is learnt on the fly
from the short vectors met during a breadth-first exploration.

Two partitions are supported.  ``simple`` makes one group per equation;
``split`` makes one group per atom.  An atom that yields no edge for a
vertex is neutral: its group sends the vertex to the sink that leaves the
value of the equation unchanged (``true`` for a conjunction, ``false`` for
a disjunction).
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Any

from .data import UNDEF, Var, coerce, enumerate_sort, eval_data, free_vars
from .game import ABELARD, ELOISE, Group, GameError, Layout, SymbolicGame
from .mdd import FALSE, NodeStore
from .pbes import (
    PAnd, PExists, PForall, PImp, PNot, POr, PVal, PVar, pf_free, show_pf,
)
from .ppg import CONJ, DISJ, Ppg, atom_shape

SIMPLE = "simple"
SPLIT = "split"


class BuildLimit(GameError):
    pass


def eval_simple(f, env) -> bool:
    """Truth of a formula without predicate variables; undefined is false."""
    if isinstance(f, PVal):
        return eval_data(f.expr, env) is True
    if isinstance(f, PNot):
        return not eval_simple(f.arg, env)
    if isinstance(f, PAnd):
        return all(eval_simple(p, env) for p in f.parts)
    if isinstance(f, POr):
        return any(eval_simple(p, env) for p in f.parts)
    if isinstance(f, PImp):
        return (not eval_simple(f.left, env)) or eval_simple(f.right, env)
    if isinstance(f, (PForall, PExists)):
        test = all if isinstance(f, PForall) else any
        return test(eval_simple(f.body, {**env, f.var: v}) for v in enumerate_sort(f.sort))
    raise TypeError(f"not a simple formula: {show_pf(f)}")


def make_layout(p: Ppg) -> Layout:
    names = ["Var"]
    sorts: list[Any] = [None]
    key_slot: dict[tuple, int] = {}
    eq_slots = []
    taken = {"Var"}
    for eq in p.equations:
        slots = []
        for n, s in eq.params:
            k = key_slot.get((n, s))
            if k is None:
                k = key_slot[(n, s)] = len(names)
                label = n
                while label in taken:
                    label += "'"
                taken.add(label)
                names.append(label)
                sorts.append(s)
            slots.append(k)
        eq_slots.append(tuple(slots))
    eq_names = [eq.name for eq in p.equations]
    tables: list[list] = [eq_names + ["true", "false"]] + [[] for _ in names[1:]]
    index = [{v: i for i, v in enumerate(t)} for t in tables]
    return Layout(names, sorts, eq_names, [tuple(n for n, _ in eq.params) for eq in p.equations],
                  eq_slots, tables, index)


@dataclass
class _Atom:
    quants: list
    guard: Any
    call: Any
    target: int = -1       # equation index of the call
    arg_slots: tuple = ()  # slot of each call argument
    copies: tuple = ()     # argument copied unchanged within its slot
    copy_slots: frozenset = frozenset()


@dataclass
class _GroupSpec:
    name: str
    eq: int
    atoms: list[_Atom]
    reads: tuple[int, ...]
    writes: tuple[int, ...]
    deps: tuple[int, ...] = ()
    seen: int = FALSE      # source short vectors handled so far (no Var slot)
    rel: int = FALSE
    pairs: list = field(default_factory=list)


def partition(p: Ppg, layout: Layout, mode: str = SIMPLE) -> list[_GroupSpec]:
    if mode not in (SIMPLE, SPLIT):
        raise ValueError(f"unknown partition {mode!r}")
    eq_index = {eq.name: i for i, eq in enumerate(p.equations)}
    out = []
    for i, eq in enumerate(p.equations):
        slots = layout.eq_slots[i]
        atoms = []
        for a in eq.atoms:
            quants, guard, call = atom_shape(a, eq.kind)
            at = _Atom(quants, guard, call)
            if call is not None:
                at.target = eq_index[call.name]
                at.arg_slots = layout.eq_slots[at.target]
                own = {s: n for (n, _), s in zip(eq.params, slots)}
                bound = {v for v, _ in quants}
                at.copies = tuple(_is_copy(a, s, own, bound)
                                  for a, s in zip(call.args, at.arg_slots))
                at.copy_slots = frozenset(s for s, c in zip(at.arg_slots, at.copies) if c)
            atoms.append((a, at))
        chunks = [atoms] if mode == SIMPLE else [[x] for x in atoms]
        if not atoms:
            chunks = [[]]
        for k, chunk in enumerate(chunks):
            name = eq.name if mode == SIMPLE or len(chunks) == 1 else f"{eq.name}#{k + 1}"
            reads, writes = set(), set()
            for a, at in chunk:
                free = _reads(eq.params, slots, at)
                reads |= {s for (n, _), s in zip(eq.params, slots) if n in free}
                if at.call is not None:
                    writes |= _writes(eq.params, slots, at)
            out.append(_GroupSpec(name, i, [at for _, at in chunk],
                                  tuple(sorted(reads)), tuple(sorted(writes))))
            out[-1].deps = tuple(sorted({0} | reads | writes))
    return out


def _is_copy(arg, s, own, bound) -> bool:
    return isinstance(arg, Var) and arg.name not in bound and own.get(s) == arg.name


def _reads(params, slots, at: _Atom) -> set[str]:
    """Parameters the atom looks at; arguments copied into their own slot
    are not read."""
    own = {s: n for (n, _), s in zip(params, slots)}
    bound = {v for v, _ in at.quants}
    names: set[str] = set()
    if at.guard is not None:
        names |= pf_free(at.guard)
    if at.call is not None:
        for arg, s in zip(at.call.args, at.arg_slots):
            if not _is_copy(arg, s, own, bound):
                names |= free_vars(arg)
    return names - bound


def _writes(params, slots, at: _Atom) -> set[int]:
    """Slots a call may change: anything but an argument copied unchanged
    from the same slot, plus source slots the target does not use."""
    own = {s: n for (n, _), s in zip(params, slots)}
    bound = {v for v, _ in at.quants}
    w = set()
    for arg, s in zip(at.call.args, at.arg_slots):
        if not _is_copy(arg, s, own, bound):
            w.add(s)
    w |= set(slots) - set(at.arg_slots)
    return w


def dependency_matrix(groups: list[_GroupSpec] | list[Group], layout: Layout) -> str:
    """Header of slot names, then one row per group with ``+`` on every
    slot the group reads or writes.  Slot 0 is always ``+``."""
    name_w = max([len(g.name) for g in groups] + [1])
    rows = [" " * name_w + "  " + " ".join(layout.slot_names)]
    for g in groups:
        deps = set(g.deps)
        cells = [("+" if k == 0 or k in deps else "-").ljust(len(n))
                 for k, n in enumerate(layout.slot_names)]
        rows.append(g.name.ljust(name_w) + "  " + " ".join(cells).rstrip())
    return "\n".join(rows) + "\n"


class Builder:
    def __init__(self, p: Ppg, mode: str = SIMPLE, store: NodeStore | None = None):
        if any(eq.priority < 0 for eq in p.equations):
            raise GameError("priorities not assigned")
        self.ppg = p
        self.mode = mode
        self.store = store or NodeStore()
        self.layout = make_layout(p)
        self.groups = partition(p, self.layout, mode)
        self.width = self.layout.width
        self.kinds = [eq.kind for eq in p.equations]
        self.params = [eq.params for eq in p.equations]
        self.sorts = [[s for _, s in eq.params] for eq in p.equations]
        self.successor_calls = 0

    # -- local successors ----------------------------------------------------

    def local_successors(self, g: _GroupSpec, src: tuple[int, ...]) -> list[tuple[int, ...]]:
        """Targets of a source short vector over ``g.deps`` (slot 0 first)."""
        lay = self.layout
        eq = g.eq
        if src[0] != eq:
            return []
        self.successor_calls += 1
        pos = {s: j for j, s in enumerate(g.deps)}
        env = {}
        for (n, _), s in zip(self.params[eq], lay.eq_slots[eq]):
            j = pos.get(s)
            if j is not None and s in g.reads:
                env[n] = lay.decode(s, src[j])
        conj = self.kinds[eq] == CONJ
        out: set[tuple] = set()
        hit_sink = False
        for at in g.atoms:
            if at.quants:
                names = [v for v, _ in at.quants]
                combos = itertools.product(*(enumerate_sort(s) for _, s in at.quants))
            else:
                names, combos = [], [()]
            for combo in combos:
                e = {**env, **dict(zip(names, combo))} if names else env
                if at.call is None:
                    if eval_simple(at.guard, e) != conj:
                        hit_sink = True
                    continue
                if at.guard is not None and not eval_simple(at.guard, e):
                    continue
                tsorts = self.sorts[at.target]
                amap = {}
                for a, s, srt, copy in zip(at.call.args, at.arg_slots, tsorts, at.copies):
                    if copy:
                        continue
                    v = coerce(eval_data(a, e), srt)
                    if v is UNDEF:
                        break
                    amap[s] = v
                else:
                    tgt = list(src)
                    tgt[0] = at.target
                    for j, s in enumerate(g.deps):
                        if s == 0 or s in at.copy_slots:
                            continue
                        v = amap.get(s, _MISSING)
                        tgt[j] = 0 if v is _MISSING else lay.encode(s, v)
                    out.add(tuple(tgt))
        # a failed conjunct or a true disjunct decides the vertex
        if hit_sink:
            sink = lay.false_sink if conj else lay.true_sink
            return [(sink,) + tuple(src[1:])]
        if not out:
            sink = lay.true_sink if conj else lay.false_sink
            return [(sink,) + tuple(src[1:])]
        return sorted(out)

    # -- exploration ---------------------------------------------------------

    def initial_vector(self) -> tuple[int, ...]:
        lay = self.layout
        p = self.ppg
        i = lay.eq_names.index(p.init_name)
        vec = [0] * self.width
        vec[0] = i
        for s, v, srt in zip(lay.eq_slots[i], p.init_args, self.sorts[i]):
            v = coerce(v, srt)
            if v is UNDEF:
                raise GameError("initial argument outside its sort")
            vec[s] = lay.encode(s, v)
        return tuple(vec)

    def _learn(self, g: _GroupSpec, frontier: int) -> None:
        st = self.store
        sub = st.child(frontier, g.eq)
        if sub == FALSE:
            return
        short = st.project(sub, g.deps[1:])
        fresh = st.minus(short, g.seen)
        if fresh == FALSE:
            return
        g.seen = st.union(g.seen, fresh)
        pairs = []
        for vec in st.iter_vectors(fresh):
            src = (g.eq,) + vec
            for tgt in self.local_successors(g, src):
                inter = [0] * (2 * len(src))
                inter[0::2] = src
                inter[1::2] = tgt
                pairs.append(tuple(inter))
        pairs.sort()
        g.rel = st.union(g.rel, st.build(pairs))

    def explore(self, max_states: int | None = None, progress=None) -> SymbolicGame:
        st = self.store
        init = self.initial_vector()
        visited = st.vector(init)
        frontier = visited
        level = 0
        while frontier != FALSE:
            nxt = FALSE
            for g in self.groups:
                self._learn(g, frontier)
                if g.rel != FALSE:
                    nxt = st.union(nxt, st.rel_next(frontier, g.rel, g.deps))
            frontier = st.minus(nxt, visited)
            visited = st.union(visited, frontier)
            level += 1
            if max_states is not None and st.count(visited) > max_states:
                raise BuildLimit(f"more than {max_states} vertices after {level} levels")
            if progress:
                progress(level, st.count(visited), len(st))
        return self._finish(init, visited)

    def _finish(self, init, visited) -> SymbolicGame:
        st = self.store
        lay = self.layout
        n = len(lay.eq_names)

        def var_in(values):
            vs = set(values)
            return st.chain(0, [(v, d) for v, d in st.children(visited) if v in vs])

        disj = [i for i in range(n) if self.kinds[i] == DISJ] + [lay.false_sink]
        conj = [i for i in range(n) if self.kinds[i] == CONJ] + [lay.true_sink]
        prios: dict[int, list[int]] = {}
        for i, eq in enumerate(self.ppg.equations):
            prios.setdefault(eq.priority, []).append(i)
        prios.setdefault(0, []).append(lay.true_sink)
        prios.setdefault(1, []).append(lay.false_sink)
        prio_roots = {p: var_in(vs) for p, vs in prios.items()}
        groups = [Group(g.name, g.deps, g.rel, g.reads, g.writes) for g in self.groups]
        return SymbolicGame(st, self.width, init, visited,
                            (var_in(disj), var_in(conj)),
                            {p: r for p, r in sorted(prio_roots.items()) if r != FALSE},
                            groups, lay)


_MISSING = object()


@dataclass
class BuildResult:
    game: SymbolicGame
    seconds: float
    successor_calls: int


def instantiate(p: Ppg, mode: str = SIMPLE, max_states: int | None = None,
                store: NodeStore | None = None, progress=None) -> BuildResult:
    b = Builder(p, mode, store)
    t0 = time.perf_counter()
    g = b.explore(max_states, progress)
    return BuildResult(g, time.perf_counter() - t0, b.successor_calls)


__all__ = [
    "SIMPLE", "SPLIT", "BuildLimit", "Builder", "BuildResult", "dependency_matrix",
    "eval_simple", "instantiate", "make_layout", "partition", "ELOISE", "ABELARD",
]
