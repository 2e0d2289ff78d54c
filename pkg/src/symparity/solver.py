"""Symbolic Zielonka solver.

The game is first made total: every vertex without successors gets an
edge to a trap that its opponent wins (a priority-0 self-loop if Abelard
is stuck, a priority-1 self-loop if Eloise is stuck).  The recursion of
Zielonka's algorithm is run on an explicit stack so deep games do not hit
the interpreter's recursion limit.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace

from .game import ABELARD, ELOISE, Group, SymbolicGame
from .mdd import FALSE, NodeStore


@dataclass
class Solution:
    won: tuple[int, int]        # roots of W_Eloise, W_Abelard
    init_winner: int
    seconds: float
    attractor_steps: int
    recursive_calls: int


def totalize(g: SymbolicGame) -> SymbolicGame:
    """Copy of ``g`` in which no vertex is stuck."""
    st = g.store
    has_succ = FALSE
    for gr in g.groups:
        has_succ = st.union(has_succ, st.rel_prev_within(g.vertices, gr.rel, gr.deps, g.vertices))
    stuck = st.minus(g.vertices, has_succ)
    if stuck == FALSE:
        return g
    top = max(v for v, _ in st.children(g.vertices))
    even_trap, odd_trap = top + 1, top + 2
    all_slots = tuple(range(g.width))
    groups = list(g.groups)
    vertices, owner, prios = g.vertices, list(g.owner), dict(g.priorities)
    loops = []
    # stuck Abelard goes to an even trap, stuck Eloise to an odd one
    for who, trap, prio in ((ABELARD, even_trap, 0), (ELOISE, odd_trap, 1)):
        src = st.intersect(stuck, g.owner[who])
        if src == FALSE:
            continue
        rel = st.interleave_identity(src, trap)
        groups.append(Group(f"stuck-{'abelard' if who else 'eloise'}", all_slots, rel,
                            all_slots, (0,)))
        traps = st.rel_next(src, rel, all_slots)
        vertices = st.union(vertices, traps)
        owner[who] = st.union(owner[who], traps)
        prios[prio] = st.union(prios.get(prio, FALSE), traps)
        loops.append((trap, trap))
    loop_rel = st.build([(a, b) for a, b in sorted(loops)])
    groups.append(Group("trap", (0,), loop_rel, (0,), ()))
    return replace(g, vertices=vertices, owner=(owner[0], owner[1]),
                   priorities=dict(sorted(prios.items())), groups=groups)


class _Solver:
    def __init__(self, g: SymbolicGame):
        self.g = g
        self.st: NodeStore = g.store
        self.steps = 0
        self.calls = 0
        self.prios = sorted(g.priorities.items())

    def attractor(self, p: int, target: int, U: int) -> int:
        """Vertices of ``U`` from which player ``p`` can force a visit to
        ``target`` while staying in ``U``."""
        st, g = self.st, self.g
        own = g.owner[p]
        A = st.intersect(target, U)
        frontier = A
        while frontier != FALSE:
            self.steps += 1
            rest = st.minus(U, A)
            pre = FALSE
            for gr in g.groups:
                pre = st.union(pre, st.rel_prev_within(frontier, gr.rel, gr.deps, rest))
            if pre == FALSE:
                break
            mine = st.intersect(pre, own)
            theirs = st.minus(pre, own)
            if theirs != FALSE:
                # opponent vertices with a successor left in U \ A stay out
                outside = st.minus(rest, mine)
                escape = FALSE
                for gr in g.groups:
                    escape = st.union(escape, st.rel_prev_within(outside, gr.rel, gr.deps, theirs))
                theirs = st.minus(theirs, escape)
            frontier = st.union(mine, theirs)
            A = st.union(A, frontier)
        return A

    def min_priority(self, U: int, start: int = 0):
        """Least priority in ``U`` and its vertices, scanning the sorted
        priority list from index ``start``."""
        for k in range(start, len(self.prios)):
            n = self.st.intersect(U, self.prios[k][1])
            if n != FALSE:
                return k, n
        raise AssertionError("vertex without priority")

    def solve_sub(self, U: int, start: int = 0):
        """Generator form of one recursive call; yields sub-games (with a
        lower bound on their priority index) and receives their solutions."""
        st = self.st
        self.calls += 1
        if U == FALSE:
            return (FALSE, FALSE)
        k, N = self.min_priority(U, start)
        p = self.prios[k][0] % 2
        A = self.attractor(p, N, U)
        # subgames never contain a smaller priority than their parent
        W1 = yield st.minus(U, A), k
        if W1[1 - p] == FALSE:
            res = [FALSE, FALSE]
            res[p] = U
            return tuple(res)
        B = self.attractor(1 - p, W1[1 - p], U)
        W2 = yield st.minus(U, B), k
        res = [FALSE, FALSE]
        res[p] = W2[p]
        res[1 - p] = st.union(W2[1 - p], B)
        return tuple(res)

    def run(self, U: int):
        stack = [self.solve_sub(U)]
        value = None
        while stack:
            try:
                sub = stack[-1].send(value)
            except StopIteration as stop:
                stack.pop()
                value = stop.value
                continue
            stack.append(self.solve_sub(*sub))
            value = None
        return value


def zielonka(g: SymbolicGame) -> tuple[int, int]:
    """Winning regions (W_Eloise, W_Abelard) of a total game."""
    return _Solver(g).run(g.vertices)


def attractor(g: SymbolicGame, player: int, target: int, within: int | None = None) -> int:
    return _Solver(g).attractor(player, target, g.vertices if within is None else within)


def solve(g: SymbolicGame) -> Solution:
    t0 = time.perf_counter()
    tg = totalize(g)
    s = _Solver(tg)
    won = s.run(tg.vertices)
    init = g.store.vector(g.init)
    if g.store.intersect(init, won[ELOISE]) != FALSE:
        w = ELOISE
    elif g.store.intersect(init, won[ABELARD]) != FALSE:
        w = ABELARD
    else:
        raise AssertionError("initial vertex not in either winning region")
    won = (g.store.intersect(won[0], g.vertices), g.store.intersect(won[1], g.vertices))
    return Solution(won, w, time.perf_counter() - t0, s.steps, s.calls)


__all__ = ["Solution", "attractor", "solve", "totalize", "zielonka"]
