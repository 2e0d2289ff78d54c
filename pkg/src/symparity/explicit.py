"""Explicit parity games: PGSolver text, a reference Zielonka solver, and
conversion to the symbolic representation.

PGSolver lines read ``id priority owner succ,succ,... "label";`` with owner
0 for Eloise.  A vertex may have an empty successor field; its owner is
stuck there and loses.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .game import ABELARD, ELOISE, Group, SymbolicGame
from .mdd import NodeStore


class PgFormatError(ValueError):
    def __init__(self, msg: str, line: int):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass
class ExplicitGame:
    priority: list[int]
    owner: list[int]
    succ: list[list[int]]
    labels: list[str] = field(default_factory=list)
    init: int = 0

    @property
    def n(self) -> int:
        return len(self.priority)

    def pred(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for v, ss in enumerate(self.succ):
            for w in ss:
                out[w].append(v)
        return out


_HEADER = re.compile(r"parity\s+(-?\d+)\s*;")
_START = re.compile(r"start\s+(\d+)\s*;")
_LINE = re.compile(r'(\d+)\s+(\d+)\s+([01])(?:\s+([0-9,\s]*?))?\s*(?:"((?:[^"\\]|\\.)*)")?\s*;')


def parse_pgsolver(text: str) -> ExplicitGame:
    """Parse PGSolver text.  Vertex ids must form the range 0..N."""
    entries: dict[int, tuple[int, int, list[int], str]] = {}
    declared = None
    start = 0
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEADER.fullmatch(line)
        if m:
            if declared is not None:
                raise PgFormatError("second parity header", no)
            declared = int(m.group(1))
            continue
        m = _START.fullmatch(line)
        if m:
            start = int(m.group(1))
            continue
        m = _LINE.fullmatch(line)
        if not m:
            raise PgFormatError(f"cannot parse {line!r}", no)
        vid, prio, owner = int(m.group(1)), int(m.group(2)), int(m.group(3))
        succ_txt = (m.group(4) or "").replace(" ", "")
        try:
            succ = [int(x) for x in succ_txt.split(",") if x != ""]
        except ValueError:
            raise PgFormatError("bad successor list", no) from None
        if succ_txt and "" in succ_txt.split(","):
            raise PgFormatError("empty entry in successor list", no)
        if vid in entries:
            raise PgFormatError(f"vertex {vid} defined twice", no)
        entries[vid] = (prio, owner, succ, m.group(5) or "")
    if declared is None:
        raise PgFormatError("missing parity header", 1)
    n = len(entries)
    if set(entries) != set(range(n)):
        raise PgFormatError("vertex ids must be 0..N without gaps", 1)
    if declared != n - 1:
        raise PgFormatError(f"header says {declared} but the highest id is {n - 1}", 1)
    for v, (_, _, succ, _) in entries.items():
        for w in succ:
            if w >= n:
                raise PgFormatError(f"vertex {v} has unknown successor {w}", 1)
    if n and not 0 <= start < n:
        raise PgFormatError("start vertex out of range", 1)
    return ExplicitGame(
        priority=[entries[v][0] for v in range(n)],
        owner=[entries[v][1] for v in range(n)],
        succ=[sorted(set(entries[v][2])) for v in range(n)],
        labels=[entries[v][3] for v in range(n)],
        init=start,
    )


def print_pgsolver(g: ExplicitGame) -> str:
    lines = [f"parity {g.n - 1};"]
    if g.init:
        lines.append(f"start {g.init};")
    for v in range(g.n):
        label = g.labels[v] if v < len(g.labels) else ""
        succ = ",".join(map(str, g.succ[v]))
        lines.append(f'{v} {g.priority[v]} {g.owner[v]} {succ} "{label}";')
    return "\n".join(lines) + "\n"


# -- explicit Zielonka ---------------------------------------------------------


def _attractor(g: ExplicitGame, pred, p: int, target: set[int], U: set[int]) -> set[int]:
    A = set(target) & U
    # out-degree inside U for opponent vertices
    count: dict[int, int] = {}
    queue = list(A)
    while queue:
        w = queue.pop()
        for v in pred[w]:
            if v not in U or v in A:
                continue
            if g.owner[v] == p:
                A.add(v)
                queue.append(v)
            else:
                c = count.get(v)
                if c is None:
                    c = sum(1 for x in g.succ[v] if x in U)
                c -= 1
                count[v] = c
                if c == 0:
                    A.add(v)
                    queue.append(v)
    return A


def _zielonka(g: ExplicitGame, pred, U: set[int]):
    # explicit stack of frames: (U, stage, data)
    result = None
    stack = [[U, 0, None]]
    while stack:
        fr = stack[-1]
        U, stage = fr[0], fr[1]
        if stage == 0:
            if not U:
                stack.pop()
                result = (set(), set())
                continue
            d = min(g.priority[v] for v in U)
            p = d % 2
            N = {v for v in U if g.priority[v] == d}
            A = _attractor(g, pred, p, N, U)
            fr[1], fr[2] = 1, p
            stack.append([U - A, 0, None])
            continue
        p = fr[2]
        if stage == 1:
            W = result
            if not W[1 - p]:
                stack.pop()
                res = [set(), set()]
                res[p] = set(U)
                result = tuple(res)
                continue
            B = _attractor(g, pred, 1 - p, W[1 - p], U)
            fr[1], fr[2] = 2, (p, B)
            stack.append([U - B, 0, None])
            continue
        p, B = fr[2]
        W = result
        stack.pop()
        res = [set(), set()]
        res[p] = W[p]
        res[1 - p] = W[1 - p] | B
        result = tuple(res)
    return result


def solve_explicit(g: ExplicitGame) -> tuple[set[int], set[int]]:
    """Winning regions (W_Eloise, W_Abelard).

    Dead ends are settled first: a stuck player loses, and attractors to
    those vertices are won by the other player.  What remains has no dead
    ends and is solved by Zielonka's algorithm.
    """
    pred = g.pred()
    V = set(range(g.n))
    stuck = [v for v in V if not g.succ[v]]
    lose0 = {v for v in stuck if g.owner[v] == ELOISE}
    lose1 = {v for v in stuck if g.owner[v] == ABELARD}
    W1 = _attractor(g, pred, ABELARD, lose0, V)
    W0 = _attractor(g, pred, ELOISE, lose1, V - W1)
    rest = V - W0 - W1
    R0, R1 = _zielonka(g, pred, rest)
    return W0 | R0, W1 | R1


def to_symbolic(g: ExplicitGame, store: NodeStore | None = None) -> SymbolicGame:
    """Vertex ``i`` becomes the vector ``(i // 10, i % 10)``; edges go to
    three groups by edge position, each depending on both slots."""
    st = store or NodeStore()

    def vec(i):
        return (i // 10, i % 10)

    def set_of(ids):
        return st.build(sorted(vec(i) for i in ids))

    V = set_of(range(g.n))
    owners = (set_of(v for v in range(g.n) if g.owner[v] == ELOISE),
              set_of(v for v in range(g.n) if g.owner[v] == ABELARD))
    prios: dict[int, list[int]] = {}
    for v in range(g.n):
        prios.setdefault(g.priority[v], []).append(v)
    edges = [(v, w) for v in range(g.n) for w in g.succ[v]]
    groups = []
    for k in range(3):
        pairs = []
        for v, w in edges[k::3]:
            a, b = vec(v), vec(w)
            pairs.append((a[0], b[0], a[1], b[1]))
        groups.append(Group(f"edges{k}", (0, 1), st.build(sorted(set(pairs))), (0, 1), (0, 1)))
    return SymbolicGame(st, 2, vec(g.init), V, owners,
                        {p: set_of(vs) for p, vs in sorted(prios.items())}, groups)


def from_symbolic_sets(st: NodeStore, root: int) -> set[int]:
    """Vertex ids of a set over the ``to_symbolic`` encoding."""
    return {a * 10 + b for a, b in st.iter_vectors(root)}


__all__ = ["ExplicitGame", "PgFormatError", "parse_pgsolver", "print_pgsolver",
           "solve_explicit", "to_symbolic", "from_symbolic_sets"]
