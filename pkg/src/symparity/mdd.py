"""List-style multi-valued decision diagrams.

A node is ``(slot, value, down, right)``: ``down`` continues the vector at
``slot + 1`` and ``right`` is the next sibling at the same slot with a
strictly larger value.  Every path from a root visits every slot exactly
once, so a root at slot 0 of width ``w`` represents a set of length-``w``
vectors of non-negative integers.

Relations over a group's dependent slots are stored the same way, with old
and new values interleaved: ``(old_0, new_0, old_1, new_1, ...)``.

Node ids are plain ints; ``FALSE`` (0) is the empty set and ``TRUE`` (1)
the set containing the empty suffix.  Nodes are hash-consed, so two roots
denote the same set exactly when they are the same id.
"""
from __future__ import annotations

import sys
from array import array
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

FALSE = 0
TRUE = 1

_SLOT_BITS = 12
_VAL_BITS = 24
_ID_BITS = 40
_MAX_SLOT = (1 << _SLOT_BITS) - 1
_MAX_VAL = (1 << _VAL_BITS) - 1

# operations recurse once per slot; deep layouts need some headroom
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


class DimensionError(ValueError):
    """Vector or relation pair does not match the expected width."""


class NodeStore:
    """Node arena with its unique table and operation caches.

    Not thread-safe; node ids are meaningless in any other store.
    """

    def __init__(self) -> None:
        # terminals occupy ids 0 and 1; their fields are never read
        self._slot = array("l", [-1, -1])
        self._val = array("l", [-1, -1])
        self._down = array("q", [0, 0])
        self._right = array("q", [0, 0])
        self._unique: dict[int, int] = {}
        self._union: dict[int, int] = {}
        self._inter: dict[int, int] = {}
        self._minus: dict[int, int] = {}
        self._next: dict[int, int] = {}
        self._prev: dict[int, int] = {}
        self._prev_in: dict[int, int] = {}
        self._proj: dict[int, int] = {}
        self._count: dict[int, int] = {}
        self._deps_ids: dict[tuple[int, ...], int] = {}
        self._deps_list: list[tuple[int, ...]] = []

    def __len__(self) -> int:
        return len(self._slot) - 2

    # -- node construction -------------------------------------------------

    def mk(self, slot: int, val: int, down: int, right: int) -> int:
        if down == FALSE:
            return right
        if val > _MAX_VAL or val < 0:
            raise ValueError(f"value {val} outside 0..{_MAX_VAL}")
        key = ((((down << _ID_BITS) | right) << _VAL_BITS | val) << _SLOT_BITS) | slot
        n = self._unique.get(key)
        if n is None:
            n = len(self._slot)
            self._slot.append(slot)
            self._val.append(val)
            self._down.append(down)
            self._right.append(right)
            self._unique[key] = n
        return n

    def chain(self, slot: int, items: Sequence[tuple[int, int]]) -> int:
        """Build a sibling list from ``(value, down)`` pairs sorted by value."""
        mk = self.mk
        r = FALSE
        for v, d in reversed(items):
            r = mk(slot, v, d, r)
        return r

    def children(self, n: int) -> list[tuple[int, int]]:
        out = []
        val, down, right = self._val, self._down, self._right
        while n > TRUE:
            out.append((val[n], down[n]))
            n = right[n]
        return out

    def child(self, n: int, value: int) -> int:
        val, right = self._val, self._right
        while n > TRUE:
            v = val[n]
            if v == value:
                return self._down[n]
            if v > value:
                return FALSE
            n = right[n]
        return FALSE

    def slot_of(self, n: int) -> int:
        return self._slot[n]

    def vector(self, vec: Sequence[int], first_slot: int = 0) -> int:
        r = TRUE
        mk = self.mk
        for i in range(len(vec) - 1, -1, -1):
            v = vec[i]
            if v < 0:
                raise ValueError("vector entries must be non-negative")
            r = mk(first_slot + i, v, r, FALSE)
        return r

    def build(self, vecs: Sequence[Sequence[int]], first_slot: int = 0) -> int:
        """Set of equal-length vectors, given sorted and without duplicates."""
        if not vecs:
            return FALSE
        width = len(vecs[0])

        def go(lo: int, hi: int, k: int) -> int:
            if k == width:
                return TRUE
            items = []
            i = lo
            while i < hi:
                v = vecs[i][k]
                j = i + 1
                while j < hi and vecs[j][k] == v:
                    j += 1
                items.append((v, go(i, j, k + 1)))
                i = j
            return self.chain(first_slot + k, items)

        return go(0, len(vecs), 0)

    def deps_id(self, deps: tuple[int, ...]) -> int:
        i = self._deps_ids.get(deps)
        if i is None:
            i = len(self._deps_list)
            self._deps_ids[deps] = i
            self._deps_list.append(deps)
        return i

    def clear_caches(self) -> None:
        for c in (self._union, self._inter, self._minus, self._next,
                  self._prev, self._prev_in, self._proj):
            c.clear()

    def cache_size(self) -> int:
        return sum(len(c) for c in (self._union, self._inter, self._minus,
                                    self._next, self._prev, self._prev_in,
                                    self._proj))

    # -- set algebra ---------------------------------------------------------

    def union(self, a: int, b: int) -> int:
        if a == b or b == FALSE:
            return a
        if a == FALSE:
            return b
        if a > b:
            a, b = b, a
        key = (a << _ID_BITS) | b
        r = self._union.get(key)
        if r is not None:
            return r
        val, down, right = self._val, self._down, self._right
        union = self.union
        items = []
        x, y = a, b
        while x > TRUE and y > TRUE:
            vx, vy = val[x], val[y]
            if vx == vy:
                items.append((vx, union(down[x], down[y])))
                x, y = right[x], right[y]
            elif vx < vy:
                items.append((vx, down[x]))
                x = right[x]
            else:
                items.append((vy, down[y]))
                y = right[y]
        while x > TRUE:
            items.append((val[x], down[x]))
            x = right[x]
        while y > TRUE:
            items.append((val[y], down[y]))
            y = right[y]
        r = self.chain(self._slot[a], items)
        self._union[key] = r
        return r

    def intersect(self, a: int, b: int) -> int:
        if a == b:
            return a
        if a == FALSE or b == FALSE:
            return FALSE
        if a > b:
            a, b = b, a
        key = (a << _ID_BITS) | b
        r = self._inter.get(key)
        if r is not None:
            return r
        val, down, right = self._val, self._down, self._right
        inter = self.intersect
        items = []
        x, y = a, b
        while x > TRUE and y > TRUE:
            vx, vy = val[x], val[y]
            if vx == vy:
                d = inter(down[x], down[y])
                if d != FALSE:
                    items.append((vx, d))
                x, y = right[x], right[y]
            elif vx < vy:
                x = right[x]
            else:
                y = right[y]
        r = self.chain(self._slot[a], items)
        self._inter[key] = r
        return r

    def minus(self, a: int, b: int) -> int:
        if a == b or a == FALSE:
            return FALSE
        if b == FALSE:
            return a
        key = (a << _ID_BITS) | b
        r = self._minus.get(key)
        if r is not None:
            return r
        val, down, right = self._val, self._down, self._right
        minus = self.minus
        items = []
        x, y = a, b
        while x > TRUE:
            vx = val[x]
            while y > TRUE and val[y] < vx:
                y = right[y]
            if y > TRUE and val[y] == vx:
                d = minus(down[x], down[y])
                if d != FALSE:
                    items.append((vx, d))
            else:
                items.append((vx, down[x]))
            x = right[x]
        r = self.chain(self._slot[a], items)
        self._minus[key] = r
        return r

    def union_all(self, roots: Iterable[int]) -> int:
        r = FALSE
        for x in roots:
            r = self.union(r, x)
        return r

    # -- inspection ----------------------------------------------------------

    def count(self, n: int) -> int:
        if n <= TRUE:
            return n
        c = self._count.get(n)
        if c is not None:
            return c
        total = 0
        down, right = self._down, self._right
        count = self.count
        x = n
        while x > TRUE:
            total += count(down[x])
            x = right[x]
        self._count[n] = total
        return total

    def iter_vectors(self, n: int) -> Iterator[tuple[int, ...]]:
        """Vectors below ``n`` in lexicographic order."""
        if n == FALSE:
            return
        if n == TRUE:
            yield ()
            return
        val, down, right = self._val, self._down, self._right
        stack = [(n, ())]
        # depth-first, smallest value first
        while stack:
            x, prefix = stack.pop()
            if x == TRUE:
                yield prefix
                continue
            sibs = []
            while x > TRUE:
                sibs.append(x)
                x = right[x]
            for s in reversed(sibs):
                stack.append((down[s], prefix + (val[s],)))

    def node_count(self, roots: Iterable[int]) -> int:
        """Distinct non-terminal nodes reachable from ``roots``."""
        seen = set()
        stack = [r for r in roots if r > TRUE]
        down, right = self._down, self._right
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            d, r = down[x], right[x]
            if d > TRUE and d not in seen:
                stack.append(d)
            if r > TRUE and r not in seen:
                stack.append(r)
        return len(seen)

    # -- projection and relational products ---------------------------------

    def project(self, n: int, keep: tuple[int, ...]) -> int:
        """Existentially quantify every slot not in ``keep`` (sorted).

        The result is a set of ``len(keep)``-vectors with slots renumbered
        0..len(keep)-1.
        """
        return self._project(n, keep, self.deps_id(keep))

    def _project(self, n: int, keep: tuple[int, ...], kid: int) -> int:
        if n <= TRUE:
            return n
        k = self._slot[n]
        pos = _index_at_or_after(keep, k)
        if pos == len(keep):
            return TRUE
        key = (n << 16) | kid
        r = self._proj.get(key)
        if r is not None:
            return r
        val, down, right = self._val, self._down, self._right
        x = n
        if keep[pos] == k:
            items = []
            while x > TRUE:
                d = self._project(down[x], keep, kid)
                if d != FALSE:
                    items.append((val[x], d))
                x = right[x]
            r = self.chain(pos, items)
        else:
            r = FALSE
            while x > TRUE:
                r = self.union(r, self._project(down[x], keep, kid))
                x = right[x]
        self._proj[key] = r
        return r

    def rel_next(self, s: int, rel: int, deps: tuple[int, ...]) -> int:
        return self._rnext(s, rel, deps, 0, self.deps_id(deps))

    def _rnext(self, s: int, r: int, deps, di: int, did: int) -> int:
        if s == FALSE or r == FALSE:
            return FALSE
        if di == len(deps):
            return s
        key = (((s << _ID_BITS) | r) << 16) | did
        res = self._next.get(key)
        if res is not None:
            return res
        val, down, right, slot = self._val, self._down, self._right, self._slot
        k = slot[s]
        if k != deps[di]:
            items = []
            x = s
            while x > TRUE:
                d = self._rnext(down[x], r, deps, di, did)
                if d != FALSE:
                    items.append((val[x], d))
                x = right[x]
            res = self.chain(k, items)
        else:
            acc: dict[int, int] = {}
            union = self.union
            x, y = s, r
            while x > TRUE and y > TRUE:
                vx, vy = val[x], val[y]
                if vx == vy:
                    sd = down[x]
                    w = down[y]
                    while w > TRUE:
                        sub = self._rnext(sd, down[w], deps, di + 1, did)
                        if sub != FALSE:
                            nv = val[w]
                            prev = acc.get(nv)
                            acc[nv] = sub if prev is None else union(prev, sub)
                        w = right[w]
                    x, y = right[x], right[y]
                elif vx < vy:
                    x = right[x]
                else:
                    y = right[y]
            res = self.chain(k, sorted(acc.items()))
        self._next[key] = res
        return res

    def rel_prev(self, s: int, rel: int, deps: tuple[int, ...]) -> int:
        return self._rprev(s, rel, deps, 0, self.deps_id(deps))

    def _rprev(self, s: int, r: int, deps, di: int, did: int) -> int:
        if s == FALSE or r == FALSE:
            return FALSE
        if di == len(deps):
            return s
        key = (((s << _ID_BITS) | r) << 16) | did
        res = self._prev.get(key)
        if res is not None:
            return res
        val, down, right, slot = self._val, self._down, self._right, self._slot
        k = slot[s]
        if k != deps[di]:
            items = []
            x = s
            while x > TRUE:
                d = self._rprev(down[x], r, deps, di, did)
                if d != FALSE:
                    items.append((val[x], d))
                x = right[x]
            res = self.chain(k, items)
        else:
            items = []
            union = self.union
            y = r
            while y > TRUE:
                acc = FALSE
                w = down[y]
                x = s
                while w > TRUE and x > TRUE:
                    vw, vx = val[w], val[x]
                    if vw == vx:
                        acc = union(acc, self._rprev(down[x], down[w], deps, di + 1, did))
                        w, x = right[w], right[x]
                    elif vw < vx:
                        w = right[w]
                    else:
                        x = right[x]
                if acc != FALSE:
                    items.append((val[y], acc))
                y = right[y]
            res = self.chain(k, items)
        self._prev[key] = res
        return res

    def rel_prev_within(self, s: int, rel: int, deps: tuple[int, ...], within: int) -> int:
        """``rel_prev(s) ∩ within`` without building the full pre-image."""
        return self._rprev_in(within, s, rel, deps, 0, self.deps_id(deps))

    def _rprev_in(self, c: int, s: int, r: int, deps, di: int, did: int) -> int:
        if c == FALSE or s == FALSE or r == FALSE:
            return FALSE
        if di == len(deps):
            return self.intersect(c, s)
        key = (((((c << _ID_BITS) | s) << _ID_BITS) | r) << 16) | did
        res = self._prev_in.get(key)
        if res is not None:
            return res
        val, down, right, slot = self._val, self._down, self._right, self._slot
        k = slot[c]
        items = []
        if k != deps[di]:
            x, y = c, s
            while x > TRUE and y > TRUE:
                vx, vy = val[x], val[y]
                if vx == vy:
                    d = self._rprev_in(down[x], down[y], r, deps, di, did)
                    if d != FALSE:
                        items.append((vx, d))
                    x, y = right[x], right[y]
                elif vx < vy:
                    x = right[x]
                else:
                    y = right[y]
        else:
            union = self.union
            x, y = c, r
            while x > TRUE and y > TRUE:
                vx, vy = val[x], val[y]
                if vx == vy:
                    acc = FALSE
                    cd = down[x]
                    w = down[y]
                    z = s
                    while w > TRUE and z > TRUE:
                        vw, vz = val[w], val[z]
                        if vw == vz:
                            acc = union(acc, self._rprev_in(cd, down[z], down[w], deps, di + 1, did))
                            if acc == cd:
                                break
                            w, z = right[w], right[z]
                        elif vw < vz:
                            w = right[w]
                        else:
                            z = right[z]
                    if acc != FALSE:
                        items.append((vx, acc))
                    x, y = right[x], right[y]
                elif vx < vy:
                    x = right[x]
                else:
                    y = right[y]
        res = self.chain(k, items)
        self._prev_in[key] = res
        return res

    def interleave_identity(self, n: int, target_first: int) -> int:
        """Relation over all slots mapping each vector ``v`` of ``n`` to ``v``
        with slot 0 replaced by ``target_first``."""
        memo: dict[int, int] = {}

        def go(x: int) -> int:
            if x <= TRUE:
                return x
            got = memo.get(x)
            if got is not None:
                return got
            k = self._slot[x]
            items = []
            for v, d in self.children(x):
                sub = go(d)
                new = target_first if k == 0 else v
                items.append((v, self.mk(2 * k + 1, new, sub, FALSE)))
            res = self.chain(2 * k, items)
            memo[x] = res
            return res

        return go(n)


def _index_at_or_after(keep: tuple[int, ...], k: int) -> int:
    # keep is short; linear scan beats bisect overhead here
    for i, s in enumerate(keep):
        if s >= k:
            return i
    return len(keep)


# -- value objects -------------------------------------------------------------


@dataclass(frozen=True)
class MddSet:
    store: NodeStore
    root: int
    width: int

    def __or__(self, other: "MddSet") -> "MddSet":
        return set_combine("union", self, other)

    def __and__(self, other: "MddSet") -> "MddSet":
        return set_combine("intersect", self, other)

    def __sub__(self, other: "MddSet") -> "MddSet":
        return set_combine("difference", self, other)

    def __len__(self) -> int:
        # may overflow sys.maxsize on huge sets; use set_count for those
        return set_count(self)

    def __bool__(self) -> bool:
        return self.root != FALSE

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return self.store.iter_vectors(self.root)

    def __contains__(self, vec) -> bool:
        n = self.root
        for v in vec:
            n = self.store.child(n, v)
            if n == FALSE:
                return False
        return n == TRUE

    def nodes(self) -> int:
        return self.store.node_count([self.root])


@dataclass(frozen=True)
class GroupRelation:
    store: NodeStore
    deps: tuple[int, ...]
    root: int = FALSE

    def pairs(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        for vec in self.store.iter_vectors(self.root):
            yield vec[0::2], vec[1::2]

    def nodes(self) -> int:
        return self.store.node_count([self.root])


def empty_set(store: NodeStore, width: int) -> MddSet:
    return MddSet(store, FALSE, width)


def set_from(store: NodeStore, width: int, vectors: Iterable[Sequence[int]]) -> MddSet:
    s = empty_set(store, width)
    for v in vectors:
        s = set_insert(s, v)
    return s


def set_insert(s: MddSet, v: Sequence[int]) -> MddSet:
    if len(v) != s.width:
        raise DimensionError(f"vector of length {len(v)} for width {s.width}")
    st = s.store
    return MddSet(st, st.union(s.root, st.vector(v)), s.width)


def set_combine(mode: str, a: MddSet, b: MddSet) -> MddSet:
    if a.width != b.width:
        raise DimensionError(f"widths differ: {a.width} vs {b.width}")
    if a.store is not b.store:
        raise ValueError("sets belong to different node stores")
    st = a.store
    if mode == "union":
        r = st.union(a.root, b.root)
    elif mode == "intersect":
        r = st.intersect(a.root, b.root)
    elif mode == "difference":
        r = st.minus(a.root, b.root)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return MddSet(st, r, a.width)


def set_count(s: MddSet) -> int:
    return s.store.count(s.root)


def set_enumerate(s: MddSet, limit: int) -> list[tuple[int, ...]]:
    if limit < 0:
        raise ValueError("limit must be non-negative")
    out = []
    if limit == 0:
        return out
    for vec in s.store.iter_vectors(s.root):
        out.append(vec)
        if len(out) >= limit:
            break
    return out


def dump_set(s: MddSet) -> str:
    """Sorted vectors, one per line, values space-separated."""
    return "".join(" ".join(map(str, v)) + "\n" for v in s)


def empty_relation(store: NodeStore, deps: Sequence[int]) -> GroupRelation:
    deps = tuple(deps)
    if list(deps) != sorted(set(deps)):
        raise ValueError("deps must be strictly increasing")
    return GroupRelation(store, deps, FALSE)


def rel_insert(r: GroupRelation, old: Sequence[int], new: Sequence[int]) -> GroupRelation:
    n = len(r.deps)
    if len(old) != n or len(new) != n:
        raise DimensionError(f"expected short vectors of length {n}")
    inter = [0] * (2 * n)
    inter[0::2] = old
    inter[1::2] = new
    st = r.store
    return GroupRelation(st, r.deps, st.union(r.root, st.vector(inter)))


def rel_next(s: MddSet, r: GroupRelation) -> MddSet:
    if r.deps and s.width < r.deps[-1] + 1:
        raise DimensionError("relation reaches beyond the set width")
    return MddSet(s.store, s.store.rel_next(s.root, r.root, r.deps), s.width)


def rel_prev(s: MddSet, r: GroupRelation, within: MddSet | None = None) -> MddSet:
    if r.deps and s.width < r.deps[-1] + 1:
        raise DimensionError("relation reaches beyond the set width")
    st = s.store
    if within is None:
        return MddSet(st, st.rel_prev(s.root, r.root, r.deps), s.width)
    return MddSet(st, st.rel_prev_within(s.root, r.root, r.deps, within.root), s.width)


def project(s: MddSet, keep: Sequence[int]) -> MddSet:
    keep = tuple(keep)
    return MddSet(s.store, s.store.project(s.root, keep), len(keep))
