"""Randomised MDD cases checked against Python sets, for the acceptance run.

Each case draws a few small vector sets and one relation and checks
canonicity, the boolean-algebra laws, counting against enumeration and
rel_next / rel_prev against brute force.
"""
from __future__ import annotations

import itertools
import random

from symparity.mdd import (
    FALSE, NodeStore, empty_relation, rel_insert, rel_next, rel_prev, set_count,
    set_enumerate, set_from,
)

W = 4
UNIVERSE = list(itertools.product(range(3), repeat=W))


def _vecs(rng, k):
    return {tuple(rng.randrange(3) for _ in range(W)) for _ in range(k)}


def _brute_next(states, deps, pairs):
    out = set()
    for s in states:
        for old, new in pairs:
            if all(s[d] == o for d, o in zip(deps, old)):
                t = list(s)
                for d, v in zip(deps, new):
                    t[d] = v
                out.add(tuple(t))
    return out


def check_case(rng: random.Random) -> None:
    store = NodeStore()
    a, b, c = (_vecs(rng, rng.randint(0, 12)) for _ in range(3))
    A, B, C = (set_from(store, W, x) for x in (a, b, c))
    # canonicity: any insertion order gives the same root
    items = list(a)
    rng.shuffle(items)
    assert set_from(store, W, items).root == A.root
    assert (A.root == B.root) == (a == b)
    # set algebra against Python sets
    assert set(A | B) == a | b and set(A & B) == a & b and set(A - B) == a - b
    assert (A | B).root == (B | A).root and (A & B).root == (B & A).root
    assert (A & (B | C)).root == ((A & B) | (A & C)).root
    assert (A | (B & C)).root == ((A | B) & (A | C)).root
    assert ((A - B) | (A & B)).root == A.root and (A - A).root == FALSE
    # counting agrees with enumeration
    assert set_count(A) == len(a) and set_enumerate(A, 10**6) == sorted(a)
    # a relation over random dependent slots
    deps = tuple(sorted(rng.sample(range(W), rng.randint(1, W))))
    n = len(deps)
    pairs = {(tuple(rng.randrange(3) for _ in range(n)), tuple(rng.randrange(3) for _ in range(n)))
             for _ in range(rng.randint(0, 6))}
    r = empty_relation(store, deps)
    for old, new in sorted(pairs):
        r = rel_insert(r, old, new)
    assert set(rel_next(A, r)) == _brute_next(a, deps, pairs)
    prev = {v for v in UNIVERSE if _brute_next({v}, deps, pairs) & a}
    assert set(rel_prev(A, r)) == prev
    assert set(rel_prev(A, r, within=B)) == prev & b


def run_cases(n: int, seed: int = 0) -> int:
    rng = random.Random(seed)
    for _ in range(n):
        check_case(rng)
    return n
