import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from symparity.explicit import ExplicitGame, from_symbolic_sets, solve_explicit, to_symbolic
from symparity.game import ABELARD, ELOISE
from symparity.mdd import FALSE
from symparity.solver import attractor, solve, totalize, zielonka


def explicit(prio, owner, succ, init=0):
    return ExplicitGame(list(prio), list(owner), [list(s) for s in succ], init=init)


def symbolic_regions(g: ExplicitGame):
    sg = to_symbolic(g)
    sol = solve(sg)
    st = sg.store
    # determinacy on the original vertex set
    assert st.intersect(*sol.won) == FALSE
    assert st.count(sol.won[0]) + st.count(sol.won[1]) == sg.count()
    assert st.union(*sol.won) == sg.vertices
    return from_symbolic_sets(st, sol.won[0]), from_symbolic_sets(st, sol.won[1])


def ids(st_, root):
    return from_symbolic_sets(st_, root)


def test_even_self_loop():
    assert symbolic_regions(explicit([0], [0], [[0]])) == ({0}, set())


def test_two_cycle_min_priority_even():
    # both positions Abelard, the forced cycle has minimum 0
    assert symbolic_regions(explicit([0, 1], [1, 1], [[1], [0]])) == ({0, 1}, set())


def test_stuck_players_lose():
    g = explicit([1, 0], [1, 0], [[], []])
    assert solve_explicit(g) == ({0}, {1})
    assert symbolic_regions(g) == ({0}, {1})


def test_odd_self_loop_eloise():
    g = explicit([1], [0], [[0]])
    assert solve_explicit(g) == (set(), {0})
    assert symbolic_regions(g) == (set(), {0})


def test_all_even_priorities():
    rng = random.Random(3)
    for _ in range(20):
        prio, owner, succ = oracles.random_game(rng, 30, stuck=False)
        g = explicit([2 * (p // 2) for p in prio], owner, succ)
        assert solve_explicit(g)[0] == set(range(30))


def test_totalize():
    total = to_symbolic(explicit([0, 1], [0, 1], [[1], [0]]))
    assert totalize(total) is total
    g = to_symbolic(explicit([1], [1], [[]]))
    t = totalize(g)
    assert t.count() == 2
    W = zielonka(t)
    assert g.store.intersect(W[ELOISE], g.vertices) == g.vertices
    # stuck vertices of both players
    g = to_symbolic(explicit([1, 0, 3], [1, 0, 0], [[], [], [0, 1]]))
    t = totalize(g)
    assert t.count() == 5
    st_ = g.store
    W = zielonka(t)
    assert ids(st_, st_.intersect(W[ELOISE], g.vertices)) == {0, 2}


@pytest.mark.parametrize("batch", range(10))
def test_random_games_agree_with_explicit(batch):
    # 10 batches of 50 games: 500 in all
    rng = random.Random(500 + batch)
    for k in range(50):
        n = rng.randint(1, 100)
        prio, owner, succ = oracles.random_game(rng, n, max_prio=3, stuck=k % 2 == 0)
        g = explicit(prio, owner, succ, rng.randrange(n))
        want = solve_explicit(g)
        assert want[0] | want[1] == set(range(n)) and not want[0] & want[1]
        assert symbolic_regions(g) == want


@pytest.mark.parametrize("seed", range(60))
def test_explicit_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    prio, owner, succ = oracles.random_game(rng, n, max_prio=3, stuck=seed % 3 == 0, max_out=2)
    W0, W1 = solve_explicit(explicit(prio, owner, succ))
    want = oracles.brute_force_winners(prio, owner, succ)
    assert [0 if v in W0 else 1 for v in range(n)] == want


def test_attractor_examples():
    # e1 -> a1 -> u, e1 Eloise, a1 Abelard with its only edge into U
    g = to_symbolic(explicit([0, 0, 0, 0], [0, 1, 0, 1], [[1], [2], [2], [3]]))
    st_ = g.store
    u = st_.vector((0, 2))
    assert ids(st_, attractor(g, ELOISE, u)) == {0, 1, 2}
    assert attractor(g, ELOISE, g.vertices) == g.vertices


@pytest.mark.parametrize("batch", range(4))
def test_attractor_matches_bfs(batch):
    rng = random.Random(70 + batch)
    for _ in range(50):
        n = rng.randint(1, 50)
        prio, owner, succ = oracles.random_game(rng, n, stuck=False)
        g = to_symbolic(explicit(prio, owner, succ))
        st_ = g.store
        target = rng.sample(range(n), rng.randint(0, n))
        p = rng.randint(0, 1)
        got = ids(st_, attractor(g, p, st_.build(sorted((i // 10, i % 10) for i in target))))
        assert got == oracles.attractor_bfs(owner, succ, p, target)
        # the complement is a trap for p
        rest = set(range(n)) - got
        for v in rest:
            if owner[v] == p:
                assert not set(succ[v]) & got
            else:
                assert set(succ[v]) & rest


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 1))
def test_attractor_monotone_and_idempotent(seed, p):
    rng = random.Random(seed)
    n = rng.randint(1, 30)
    prio, owner, succ = oracles.random_game(rng, n, stuck=False)
    g = to_symbolic(explicit(prio, owner, succ))
    s = g.store
    small = sorted(rng.sample(range(n), rng.randint(0, n)))
    big = sorted(set(small) | set(rng.sample(range(n), rng.randint(0, n))))
    enc = lambda xs: s.build([(i // 10, i % 10) for i in xs])  # noqa: E731
    a_small = attractor(g, p, enc(small))
    a_big = attractor(g, p, enc(big))
    assert s.minus(a_small, a_big) == FALSE
    assert attractor(g, p, a_big) == a_big


@pytest.mark.parametrize("seed", range(20))
def test_group_order_does_not_matter(seed):
    rng = random.Random(900 + seed)
    n = rng.randint(5, 60)
    prio, owner, succ = oracles.random_game(rng, n, stuck=True)
    g = to_symbolic(explicit(prio, owner, succ))
    base = solve(g).won
    for _ in range(3):
        rng.shuffle(g.groups)
        assert solve(g).won == base


def test_ten_thousand_nested_subgames():
    # a chain with distinct priorities peels one vertex per level
    n = 10_000
    succ = [[i + 1] for i in range(n - 1)] + [[n - 1]]
    g = to_symbolic(explicit(list(range(n)), [i % 2 for i in range(n)], succ))
    sol = solve(g)
    assert sol.recursive_calls > n
    # the final self-loop has odd priority, so Abelard wins everywhere
    assert sol.won[ELOISE] == FALSE and sol.won[ABELARD] == g.vertices
    assert sol.init_winner == ABELARD
