import random

import pytest

import oracles
from randpbes import random_pbes
from symparity.builder import (
    SIMPLE, SPLIT, BuildLimit, Builder, dependency_matrix, instantiate, make_layout, partition,
)
from symparity.data import Const
from symparity.explicit import ExplicitGame, to_symbolic
from symparity.game import (
    ABELARD, ELOISE, SymbolicGame, explicit_edges, export_pgsolver, load_game, save_game, stats,
)
from symparity.generators import gen_buffer, gen_connect_four, gen_tictactoe
from symparity.mdd import FALSE, NodeStore
from symparity.parser import parse_spec
from symparity.pbes import Equation, PAnd, PVal, PVar, Pbes, translate
from symparity.ppg import assign_priorities, normalize_ppg
from symparity.solver import solve


def ppg_of(spec, structured=True):
    lps, phi = parse_spec(spec)
    return assign_priorities(normalize_ppg(translate(lps, phi, structured)))


@pytest.fixture(scope="module")
def buffer_ppg():
    return ppg_of(gen_buffer(2, 2))


@pytest.fixture(scope="module")
def ttt_ppg():
    return ppg_of(gen_tictactoe())


def tiny(eqs, init="X"):
    return assign_priorities(normalize_ppg(Pbes(tuple(eqs), init, ())))


def test_layout_examples(buffer_ppg, ttt_ppg):
    assert make_layout(buffer_ppg).slot_names == ["Var", "q", "d"]
    assert make_layout(ttt_ppg).slot_names == ["Var"] + [f"b{k}" for k in range(1, 10)] + ["p"]
    lone = tiny([Equation("nu", "X", (), PVar("X"))])
    assert make_layout(lone).slot_names == ["Var"]


def test_partition_counts(buffer_ppg):
    lay = make_layout(buffer_ppg)
    assert len(partition(buffer_ppg, lay, SIMPLE)) == 11
    X = [PVar(f"X{i}") for i in range(1, 4)]
    eqs = [Equation("mu", "X", (), PAnd(tuple(X)))]
    eqs += [Equation("mu", f"X{i}", (), PVar("X")) for i in range(1, 4)]
    p = tiny(eqs)
    groups = partition(p, make_layout(p), SPLIT)
    assert [g.name for g in groups] == ["X#1", "X#2", "X#3", "X1", "X2", "X3"]
    with pytest.raises(ValueError):
        partition(p, make_layout(p), "clever")


def test_tictactoe_matrix_rows(ttt_ppg):
    lay = make_layout(ttt_ppg)
    rows = {g.name: set(g.deps) for g in partition(ttt_ppg, lay)}
    for k in range(1, 10):
        assert rows[f"Z_2_{k}"] == {0, k, 10}
    assert rows["Z"] == {0}
    text = dependency_matrix(partition(ttt_ppg, lay), lay)
    z = [ln for ln in text.splitlines() if ln.startswith("Z ")][0]
    assert z.split()[1:] == ["+"] + ["-"] * 10


def test_true_rhs_depends_on_var_only():
    p = tiny([Equation("nu", "X", (), PVal(Const(True)))])
    (g,) = partition(p, make_layout(p))
    assert g.deps == (0,)


def test_buffer_matrix(buffer_ppg):
    lay = make_layout(buffer_ppg)
    text = dependency_matrix(partition(buffer_ppg, lay), lay)
    # copied arguments are neither read nor written
    assert text.splitlines()[1:] == [
        "Y      +   + +", "Y_1    +   - -", "Y_1_1  +   + -", "Y_1_2  +   + -",
        "X      +   - +", "X_1    +   - -", "X_1_1  +   + -", "X_1_2  +   + -",
        "X_2    +   - -", "X_2_1  +   + -", "X_2_2  +   + +",
    ]


def _group(b, name):
    return next(g for g in b.groups if g.name == name)


def test_local_successor_examples(buffer_ppg):
    b = Builder(buffer_ppg)
    lay = b.layout
    q = lay.slot_names.index("q")
    d1, empty = lay.encode(q, ("d1",)), lay.encode(q, ())
    full = lay.encode(q, ("d1", "d2"))
    g = _group(b, "Y_1_2")
    y, y12 = lay.eq_names.index("Y"), lay.eq_names.index("Y_1_2")
    assert g.deps == (0, q)
    assert b.local_successors(g, (y12, d1)) == [(y, empty)]
    assert b.local_successors(g, (y12, empty)) == [(lay.true_sink, empty)]
    # other equations are not this group's business
    assert b.local_successors(g, (y, d1)) == []
    g = _group(b, "X_1_1")
    x11 = lay.eq_names.index("X_1_1")
    assert b.local_successors(g, (x11, full)) == [(lay.false_sink, full)]
    assert b.local_successors(g, (x11, d1)) == [(lay.true_sink, d1)]


def test_trivial_formula_two_vertices():
    p = tiny([Equation("nu", "Y", (), PVal(Const(True)))], "Y")
    g = Builder(p).explore()
    assert g.count() == 2
    assert explicit_edges(g)[1] == [[1], []]
    assert solve(g).init_winner == ELOISE


def test_successor_cache_bound(ttt_ppg):
    b = Builder(ttt_ppg)
    g = b.explore()
    st = b.store
    assert b.successor_calls == sum(st.count(gr.seen) for gr in b.groups)
    for gr in b.groups:
        sub = st.child(g.vertices, gr.eq)
        assert st.count(gr.seen) <= st.count(st.project(sub, gr.deps[1:]))


@pytest.mark.parametrize("structured", [True, False])
def test_buffer_matches_explicit_construction(buffer_ppg, structured):
    pp = buffer_ppg if structured else ppg_of(gen_buffer(2, 2), False)
    want = oracles.ppg_explicit_game(pp)
    game = Builder(pp).explore()
    assert oracles.explicit_of(game) == want
    # sinks are copied per source parameter vector, so only the non-sink
    # vertices are counted one to one
    verts = list(game.store.iter_vectors(game.vertices))
    lay = game.layout
    assert sum(v[0] < lay.true_sink for v in verts) == len(set(want) - {"true", "false"})


@pytest.mark.parametrize("seed", range(40))
def test_random_ppg_matches_explicit_construction(seed):
    pp = assign_priorities(normalize_ppg(random_pbes(random.Random(seed))))
    want = oracles.ppg_explicit_game(pp)
    assert oracles.explicit_of(Builder(pp).explore(max_states=20000)) == want


def test_edges_change_only_dependent_slots(buffer_ppg):
    g = Builder(buffer_ppg, SPLIT).explore()
    st = g.store
    verts, succ = explicit_edges(g)
    for i, v in enumerate(verts):
        one = st.vector(v)
        reached = set()
        for gr in g.groups:
            for w in st.iter_vectors(st.rel_next(one, gr.rel, gr.deps)):
                assert all(v[k] == w[k] for k in range(g.width) if k not in gr.deps)
                reached.add(w)
        assert sorted(verts.index(w) for w in reached) == succ[i]


def test_deterministic_roots(ttt_ppg):
    a = Builder(ttt_ppg, store=NodeStore()).explore()
    b = Builder(ttt_ppg, store=NodeStore()).explore()
    assert a.vertices == b.vertices
    assert [gr.rel for gr in a.groups] == [gr.rel for gr in b.groups]
    assert save_game(a) == save_game(b)


@pytest.mark.parametrize("mode", [SIMPLE, SPLIT])
def test_owner_and_priority_partitions(ttt_ppg, mode):
    g = Builder(ttt_ppg, mode).explore()
    st = g.store
    e, a = g.owner
    assert st.intersect(e, a) == FALSE
    assert st.union(e, a) == g.vertices
    total = FALSE
    for p, r in g.priorities.items():
        assert st.intersect(total, r) == FALSE
        total = st.union(total, r)
    assert total == g.vertices
    assert g.count() == 139049


def test_tictactoe_initial_vector(ttt_ppg):
    b = Builder(ttt_ppg)
    v = b.initial_vector()
    lay = b.layout
    assert lay.label(v) == "Z(b1=e, b2=e, b3=e, b4=e, b5=e, b6=e, b7=e, b8=e, b9=e, p=X)"


def test_state_cap(ttt_ppg):
    with pytest.raises(BuildLimit):
        Builder(ttt_ppg).explore(max_states=1000)


def test_export_self_loop():
    g = to_symbolic(ExplicitGame([0], [0], [[0]]))
    assert export_pgsolver(g) == 'parity 0;\n0 0 0 0 "0,0";\n'


def test_export_stuck_vertex_and_start():
    g = to_symbolic(ExplicitGame([1, 0], [1, 0], [[0, 1], []], init=1))
    text = export_pgsolver(g)
    assert text.splitlines() == ["parity 1;", "start 1;", '0 1 1 0,1 "0,0";', '1 0 0  "0,1";']
    assert text.endswith("\n")


def test_container_round_trip(buffer_ppg):
    g = Builder(buffer_ppg).explore()
    text = save_game(g)
    h = load_game(text)
    assert save_game(h) == text
    assert h.count() == g.count()
    assert solve(h).init_winner == solve(g).init_winner
    assert export_pgsolver(h) == export_pgsolver(g)


def test_stats_of_empty_game():
    st = NodeStore()
    g = SymbolicGame(st, 1, (0,), FALSE, (FALSE, FALSE), {}, [])
    s = stats(g)
    assert s["vertices"] == s["eloise"] == s["abelard"] == 0
    assert s["vertex_nodes"] == s["relation_nodes"] == s["groups"] == 0


def test_structured_relation_nodes_below_split():
    pp = ppg_of(gen_connect_four(3, 3, 3))
    simple = stats(instantiate(pp, SIMPLE).game)
    split = stats(instantiate(pp, SPLIT).game)
    assert simple["vertices"] > 0
    assert simple["relation_nodes"] < split["relation_nodes"]


def test_owners_follow_equation_kind(buffer_ppg):
    g = Builder(buffer_ppg).explore()
    lay = g.layout
    kinds = {e.name: e.kind for e in buffer_ppg.equations}
    for v in g.store.iter_vectors(g.owner[ABELARD]):
        name = lay.label(v).split("(")[0]
        assert name == "true" or kinds[name] == "conj"
