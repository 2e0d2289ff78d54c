import random

import pytest
from hypothesis import given, settings, strategies as st

from randpbes import random_pbes
from symparity.besoracle import expand, solve_bruteforce, solve_gauss, solve_pbes
from symparity.builder import SIMPLE, SPLIT, Builder
from symparity.data import BOOL, Const, Var
from symparity.generators import gen_buffer, gen_tictactoe
from symparity.parser import parse_spec
from symparity.pbes import (
    Equation, PAnd, PExists, PForall, PImp, POr, PVal, PVar, Pbes, check_wellformed,
    show_pf, translate,
)
from symparity.ppg import CONJ, DISJ, assign_priorities, check_ppg, normalize_ppg
from symparity.solver import solve


def test_buffer_system_is_already_a_ppg():
    lps, phi = parse_spec(gen_buffer())
    p = translate(lps, phi)
    g = normalize_ppg(p)
    assert [e.name for e in g.equations] == p.names()
    assert [e.kind for e in g.equations] == [CONJ] * 5 + [DISJ] * 3 + [CONJ] * 3
    assert [show_pf(e.rhs) for e in g.equations] == [show_pf(e.rhs) for e in p.equations]
    assert check_ppg(g) == []


def test_single_hoist():
    X = [PVar(f"X{i}") for i in range(1, 4)]
    eqs = [Equation("mu", "X", (), PAnd((X[0], POr((X[1], X[2])))))]
    eqs += [Equation("mu", f"X{i}", (), PVal(Const(True))) for i in range(1, 4)]
    g = normalize_ppg(Pbes(tuple(eqs), "X", ()))
    names = [e.name for e in g.equations]
    assert len(names) == 5
    fresh = names[1]
    assert fresh not in ("X1", "X2", "X3")
    top = g.equation("X")
    assert top.kind == CONJ and top.atoms == (X[0], PVar(fresh))
    f = g.equation(fresh)
    assert f.kind == DISJ and f.atoms == (X[1], X[2]) and f.sigma == "mu"


def test_guard_atoms_and_quantifiers():
    b = PVal(Var("b"))
    x = PVar("X", (Var("b"),))
    conj = PForall("c", BOOL, PImp(b, PVar("X", (Var("c"),))))
    disj = PExists("c", BOOL, PAnd((b, PVar("X", (Var("c"),)))))
    p = Pbes((Equation("nu", "X", (("b", BOOL),), PAnd((PImp(b, x), conj))),
              Equation("mu", "Y", (("b", BOOL),), POr((disj, x)))), "X", (True,))
    g = normalize_ppg(p)
    # both fit their equation kind without fresh equations
    assert [e.name for e in g.equations] == ["X", "Y"]
    assert g.equation("X").kind == CONJ and g.equation("Y").kind == DISJ
    assert check_ppg(g) == []


def test_tictactoe_classification():
    lps, phi = parse_spec(gen_tictactoe())
    g = normalize_ppg(translate(lps, phi))
    assert check_ppg(g) == []
    assert g.equation("Z").kind == CONJ
    assert g.equation("Z_2").kind == DISJ


def _solved(pp, mode):
    b = Builder(assign_priorities(pp), mode)
    game = b.explore(max_states=20000)
    return solve(game).init_winner == 0


@pytest.mark.parametrize("seed", range(120))
def test_normalisation_preserves_solution(seed):
    rng = random.Random(seed)
    p = random_pbes(rng)
    assert check_wellformed(p) == []
    want = solve_pbes(p, max_vars=1000)
    g = normalize_ppg(p)
    assert check_ppg(g) == []
    assert solve_pbes(g.to_pbes(), max_vars=1000) == want
    # re-normalising changes nothing
    assert normalize_ppg(g.to_pbes()).equations == g.equations
    # and the instantiated game agrees under both partitionings
    assert _solved(g, SIMPLE) == want
    assert _solved(g, SPLIT) == want


@pytest.mark.parametrize("seed", range(80))
def test_gauss_matches_brute_force(seed):
    rng = random.Random(1000 + seed)
    for _ in range(20):
        p = random_pbes(rng, max_eqs=3, depth=2)
        bes = expand(p, max_vars=200)
        if len(bes.rhs) <= 10:
            break
    else:
        pytest.skip("no small instance drawn")
    assert solve_gauss(bes) == solve_bruteforce(bes)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_priorities_non_decreasing(seed):
    p = random_pbes(random.Random(seed), max_eqs=6)
    prios = [e.priority for e in assign_priorities(normalize_ppg(p)).equations]
    assert prios == sorted(prios)
    assert all(b - a in (0, 1) for a, b in zip(prios, prios[1:]))


def test_oracle_on_benchmarks():
    for spec, want in ((gen_buffer(), True), (gen_tictactoe(), False)):
        lps, phi = parse_spec(spec)
        for structured in (True, False):
            assert solve_pbes(translate(lps, phi, structured), max_vars=200_000) is want
