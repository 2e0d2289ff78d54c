import pytest

from symparity.data import BOOL, Const, Var
from symparity.generators import gen_buffer, gen_connect_four, gen_tictactoe
from symparity.model import ActFalse, ActName, ActNot, ActTrue, FBox, FVal, FVar
from symparity.parser import parse_spec
from symparity.pbes import (
    Equation, PNot, PVal, PVar, Pbes, PbesError, apply_group,
    check_wellformed, rhs, show_pbes, show_pf, translate,
)
from symparity.ppg import assign_priorities, normalize_ppg

BUFFER_NAMES = ["Y", "Y_1", "Y_1_1", "Y_1_2", "X", "X_1", "X_1_1", "X_1_2", "X_2", "X_2_1", "X_2_2"]

# structured buffer system; rhs texts are frozen from the translation
BUFFER_RHS = {
    "Y": "(forall d: D . (#q < 2) => X(q ++ d, d)) && Y_1(q)",
    "Y_1": "Y_1_1(q) && Y_1_2(q)",
    "Y_1_1": "(forall d': D . (#q < 2) => Y(q ++ d'))",
    "Y_1_2": "(q != []) => Y(tail(q))",
    "X": "X_1(q) && X_2(q, d)",
    "X_1": "X_1_1(q) || X_1_2(q)",
    "X_1_1": "(#q < 2)",
    "X_1_2": "(q != [])",
    "X_2": "X_2_1(q, d) && X_2_2(q, d)",
    "X_2_1": "(forall d': D . (#q < 2) => X(q ++ d', d))",
    "X_2_2": "(d != head(q) && q != []) => X(tail(q), d)",
}


@pytest.fixture(scope="module")
def buffer():
    return parse_spec(gen_buffer(2, 2))


def test_buffer_structured(buffer):
    p = translate(*buffer, structured=True)
    assert p.names() == BUFFER_NAMES
    assert [e.sigma for e in p.equations] == ["nu"] * 4 + ["mu"] * 7
    assert {e.name: show_pf(e.rhs) for e in p.equations} == BUFFER_RHS
    assert p.init_name == "Y" and p.init_args == ((),)
    assert check_wellformed(p) == []
    params = {e.name: [n for n, _ in e.params] for e in p.equations}
    assert params["Y_1_2"] == ["q"] and params["X_2_2"] == ["q", "d"]


def test_buffer_unstructured(buffer):
    p = translate(*buffer, structured=False)
    assert p.names() == ["Y", "X"]
    assert check_wellformed(p) == []
    assert "forall d'" in show_pf(p.equation("Y").rhs)


def test_show_pbes_layout(buffer):
    text = show_pbes(translate(*buffer))
    lines = text.splitlines()
    assert lines[0].startswith("pbes nu Y(q: list(D, 2)) = ")
    assert lines[-1] == "init Y([]);"
    assert len(lines) == 12


def test_tictactoe_names_and_move_equation():
    lps, phi = parse_spec(gen_tictactoe())
    p = translate(lps, phi)
    names = p.names()
    assert names[0] == "Z"
    # header for <move(X)> and one equation per move summand
    assert [n for n in names if n.startswith("Z_2_")] == [f"Z_2_{k}" for k in range(1, 10)] + ["Z_2_18"]
    b1 = show_pf(p.equation("Z_2_1").rhs)
    assert b1.startswith("(X == p && b1 == e) && ")
    assert "Z_3(p, b2, b3, b4, b5, b6, b7, b8, b9, if(p == X, O, X))" in b1
    assert check_wellformed(p) == []


def test_no_modalities_single_equation():
    lps, phi = parse_spec(gen_buffer() + "form t = nu Y . #[] == 0;\n", "t")
    for structured in (True, False):
        p = translate(lps, phi, structured)
        assert p.names() == ["Y"]
        assert isinstance(p.equation("Y").rhs, PVal)


def test_top_formula_must_be_fixpoint(buffer):
    lps, _ = buffer
    _, phi = parse_spec(gen_buffer() + "form t = [true](nu Y . Y);\n", "t")
    with pytest.raises(PbesError):
        translate(lps, phi)


def test_apply_group_examples(buffer):
    lps, _ = buffer
    q, d = Var("q"), Var("d")
    assert show_pf(apply_group(1, PVar("Y", (q,)), ActTrue(), lps)) == "(q != []) => Y(tail(q))"
    got = apply_group(0, PVar("X", (q, d)), ActNot(ActName("send", (d,))), lps)
    assert show_pf(got) == "(forall d': D . (#q < 2) => X(q ++ d', d))"
    assert show_pf(apply_group(0, PVar("X", (q, d)), ActFalse(), lps)) == "true"
    dia = apply_group(1, PVar("Y", (q,)), ActTrue(), lps, box=False)
    assert show_pf(dia) == "(q != []) && Y(tail(q))"


def test_rhs_box_emits_header_and_summands(buffer):
    lps, _ = buffer
    f, eqs = rhs(FBox(ActTrue(), FVar("Y")), [("q", lps.params[0][1])], "nu",
                 lps, parent="Y")
    assert show_pf(f) == "Y_1(q)"
    assert [e.name for e in eqs] == ["Y_1", "Y_1_1", "Y_1_2"]
    assert all(e.sigma == "nu" for e in eqs)
    assert show_pf(eqs[0].rhs) == "Y_1_1(q) && Y_1_2(q)"
    assert show_pf(eqs[2].rhs) == BUFFER_RHS["Y_1_2"]
    # simple formulas produce no equations
    f, eqs = rhs(FVal(Const(True)), [], "nu", lps)
    assert f == PVal(Const(True)) and eqs == []


def test_structured_emits_m_plus_one(buffer):
    lps, _ = buffer
    _, phi = parse_spec(gen_buffer() + "form b = nu W . [true]W;\n", "b")
    p = translate(lps, phi)
    # W plus a header and one equation per summand
    assert p.names() == ["W", "W_1", "W_1_1", "W_1_2"]


def test_priorities_buffer(buffer):
    ppg = assign_priorities(normalize_ppg(translate(*buffer)))
    assert [e.priority for e in ppg.equations] == [0] * 4 + [1] * 7


def _system(sigmas):
    eqs = tuple(Equation(s, f"X{i}", (), PVar(f"X{(i + 1) % len(sigmas)}"))
                for i, s in enumerate(sigmas))
    return Pbes(eqs, "X0", ())


@pytest.mark.parametrize("sigmas, want", [
    (["nu"], [0]), (["mu"], [1]), (["nu", "mu", "nu"], [0, 1, 2]),
    (["mu", "mu", "nu", "nu", "mu"], [1, 1, 2, 2, 3]),
])
def test_priority_rule(sigmas, want):
    got = [e.priority for e in assign_priorities(normalize_ppg(_system(sigmas))).equations]
    assert got == want
    assert got == sorted(got)


def test_wellformed_diagnostics():
    e = Var("e")
    X = (("e", BOOL),)
    bad = Pbes((Equation("mu", "X", X, PNot(PVar("X", (e,)))),), "X", (True,))
    assert any("negatively" in d for d in check_wellformed(bad))
    ok = Pbes((Equation("mu", "X", X, PNot(PNot(PVar("X", (e,))))),), "X", (True,))
    assert check_wellformed(ok) == []
    dup = Pbes((Equation("mu", "X", (), PVar("X")), Equation("nu", "X", (), PVar("X"))), "X", ())
    assert any("duplicate" in d for d in check_wellformed(dup))
    loose = Pbes((Equation("mu", "X", (), PVal(Var("y"))),), "X", ())
    assert any("free variables" in d for d in check_wellformed(loose))
    unknown = Pbes((Equation("mu", "X", (), PVar("W")),), "X", ())
    assert any("unknown" in d for d in check_wellformed(unknown))


@pytest.mark.parametrize("spec", [gen_buffer(), gen_tictactoe(), gen_connect_four(4, 4)])
def test_benchmarks_wellformed(spec):
    lps, phi = parse_spec(spec)
    for structured in (True, False):
        assert check_wellformed(translate(lps, phi, structured)) == []
