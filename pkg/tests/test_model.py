import pytest

import oracles
from symparity.generators import gen_buffer, gen_connect_four, gen_tictactoe
from symparity.model import (
    FFix, ModelError, check_positive, explore_lts, is_nnf, summand_instances, to_nnf,
)
from symparity.parser import parse_document, parse_spec


def test_buffer_lts():
    lps, _ = parse_spec(gen_buffer(2, 2))
    states, trans = explore_lts(lps)
    # all lists of length <= 2 over two values
    assert len(states) == 7
    assert states[0] == ((),)
    assert ("read", ("d1",)) in {(a, args) for s, a, args, t in trans if s == 0}
    # from the empty queue nothing can be sent
    assert all(a == "read" for s, a, _, _ in trans if s == 0)


def test_send_blocked_on_empty_queue():
    lps, _ = parse_spec(gen_buffer(2, 2))
    got = list(summand_instances(lps, ((),)))
    assert [(i, a) for i, a, _, _ in got] == [(0, "read"), (0, "read")]
    got = list(summand_instances(lps, (("d2", "d1"),)))
    assert got == [(1, "send", ("d2",), (("d1",),))]


def test_tictactoe_lts_matches_enumerator():
    lps, _ = parse_spec(gen_tictactoe())
    assert len(explore_lts(lps)[0]) == oracles.ttt_lts_states() == 6172


@pytest.mark.parametrize("cols, rows", [(3, 3), (4, 3), (3, 4), (4, 4)])
def test_connect_four_lts_matches_enumerator(cols, rows):
    lps, _ = parse_spec(gen_connect_four(cols, rows))
    assert len(explore_lts(lps)[0]) == oracles.four_lts_states(cols, rows)


def test_state_cap():
    lps, _ = parse_spec(gen_tictactoe())
    with pytest.raises(ModelError):
        explore_lts(lps, max_states=100)


def test_nnf_and_positivity():
    doc = parse_document(gen_buffer() + "form n = !(mu X . [true]X && !(nu Y . <true>Y));\n")
    f = doc.formulas["n"]
    g = to_nnf(f)
    assert is_nnf(g)
    check_positive(g)
    assert isinstance(g, FFix) and g.sigma == "nu"
