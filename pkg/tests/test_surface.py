import pytest
from hypothesis import given, settings, strategies as st

from chorc.epp import project
from chorc.surface import (
    ParseError, parse_behaviour, parse_chor, parse_expr, parse_network, parse_state, print_chor,
    print_network, print_state, format_behaviour, format_expr,
)
from chorc.syntax import (
    END, BinOp, BoolLit, Branch, Call, Ctor, Def, If, Int, IntLit, MCom, MSel, Not, Recv, Send, Str,
    StrLit, ThetaGroup, Var,
)
from chorc.verify import GenConfig, gen_chor

from conftest import GOLDEN


def test_parse_exchange():
    c = parse_chor("{p.x -> q.u, q.y -> p.v}; 0")
    assert isinstance(c, MCom) and len(c.coms) == 2 and c.cont == END


def test_parse_selection_then_com():
    c = parse_chor("p -> q[L]; p.x -> q.x; 0")
    assert isinstance(c, MSel) and isinstance(c.cont, MCom) and c.cont.cont == END


def test_parse_end():
    assert parse_chor("0") == END


def test_print_examples():
    assert print_chor(END) == "0\n"
    assert print_chor(parse_chor("{p.x -> q.u}; 0")) == "p.x -> q.u\n"


def test_parse_def_if_call():
    c = parse_chor("def X = { if p.x < 2 then { p.x -> q.y; X } else { 0 } } in { X }")
    assert isinstance(c, Def) and c.main == Call("X")
    assert isinstance(c.body, If) and c.body.guard == BinOp("<", Var("x"), IntLit(2))


def test_expression_precedence():
    assert parse_expr("not a or b and c = 1 + 2 * 3") == BinOp(
        "or", Not(Var("a")),
        BinOp("and", Var("b"), BinOp("=", Var("c"), BinOp("+", IntLit(1), BinOp("*", IntLit(2), IntLit(3))))))
    assert parse_expr("f()") == Ctor("f", ())
    assert parse_expr("f") == Var("f")
    assert parse_expr("-3") == IntLit(-3)
    for src in ("(1 + 2) * 3", "1 - (2 - 3)", "not (a and b)", 'g("s", true, x)'):
        e = parse_expr(src)
        assert parse_expr(format_expr(e)) == e


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_chor("p.x -> q.y;\n  p -> ")
    assert e.value.line == 2
    with pytest.raises(ParseError):
        parse_chor("{p.x -> q.y, p.x -> q.y}")
    with pytest.raises(ParseError):
        parse_chor("{p.x -> q.y, p -> q[L]}")


def test_parse_network_examples():
    n = parse_network("p |> {q!x, q?y}; 0 | q |> {p!x, p?y}; 0")
    assert set(n) == {"p", "q"}
    assert n["p"] == ThetaGroup((Send("q", Var("x")), Recv("q", "y")), n["p"].cont)
    b = parse_network("q |> p&{L: p?x, R: p!y}")["q"]
    assert isinstance(b, Branch) and b.labels == {"L", "R"}
    assert len(parse_network("0")) == 0
    assert print_network(parse_network("0")) == "0\n"
    with pytest.raises(ParseError):
        parse_network("p |> 0 | p |> q!x")


def test_parse_state_examples():
    s = parse_state("p.x = 1\nq.x = 2")
    assert len(s) == 2 and s.read("q", "x") == Int(2)
    assert len(parse_state("")) == 0
    assert parse_state('p.t = "item"').read("p", "t") == Str("item")
    with pytest.raises(ParseError):
        parse_state("p.x = 1\np.x = 2")
    s = parse_state('p.a = -2\np.b = f(1, "x")\np.c = true')
    assert parse_state(print_state(s)) == s


def test_golden_round_trip():
    files = sorted(GOLDEN.glob("*.chor"))
    assert files
    for f in files:
        c = parse_chor(f.read_text())
        assert parse_chor(print_chor(c)) == c, f.name
        assert print_chor(parse_chor(print_chor(c))) == print_chor(c)
    for f in sorted(GOLDEN.glob("*.net")):
        n = parse_network(f.read_text())
        assert parse_network(print_network(n)) == n


def test_behaviour_syntax():
    b = parse_behaviour("def X = {q(+)[L]; if x then {X} else {0}} in {X}")
    assert parse_behaviour(format_behaviour(b)) == b


exprs = st.recursive(
    st.one_of(
        st.integers(-5, 50).map(IntLit),
        st.booleans().map(BoolLit),
        st.text("ab \"\\", max_size=3).map(StrLit),
        st.sampled_from(["x", "y", "z"]).map(Var),
    ),
    lambda sub: st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*", "<", "=", "and", "or", "++"]), sub, sub).map(
            lambda t: BinOp(*t)),
        sub.map(Not),
        st.tuples(st.sampled_from(["f", "g"]), st.lists(sub, max_size=2)).map(
            lambda t: Ctor(t[0], tuple(t[1]))),
    ),
    max_leaves=8,
)


@given(exprs)
def test_expr_round_trip(e):
    assert parse_expr(format_expr(e)) == e


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_chor_and_network_round_trip(seed, projectable):
    c = gen_chor(GenConfig(seed=seed, require_projectable=projectable))
    assert parse_chor(print_chor(c)) == c
    if projectable:
        n = project(c)
        assert parse_network(print_network(n)) == n
