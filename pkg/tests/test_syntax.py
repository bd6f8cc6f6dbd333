from chorc.surface import parse_chor, parse_expr
from chorc.syntax import (
    END, Bool, Com, If, Int, MCom, MSel, Sel, State, Str, Tagged, UNIT, Var, eval_expr, free_vars,
    pn_chor, pn_multicom, tn_multisel,
)

from conftest import chor


def ev(src, **local):
    return eval_expr(parse_expr(src), local)


def test_eval_arithmetic():
    assert ev("1 + 2") == Int(3)
    assert ev("2 * 3 - 1") == Int(5)
    assert ev("1 < 2") == Bool(True)


def test_eval_variables():
    assert ev("x", x=Int(5)) == Int(5)
    assert ev("x") == UNIT


def test_eval_ctor():
    assert ev("priceof(t)", t=Str("item")) == Tagged("priceof", (Str("item"),))


def test_eval_total_on_type_errors():
    assert ev("1 + true") == UNIT
    assert ev("not 3") == UNIT
    assert ev('"a" ++ "b"') == Str("ab")
    assert ev("true and false") == Bool(False)


def test_structural_equality():
    assert ev("f(1) = f(1)") == Bool(True)
    assert ev("1 = true") == Bool(False)


def test_free_vars():
    assert free_vars(parse_expr("x + priceof(y)")) == {"x", "y"}
    assert free_vars(parse_expr("1 + 2")) == frozenset()
    assert free_vars(parse_expr("x ++ x")) == {"x"}


def test_pn_and_tn():
    a = Com("p", Var("x"), "q", "y")
    b = Com("r", Var("z"), "p", "w")
    assert pn_multicom([a]) == {"p", "q"}
    assert pn_multicom([a, b]) == {"p", "q", "r"}
    assert pn_multicom([]) == frozenset()
    assert tn_multisel([Sel("p", "q", "L")]) == {"q"}
    assert tn_multisel([Sel("p", "q", "L"), Sel("r", "s", "R")]) == {"q", "s"}
    assert tn_multisel([]) == frozenset()


def test_pn_chor():
    assert pn_chor(END) == frozenset()
    assert pn_chor(chor("crawler.chor")) == {"p", "s1", "s2"}
    assert pn_chor(If("p", Var("e"), END, END)) == {"p"}


def test_groups_are_sets():
    a = Com("p", Var("x"), "q", "y")
    b = Com("r", Var("z"), "s", "w")
    assert MCom((a, b), END) == MCom((b, a), END)
    assert MCom((a, a), END).coms == (a,)
    assert MSel((Sel("p", "r", "L"), Sel("p", "q", "L")), END) == MSel(
        (Sel("p", "q", "L"), Sel("p", "r", "L")), END)
    assert hash(parse_chor("{p.x -> q.y, r.z -> s.w}")) == hash(parse_chor("{r.z -> s.w, p.x -> q.y}"))


def test_state_defaults_and_updates():
    s = State({("p", "x"): Int(1), ("q", "y"): UNIT})
    assert len(s) == 1
    assert s.read("q", "y") == UNIT
    t = s.update([(("q", "y"), Int(2))])
    assert s.read("q", "y") == UNIT
    assert t.read("q", "y") == Int(2)
    assert t.local("q") == {"y": Int(2)}
