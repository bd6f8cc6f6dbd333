import pytest
from hypothesis import given, settings, strategies as st

from chorc.epp import MergeError, ProjectionError, annotate, merge, project, project_behaviour, prunes, prunes_behaviour
from chorc.network import NetConfig, apply_net, enabled_net, LocalIf
from chorc.seq import SeqConfig, step_seq
from chorc.surface import format_behaviour, parse_behaviour, parse_chor, parse_network, parse_state, print_network
from chorc.syntax import BEND, Call, Def, END, Network
from chorc.verify import GenConfig, gen_chor

from conftest import chor

B = parse_behaviour


def test_annotate_recursive():
    c = annotate(parse_chor("def X = {p.x -> q.y; X} in {X}"))
    assert c.procs == ("p", "q")
    assert c.main == Call("X", ("p", "q"))
    assert c.body.cont == Call("X", ("p", "q"))


def test_annotate_empty_body():
    c = annotate(parse_chor("def X = {0} in {p.x -> q.y}"))
    assert c.procs == ()
    assert project_behaviour(c, "p") == B("q!x")


def test_annotate_fixpoint_through_nested_call():
    src = "def X = {p.x -> q.y; def Y = {r.a -> s.b; X} in {Y}} in {X}"
    c = annotate(parse_chor(src))
    assert c.procs == ("p", "q", "r", "s")
    inner = c.body.cont
    assert isinstance(inner, Def) and inner.procs == ("p", "q", "r", "s")


def test_project_display():
    n = project(chor("projection.chor"))
    assert n["p"] == B("{q!x, q?y}; r?x")
    assert n["q"] == B("{p!x, p?y}")
    assert n["r"] == B("p!z")


def test_project_remark1():
    n = project(chor("remark1.chor"))
    assert n["q"] == B("p&{L: p?x, R: p!y}")
    assert n["p"] == B("if e then {q(+)[L]; q!x} else {q(+)[R]; q?y}")


def test_project_crawler():
    n = project(chor("crawler.chor"))
    assert set(n) == {"p", "s1", "s2"}
    for s in ("s1", "s2"):
        assert n[s] == B("p?t; p!priceof(t)")


def test_project_end_and_pn():
    assert project(END) == Network()
    c = chor("remark1.chor")
    assert project_behaviour(annotate(c), "zz") == BEND


def test_unprojectable_names_q():
    with pytest.raises(ProjectionError) as e:
        project(chor("unprojectable.chor"))
    assert e.value.kind == "MergeConflict" and e.value.process == "q"
    assert e.value.location == ()


def test_merge_examples():
    assert merge(B("p&{L: q!x}"), B("p&{R: q?y}")) == B("p&{L: q!x, R: q?y}")
    b = B("{q!x, r?y}; p&{L: 0}")
    assert merge(b, b) == b
    with pytest.raises(MergeError):
        merge(B("q!e"), BEND)
    with pytest.raises(MergeError):
        merge(B("{q!x, r!y}"), B("q!x"))


def test_prunes_examples():
    assert prunes_behaviour(B("p&{L: q!x}"), B("p&{L: q!x, R: q?y}"))
    assert not prunes_behaviour(B("p&{L: q!x, R: q?y}"), B("p&{L: q!x}"))
    n = project(chor("crawler.chor"))
    assert prunes(n, n)


def test_prunes_after_conditional():
    c = chor("remark1.chor")
    st_ = parse_state("p.e = true")
    _, after = step_seq(SeqConfig(c, st_))
    ncfg = NetConfig(project(c), st_)
    _, n2 = apply_net(ncfg, LocalIf("p"))
    small = project(after.chor)
    assert small != n2.net
    assert prunes(small, n2.net)


def test_prunes_with_recursion():
    big = B("def X = {q!x; X} in {X}")
    small = B("def X = {q!x; X} in {q!x; X}")
    assert prunes_behaviour(small, big)
    assert prunes_behaviour(big, small)
    assert not prunes_behaviour(B("def X = {q!y; X} in {X}"), big)


def _projected_behaviours(seed):
    c = gen_chor(GenConfig(seed=seed, max_depth=3))
    return list(project(c).values())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_merge_laws(s1, s2):
    bs = _projected_behaviours(s1) + _projected_behaviours(s2)
    for a in bs:
        assert merge(a, a) == a
        for b in bs:
            try:
                ab = merge(a, b)
            except MergeError:
                with pytest.raises(MergeError):
                    merge(b, a)
                continue
            assert merge(b, a) == ab
    for a, b, c in zip(bs, bs[1:], bs[2:]):
        try:
            left = merge(merge(a, b), c)
        except MergeError:
            continue
        assert merge(a, merge(b, c)) == left


def test_merge_associative_on_branches():
    a, b, c = B("p&{L: q!x}"), B("p&{R: q?y}"), B("p&{L: q!x, M: 0}")
    assert merge(merge(a, b), c) == merge(a, merge(b, c))
